#include "fracvem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracvem/errors.hpp"

namespace fracvem {

namespace {

int side_index(BoundarySide s) {
    switch (s) {
    case BoundarySide::left: return 0;
    case BoundarySide::right: return 1;
    case BoundarySide::bottom: return 2;
    case BoundarySide::top: return 3;
    default: return -1;
    }
}

// Outward sign of the tangential flux at a branch end (0 start, 1 end).
int end_sign(int end) { return end == 0 ? -1 : 1; }

struct LocalDof {
    Index g;
    double c;
};

std::vector<LocalDof> cell_dofs(const MixedDimMesh &md, const DofMap &dofs, Index cell) {
    const Cell &c = md.bulk.cell(cell);
    std::vector<LocalDof> out(c.faces.size());
    for (std::size_t j = 0; j < c.faces.size(); ++j) {
        const Index f = c.faces[j];
        if (dofs.face_dof[f] >= 0) {
            out[j] = {dofs.face_dof[f], 1.0};
        } else {
            const Index m = md.mortar_of(f, cell);
            if (m < 0) throw NumericError("fracture face without mortar cell");
            out[j] = {dofs.lambda(m), static_cast<double>(c.signs[j])};
        }
    }
    return out;
}

}  // namespace

BoundaryConditions side_bc(const MixedDimMesh &md, const SideConditions &sides) {
    BoundaryConditions bc = side_bc(md.bulk, sides);
    for (std::size_t b = 0; b < md.branches.size(); ++b) {
        const Branch &br = md.branches[b];
        for (int end = 0; end < 2; ++end) {
            const EndKind kind = end == 0 ? br.start_kind : br.end_kind;
            if (kind != EndKind::boundary) continue;
            const int s = side_index(end == 0 ? br.start_side : br.end_side);
            if (s < 0) continue;
            const BcValue &v = sides[s];
            bc.fracture[{static_cast<Index>(b), end}] =
                v.type == BcType::pressure ? v : BcValue{BcType::flux, 0.0};
        }
    }
    return bc;
}

BoundaryConditions side_bc(const PolyMesh &mesh, const SideConditions &sides) {
    BoundaryConditions bc;
    bc.faces.assign(mesh.num_faces(), {});
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        const int s = side_index(mesh.face(static_cast<Index>(f)).side);
        if (s >= 0) bc.faces[f] = sides[s];
    }
    return bc;
}

BoundaryConditions face_bc(const PolyMesh &mesh, const std::function<BcValue(const Face &)> &rule) {
    BoundaryConditions bc;
    bc.faces.assign(mesh.num_faces(), {});
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        if (mesh.is_boundary(static_cast<Index>(f))) bc.faces[f] = rule(mesh.face(static_cast<Index>(f)));
    }
    return bc;
}

DofMap make_dof_map(const MixedDimMesh &md) {
    DofMap d;
    d.face_dof.assign(md.bulk.num_faces(), -1);
    for (std::size_t f = 0; f < md.bulk.num_faces(); ++f) {
        if (!md.is_fracture_face(static_cast<Index>(f))) d.face_dof[f] = d.n_u++;
    }
    d.n_p = static_cast<Index>(md.bulk.num_cells());
    for (const SegmentMesh &s : md.fractures) {
        d.branch_face_offset.push_back(d.n_ug);
        d.branch_cell_offset.push_back(d.n_pg);
        d.n_ug += static_cast<Index>(s.num_faces());
        d.n_pg += static_cast<Index>(s.num_cells());
    }
    d.n_lambda = static_cast<Index>(md.mortars.size());
    d.n_pi = static_cast<Index>(md.intersections.size());
    return d;
}

SystemBuilder::SystemBuilder(DofMap dofs) : dofs_(std::move(dofs)) {
    rhs_ = Eigen::VectorXd::Zero(dofs_.total());
}

SparseSystem SystemBuilder::finalize() {
    const Index n = dofs_.total();
    std::vector<char> fixed(n, 0);
    for (const auto &entry : fixed_) fixed[entry.first] = 1;
    // Row replacement: fixed rows become identity rows, the columns stay.
    std::vector<Triplet> kept;
    kept.reserve(triplets_.size() + fixed_.size());
    for (const Triplet &t : triplets_) {
        if (!fixed[t.row]) kept.push_back(t);
    }
    for (auto [i, v] : fixed_) {
        kept.push_back({i, i, 1.0});
        rhs_[i] = v;
    }
    SparseSystem s;
    s.matrix = SparseMatrix::from_triplets(n, std::move(kept));
    s.rhs = rhs_;
    s.dofs = dofs_;
    return s;
}

void assemble_intersections(const MixedDimMesh &md, SystemBuilder &sys) {
    const DofMap &d = sys.dofs();
    for (std::size_t i = 0; i < md.intersections.size(); ++i) {
        const IntersectionPoint &ip = md.intersections[i];
        if (ip.branches.size() < 2) {
            throw NumericError("intersection with fewer than two branches");
        }
        const double eta = ip.measure / ip.permeability;
        const Index pi = d.pi(static_cast<Index>(i));
        for (std::size_t k = 0; k < ip.branches.size(); ++k) {
            const Index b = ip.branches[k];
            const int end = ip.alpha[k] > 0 ? 0 : 1;
            const Index pt = end == 0 ? 0 : static_cast<Index>(md.fractures[b].num_faces()) - 1;
            const Index u = d.ug(b, pt);
            const double s = end_sign(end);
            sys.add(u, u, eta);
            sys.add(u, pi, s);
            sys.add(pi, u, s);
        }
    }
}

SparseSystem assemble_fractured(const MixedDimMesh &md, const PermeabilityField &k,
                                const BoundaryConditions &bc, const SourceField &f, Exec exec) {
    const PolyMesh &mesh = md.bulk;
    SystemBuilder sys(make_dof_map(md));
    const DofMap &d = sys.dofs();
    if (bc.faces.size() != mesh.num_faces()) {
        throw ConfigError("boundary conditions do not match the mesh");
    }
    if (!f.bulk.empty() && f.bulk.size() != mesh.num_cells()) {
        throw ConfigError("bulk source size does not match the mesh");
    }

    const auto local = all_local_matrices(mesh, k, exec);
    const auto nc = static_cast<long>(mesh.num_cells());
    std::vector<std::vector<Triplet>> per_cell(mesh.num_cells());
    auto cell_triplets = [&](long c) {
        const auto ld = cell_dofs(md, d, static_cast<Index>(c));
        const Eigen::MatrixXd a = local[c].full();
        const Index p = d.p(static_cast<Index>(c));
        auto &out = per_cell[c];
        out.reserve(ld.size() * (ld.size() + 2));
        for (std::size_t i = 0; i < ld.size(); ++i) {
            for (std::size_t j = 0; j < ld.size(); ++j) {
                out.push_back({ld[i].g, ld[j].g, ld[i].c * ld[j].c * a(i, j)});
            }
            const double b = ld[i].c * local[c].div(static_cast<Eigen::Index>(i));
            out.push_back({ld[i].g, p, b});
            out.push_back({p, ld[i].g, b});
        }
    };
    if (exec == Exec::serial) {
        for (long c = 0; c < nc; ++c) cell_triplets(c);
    } else {
#pragma omp parallel for schedule(static)
        for (long c = 0; c < nc; ++c) cell_triplets(c);
    }
    // Ordered reduction keeps the triplet list identical for both paths.
    for (const auto &t : per_cell) sys.append(t);

    bool has_pressure = false;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        if (!f.bulk.empty()) sys.add_rhs(d.p(static_cast<Index>(c)), -mesh.cell(static_cast<Index>(c)).area * f.bulk[c]);
    }
    for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi) {
        const auto face = static_cast<Index>(fi);
        if (!mesh.is_boundary(face)) continue;
        const BcValue &v = bc.faces[fi];
        const Index u = d.face_dof[fi];
        switch (v.type) {
        case BcType::pressure:
            sys.add_rhs(u, -mesh.face(face).measure * v.value);
            has_pressure = true;
            break;
        case BcType::flux: sys.fix(u, v.value); break;
        case BcType::none:
            throw ConfigError("missing boundary condition on face " + std::to_string(fi));
        }
    }

    // Fracture segments.
    for (std::size_t b = 0; b < md.fractures.size(); ++b) {
        const SegmentMesh &seg = md.fractures[b];
        const Branch &br = md.branches[b];
        const auto bi = static_cast<Index>(b);
        for (std::size_t s = 0; s < seg.num_cells(); ++s) {
            const auto si = static_cast<Index>(s);
            const double len = seg.cell_length(s);
            const LocalMatrices lm = fracture_local_matrices(len, br.aperture, br.tangential_permeability);
            const Eigen::MatrixXd a = lm.full();
            const Index u[2] = {d.ug(bi, si), d.ug(bi, si + 1)};
            const Index p = d.pg(bi, si);
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) sys.add(u[i], u[j], a(i, j));
                sys.add(u[i], p, lm.div(i));
                sys.add(p, u[i], lm.div(i));
            }
            if (!f.fracture.empty()) sys.add_rhs(p, -len * f.fracture.at(b).at(s));
        }
        for (int end = 0; end < 2; ++end) {
            const EndKind kind = end == 0 ? seg.start_kind : seg.end_kind;
            const Index u = d.ug(bi, end == 0 ? 0 : static_cast<Index>(seg.num_faces()) - 1);
            const double s = end_sign(end);
            if (kind == EndKind::tip_noflow) {
                sys.fix(u, 0.0);
            } else if (kind == EndKind::boundary) {
                auto it = bc.fracture.find({bi, end});
                if (it == bc.fracture.end() || it->second.type == BcType::none) {
                    throw ConfigError("missing boundary condition at the end of fracture branch " +
                                      std::to_string(b));
                }
                if (it->second.type == BcType::pressure) {
                    sys.add_rhs(u, -s * it->second.value);
                    has_pressure = true;
                } else {
                    sys.fix(u, s * it->second.value);
                }
            }
        }
    }

    // Mortar cells: Robin term and coupling with the fracture pressure.
    for (std::size_t m = 0; m < md.mortars.size(); ++m) {
        const MortarCell &mc = md.mortars[m];
        const Branch &br = md.branches[mc.branch];
        const double eta = br.aperture / br.normal_permeability;
        const Index l = d.lambda(static_cast<Index>(m));
        const Index p = d.pg(mc.branch, mc.segment);
        sys.add(l, l, eta * mc.measure);
        sys.add(l, p, mc.measure);
        sys.add(p, l, mc.measure);
    }

    assemble_intersections(md, sys);

    if (!has_pressure) {
        if (!bc.gauge) {
            throw ConfigError("no pressure condition: request a gauge for pure flux problems");
        }
        sys.fix(d.p(0), 0.0);
    }
    return sys.finalize();
}

SparseSystem assemble_bulk(const PolyMesh &mesh, const PermeabilityField &k,
                           const BoundaryConditions &bc, const SourceField &f, Exec exec) {
    return assemble_fractured(bulk_only(mesh), k, bc, f, exec);
}

std::vector<double> total_flux_scaling(const MixedDimMesh &md, const DofMap &d) {
    std::vector<double> w(d.total(), 1.0);
    for (std::size_t f = 0; f < md.bulk.num_faces(); ++f) {
        if (d.face_dof[f] >= 0) w[d.face_dof[f]] = 1.0 / md.bulk.face(static_cast<Index>(f)).measure;
    }
    for (Index m = 0; m < d.n_lambda; ++m) w[d.lambda(m)] = 1.0 / md.mortars[m].measure;
    return w;
}

double outward_flux(const MixedDimMesh &md, const DofMap &dofs, const Eigen::VectorXd &x,
                    Index cell, std::size_t j) {
    const Cell &c = md.bulk.cell(cell);
    const Index f = c.faces[j];
    if (dofs.face_dof[f] >= 0) return c.signs[j] * x[dofs.face_dof[f]];
    return x[dofs.lambda(md.mortar_of(f, cell))];
}

FlowSolution split_solution(const MixedDimMesh &md, const DofMap &d, const Eigen::VectorXd &x) {
    FlowSolution s;
    const PolyMesh &mesh = md.bulk;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) s.cell_pressure.push_back(x[d.p(static_cast<Index>(c))]);
    s.face_flux.resize(mesh.num_faces());
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        if (d.face_dof[f] >= 0) {
            s.face_flux[f] = x[d.face_dof[f]];
        } else {
            // Mean of the two sides expressed along the face normal.
            const auto &fm = md.face_mortars[f];
            const auto &fc = mesh.face_cells(static_cast<Index>(f));
            double sum = 0.0;
            for (Index m : fm) {
                const double v = x[d.lambda(m)];
                sum += md.mortars[m].bulk_cell == fc[0] ? v : -v;
            }
            s.face_flux[f] = 0.5 * sum;
        }
    }
    for (std::size_t b = 0; b < md.fractures.size(); ++b) {
        std::vector<double> u, p;
        for (std::size_t k = 0; k < md.fractures[b].num_faces(); ++k) {
            u.push_back(x[d.ug(static_cast<Index>(b), static_cast<Index>(k))]);
        }
        for (std::size_t k = 0; k < md.fractures[b].num_cells(); ++k) {
            p.push_back(x[d.pg(static_cast<Index>(b), static_cast<Index>(k))]);
        }
        s.fracture_flux.push_back(std::move(u));
        s.fracture_pressure.push_back(std::move(p));
    }
    for (Index m = 0; m < d.n_lambda; ++m) s.mortar_flux.push_back(x[d.lambda(m)]);
    for (Index i = 0; i < d.n_pi; ++i) s.intersection_pressure.push_back(x[d.pi(i)]);
    return s;
}

double Conservation::worst() const {
    double w = 0.0;
    for (double r : residual) w = std::max(w, r);
    return w;
}

Conservation conservation_residuals(const MixedDimMesh &md, const DofMap &d,
                                    const Eigen::VectorXd &x, const SourceField &f) {
    Conservation out;
    const PolyMesh &mesh = md.bulk;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const Cell &cell = mesh.cell(static_cast<Index>(c));
        double s = 0.0;
        for (std::size_t j = 0; j < cell.faces.size(); ++j) {
            const double q = outward_flux(md, d, x, static_cast<Index>(c), j) * mesh.face(cell.faces[j]).measure;
            s += q;
            out.max_flux = std::max(out.max_flux, std::abs(q));
        }
        const double src = f.bulk.empty() ? 0.0 : f.bulk[c];
        out.residual.push_back(std::abs(s - cell.area * src));
    }
    for (std::size_t b = 0; b < md.fractures.size(); ++b) {
        const SegmentMesh &seg = md.fractures[b];
        for (std::size_t k = 0; k < seg.num_cells(); ++k) {
            const auto bi = static_cast<Index>(b);
            const auto ki = static_cast<Index>(k);
            const double u0 = x[d.ug(bi, ki)];
            const double u1 = x[d.ug(bi, ki + 1)];
            const auto &fm = md.face_mortars[md.segment_faces[b][k]];
            const double len = seg.cell_length(k);
            const double exchange = len * (x[d.lambda(fm[0])] + x[d.lambda(fm[1])]);
            const double src = f.fracture.empty() ? 0.0 : f.fracture[b][k];
            out.residual.push_back(std::abs(u1 - u0 - exchange - len * src));
            out.max_flux = std::max({out.max_flux, std::abs(u0), std::abs(u1)});
        }
    }
    return out;
}

std::vector<double> intersection_traces(const MixedDimMesh &md, const DofMap &d,
                                        const Eigen::VectorXd &x, Index iota) {
    const IntersectionPoint &ip = md.intersections[iota];
    const double eta = ip.measure / ip.permeability;
    std::vector<double> out;
    for (std::size_t k = 0; k < ip.branches.size(); ++k) {
        const Index b = ip.branches[k];
        const int end = ip.alpha[k] > 0 ? 0 : 1;
        const Index pt = end == 0 ? 0 : static_cast<Index>(md.fractures[b].num_faces()) - 1;
        const double q = end_sign(end) * x[d.ug(b, pt)];
        out.push_back(x[d.pi(iota)] + eta * q);
    }
    return out;
}

TpfaResult solve_tpfa(const PolyMesh &mesh, const std::vector<double> &k,
                      const BoundaryConditions &bc, const std::vector<double> &source) {
    const auto n = static_cast<Index>(mesh.num_cells());
    if (k.size() != mesh.num_cells()) throw ConfigError("permeability size does not match the mesh");
    std::vector<Triplet> t;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    std::vector<double> trans(mesh.num_faces(), 0.0);
    bool has_pressure = false;
    for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi) {
        const auto f = static_cast<Index>(fi);
        const auto &fc = mesh.face_cells(f);
        if (!mesh.is_boundary(f)) {
            const double tr = tpfa_transmissibility(mesh, f, k[fc[0]], k[fc[1]]);
            trans[fi] = tr;
            t.push_back({fc[0], fc[0], tr});
            t.push_back({fc[1], fc[1], tr});
            t.push_back({fc[0], fc[1], -tr});
            t.push_back({fc[1], fc[0], -tr});
            continue;
        }
        const BcValue &v = bc.faces.at(fi);
        if (v.type == BcType::pressure) {
            const double th = tpfa_half(mesh, f, fc[0], k[fc[0]]);
            trans[fi] = th;
            t.push_back({fc[0], fc[0], th});
            rhs[fc[0]] += th * v.value;
            has_pressure = true;
        } else if (v.type == BcType::flux) {
            rhs[fc[0]] -= v.value * mesh.face(f).measure;
        } else {
            throw ConfigError("missing boundary condition on face " + std::to_string(fi));
        }
    }
    for (Index c = 0; c < n; ++c) {
        if (!source.empty()) rhs[c] += source[c] * mesh.cell(c).area;
    }
    if (!has_pressure) {
        if (!bc.gauge) throw ConfigError("no pressure condition: request a gauge for pure flux problems");
        std::erase_if(t, [](const Triplet &x) { return x.row == 0 || x.col == 0; });
        t.push_back({0, 0, 1.0});
        rhs[0] = 0.0;
    }
    const SparseMatrix a = SparseMatrix::from_triplets(n, std::move(t));
    const Eigen::VectorXd p = solve_direct(a, rhs);
    TpfaResult r;
    r.pressure.assign(p.data(), p.data() + n);
    r.face_flux.resize(mesh.num_faces());
    for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi) {
        const auto f = static_cast<Index>(fi);
        const auto &fc = mesh.face_cells(f);
        if (!mesh.is_boundary(f)) {
            r.face_flux[fi] = trans[fi] * (p[fc[0]] - p[fc[1]]);
        } else if (bc.faces[fi].type == BcType::pressure) {
            r.face_flux[fi] = trans[fi] * (p[fc[0]] - bc.faces[fi].value);
        } else {
            r.face_flux[fi] = bc.faces[fi].value * mesh.face(f).measure;
        }
    }
    return r;
}

}  // namespace fracvem
