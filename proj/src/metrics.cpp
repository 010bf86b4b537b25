#include "fracvem/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fracvem/errors.hpp"
#include "locator.hpp"

namespace fracvem {

double upscale_permeability(const std::vector<double> &values, const std::vector<double> &weights,
                            MeanKind kind) {
    if (values.empty()) throw NumericError("upscaling: empty cluster");
    if (weights.size() != values.size()) throw NumericError("upscaling: weight count mismatch");
    double w = 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0)) throw NumericError("upscaling: non-positive permeability");
        w += weights[i];
        s += kind == MeanKind::arithmetic ? weights[i] * values[i] : weights[i] / values[i];
    }
    if (!(w > 0.0)) throw NumericError("upscaling: zero total weight");
    return kind == MeanKind::arithmetic ? s / w : w / s;
}

std::vector<double> upscale_field(const PolyMesh &fine, const std::vector<double> &k,
                                  const std::vector<std::vector<Index>> &coarse_to_fine, MeanKind kind) {
    std::vector<double> out;
    out.reserve(coarse_to_fine.size());
    for (const auto &group : coarse_to_fine) {
        std::vector<double> v, w;
        for (Index c : group) {
            v.push_back(k.at(c));
            w.push_back(fine.cell(c).area);
        }
        out.push_back(upscale_permeability(v, w, kind));
    }
    return out;
}

double relative_l2_error(const std::vector<double> &p_coarse, const std::vector<double> &p_ref,
                         const std::vector<Index> &fine_to_coarse, const std::vector<double> &fine_area) {
    if (p_ref.size() != fine_to_coarse.size() || p_ref.size() != fine_area.size()) {
        throw NumericError("relative error: projection does not match the reference");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < p_ref.size(); ++i) {
        const Index c = fine_to_coarse[i];
        if (c < 0 || c >= static_cast<Index>(p_coarse.size())) {
            throw NumericError("relative error: reference cell not covered by the coarse mesh");
        }
        const double d = p_coarse[c] - p_ref[i];
        num += fine_area[i] * d * d;
        den += fine_area[i] * p_ref[i] * p_ref[i];
    }
    if (!(den > 0.0)) throw NumericError("relative error: zero reference field");
    return std::sqrt(num / den);
}

CellPieces cell_pieces(const PolyMesh &mesh) {
    CellPieces out;
    out.pieces.resize(mesh.num_cells());
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        out.pieces[c].push_back(mesh.cell_polygon(static_cast<Index>(c)));
    }
    return out;
}

CellPieces cell_pieces(const PolyMesh &fine, const std::vector<std::vector<Index>> &coarse_to_fine) {
    CellPieces out;
    out.pieces.resize(coarse_to_fine.size());
    for (std::size_t c = 0; c < coarse_to_fine.size(); ++c) {
        for (Index f : coarse_to_fine[c]) out.pieces[c].push_back(fine.cell_polygon(f));
    }
    return out;
}

std::vector<std::array<Vec2, 3>> triangulate_polygon(std::vector<Vec2> poly) {
    std::vector<std::array<Vec2, 3>> tris;
    // Drop repeated vertices, orient counter-clockwise.
    std::vector<Vec2> p;
    for (const Vec2 &v : poly) {
        if (p.empty() || distance(p.back(), v) > 0.0) p.push_back(v);
    }
    while (p.size() > 1 && distance(p.front(), p.back()) == 0.0) p.pop_back();
    if (p.size() < 3) return tris;
    if (signed_area(p) < 0.0) std::reverse(p.begin(), p.end());
    const double scale = polygon_diameter(p);
    const double eps = 1e-14 * scale * scale;
    while (p.size() > 3) {
        const std::size_t n = p.size();
        bool clipped = false;
        for (std::size_t i = 0; i < n && !clipped; ++i) {
            const Vec2 &a = p[(i + n - 1) % n];
            const Vec2 &b = p[i];
            const Vec2 &c = p[(i + 1) % n];
            const double turn = cross(b - a, c - b);
            if (turn < -eps) continue;
            if (std::abs(turn) <= eps) {
                // Collinear vertex: remove without emitting a triangle.
                p.erase(p.begin() + static_cast<std::ptrdiff_t>(i));
                clipped = true;
                break;
            }
            bool ear = true;
            for (std::size_t k = 0; k < n && ear; ++k) {
                if (k == i || k == (i + 1) % n || k == (i + n - 1) % n) continue;
                const Vec2 &q = p[k];
                if (cross(b - a, q - a) >= -eps && cross(c - b, q - b) >= -eps && cross(a - c, q - c) >= -eps) {
                    ear = false;
                }
            }
            if (ear) {
                tris.push_back({a, b, c});
                p.erase(p.begin() + static_cast<std::ptrdiff_t>(i));
                clipped = true;
            }
        }
        if (!clipped) throw MeshError("triangulation failed: polygon is not simple");
    }
    if (std::abs(signed_area(p)) > eps) tris.push_back({p[0], p[1], p[2]});
    return tris;
}

OverlapError benchmark_error(const CellPieces &method, const std::vector<double> &p_method,
                             const PolyMesh &reference, const std::vector<double> &p_ref) {
    if (p_method.size() != method.pieces.size() || p_ref.size() != reference.num_cells()) {
        throw NumericError("benchmark error: field sizes do not match the meshes");
    }
    OverlapError out;
    const auto [lo, hi] = std::minmax_element(p_ref.begin(), p_ref.end());
    out.reference_range = *hi - *lo;
    if (!(out.reference_range > 0.0)) throw NumericError("benchmark error: constant reference field");
    out.domain_area = reference.total_area();

    struct Tri {
        std::array<Vec2, 3> v;
        Index cell;
        Rect box;
    };
    std::vector<Tri> tris;
    for (std::size_t c = 0; c < reference.num_cells(); ++c) {
        for (const auto &t : triangulate_polygon(reference.cell_polygon(static_cast<Index>(c)))) {
            Rect b{std::min({t[0].x, t[1].x, t[2].x}), std::min({t[0].y, t[1].y, t[2].y}),
                   std::max({t[0].x, t[1].x, t[2].x}), std::max({t[0].y, t[1].y, t[2].y})};
            tris.push_back({t, static_cast<Index>(c), b});
        }
    }
    // Bucket the reference triangles on a uniform grid.
    const Rect dom = reference.bounding_box();
    const int nb = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(tris.size()) / 4.0)));
    auto idx = [&](double v, double a, double w) {
        return std::clamp(static_cast<int>((v - a) / w * nb), 0, nb - 1);
    };
    std::vector<std::vector<std::size_t>> grid(static_cast<std::size_t>(nb) * nb);
    for (std::size_t t = 0; t < tris.size(); ++t) {
        const Rect &b = tris[t].box;
        for (int i = idx(b.xmin, dom.xmin, dom.width()); i <= idx(b.xmax, dom.xmin, dom.width()); ++i) {
            for (int j = idx(b.ymin, dom.ymin, dom.height()); j <= idx(b.ymax, dom.ymin, dom.height()); ++j) {
                grid[static_cast<std::size_t>(j) * nb + i].push_back(t);
            }
        }
    }

    double sum = 0.0;
    std::vector<char> seen(tris.size(), 0);
    std::vector<std::size_t> touched;
    for (std::size_t m = 0; m < method.pieces.size(); ++m) {
        for (const auto &poly : method.pieces[m]) {
            Rect b{poly[0].x, poly[0].y, poly[0].x, poly[0].y};
            for (const Vec2 &v : poly) {
                b.xmin = std::min(b.xmin, v.x);
                b.ymin = std::min(b.ymin, v.y);
                b.xmax = std::max(b.xmax, v.x);
                b.ymax = std::max(b.ymax, v.y);
            }
            touched.clear();
            for (int i = idx(b.xmin, dom.xmin, dom.width()); i <= idx(b.xmax, dom.xmin, dom.width()); ++i) {
                for (int j = idx(b.ymin, dom.ymin, dom.height()); j <= idx(b.ymax, dom.ymin, dom.height()); ++j) {
                    for (std::size_t t : grid[static_cast<std::size_t>(j) * nb + i]) {
                        if (!seen[t]) {
                            seen[t] = 1;
                            touched.push_back(t);
                        }
                    }
                }
            }
            std::sort(touched.begin(), touched.end());
            for (std::size_t t : touched) {
                seen[t] = 0;
                const Tri &tri = tris[t];
                if (tri.box.xmin > b.xmax || tri.box.xmax < b.xmin || tri.box.ymin > b.ymax ||
                    tri.box.ymax < b.ymin) {
                    continue;
                }
                const double a = overlap_area(poly, tri.v);
                if (a <= 0.0) continue;
                const double d = p_method[m] - p_ref[tri.cell];
                out.overlap_area += a;
                sum += a * d * d;
            }
        }
    }
    out.error = std::sqrt(sum / out.domain_area) / out.reference_range;
    return out;
}

LineSample sample_over_line(const PolyMesh &mesh, const std::vector<double> &pressure, const Vec2 &p0,
                            const Vec2 &p1, int n) {
    if (n < 1) throw ConfigError("line sampling needs at least one sample");
    if (pressure.size() != mesh.num_cells()) throw NumericError("line sampling: field size mismatch");
    const detail::CellLocator loc(mesh);
    const Rect box = mesh.bounding_box();
    const double tol = 1e-12 * box.diameter();
    LineSample s;
    s.p0 = p0;
    s.p1 = p1;
    for (int i = 0; i < n; ++i) {
        const double t = (i + 0.5) / n;
        const Vec2 x = p0 + (p1 - p0) * t;
        Index found = -1;
        for (Index c : loc.candidates(x)) {
            if (found >= 0 && c > found) continue;
            const auto &poly = loc.polygon(c);
            bool in = point_in_polygon(x, poly);
            for (std::size_t k = 0; k < poly.size() && !in; ++k) {
                in = point_segment_distance(x, poly[k], poly[(k + 1) % poly.size()]) <= tol;
            }
            if (in) found = c;
        }
        if (found < 0) throw NumericError("line sample outside the mesh");
        s.param.push_back(t);
        s.points.push_back(x);
        s.cell.push_back(found);
        s.pressure.push_back(pressure[found]);
    }
    return s;
}

void write_line_csv(const std::string &path, const LineSample &s) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path);
    os << std::setprecision(12) << "param,x,y,p\n";
    for (std::size_t i = 0; i < s.param.size(); ++i) {
        os << s.param[i] << ',' << s.points[i].x << ',' << s.points[i].y << ',' << s.pressure[i] << '\n';
    }
    if (!os) throw Error("write failed: " + path);
}

std::string vtk_string(const VtkInput &in) {
    if (in.mesh == nullptr) throw NumericError("vtk: no mesh");
    const PolyMesh &mesh = *in.mesh;
    const std::size_t nc = mesh.num_cells();
    std::size_t nseg = 0;
    std::size_t npts = mesh.num_nodes();
    if (in.fractures != nullptr) {
        for (const auto &s : *in.fractures) {
            nseg += s.num_cells();
            npts += s.num_faces();
        }
    }
    for (const auto &f : in.cell_fields) {
        if (f.values.size() != nc) throw NumericError("vtk: field " + f.name + " has the wrong size");
    }
    for (const auto &f : in.fracture_fields) {
        if (f.values.size() != nseg) throw NumericError("vtk: field " + f.name + " has the wrong size");
    }
    if (!in.face_flux.empty() && in.face_flux.size() != mesh.num_faces()) {
        throw NumericError("vtk: face flux has the wrong size");
    }

    std::ostringstream os;
    os << std::setprecision(12);
    os << "# vtk DataFile Version 3.0\nfracvem\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << npts << " double\n";
    for (const Vec2 &p : mesh.nodes()) os << p.x << ' ' << p.y << " 0\n";
    if (in.fractures != nullptr) {
        for (const auto &s : *in.fractures) {
            for (const Vec2 &p : s.points) os << p.x << ' ' << p.y << " 0\n";
        }
    }
    std::vector<std::vector<Index>> polys(nc);
    std::size_t size = 3 * nseg;
    for (std::size_t c = 0; c < nc; ++c) {
        polys[c] = mesh.cell_nodes(static_cast<Index>(c));
        size += polys[c].size() + 1;
    }
    os << "CELLS " << nc + nseg << ' ' << size << '\n';
    for (const auto &p : polys) {
        os << p.size();
        for (Index v : p) os << ' ' << v;
        os << '\n';
    }
    if (in.fractures != nullptr) {
        std::size_t base = mesh.num_nodes();
        for (const auto &s : *in.fractures) {
            for (std::size_t k = 0; k < s.num_cells(); ++k) os << "2 " << base + k << ' ' << base + k + 1 << '\n';
            base += s.num_faces();
        }
    }
    os << "CELL_TYPES " << nc + nseg << '\n';
    for (std::size_t c = 0; c < nc; ++c) os << "7\n";
    for (std::size_t k = 0; k < nseg; ++k) os << "4\n";

    os << "CELL_DATA " << nc + nseg << '\n';
    auto scalar = [&](const std::string &name, const std::vector<double> *bulk, const std::vector<double> *frac) {
        os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (std::size_t c = 0; c < nc; ++c) os << (bulk ? (*bulk)[c] : 0.0) << '\n';
        for (std::size_t k = 0; k < nseg; ++k) os << (frac ? (*frac)[k] : 0.0) << '\n';
    };
    for (const auto &f : in.cell_fields) {
        const VtkField *match = nullptr;
        for (const auto &g : in.fracture_fields) {
            if (g.name == f.name) match = &g;
        }
        scalar(f.name, &f.values, match ? &match->values : nullptr);
    }
    for (const auto &g : in.fracture_fields) {
        bool shared = false;
        for (const auto &f : in.cell_fields) shared = shared || f.name == g.name;
        if (!shared) scalar(g.name, nullptr, &g.values);
    }
    if (!in.face_flux.empty()) {
        os << "VECTORS velocity double\n";
        for (std::size_t c = 0; c < nc; ++c) {
            const Cell &cell = mesh.cell(static_cast<Index>(c));
            Vec2 v;
            for (std::size_t j = 0; j < cell.faces.size(); ++j) {
                const Face &f = mesh.face(cell.faces[j]);
                v += (f.midpoint - cell.centroid) * (cell.signs[j] * f.measure * in.face_flux[cell.faces[j]]);
            }
            v = v * (1.0 / cell.area);
            os << v.x << ' ' << v.y << " 0\n";
        }
        for (std::size_t k = 0; k < nseg; ++k) os << "0 0 0\n";
    }
    return os.str();
}

void export_vtk(const std::string &path, const VtkInput &in) {
    const std::string text = vtk_string(in);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path);
    os << text;
    if (!os) throw Error("write failed: " + path);
}

Histogram histogram(const std::vector<double> &values, int bins) {
    if (values.empty()) throw NumericError("histogram of an empty set");
    if (bins < 1) throw ConfigError("histogram needs at least one bin");
    Histogram h;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    h.lo = *lo;
    h.hi = *hi;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    // A spread at rounding level counts as a single value.
    const bool flat = h.hi - h.lo <= 1e-12 * std::max(std::abs(h.lo), std::abs(h.hi));
    const double w = flat ? 0.0 : (h.hi - h.lo) / bins;
    for (double v : values) {
        int b = w > 0.0 ? static_cast<int>((v - h.lo) / w) : 0;
        b = std::clamp(b, 0, bins - 1);
        ++h.counts[b];
    }
    return h;
}

}  // namespace fracvem
