// Acceptance suite: one PASS/FAIL line per criterion.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "fracvem/errors.hpp"
#include "fracvem/pipeline.hpp"
#include "support.hpp"

using namespace fracvem;
using support::Solved;
namespace fs = std::filesystem;

namespace {

constexpr double pi = 3.14159265358979323846;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Worst conservation residual over every solve of criteria 1, 2, 5 and 6.
double worst_conservation = 0.0;
int conservation_solves = 0;

void track(const Solved &s) {
    worst_conservation = std::max(worst_conservation, s.cons.worst() / std::max(s.cons.max_flux, 1e-300));
    ++conservation_solves;
}

Fracture frac(Vec2 a, Vec2 b, double aperture, double kt, double kn) { return {a, b, aperture, kt, kn}; }

// ---------------------------------------------------------------- 1

support::PatchError patch(const PolyMesh &m) {
    const support::Linear e{0.7, 1.3, -2.1};
    const Solved s = support::solve_plain(m, support::unit_k(m), support::linear_bc(m, e));
    track(s);
    return support::patch_error(m, e);
}

SplitNetwork crossing_network() {
    FractureNetwork net;
    net.fractures = {frac({0.1, 0.2}, {0.9, 0.75}, 1e-3, 1, 1), frac({0.15, 0.85}, {0.8, 0.1}, 1e-3, 1, 1)};
    return split_network(net, Rect{});
}

Outcome patch_tests() {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::pair<std::string, PolyMesh>> meshes;
    meshes.emplace_back("cartesian", cartesian_mesh(8, 8, Rect{}));
    CutParams cp;
    cp.nx = cp.ny = 8;
    meshes.emplace_back("cut", cut_cartesian(Rect{}, SplitNetwork{}, cp, {Segment{Vec2{0.13, 0.21}, Vec2{0.87, 0.66}}}));
    VoronoiParams vp;
    vp.nx = vp.ny = 8;
    meshes.emplace_back("voronoi", voronoi_constrained(Rect{}, crossing_network(), vp));
    cp.nx = cp.ny = 16;
    CoarsenParams agg;
    agg.volume_factor = 0.5;
    meshes.emplace_back("agglomerated", agglomerate_by_volume(cut_cartesian(Rect{}, crossing_network(), cp), agg).mesh);
    meshes.emplace_back("triangles", import_gmsh(support::source_path("data/benchmark3_delaunay.msh")).mesh);

    double worst = 0.0;
    std::string detail;
    for (const auto &[name, m] : meshes) {
        const support::PatchError e = patch(m);
        worst = std::max({worst, e.pressure, e.flux});
        detail += name + " " + fmt("%.1e", std::max(e.pressure, e.flux)) + ", ";
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-9 && t < 5.0, detail + fmt("%.2f s", t)};
}

// ---------------------------------------------------------------- 2

double sine(const Vec2 &x) { return std::sin(pi * x.x) * std::sin(pi * x.y); }

Outcome convergence() {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> ep, eu;
    // 3-point Gauss on [0, 1]
    const double gx[3] = {0.5 - std::sqrt(0.15), 0.5, 0.5 + std::sqrt(0.15)};
    const double gw[3] = {5.0 / 18, 8.0 / 18, 5.0 / 18};
    for (int n = 8; n <= 64; n *= 2) {
        const PolyMesh m = cartesian_mesh(n, n, Rect{});
        SourceField f;
        // Source sampled at centroids, as the pipeline does. With exact cell means the
        // fluxes of this eigenfunction come out exact on uniform grids and no rate is visible.
        for (const Cell &c : m.cells()) f.bulk.push_back(2 * pi * pi * sine(c.centroid));
        const BoundaryConditions bc = face_bc(m, [](const Face &) { return BcValue{BcType::pressure, 0.0}; });
        const Solved s = support::solve_plain(m, support::unit_k(m), bc, f);
        track(s);
        double pn = 0, pd = 0, un = 0, ud = 0;
        for (std::size_t c = 0; c < m.num_cells(); ++c) {
            const Cell &cell = m.cell(static_cast<Index>(c));
            const double pe = sine(cell.centroid);
            pn += cell.area * std::pow(s.sol.cell_pressure[c] - pe, 2);
            pd += cell.area * pe * pe;
        }
        for (std::size_t fi = 0; fi < m.num_faces(); ++fi) {
            const Face &face = m.face(static_cast<Index>(fi));
            const Vec2 a = m.node(face.nodes[0]), b = m.node(face.nodes[1]);
            double ue = 0.0;
            for (int q = 0; q < 3; ++q) {
                const Vec2 x = a + gx[q] * (b - a);
                const Vec2 grad{pi * std::cos(pi * x.x) * std::sin(pi * x.y), pi * std::sin(pi * x.x) * std::cos(pi * x.y)};
                ue -= gw[q] * dot(grad, face.normal);
            }
            un += face.measure * std::pow(s.sol.face_flux[fi] - ue, 2);
            ud += face.measure * ue * ue;
        }
        ep.push_back(std::sqrt(pn / pd));
        eu.push_back(std::sqrt(un / ud));
    }
    bool ok = true;
    std::string detail = "orders p/u:";
    for (std::size_t i = 1; i < ep.size(); ++i) {
        const double op = std::log2(ep[i - 1] / ep[i]), ou = std::log2(eu[i - 1] / eu[i]);
        ok = ok && op >= 0.9 && op <= 2.2 && ou >= 0.9;
        detail += fmt(" %.2f", op) + fmt("/%.2f", ou);
    }
    const double t = seconds_since(t0);
    return {ok && t < 30.0, detail + fmt(", %.2f s", t)};
}

// ---------------------------------------------------------------- 4

// Independent lowest-order Raviart-Thomas solver on a triangle mesh: the basis of edge e is
// |e| / (2|T|) (x - P_e), P_e the opposite vertex, with unit outward normal flux density.
std::vector<double> rt0_face_flux(const PolyMesh &m, const std::function<double(const Vec2 &)> &p_dirichlet) {
    const Index nf = static_cast<Index>(m.num_faces()), nc = static_cast<Index>(m.num_cells());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nf + nc, nf + nc);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf + nc);
    for (Index c = 0; c < nc; ++c) {
        const Cell &cell = m.cell(c);
        if (cell.num_faces() != 3) throw MeshError("not a triangle");
        std::array<Vec2, 3> opp{};
        std::array<double, 3> scale{};
        for (int i = 0; i < 3; ++i) {
            const Face &f = m.face(cell.faces[i]);
            for (int j = 0; j < 3; ++j) {
                const Face &g = m.face(cell.faces[j]);
                for (Index n : g.nodes) {
                    if (n != f.nodes[0] && n != f.nodes[1]) opp[i] = m.node(n);
                }
            }
            scale[i] = cell.signs[i] * f.measure / (2 * cell.area);
        }
        // edge-midpoint rule, exact for the quadratic products
        for (int q = 0; q < 3; ++q) {
            const Vec2 x = m.face(cell.faces[q]).midpoint;
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    a(cell.faces[i], cell.faces[j]) += cell.area / 3 * scale[i] * scale[j] * dot(x - opp[i], x - opp[j]);
                }
            }
        }
        for (int i = 0; i < 3; ++i) {
            const double d = cell.signs[i] * m.face(cell.faces[i]).measure;
            a(cell.faces[i], nf + c) -= d;
            a(nf + c, cell.faces[i]) -= d;
        }
    }
    for (Index f = 0; f < nf; ++f) {
        if (m.is_boundary(f)) rhs(f) = -p_dirichlet(m.face(f).midpoint) * m.face(f).measure;
    }
    const Eigen::VectorXd x = a.fullPivLu().solve(rhs);
    return {x.data(), x.data() + nf};
}

Outcome rt0_patch() {
    MeshData d;
    d.nodes = {{0, 0}, {1, 0}, {0.3, 0.9}, {0.45, 0.3}};
    d.faces = {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {1, 3}, {2, 3}};
    d.cells = {{0, 4, 3}, {1, 5, 4}, {2, 3, 5}};
    const PolyMesh m = build_poly_mesh(d);
    const support::Linear e{0.4, -1.7, 2.3};
    const Solved s = support::solve_plain(m, support::unit_k(m), face_bc(m, [&](const Face &f) {
                                              return BcValue{BcType::pressure, e.p(f.midpoint)};
                                          }));
    const auto rt = rt0_face_flux(m, [&](const Vec2 &x) { return e.p(x); });
    double diff = 0.0, scale = 0.0;
    for (std::size_t f = 0; f < m.num_faces(); ++f) {
        diff = std::max(diff, std::abs(s.sol.face_flux[f] - rt[f]));
        scale = std::max(scale, std::abs(rt[f]));
    }
    return {diff <= 1e-10 * std::max(scale, 1.0), "max |u - u_RT0| = " + fmt("%.1e", diff)};
}

// ---------------------------------------------------------------- 5

Outcome tpfa_checkerboard() {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> diffs;
    for (int n : {16, 32, 64}) {
        const PolyMesh m = cartesian_mesh(n, n, Rect{});
        std::vector<double> k;
        for (const Cell &c : m.cells()) {
            // fixed 8x8 physical pattern, so refinement resolves the same medium
            const int i = static_cast<int>(c.centroid.x * 8), j = static_cast<int>(c.centroid.y * 8);
            k.push_back((i + j) % 2 ? 1e-2 : 1.0);
        }
        const BoundaryConditions bc = side_bc(m, support::left_right(1.0, 0.0));
        const Solved s = support::solve_plain(m, isotropic_field(k), bc);
        track(s);
        const TpfaResult t = solve_tpfa(m, k, bc);
        diffs.push_back(support::rel_l2(s.sol.cell_pressure, t.pressure, support::areas(m)));
    }
    const double t = seconds_since(t0);
    const bool ok = diffs[1] <= 0.05 && diffs[1] < diffs[0] && diffs[2] < diffs[1] && t < 20.0;
    return {ok, "16/32/64: " + fmt("%.2e", diffs[0]) + fmt(" %.2e", diffs[1]) + fmt(" %.2e", diffs[2]) + fmt(", %.2f s", t)};
}

// ---------------------------------------------------------------- 6

Outcome fracture_limits() {
    const auto t0 = std::chrono::steady_clock::now();
    // (a) conductive fracture with the matrix permeability along it
    FractureNetwork net;
    net.fractures = {frac({0.12, 0.18}, {0.83, 0.77}, 1e-4, 1.0, 1.0)};
    CutParams cp;
    cp.nx = cp.ny = 24;
    const PolyMesh bulk = cut_cartesian(Rect{}, split_network(net, Rect{}), cp);
    const Solved plain = support::solve_plain(bulk, support::unit_k(bulk), side_bc(bulk, support::left_right(1.0, 0.0)));
    track(plain);
    std::vector<double> d;
    for (double kn = 1e2; kn <= 1e8 * 1.01; kn *= 10) {
        net.fractures[0].normal_permeability = kn;
        const SplitNetwork split = split_network(net, Rect{});
        const MixedDimMesh md = build_mixed_mesh(bulk, split);
        const Solved s = support::solve_mixed(md, support::unit_k(md.bulk), side_bc(md, support::left_right(1.0, 0.0)));
        track(s);
        d.push_back(support::rel_l2(s.sol.cell_pressure, plain.sol.cell_pressure, support::areas(bulk)));
    }
    bool monotone = true;
    for (std::size_t i = 1; i < d.size(); ++i) monotone = monotone && d[i] <= d[i - 1] * (1 + 1e-9);

    // (b) blocking fracture: bulk half cells and the two mortar sides in series
    double worst = 0.0;
    for (double kn : {1e-2, 1e-4, 1e-6, 1e-8}) {
        FractureNetwork v;
        v.fractures = {frac({0.5, 0.0}, {0.5, 1.0}, 1e-2, 1.0, kn)};
        const MixedDimMesh md = build_mixed_mesh(cartesian_mesh(2, 1, Rect{}), split_network(v, Rect{}));
        const Solved s = support::solve_mixed(md, support::unit_k(md.bulk), side_bc(md, support::left_right(1.0, 0.0)));
        track(s);
        const double q = 1.0 / (1.0 + 2 * 1e-2 / kn);
        worst = std::max(worst, std::abs(s.sol.cell_pressure[0] - (1 - 0.25 * q)));
        worst = std::max(worst, std::abs(s.sol.cell_pressure[1] - 0.25 * q));
        worst = std::max(worst, std::abs(s.sol.fracture_pressure[0][0] - 0.5));
        for (std::size_t mo = 0; mo < md.mortars.size(); ++mo) {
            const double expect = md.mortars[mo].bulk_cell == 0 ? q : -q;
            worst = std::max(worst, std::abs(s.sol.mortar_flux[mo] - expect) / q);
        }
    }
    const double t = seconds_since(t0);
    // what is left is the extra conduit of width aperture along the fracture
    return {monotone && d.back() <= 1e-3 && worst <= 1e-8 && t < 10.0,
            "(a) diff " + fmt("%.2e", d.front()) + " -> " + fmt("%.2e", d.back()) + (monotone ? " monotone" : " NOT monotone") +
                ", (b) " + fmt("%.1e", worst) + fmt(", %.2f s", t)};
}

// ---------------------------------------------------------------- 7

Outcome x_crossing() {
    FractureNetwork net;
    net.fractures = {frac({0.1, 0.1}, {0.9, 0.9}, 1e-3, 1e2, 1e2), frac({0.1, 0.9}, {0.9, 0.1}, 1e-3, 1e2, 1e2)};
    const SplitNetwork split = split_network(net, Rect{});
    CutParams cp;
    cp.nx = cp.ny = 9;
    const MixedDimMesh md = build_mixed_mesh(cut_cartesian(Rect{}, split, cp), split);
    const Solved s = support::solve_mixed(md, support::unit_k(md.bulk), side_bc(md, support::left_right(1.0, 0.0)));
    if (md.intersections.size() != 1) return {false, "expected one intersection"};
    const auto traces = intersection_traces(md, s.sys.dofs, s.x, 0);
    double mean = 0.0;
    for (double v : traces) mean += v / static_cast<double>(traces.size());
    const double gap = std::abs(s.sol.intersection_pressure[0] - mean);
    const IntersectionPoint &ip = md.intersections[0];
    double net_flux = 0.0;
    for (std::size_t k = 0; k < ip.branches.size(); ++k) {
        const auto &q = s.sol.fracture_flux[ip.branches[k]];
        net_flux += ip.alpha[k] > 0 ? q.front() : -q.back();
    }
    const double row = std::abs(net_flux) / s.cons.max_flux;
    const double cells = s.cons.worst() / s.cons.max_flux;
    return {gap <= 1e-10 && row <= 1e-10 && cells <= 1e-10,
            "|p_i - mean| " + fmt("%.1e", gap) + ", row " + fmt("%.1e", row) + ", cells " + fmt("%.1e", cells)};
}

// ---------------------------------------------------------------- presets

struct PresetRun {
    RunConfig cfg;
    Report report;
    double seconds = 0.0;
    fs::path dir;
};

std::string strip_timings(const std::string &text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line)) {
        if (line.rfind("time.", 0) != 0) out += line + "\n";
    }
    return out;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

PresetRun run_preset(const std::string &name, const fs::path &dir) {
    PresetRun r;
    r.cfg = parse_config(support::source_path("presets/" + name + ".json"), true);
    r.dir = dir;
    PipelineOptions o;
    o.stage = Stage::report;
    o.output_dir = dir.string();
    const auto t0 = std::chrono::steady_clock::now();
    r.report = run_pipeline(r.cfg, o);
    r.seconds = seconds_since(t0);
    return r;
}

const std::vector<std::string> benchmark_presets = {"benchmark3_delaunay", "benchmark3_delaunay_coarse", "benchmark3_cut",
                                                    "benchmark3_cut_coarse", "benchmark3_voronoi", "benchmark3_voronoi_coarse"};

// ---------------------------------------------------------------- 8

Outcome spe10(const std::map<std::string, PresetRun> &runs) {
    const Report &l4 = runs.at("spe10_l4").report, &l35 = runs.at("spe10_l35").report;
    const double t = runs.at("spe10_l4").seconds + runs.at("spe10_l35").seconds;
    const double a4 = l4.number("arithmetic.err_tpfa"), h4 = l4.number("harmonic.err_tpfa");
    const double a35 = l35.number("arithmetic.err_tpfa"), h35 = l35.number("harmonic.err_tpfa");
    const bool real = l4.get("permeability.source") == "spe10" && l35.get("permeability.source") == "spe10";
    bool ok = t < 180.0;
    if (real) {
        ok = ok && a4 >= 0.02 && a4 <= 0.08 && h4 >= 0.02 && h4 <= 0.08 && a35 < h35 && h35 / a35 > 2.0;
    } else {
        ok = ok && a4 < h4 && a35 < h35;
    }
    return {ok, std::string(real ? "SPE10 data" : "synthetic") + ": L4 " + fmt("%.3f", a4) + fmt("/%.3f", h4) + ", L35 " +
                    fmt("%.3f", a35) + fmt("/%.3f", h35) + fmt(", %.1f s", t)};
}

// ---------------------------------------------------------------- 9

// Nonzeros found by scanning dense column blocks.
std::size_t brute_force_nnz(const SparseMatrix &a) {
    const Eigen::SparseMatrix<double> e = a.to_eigen();
    std::size_t count = 0;
    const Index block = 256;
    for (Index j0 = 0; j0 < a.size(); j0 += block) {
        const Index w = std::min(block, a.size() - j0);
        const Eigen::MatrixXd d = Eigen::MatrixXd(e.middleCols(j0, w));
        for (Index j = 0; j < w; ++j) {
            for (Index i = 0; i < a.size(); ++i) count += d(i, j) != 0.0;
        }
    }
    return count;
}

Outcome matrix_statistics(const std::map<std::string, PresetRun> &runs) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::map<std::string, double> table_dof = {{"benchmark3_delaunay", 3741}, {"benchmark3_delaunay_coarse", 3384},
                                                     {"benchmark3_cut", 4961},      {"benchmark3_cut_coarse", 4474},
                                                     {"benchmark3_voronoi", 6095},  {"benchmark3_voronoi_coarse", 5118}};
    bool nbar_ok = true, cond_ok = true, dof_ok = true;
    double t = 0.0;
    std::string detail;
    for (const std::string &name : benchmark_presets) {
        const PresetRun &run = runs.at(name);
        t += run.seconds;
        // rebuild the preset system and count by brute force
        BuiltGrid g = build_grid(run.cfg, run.cfg.grid);
        PolyMesh mesh = run.cfg.coarsen.enabled ? agglomerate_by_volume(g.mesh, run.cfg.coarsen.params).mesh : std::move(g.mesh);
        const MixedDimMesh md = build_mixed_mesh(std::move(mesh), g.split);
        SideConditions sides;
        for (int s = 0; s < 4; ++s) sides[s] = {run.cfg.bc[s].type, run.cfg.bc[s].value};
        const SparseSystem sys = assemble_fractured(md, support::unit_k(md.bulk), side_bc(md, sides));
        const std::size_t nnz = brute_force_nnz(sys.matrix);
        const MatrixStats st = matrix_stats(sys.matrix, sys.rhs, 1, false);
        nbar_ok = nbar_ok && st.nbar == static_cast<double>(nnz) / sys.matrix.size() &&
                  run.report.number("nnz") == static_cast<double>(nnz) &&
                  std::abs(run.report.number("nbar") - st.nbar) <= 1e-9 * st.nbar;  // printed to 10 digits
        const double cond = run.report.number("condition");
        const double dof = run.report.number("n_dof");
        const bool c = cond >= 1e9 && cond <= 1e12;
        const bool n = std::abs(dof / table_dof.at(name) - 1.0) <= 0.25;
        cond_ok = cond_ok && c;
        dof_ok = dof_ok && n;
        detail += name.substr(11) + " " + fmt("%.2e", cond) + (c ? "" : "(out)") + fmt(" dof %.0f", dof) + (n ? "" : "(out)") + ", ";
    }
    t += seconds_since(t0);
    return {nbar_ok && cond_ok && dof_ok && t < 60.0,
            std::string(nbar_ok ? "nbar exact; " : "nbar MISMATCH; ") + detail + fmt("%.1f s", t)};
}

// ---------------------------------------------------------------- 10

Outcome stabilization_indices() {
    const PolyMesh tri = import_gmsh(support::source_path("data/benchmark3_delaunay.msh")).mesh;
    std::vector<double> kt;
    const auto tl = all_local_matrices(tri, support::unit_k(tri));
    for (std::size_t c = 0; c < tl.size(); ++c) kt.push_back(stabilization_index(tri, static_cast<Index>(c), tl[c]));
    std::nth_element(kt.begin(), kt.begin() + kt.size() / 2, kt.end());
    const double median = kt[kt.size() / 2];

    // lattice seeds with a few columns of thin cells pressed between close seed pairs
    std::vector<Vec2> seeds;
    const int n = 10;
    const double h = 1.0 / n, gap = h / 3200;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const Vec2 s{(i + 0.5) * h, (j + 0.5) * h};
            seeds.push_back(s);
            if (i % 3 == 1) {
                seeds.push_back({s.x - gap, s.y});
                seeds.push_back({s.x + gap, s.y});
            }
        }
    }
    const PolyMesh vor = voronoi_diagram(Rect{}, seeds);
    double worst_aspect = 0.0;
    for (std::size_t c = 0; c < vor.num_cells(); ++c) worst_aspect = std::max(worst_aspect, aspect_ratio(vor, static_cast<Index>(c)));
    double kmin = 1.0;
    const auto vl = all_local_matrices(vor, support::unit_k(vor));
    for (std::size_t c = 0; c < vl.size(); ++c) kmin = std::min(kmin, stabilization_index(vor, static_cast<Index>(c), vl[c]));
    return {median >= 0.35 && median <= 0.65 && worst_aspect >= 40.0 && kmin < 0.2,
            "Delaunay median " + fmt("%.3f", median) + ", slivers (aspect " + fmt("%.0f", worst_aspect) + ") min " + fmt("%.3f", kmin)};
}

// ---------------------------------------------------------------- 11

// Parameters along p0-p1 where the line crosses a fracture with kn < 1.
std::vector<double> barrier_crossings(const RunConfig &cfg) {
    std::vector<double> ts;
    const Vec2 p0 = cfg.line.p0, d = cfg.line.p1 - cfg.line.p0;
    for (const Fracture &f : cfg.fractures.fractures) {
        if (f.normal_permeability >= 1.0) continue;
        const Vec2 e = f.b - f.a;
        const double den = d.x * e.y - d.y * e.x;
        if (std::abs(den) < 1e-14) continue;
        const Vec2 w = f.a - p0;
        const double t = (w.x * e.y - w.y * e.x) / den, s = (w.x * d.y - w.y * d.x) / den;
        if (t >= 0 && t <= 1 && s >= 0 && s <= 1) ts.push_back(t);
    }
    return ts;
}

Outcome self_convergence(const std::map<std::string, PresetRun> &runs) {
    bool ok = true;
    double t = 0.0, worst = 0.0;
    std::string detail;
    for (const std::string &name : benchmark_presets) {
        const PresetRun &run = runs.at(name);
        t += run.seconds;
        const double err = run.report.number("err_m");
        worst = std::max(worst, err);
        ok = ok && err <= 0.03;
        ok = ok && run.report.number("line_min") >= 1.0 && run.report.number("line_max") <= 4.0;
        // largest jump between consecutive samples must straddle a barrier
        std::ifstream in(run.dir / run.cfg.csv_file);
        std::string line;
        std::getline(in, line);
        std::vector<std::pair<double, double>> samples;
        while (std::getline(in, line)) {
            double v[4];
            if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &v[0], &v[1], &v[2], &v[3]) == 4) samples.push_back({v[0], v[3]});
        }
        std::size_t at = 0;
        double jump = 0.0;
        for (std::size_t i = 1; i < samples.size(); ++i) {
            const double j = std::abs(samples[i].second - samples[i - 1].second);
            if (j > jump) jump = j, at = i;
        }
        bool across = false;
        for (double tc : barrier_crossings(run.cfg)) {
            across = across || (at > 0 && tc >= samples[at - 1].first - 1e-9 && tc <= samples[at].first + 1e-9);
        }
        ok = ok && across && jump > 0.1;
        if (!across) detail += name + " jump not at a barrier, ";
    }
    return {ok && t < 120.0, detail + "max err_m " + fmt("%.4f", worst) + fmt(", %.1f s", t)};
}

// ---------------------------------------------------------------- 12

Outcome determinism(const std::map<std::string, PresetRun> &runs, const fs::path &second_dir) {
    std::string bad;
    for (const auto &[name, first] : runs) {
        const PresetRun again = run_preset(name, second_dir);
        const std::string a = strip_timings(slurp(first.dir / first.cfg.report_file));
        const std::string b = strip_timings(slurp(again.dir / again.cfg.report_file));
        bool same = !a.empty() && a == b && strip_timings(first.report.str()) == strip_timings(again.report.str());
        if (!first.cfg.csv_file.empty()) {
            for (const char *pre : {"", "arithmetic.", "harmonic."}) {
                const fs::path f = first.dir / (pre + first.cfg.csv_file);
                if (fs::exists(f)) same = same && slurp(f) == slurp(again.dir / (pre + first.cfg.csv_file));
            }
        }
        if (!same) bad += name + " ";
    }
    return {bad.empty(), bad.empty() ? std::to_string(runs.size()) + " presets identical" : "differs: " + bad};
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"fracvem acceptance suite"};
    std::vector<int> expect_fail;
    std::string out = (fs::temp_directory_path() / "fracvem_acceptance").string();
    app.add_option("--expect-fail", expect_fail, "criteria known to fail; reported but not fatal");
    app.add_option("--output-dir", out, "scratch directory for preset outputs");
    CLI11_PARSE(app, argc, argv);
    const std::set<int> known(expect_fail.begin(), expect_fail.end());

    const fs::path first = fs::path(out) / "first", second = fs::path(out) / "second";
    fs::create_directories(first);
    fs::create_directories(second);

    std::map<int, Outcome> results;
    auto attempt = [&](int id, const std::function<Outcome()> &f) {
        try {
            results[id] = f();
        } catch (const std::exception &e) {
            results[id] = {false, std::string("exception: ") + e.what()};
        }
    };

    attempt(1, patch_tests);
    attempt(2, convergence);
    attempt(4, rt0_patch);
    attempt(5, tpfa_checkerboard);
    attempt(6, fracture_limits);
    attempt(3, [] {
        return Outcome{conservation_solves > 0 && worst_conservation <= 1e-9,
                       "worst " + fmt("%.1e", worst_conservation) + " x max flux over " + std::to_string(conservation_solves) + " solves"};
    });
    attempt(7, x_crossing);

    std::map<std::string, PresetRun> runs;
    std::string preset_error;
    try {
        for (const auto &e : fs::directory_iterator(support::source_path("presets"))) {
            if (e.path().extension() != ".json") continue;
            const std::string name = e.path().stem().string();
            runs.emplace(name, run_preset(name, first));
        }
    } catch (const std::exception &e) {
        preset_error = std::string("preset run failed: ") + e.what();
    }
    if (!preset_error.empty()) {
        for (int id : {8, 9, 11, 12}) results[id] = {false, preset_error};
    } else {
        attempt(8, [&] { return spe10(runs); });
        attempt(9, [&] { return matrix_statistics(runs); });
        attempt(11, [&] { return self_convergence(runs); });
        attempt(12, [&] { return determinism(runs, second); });
    }
    attempt(10, stabilization_indices);

    int unexpected = 0;
    for (const auto &[id, r] : results) {
        std::string tag = r.pass ? "PASS" : "FAIL";
        if (known.count(id)) tag += r.pass ? " (was expected to fail)" : " (known)";
        else if (!r.pass) ++unexpected;
        std::cout << "criterion " << (id < 10 ? " " : "") << id << ": " << tag << "  " << r.detail << "\n";
    }
    std::cout << (unexpected == 0 ? "acceptance: OK" : "acceptance: " + std::to_string(unexpected) + " unexpected failure(s)") << "\n";
    return unexpected == 0 ? 0 : 1;
}
