#include <doctest.h>

#include <numeric>
#include <set>

#include "fracvem/errors.hpp"
#include "support.hpp"

using namespace fracvem;
using support::left_right;
using support::solve_mixed;

namespace {

Fracture frac(Vec2 a, Vec2 b, double aperture = 1e-2, double kt = 1.0, double kn = 1.0) {
    return {a, b, aperture, kt, kn};
}

MixedDimMesh vertical_fracture_pair(double kn) {
    FractureNetwork net;
    net.fractures = {frac({0.5, 0.0}, {0.5, 1.0}, 1e-2, 1.0, kn)};
    const SplitNetwork s = split_network(net, Rect{});
    return build_mixed_mesh(cartesian_mesh(2, 1, Rect{}), s);
}

MixedDimMesh crossing_cut(int n) {
    FractureNetwork net;
    net.fractures = {frac({0.1, 0.2}, {0.9, 0.75}, 1e-3, 50.0, 2.0), frac({0.15, 0.85}, {0.8, 0.1}, 1e-3, 1e-2, 1e-4),
                     frac({0.0, 0.5}, {0.45, 0.55}, 1e-3, 10.0, 10.0)};
    const SplitNetwork s = split_network(net, Rect{});
    CutParams p;
    p.nx = p.ny = n;
    return build_mixed_mesh(cut_cartesian(Rect{}, s, p), s);
}

// Rows holding nothing but a unit diagonal: the replaced ones.
std::vector<char> replaced_rows(const SparseMatrix &a) {
    std::vector<char> r(a.size(), 0);
    for (Index i = 0; i < a.size(); ++i) {
        const Index b = a.row_ptr()[i], e = a.row_ptr()[i + 1];
        r[i] = e - b == 1 && a.col_idx()[b] == i && a.values()[b] == 1.0;
    }
    return r;
}

}  // namespace

TEST_SUITE("assembly") {

TEST_CASE("two cells in series") {
    const PolyMesh m = cartesian_mesh(2, 1, Rect{});
    const auto s = support::solve_plain(m, support::unit_k(m), side_bc(m, left_right(1.0, 0.0)));
    CHECK(s.sol.cell_pressure[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(s.sol.cell_pressure[1] == doctest::Approx(0.25).epsilon(1e-12));
    for (std::size_t f = 0; f < m.num_faces(); ++f) {
        const Face &face = m.face(static_cast<Index>(f));
        CHECK(s.sol.face_flux[f] == doctest::Approx(face.normal.x).epsilon(1e-12));
    }
}

TEST_CASE("hydrostatic state") {
    const MixedDimMesh md = crossing_cut(12);
    const auto s = solve_mixed(md, support::unit_k(md.bulk), side_bc(md, left_right(2.5, 2.5)));
    for (double p : s.sol.cell_pressure) CHECK(p == doctest::Approx(2.5).epsilon(1e-10));
    for (double u : s.sol.face_flux) CHECK(std::abs(u) < 1e-10);
    for (const auto &pg : s.sol.fracture_pressure) {
        for (double p : pg) CHECK(p == doctest::Approx(2.5).epsilon(1e-10));
    }
    for (double p : s.sol.intersection_pressure) CHECK(p == doctest::Approx(2.5).epsilon(1e-10));
}

TEST_CASE("blocking fracture as three resistors") {
    // four half cells of 0.25 and two mortar sides of aperture / kn = 1: total resistance 3
    const MixedDimMesh md = vertical_fracture_pair(1e-2);
    const auto s = solve_mixed(md, support::unit_k(md.bulk), side_bc(md, left_right(1.0, 0.0)));
    CHECK(s.sol.cell_pressure[0] == doctest::Approx(11.0 / 12.0).epsilon(1e-10));
    CHECK(s.sol.cell_pressure[1] == doctest::Approx(1.0 / 12.0).epsilon(1e-10));
    REQUIRE(s.sol.fracture_pressure.size() == 1);
    CHECK(s.sol.fracture_pressure[0][0] == doctest::Approx(0.5).epsilon(1e-10));
    REQUIRE(s.sol.mortar_flux.size() == 2);
    for (std::size_t m = 0; m < 2; ++m) {
        // outward from the bulk cell: into the fracture on the left, out of it on the right
        const double expect = md.mortars[m].bulk_cell == 0 ? 1.0 / 3.0 : -1.0 / 3.0;
        CHECK(s.sol.mortar_flux[m] == doctest::Approx(expect).epsilon(1e-10));
    }
    CHECK(s.cons.worst() < 1e-12);
}

TEST_CASE("boundary condition errors and the gauge") {
    const PolyMesh m = cartesian_mesh(3, 3, Rect{});
    BoundaryConditions none;
    none.faces.assign(m.num_faces(), {});
    CHECK_THROWS_AS(assemble_bulk(m, support::unit_k(m), none), ConfigError);
    BoundaryConditions wrong;
    CHECK_THROWS_AS(assemble_bulk(m, support::unit_k(m), wrong), ConfigError);

    const SideConditions sealed{BcValue{BcType::flux, 0.0}, BcValue{BcType::flux, 0.0}, BcValue{BcType::flux, 0.0},
                                BcValue{BcType::flux, 0.0}};
    BoundaryConditions bc = side_bc(m, sealed);
    CHECK_THROWS_AS(assemble_bulk(m, support::unit_k(m), bc), ConfigError);
    bc.gauge = true;
    SourceField f;
    f.bulk.assign(m.num_cells(), 0.0);
    f.bulk[0] = 1.0;
    f.bulk[8] = -1.0;
    const auto s = solve_mixed(bulk_only(m), support::unit_k(m), bc, f);
    CHECK(s.sol.cell_pressure[0] == 0.0);
    CHECK(s.sol.cell_pressure[8] < 0.0);
    CHECK(s.cons.worst() < 1e-12);
}

TEST_CASE("serial and parallel assembly are bit-identical") {
    const MixedDimMesh md = crossing_cut(20);
    const BoundaryConditions bc = side_bc(md, left_right(4.0, 1.0));
    const auto k = support::unit_k(md.bulk);
    const SparseSystem a = assemble_fractured(md, k, bc, {}, Exec::serial);
    const SparseSystem b = assemble_fractured(md, k, bc, {}, Exec::parallel);
    CHECK(a.matrix == b.matrix);
    CHECK((a.rhs - b.rhs).norm() == 0.0);
}

TEST_CASE("structure of the fractured system") {
    const MixedDimMesh md = crossing_cut(16);
    const SparseSystem s = assemble_fractured(md, support::unit_k(md.bulk), side_bc(md, left_right(4.0, 1.0)));
    const DofMap &d = s.dofs;
    CHECK(d.n_p == static_cast<Index>(md.bulk.num_cells()));
    CHECK(d.n_lambda == static_cast<Index>(2 * md.num_fracture_cells()));
    CHECK(d.n_pi == static_cast<Index>(md.intersections.size()));
    CHECK(d.total() == s.matrix.size());
    // Row replacement leaves columns of fixed unknowns in place; the pattern is symmetric
    // once those rows and columns are set aside.
    const auto fixed = replaced_rows(s.matrix);
    const Eigen::MatrixXd a = s.matrix.to_dense();
    double vmax = 0.0, vasym = 0.0;
    bool pattern = true;
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            if (fixed[i] || fixed[j]) continue;
            pattern = pattern && ((a(i, j) != 0.0) == (a(j, i) != 0.0));
            const bool flux = (i < d.n_u || (i >= d.off_ug() && i < d.off_pg())) &&
                              (j < d.n_u || (j >= d.off_ug() && j < d.off_pg()));
            if (flux) {
                vmax = std::max(vmax, std::abs(a(i, j)));
                vasym = std::max(vasym, std::abs(a(i, j) - a(j, i)));
            }
        }
    }
    CHECK(pattern);
    CHECK(vasym <= 1e-12 * vmax);
    // pressure block is empty
    CHECK(a.block(d.off_p(), d.off_p(), d.n_p, d.n_p).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("local conservation with fractures and intersections") {
    const MixedDimMesh md = crossing_cut(24);
    const auto s = solve_mixed(md, support::unit_k(md.bulk), side_bc(md, left_right(4.0, 1.0)));
    CHECK(s.cons.worst() <= 1e-10 * s.cons.max_flux);
    CHECK(s.cons.residual.size() == md.bulk.num_cells() + md.num_fracture_cells());
    for (std::size_t i = 0; i < md.intersections.size(); ++i) {
        const IntersectionPoint &ip = md.intersections[i];
        double net = 0.0;
        for (std::size_t k = 0; k < ip.branches.size(); ++k) {
            const auto &q = s.sol.fracture_flux[ip.branches[k]];
            // tangential flux leaving the point along each branch
            net += ip.alpha[k] > 0 ? q.front() : -q.back();
        }
        CHECK(std::abs(net) <= 1e-10 * s.cons.max_flux);
    }
    for (double p : s.sol.cell_pressure) {
        CHECK(p >= 1.0 - 1e-9);
        CHECK(p <= 4.0 + 1e-9);
    }
}

TEST_CASE("sign audit on a closed box") {
    const MixedDimMesh md = crossing_cut(10);
    const SideConditions sealed{BcValue{BcType::flux, 0.0}, BcValue{BcType::flux, 0.0}, BcValue{BcType::flux, 0.0},
                                BcValue{BcType::flux, 0.0}};
    BoundaryConditions bc = side_bc(md, sealed);
    bc.gauge = true;
    // inject into the fracture, withdraw from one bulk cell
    SourceField f;
    f.fracture.resize(md.fractures.size());
    for (std::size_t b = 0; b < md.fractures.size(); ++b) f.fracture[b].assign(md.fractures[b].num_cells(), 0.0);
    const double len = md.fractures[0].cell_length(0);
    f.fracture[0][0] = 1.0 / len;
    f.bulk.assign(md.bulk.num_cells(), 0.0);
    const Index sink = static_cast<Index>(md.bulk.num_cells()) - 1;
    f.bulk[sink] = -1.0 / md.bulk.cell(sink).area;
    const auto s = solve_mixed(md, support::unit_k(md.bulk), bc, f);
    CHECK(s.cons.worst() <= 1e-10 * s.cons.max_flux);
    // what enters the fracture leaves it through the mortars: sum of bulk-outward mortar flux is -1
    double exchange = 0.0;
    for (std::size_t m = 0; m < md.mortars.size(); ++m) exchange += md.mortars[m].measure * s.sol.mortar_flux[m];
    CHECK(exchange == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(s.sol.fracture_pressure[0][0] > s.sol.cell_pressure[sink]);
}

TEST_CASE("two-point reference in one dimension") {
    const PolyMesh m = cartesian_mesh(4, 1, Rect{});
    const TpfaResult r = solve_tpfa(m, std::vector<double>(4, 1.0), side_bc(m, left_right(1.0, 0.0)));
    const double expect[4] = {0.875, 0.625, 0.375, 0.125};
    for (int c = 0; c < 4; ++c) CHECK(r.pressure[c] == doctest::Approx(expect[c]).epsilon(1e-12));
    for (std::size_t f = 0; f < m.num_faces(); ++f) {
        CHECK(r.face_flux[f] == doctest::Approx(m.face(static_cast<Index>(f)).normal.x * m.face(static_cast<Index>(f)).measure));
    }
    // quarter-cell resistances 1/16, 1/16, 1/4, 1/4 in series
    const PolyMesh two = cartesian_mesh(2, 1, Rect{});
    const TpfaResult h = solve_tpfa(two, {4.0, 1.0}, side_bc(two, left_right(1.0, 0.0)));
    for (std::size_t f = 0; f < two.num_faces(); ++f) {
        const Face &face = two.face(static_cast<Index>(f));
        if (face.side == BoundarySide::left || face.side == BoundarySide::right || !two.is_boundary(static_cast<Index>(f))) {
            CHECK(h.face_flux[f] * face.normal.x == doctest::Approx(1.6).epsilon(1e-12));
        }
    }
}

}
