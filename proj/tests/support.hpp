#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "fracvem/assembly.hpp"
#include "fracvem/gridgen.hpp"
#include "fracvem/local.hpp"
#include "fracvem/mesh.hpp"
#include "fracvem/sparse.hpp"

namespace support {

using namespace fracvem;

inline std::string source_path(const std::string &rel) { return std::string(FRACVEM_SOURCE_DIR) + "/" + rel; }

struct Solved {
    MixedDimMesh md;
    SparseSystem sys;
    Eigen::VectorXd x;
    FlowSolution sol;
    Conservation cons;
};

inline Solved solve_mixed(MixedDimMesh md, const PermeabilityField &k, const BoundaryConditions &bc,
                          const SourceField &f = {}, Exec exec = Exec::parallel) {
    Solved s;
    s.sys = assemble_fractured(md, k, bc, f, exec);
    s.x = solve_direct(s.sys.matrix, s.sys.rhs);
    s.sol = split_solution(md, s.sys.dofs, s.x);
    s.cons = conservation_residuals(md, s.sys.dofs, s.x, f);
    s.md = std::move(md);
    return s;
}

inline Solved solve_plain(const PolyMesh &mesh, const PermeabilityField &k, const BoundaryConditions &bc,
                          const SourceField &f = {}) {
    return solve_mixed(bulk_only(mesh), k, bc, f);
}

inline PermeabilityField unit_k(const PolyMesh &m) { return uniform_field(m.num_cells(), Mat2::Identity()); }

// p = c0 + c1 x + c2 y with K = I.
struct Linear {
    double c0 = 1.0, c1 = 2.0, c2 = -3.0;
    double p(const Vec2 &x) const { return c0 + c1 * x.x + c2 * x.y; }
    Vec2 u() const { return {-c1, -c2}; }
};

// Pressure on left and bottom sides, flux elsewhere.
inline BoundaryConditions linear_bc(const PolyMesh &m, const Linear &e) {
    return face_bc(m, [&](const Face &f) {
        if (f.side == BoundarySide::left || f.side == BoundarySide::bottom) return BcValue{BcType::pressure, e.p(f.midpoint)};
        return BcValue{BcType::flux, dot(e.u(), f.normal)};
    });
}

struct PatchError {
    double pressure = 0.0;
    double flux = 0.0;
    double conservation = 0.0;
};

inline PatchError patch_error(const PolyMesh &m, const Linear &e = {}) {
    const Solved s = solve_plain(m, unit_k(m), linear_bc(m, e));
    double pn = 0, pd = 0, fn = 0, fd = 0;
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
        const Cell &cell = m.cell(static_cast<Index>(c));
        const double pe = e.p(cell.centroid);
        pn += cell.area * std::pow(s.sol.cell_pressure[c] - pe, 2);
        pd += cell.area * pe * pe;
    }
    for (std::size_t f = 0; f < m.num_faces(); ++f) {
        const Face &face = m.face(static_cast<Index>(f));
        const double ue = dot(e.u(), face.normal);
        fn += face.measure * std::pow(s.sol.face_flux[f] - ue, 2);
        fd += face.measure * ue * ue;
    }
    return {std::sqrt(pn / pd), std::sqrt(fn / fd), s.cons.worst() / s.cons.max_flux};
}

inline SideConditions left_right(double left, double right) {
    return {BcValue{BcType::pressure, left}, BcValue{BcType::pressure, right}, BcValue{BcType::flux, 0.0},
            BcValue{BcType::flux, 0.0}};
}

inline double rel_l2(const std::vector<double> &a, const std::vector<double> &b, const std::vector<double> &w) {
    double n = 0, d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        n += w[i] * (a[i] - b[i]) * (a[i] - b[i]);
        d += w[i] * b[i] * b[i];
    }
    return std::sqrt(n / d);
}

inline std::vector<double> areas(const PolyMesh &m) {
    std::vector<double> a;
    for (const Cell &c : m.cells()) a.push_back(c.area);
    return a;
}

}  // namespace support
