#pragma once

#include <array>
#include <functional>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "fracvem/fracture.hpp"
#include "fracvem/local.hpp"
#include "fracvem/sparse.hpp"

namespace fracvem {

enum class BcType { none, flux, pressure };

struct BcValue {
    BcType type = BcType::none;
    double value = 0.0;  // outward normal flux density, or pressure
};

struct BoundaryConditions {
    std::vector<BcValue> faces;                        // per bulk face (boundary faces only)
    std::map<std::pair<Index, int>, BcValue> fracture; // (branch, 0 start / 1 end) on the boundary
    bool gauge = false;  // fix cell 0 pressure when no pressure condition exists
};

/// Per-side conditions in the order left, right, bottom, top.
using SideConditions = std::array<BcValue, 4>;

/// Bulk faces get the condition of their side. Fracture ends on a pressure side get the same
/// pressure, ends on a flux side are sealed.
BoundaryConditions side_bc(const MixedDimMesh &md, const SideConditions &sides);
BoundaryConditions side_bc(const PolyMesh &mesh, const SideConditions &sides);

/// Conditions from a per-face rule (bulk only).
BoundaryConditions face_bc(const PolyMesh &mesh, const std::function<BcValue(const Face &)> &rule);

struct SourceField {
    std::vector<double> bulk;                   // per cell, empty means zero
    std::vector<std::vector<double>> fracture;  // per branch, per segment
};

/// Contiguous unknown blocks: u (bulk faces off fractures), p (cells), u_gamma (fracture
/// points, one per branch end), p_gamma (fracture cells), lambda (mortar cells), p_iota.
struct DofMap {
    Index n_u = 0, n_p = 0, n_ug = 0, n_pg = 0, n_lambda = 0, n_pi = 0;
    std::vector<Index> face_dof;              // bulk face -> u dof or -1
    std::vector<Index> branch_face_offset;    // first u_gamma dof of each branch
    std::vector<Index> branch_cell_offset;    // first p_gamma dof of each branch

    Index off_p() const { return n_u; }
    Index off_ug() const { return n_u + n_p; }
    Index off_pg() const { return off_ug() + n_ug; }
    Index off_lambda() const { return off_pg() + n_pg; }
    Index off_pi() const { return off_lambda() + n_lambda; }
    Index total() const { return off_pi() + n_pi; }

    Index p(Index cell) const { return off_p() + cell; }
    Index ug(Index branch, Index point) const { return off_ug() + branch_face_offset[branch] + point; }
    Index pg(Index branch, Index seg) const { return off_pg() + branch_cell_offset[branch] + seg; }
    Index lambda(Index mortar) const { return off_lambda() + mortar; }
    Index pi(Index iota) const { return off_pi() + iota; }
};

DofMap make_dof_map(const MixedDimMesh &md);

struct SparseSystem {
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
    DofMap dofs;
};

/// Triplet accumulator; fixed unknowns get identity rows (row replacement).
class SystemBuilder {
public:
    explicit SystemBuilder(DofMap dofs);

    const DofMap &dofs() const { return dofs_; }
    void add(Index i, Index j, double v) { triplets_.push_back({i, j, v}); }
    void add_rhs(Index i, double v) { rhs_[i] += v; }
    void fix(Index i, double value) { fixed_[i] = value; }
    bool is_fixed(Index i) const { return fixed_.count(i) > 0; }
    void append(const std::vector<Triplet> &t) { triplets_.insert(triplets_.end(), t.begin(), t.end()); }

    SparseSystem finalize();

private:
    DofMap dofs_;
    std::vector<Triplet> triplets_;
    Eigen::VectorXd rhs_;
    std::map<Index, double> fixed_;
};

/// Diagonal change of variables from flux densities to total fluxes (1/|e| on bulk face and
/// mortar unknowns, 1 elsewhere).
std::vector<double> total_flux_scaling(const MixedDimMesh &md, const DofMap &dofs);

/// Bulk saddle-point blocks with boundary conditions and sources.
SparseSystem assemble_bulk(const PolyMesh &mesh, const PermeabilityField &k,
                           const BoundaryConditions &bc, const SourceField &f = {},
                           Exec exec = Exec::parallel);

/// Bulk, fracture, mortar and intersection blocks.
SparseSystem assemble_fractured(const MixedDimMesh &md, const PermeabilityField &k,
                                const BoundaryConditions &bc, const SourceField &f = {},
                                Exec exec = Exec::parallel);

/// Intersection unknowns and conditions (called by assemble_fractured).
void assemble_intersections(const MixedDimMesh &md, SystemBuilder &sys);

/// Solution split by block.
struct FlowSolution {
    std::vector<double> cell_pressure;
    /// Flux density per bulk face along the face normal; on fracture faces the mean of the
    /// two one-sided values.
    std::vector<double> face_flux;
    std::vector<std::vector<double>> fracture_flux;      // per branch, per point
    std::vector<std::vector<double>> fracture_pressure;  // per branch, per segment
    std::vector<double> mortar_flux;                     // per mortar cell
    std::vector<double> intersection_pressure;
};

FlowSolution split_solution(const MixedDimMesh &md, const DofMap &dofs, const Eigen::VectorXd &x);

/// Outward flux density of `cell` through its j-th face.
double outward_flux(const MixedDimMesh &md, const DofMap &dofs, const Eigen::VectorXd &x,
                    Index cell, std::size_t j);

/// Per-cell |sum sigma |e| u_e - |C| f| for bulk cells followed by fracture cells,
/// including mortar exchange, plus the largest face flux magnitude.
struct Conservation {
    std::vector<double> residual;
    double max_flux = 0.0;
    double worst() const;
};
Conservation conservation_residuals(const MixedDimMesh &md, const DofMap &dofs,
                                    const Eigen::VectorXd &x, const SourceField &f = {});

/// Trace pressures of the branches meeting at an intersection (reconstructed from the
/// Robin condition) in IntersectionPoint::branches order.
std::vector<double> intersection_traces(const MixedDimMesh &md, const DofMap &dofs,
                                        const Eigen::VectorXd &x, Index iota);

/// Two-point flux reference solver (scalar K per cell, bulk only).
struct TpfaResult {
    std::vector<double> pressure;
    std::vector<double> face_flux;  // total flux across each face along its normal
};
TpfaResult solve_tpfa(const PolyMesh &mesh, const std::vector<double> &k,
                      const BoundaryConditions &bc, const std::vector<double> &source = {});

}  // namespace fracvem
