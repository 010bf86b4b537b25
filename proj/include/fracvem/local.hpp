#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fracvem/mesh.hpp"

namespace fracvem {

using Mat2 = Eigen::Matrix2d;

/// Cell-wise permeability tensors.
using PermeabilityField = std::vector<Mat2>;

PermeabilityField isotropic_field(const std::vector<double> &k);
PermeabilityField uniform_field(std::size_t n, const Mat2 &k);

/// Throws NumericError unless K is symmetric (1e-14 relative) and positive definite.
void check_permeability(const Mat2 &k);

/// Local blocks of one cell. Dofs are normal-flux densities along the global face normals,
/// listed in the order of Cell::faces (bulk) or (start, end) along the tangent (fracture).
struct LocalMatrices {
    Eigen::MatrixXd proj;    // projection in dof space
    Eigen::MatrixXd cons;    // consistency
    Eigen::MatrixXd stab;    // stabilization
    Eigen::RowVectorXd div;  // divergence row

    Eigen::MatrixXd full() const { return cons + stab; }
};

/// Projection onto K grad P1 (constant fields), independent of K.
Eigen::MatrixXd local_projection(const PolyMesh &mesh, Index cell);
Eigen::MatrixXd local_consistency(const PolyMesh &mesh, Index cell, const Mat2 &k);
Eigen::MatrixXd local_stabilization(const PolyMesh &mesh, Index cell, const Mat2 &k);
Eigen::RowVectorXd local_divergence(const PolyMesh &mesh, Index cell);
LocalMatrices local_matrices(const PolyMesh &mesh, Index cell, const Mat2 &k);

/// One fracture segment of length h, aperture eps and tangential permeability kt.
LocalMatrices fracture_local_matrices(double h, double aperture, double kt);

/// Frobenius-norm ratio |S| / (|S| + |A|) with A the full local matrix.
double stabilization_index(const Eigen::MatrixXd &stab, const Eigen::MatrixXd &full);
double stabilization_index(const LocalMatrices &m);
/// Same ratio with both matrices written for total face fluxes (dof scaled by |e|). This is
/// the variant sensitive to slivers and short edges.
double stabilization_index(const PolyMesh &mesh, Index cell, const LocalMatrices &m);

enum class Exec { serial, parallel };

/// Local matrices of every cell. The parallel path splits cells over OpenMP threads;
/// both paths produce identical results.
std::vector<LocalMatrices> all_local_matrices(const PolyMesh &mesh, const PermeabilityField &k,
                                              Exec exec = Exec::parallel);

/// Harmonic composition of one-sided transmissibilities t_i = K_i |e| / d_i.
double tpfa_local(double k_left, double k_right, double measure, double d_left, double d_right);

/// TPFA transmissibility of an interior face, with d_i the centroid-to-face-midpoint distance
/// projected on the face normal.
double tpfa_transmissibility(const PolyMesh &mesh, Index face, double k_left, double k_right);

/// One-sided transmissibility of cell `cell` towards face `face`.
double tpfa_half(const PolyMesh &mesh, Index face, Index cell, double k);

}  // namespace fracvem
