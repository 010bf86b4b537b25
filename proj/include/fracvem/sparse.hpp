#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "fracvem/geometry.hpp"

namespace fracvem {

struct Triplet {
    Index row = 0;
    Index col = 0;
    double value = 0.0;
};

/// Square compressed-row matrix. Built from triplets: duplicates are summed, zeros dropped.
class SparseMatrix {
public:
    SparseMatrix() = default;

    static SparseMatrix from_triplets(Index n, std::vector<Triplet> triplets);

    Index size() const { return n_; }
    std::size_t nnz() const { return values_.size(); }
    const std::vector<Index> &row_ptr() const { return row_ptr_; }
    const std::vector<Index> &col_idx() const { return col_idx_; }
    const std::vector<double> &values() const { return values_; }

    double coeff(Index i, Index j) const;
    Eigen::VectorXd multiply(const Eigen::VectorXd &x) const;
    double norm1() const;
    Eigen::SparseMatrix<double> to_eigen() const;
    Eigen::MatrixXd to_dense() const;

    /// diag(w) A diag(w).
    SparseMatrix scaled(const std::vector<double> &w) const;

    bool structurally_symmetric() const;
    /// max |a_ij - a_ji| over the given leading block, relative to the largest entry.
    double asymmetry(Index block) const;

    /// Coordinate text export: "row col value" per line, 1-based.
    void write_coordinate(std::ostream &os) const;

    bool operator==(const SparseMatrix &o) const {
        return n_ == o.n_ && row_ptr_ == o.row_ptr_ && col_idx_ == o.col_idx_ && values_ == o.values_;
    }

private:
    Index n_ = 0;
    std::vector<Index> row_ptr_{0};
    std::vector<Index> col_idx_;
    std::vector<double> values_;
};

/// LU factorization (partial pivoting) of a sparse matrix.
class SparseLU {
public:
    explicit SparseLU(const SparseMatrix &a);
    Eigen::VectorXd solve(const Eigen::VectorXd &b) const;
    Eigen::VectorXd solve_transpose(const Eigen::VectorXd &b) const;

private:
    Eigen::SparseMatrix<double> a_;
    mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
};

/// Solve A x = g; throws NumericError if singular or ||Ax - g|| > tol ||g||.
Eigen::VectorXd solve_direct(const SparseMatrix &a, const Eigen::VectorXd &g, double tol = 1e-8);

/// Hager-Higham estimate of ||A||_1 ||A^-1||_1 (a lower bound of the true value).
double condest_1norm(const SparseMatrix &a);
double condest_1norm(const SparseMatrix &a, const SparseLU &lu);

struct MatrixStats {
    Index n_dof = 0;
    Index n_cells = 0;
    Index n_faces = 0;
    std::size_t nnz = 0;
    double nbar = 0.0;
    double condition = 0.0;
    double solve_time = 0.0;
    double normalized_time = 0.0;
};

/// Statistics of a system; the solve is timed over `timing_runs` repetitions (mean).
MatrixStats matrix_stats(const SparseMatrix &a, const Eigen::VectorXd &g, int timing_runs = 1,
                         bool with_condition = true);

}  // namespace fracvem
