#include "fracvem/sparse.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "fracvem/errors.hpp"

namespace fracvem {

SparseMatrix SparseMatrix::from_triplets(Index n, std::vector<Triplet> t) {
    for (const Triplet &x : t) {
        if (x.row < 0 || x.col < 0 || x.row >= n || x.col >= n) {
            throw NumericError("triplet index out of range");
        }
    }
    // Sorting on the value as well makes duplicate summation independent of input order.
    std::sort(t.begin(), t.end(), [](const Triplet &a, const Triplet &b) {
        if (a.row != b.row) return a.row < b.row;
        if (a.col != b.col) return a.col < b.col;
        return a.value < b.value;
    });
    SparseMatrix m;
    m.n_ = n;
    m.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
    std::size_t k = 0;
    while (k < t.size()) {
        const Index r = t[k].row;
        const Index c = t[k].col;
        double v = 0.0;
        for (; k < t.size() && t[k].row == r && t[k].col == c; ++k) v += t[k].value;
        if (v != 0.0) {
            m.col_idx_.push_back(c);
            m.values_.push_back(v);
            ++m.row_ptr_[r + 1];
        }
    }
    for (Index i = 0; i < n; ++i) m.row_ptr_[i + 1] += m.row_ptr_[i];
    return m;
}

double SparseMatrix::coeff(Index i, Index j) const {
    const auto b = col_idx_.begin() + row_ptr_[i];
    const auto e = col_idx_.begin() + row_ptr_[i + 1];
    const auto it = std::lower_bound(b, e, j);
    return it != e && *it == j ? values_[it - col_idx_.begin()] : 0.0;
}

Eigen::VectorXd SparseMatrix::multiply(const Eigen::VectorXd &x) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
    for (Index i = 0; i < n_; ++i) {
        double s = 0.0;
        for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[col_idx_[k]];
        y[i] = s;
    }
    return y;
}

double SparseMatrix::norm1() const {
    std::vector<double> col(n_, 0.0);
    for (std::size_t k = 0; k < values_.size(); ++k) col[col_idx_[k]] += std::abs(values_[k]);
    return col.empty() ? 0.0 : *std::max_element(col.begin(), col.end());
}

Eigen::SparseMatrix<double> SparseMatrix::to_eigen() const {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(values_.size());
    for (Index i = 0; i < n_; ++i) {
        for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) t.emplace_back(i, col_idx_[k], values_[k]);
    }
    Eigen::SparseMatrix<double> a(n_, n_);
    a.setFromTriplets(t.begin(), t.end());
    a.makeCompressed();
    return a;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n_, n_);
    for (Index i = 0; i < n_; ++i) {
        for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d(i, col_idx_[k]) = values_[k];
    }
    return d;
}

SparseMatrix SparseMatrix::scaled(const std::vector<double> &w) const {
    if (static_cast<Index>(w.size()) != n_) throw NumericError("scaling size mismatch");
    SparseMatrix m = *this;
    for (Index i = 0; i < n_; ++i) {
        for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) m.values_[k] *= w[i] * w[col_idx_[k]];
    }
    return m;
}

bool SparseMatrix::structurally_symmetric() const {
    for (Index i = 0; i < n_; ++i) {
        for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            const Index j = col_idx_[k];
            const auto b = col_idx_.begin() + row_ptr_[j];
            const auto e = col_idx_.begin() + row_ptr_[j + 1];
            if (!std::binary_search(b, e, i)) return false;
        }
    }
    return true;
}

double SparseMatrix::asymmetry(Index block) const {
    double amax = 0.0;
    double d = 0.0;
    for (Index i = 0; i < std::min(block, n_); ++i) {
        for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            const Index j = col_idx_[k];
            amax = std::max(amax, std::abs(values_[k]));
            if (j < block) d = std::max(d, std::abs(values_[k] - coeff(j, i)));
        }
    }
    return amax > 0.0 ? d / amax : 0.0;
}

void SparseMatrix::write_coordinate(std::ostream &os) const {
    const auto old = os.precision(17);
    for (Index i = 0; i < n_; ++i) {
        for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            os << i + 1 << ' ' << col_idx_[k] + 1 << ' ' << values_[k] << '\n';
        }
    }
    os.precision(old);
}

SparseLU::SparseLU(const SparseMatrix &a) : a_(a.to_eigen()) {
    lu_.compute(a_);
    if (lu_.info() != Eigen::Success) {
        throw NumericError("singular matrix: " + lu_.lastErrorMessage());
    }
}

Eigen::VectorXd SparseLU::solve(const Eigen::VectorXd &b) const {
    Eigen::VectorXd x = lu_.solve(b);
    if (lu_.info() != Eigen::Success || !x.allFinite()) {
        throw NumericError("sparse LU solve failed");
    }
    return x;
}

Eigen::VectorXd SparseLU::solve_transpose(const Eigen::VectorXd &b) const {
    Eigen::VectorXd x = lu_.transpose().solve(b);
    if (!x.allFinite()) {
        throw NumericError("sparse LU transpose solve failed");
    }
    return x;
}

Eigen::VectorXd solve_direct(const SparseMatrix &a, const Eigen::VectorXd &g, double tol) {
    if (g.size() != a.size()) {
        throw NumericError("right-hand side size mismatch");
    }
    const SparseLU lu(a);
    Eigen::VectorXd x = lu.solve(g);
    const double gn = g.norm();
    const double res = (a.multiply(x) - g).norm();
    if (res > tol * (gn > 0.0 ? gn : 1.0)) {
        throw NumericError("direct solve residual check failed: " + std::to_string(res / gn));
    }
    return x;
}

double condest_1norm(const SparseMatrix &a, const SparseLU &lu) {
    // Hager's algorithm with Higham's refinements for ||A^-1||_1.
    const Index n = a.size();
    if (n == 0) return 0.0;
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
    double est = 0.0;
    Index last_j = -1;
    for (int iter = 0; iter < 5; ++iter) {
        const Eigen::VectorXd y = lu.solve(x);
        const double ny = y.lpNorm<1>();
        if (iter > 0 && ny <= est) {
            break;
        }
        est = ny;
        Eigen::VectorXd xi(n);
        for (Index i = 0; i < n; ++i) xi[i] = y[i] >= 0.0 ? 1.0 : -1.0;
        const Eigen::VectorXd z = lu.solve_transpose(xi);
        Index j = 0;
        z.cwiseAbs().maxCoeff(&j);
        if (iter > 0 && (j == last_j || std::abs(z[j]) <= z.dot(x))) {
            break;
        }
        last_j = j;
        x.setZero();
        x[j] = 1.0;
    }
    // Higham's alternative vector guards against unlucky cancellation.
    Eigen::VectorXd alt(n);
    for (Index i = 0; i < n; ++i) {
        alt[i] = (i % 2 == 0 ? 1.0 : -1.0) * (1.0 + static_cast<double>(i) / std::max<Index>(1, n - 1));
    }
    const double alt_est = 2.0 * lu.solve(alt).lpNorm<1>() / (3.0 * n);
    est = std::max(est, alt_est);
    return est * a.norm1();
}

double condest_1norm(const SparseMatrix &a) {
    const SparseLU lu(a);
    return condest_1norm(a, lu);
}

MatrixStats matrix_stats(const SparseMatrix &a, const Eigen::VectorXd &g, int timing_runs,
                         bool with_condition) {
    MatrixStats s;
    s.n_dof = a.size();
    s.nnz = a.nnz();
    s.nbar = static_cast<double>(s.nnz) / static_cast<double>(s.n_dof);
    const int runs = std::max(1, timing_runs);
    double total = 0.0;
    for (int r = 0; r < runs; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        (void)solve_direct(a, g);
        total += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    s.solve_time = total / runs;
    const double n = static_cast<double>(s.n_dof);
    s.normalized_time = s.solve_time / (n * n * n);
    if (with_condition) {
        s.condition = condest_1norm(a);
    }
    return s;
}

}  // namespace fracvem
