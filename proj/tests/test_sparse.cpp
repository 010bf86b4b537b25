#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "fracvem/errors.hpp"
#include "fracvem/sparse.hpp"

using namespace fracvem;

namespace {

std::vector<Triplet> random_triplets(std::mt19937 &rng, Index n, std::size_t count) {
    std::uniform_int_distribution<Index> idx(0, n - 1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Triplet> t;
    for (std::size_t k = 0; k < count; ++k) t.push_back({idx(rng), idx(rng), u(rng)});
    return t;
}

// Diagonally dominant random sparse matrix with a random pattern.
SparseMatrix random_matrix(std::mt19937 &rng, Index n) {
    auto t = random_triplets(rng, n, static_cast<std::size_t>(3 * n));
    std::uniform_real_distribution<double> u(0.5, 3.0);
    for (Index i = 0; i < n; ++i) t.push_back({i, i, (i % 7 == 0 ? 1e-3 : 1.0) * u(rng)});
    return SparseMatrix::from_triplets(n, t);
}

double dense_cond1(const Eigen::MatrixXd &a) {
    const Eigen::MatrixXd inv = a.inverse();
    return a.cwiseAbs().colwise().sum().maxCoeff() * inv.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

TEST_SUITE("sparse") {

TEST_CASE("triplet consolidation ignores input order") {
    std::mt19937 rng(41);
    auto t = random_triplets(rng, 30, 400);
    const SparseMatrix a = SparseMatrix::from_triplets(30, t);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(t.begin(), t.end(), rng);
        CHECK(SparseMatrix::from_triplets(30, t) == a);
    }
    // duplicates summed, cancelling entries dropped
    const SparseMatrix b = SparseMatrix::from_triplets(2, {{0, 0, 1.0}, {0, 0, 2.0}, {1, 0, 1.0}, {1, 0, -1.0}});
    CHECK(b.nnz() == 1);
    CHECK(b.coeff(0, 0) == 3.0);
    CHECK(b.coeff(1, 0) == 0.0);
    for (std::size_t k = 0; k < a.values().size(); ++k) CHECK(a.values()[k] != 0.0);
    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, {{0, 2, 1.0}}), NumericError);
}

TEST_CASE("eigen and dense views agree") {
    std::mt19937 rng(43);
    const SparseMatrix a = random_matrix(rng, 25);
    const Eigen::MatrixXd d = a.to_dense();
    CHECK((Eigen::MatrixXd(a.to_eigen()) - d).norm() == 0.0);
    const Eigen::VectorXd x = Eigen::VectorXd::Random(25);
    CHECK((a.multiply(x) - d * x).norm() < 1e-13);
    CHECK(a.norm1() == doctest::Approx(d.cwiseAbs().colwise().sum().maxCoeff()));
    std::vector<double> w(25);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 + static_cast<double>(i);
    const Eigen::VectorXd we = Eigen::Map<Eigen::VectorXd>(w.data(), 25);
    CHECK((a.scaled(w).to_dense() - we.asDiagonal() * d * we.asDiagonal()).norm() < 1e-12);
    std::ostringstream os;
    SparseMatrix::from_triplets(2, {{1, 0, 2.5}}).write_coordinate(os);
    CHECK(os.str().find("2 1 2.5") != std::string::npos);
}

TEST_CASE("direct solves") {
    const SparseMatrix id = SparseMatrix::from_triplets(3, {{0, 0, 1}, {1, 1, 1}, {2, 2, 1}});
    const Eigen::Vector3d g(1, -2, 3);
    CHECK((solve_direct(id, g) - g).norm() == 0.0);

    // saddle point with a zero diagonal
    const SparseMatrix s = SparseMatrix::from_triplets(2, {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}});
    const Eigen::VectorXd x = solve_direct(s, Eigen::Vector2d(2, 1));
    CHECK(x(0) == doctest::Approx(1.0));
    CHECK(x(1) == doctest::Approx(1.0));

    const SparseMatrix sing = SparseMatrix::from_triplets(2, {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}});
    CHECK_THROWS_AS(solve_direct(sing, Eigen::Vector2d(1, 2)), NumericError);

    std::mt19937 rng(47);
    const SparseMatrix a = random_matrix(rng, 150);
    const Eigen::VectorXd b = Eigen::VectorXd::Random(150);
    const Eigen::VectorXd y = solve_direct(a, b);
    CHECK((a.multiply(y) - b).norm() <= 1e-8 * b.norm());
    CHECK((solve_direct(a, b) - y).norm() == 0.0);
    const SparseLU lu(a);
    const Eigen::VectorXd z = lu.solve_transpose(b);
    CHECK((a.to_dense().transpose() * z - b).norm() < 1e-8 * b.norm());
}

TEST_CASE("condition estimate") {
    const SparseMatrix id = SparseMatrix::from_triplets(4, {{0, 0, 1}, {1, 1, 1}, {2, 2, 1}, {3, 3, 1}});
    CHECK(condest_1norm(id) == doctest::Approx(1.0));
    CHECK(condest_1norm(SparseMatrix::from_triplets(2, {{0, 0, 1}, {1, 1, 1e6}})) == doctest::Approx(1e6));
    CHECK_THROWS_AS(condest_1norm(SparseMatrix::from_triplets(2, {{0, 0, 1}})), NumericError);

    std::mt19937 rng(53);
    std::uniform_int_distribution<Index> size(5, 200);
    for (int trial = 0; trial < 30; ++trial) {
        const SparseMatrix a = random_matrix(rng, size(rng));
        const double exact = dense_cond1(a.to_dense());
        const double est = condest_1norm(a);
        CHECK(est <= exact * (1 + 1e-10));
        CHECK(est >= exact / 10);
    }
}

TEST_CASE("matrix statistics") {
    const SparseMatrix d = SparseMatrix::from_triplets(2, {{0, 0, 2}, {0, 1, 1}, {1, 0, 1}, {1, 1, 3}});
    const MatrixStats s = matrix_stats(d, Eigen::Vector2d(1, 1));
    CHECK(s.nbar == 2.0);
    CHECK(s.n_dof == 2);
    CHECK(s.condition > 0.0);
    CHECK(s.normalized_time > 0.0);

    std::mt19937 rng(59);
    const SparseMatrix a = random_matrix(rng, 120);
    std::size_t count = 0;
    const Eigen::MatrixXd dense = a.to_dense();
    for (Index i = 0; i < 120; ++i) {
        for (Index j = 0; j < 120; ++j) count += dense(i, j) != 0.0;
    }
    const MatrixStats t = matrix_stats(a, Eigen::VectorXd::Ones(120), 2, false);
    CHECK(t.nnz == count);
    CHECK(t.nbar == static_cast<double>(count) / 120.0);
    const MatrixStats u = matrix_stats(a, Eigen::VectorXd::Ones(120), 1, false);
    CHECK(u.nnz == t.nnz);
    CHECK(u.nbar == t.nbar);
}

TEST_CASE("symmetry checks") {
    const SparseMatrix s = SparseMatrix::from_triplets(3, {{0, 1, 1}, {1, 0, 1}, {2, 2, 1}});
    CHECK(s.structurally_symmetric());
    CHECK(s.asymmetry(3) == 0.0);
    const SparseMatrix n = SparseMatrix::from_triplets(3, {{0, 1, 1}, {2, 2, 1}});
    CHECK_FALSE(n.structurally_symmetric());
}

}
