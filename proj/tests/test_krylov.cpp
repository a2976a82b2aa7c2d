#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "clamg/krylov.hpp"
#include "oracle.hpp"

using namespace clamg;
using oracle::Dense;

namespace {

LinearOperator dense_inverse(const Dense& A) {
    const Dense inv = A.inverse();
    return [inv](std::span<const double> x, std::span<double> y) {
        const Eigen::VectorXd r = inv * Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
        std::copy(r.data(), r.data() + r.size(), y.begin());
    };
}

double true_rel_residual(const SparseMatrix& A, const std::vector<double>& x, const std::vector<double>& b) {
    std::vector<double> r(b);
    spmv(-1.0, A, x, 1.0, r);
    return norm2(r) / norm2(b);
}

} // namespace

TEST(Pcg, IdentityOneIteration) {
    const auto A = SparseMatrix::identity(10);
    std::mt19937_64 rng(1);
    const auto b = oracle::random_vector(rng, 10);
    const auto res = pcg(matrix_operator(A), identity_operator(), b, std::vector<double>(10, 0.0));
    EXPECT_TRUE(res.converged);
    EXPECT_EQ(res.iterations, 1);
    EXPECT_EQ(res.x, b);
}

TEST(Pcg, PerfectPreconditionerOneIteration) {
    const std::vector<double> d{1, 3, 9, 27, 81};
    const auto A = SparseMatrix::diagonal(d);
    const auto res = pcg(matrix_operator(A), dense_inverse(oracle::dense(A)), std::vector<double>(5, 1.0),
                         std::vector<double>(5, 0.0));
    EXPECT_TRUE(res.converged);
    EXPECT_EQ(res.iterations, 1);
}

TEST(Pcg, DenseSpdFiniteTerminationAndEnergyMonotone) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 5; ++t) {
        const int n = 50 + static_cast<int>(rng() % 150);
        const Dense Ad = oracle::random_spd(rng, n, 0.5 / std::sqrt(n));
        const auto A = oracle::sparse(Ad);
        const auto b = oracle::random_vector(rng, n);
        const Eigen::VectorXd xs = Ad.llt().solve(oracle::vec(b));

        // track the A-norm error through the history by re-running with growing caps
        double prev = xs.dot(Ad * xs);
        KrylovConfig cfg;
        for (int cap = 1; cap <= 12; ++cap) {
            cfg.max_iters = cap;
            const auto r = pcg(matrix_operator(A), identity_operator(), b, std::vector<double>(n, 0.0), cfg);
            const Eigen::VectorXd e = oracle::vec(r.x) - xs;
            const double en = e.dot(Ad * e);
            EXPECT_LE(en, prev * (1.0 + 1e-12) + 1e-300);
            prev = en;
        }
        cfg.max_iters = 5000;
        const auto r = pcg(matrix_operator(A), identity_operator(), b, std::vector<double>(n, 0.0), cfg);
        EXPECT_TRUE(r.converged);
        if (n <= 50)
            EXPECT_LE(r.iterations, n);
        EXPECT_LE(true_rel_residual(A, r.x, b), 1.01 * cfg.rtol);
        EXPECT_LE((oracle::vec(r.x) - xs).norm(), 1e-6 * xs.norm());
    }
}

TEST(Pcg, IndefiniteOperatorIsRejected) {
    const std::vector<double> d{1, -1, 2};
    try {
        pcg(matrix_operator(SparseMatrix::diagonal(d)), identity_operator(), std::vector<double>{0, 1, 0},
            std::vector<double>(3, 0.0));
        FAIL();
    } catch (const NotSpdError& e) {
        EXPECT_STREQ(e.what(), "operator not SPD");
    }
}

TEST(Pcg, HistoryRecordedAndDeterministic) {
    const auto A = oracle::sparse(oracle::poisson2d(15));
    std::mt19937_64 rng(3);
    const auto b = oracle::random_vector(rng, 225);
    KrylovConfig cfg;
    cfg.record_history = true;
    const auto r1 = pcg(matrix_operator(A), identity_operator(), b, std::vector<double>(225, 0.0), cfg);
    const auto r2 = pcg(matrix_operator(A), identity_operator(), b, std::vector<double>(225, 0.0), cfg);
    ASSERT_EQ(r1.history.size(), static_cast<std::size_t>(r1.iterations) + 1);
    EXPECT_DOUBLE_EQ(r1.history.front(), 1.0);
    EXPECT_EQ(r1.history, r2.history);
    EXPECT_EQ(r1.x, r2.x);

    std::ostringstream out;
    write_history_csv(out, {1.0, 0.5});
    EXPECT_EQ(out.str(), "iteration,relative_residual\n0,1\n1,0.5\n");
}

TEST(Pcg, NotConvergedWithinCap) {
    const auto A = oracle::sparse(oracle::poisson1d(100));
    KrylovConfig cfg;
    cfg.max_iters = 3;
    const auto r = pcg(matrix_operator(A), identity_operator(), std::vector<double>(100, 1.0),
                       std::vector<double>(100, 0.0), cfg);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.iterations, 3);
}

TEST(BiCGstab, IdentityAndNonsymmetric2x2) {
    const auto I = SparseMatrix::identity(4);
    KrylovConfig cfg;
    cfg.method = KrylovMethod::BiCGstab;
    const auto r = krylov_solve(matrix_operator(I), identity_operator(), std::vector<double>{1, 2, 3, 4},
                                std::vector<double>(4, 0.0), cfg);
    EXPECT_EQ(r.iterations, 1);
    EXPECT_TRUE(r.converged);

    const auto A = SparseMatrix::from_dense(2, 2, std::vector<double>{2, 1, 0, 3});
    cfg.rtol = 1e-12;
    const auto s = bicgstab(matrix_operator(A), identity_operator(), std::vector<double>{1, 1},
                            std::vector<double>(2, 0.0), cfg);
    EXPECT_TRUE(s.converged);
    EXPECT_NEAR(s.x[0], 1.0 / 3.0, 1e-10);
    EXPECT_NEAR(s.x[1], 1.0 / 3.0, 1e-10);
}

TEST(BiCGstab, RandomNonsymmetricMatchesDirectSolve) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 5; ++t) {
        Dense D = oracle::random_sparse(rng, 80, 80, 0.05);
        for (int r = 0; r < 80; ++r)
            D(r, r) = D.row(r).cwiseAbs().sum() + 1.0;
        const auto A = oracle::sparse(D);
        const auto b = oracle::random_vector(rng, 80);
        KrylovConfig cfg;
        cfg.rtol = 1e-10;
        const auto s = bicgstab(matrix_operator(A), identity_operator(), b, std::vector<double>(80, 0.0), cfg);
        EXPECT_TRUE(s.converged);
        EXPECT_LE(true_rel_residual(A, s.x, b), 1.01e-10);
        const Eigen::VectorXd xs = D.partialPivLu().solve(oracle::vec(b));
        EXPECT_LE((oracle::vec(s.x) - xs).norm(), 1e-8 * xs.norm());
    }
}

TEST(Krylov, ZeroRightHandSide) {
    const auto A = oracle::sparse(oracle::poisson1d(5));
    for (auto m : {KrylovMethod::Pcg, KrylovMethod::BiCGstab}) {
        KrylovConfig cfg;
        cfg.method = m;
        const auto r = krylov_solve(matrix_operator(A), identity_operator(), std::vector<double>(5, 0.0),
                                    std::vector<double>(5, 0.0), cfg);
        EXPECT_TRUE(r.converged);
        EXPECT_EQ(r.iterations, 0);
    }
    EXPECT_STREQ(to_string(KrylovMethod::BiCGstab), "bicgstab");
}
