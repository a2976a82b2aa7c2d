#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "clamg/hierarchy.hpp"
#include "clamg/problems.hpp"
#include "oracle.hpp"

using namespace clamg;
using oracle::Dense;

namespace {

AmgConfig classical_config() {
    AmgConfig cfg;
    cfg.smoother = SmootherKind::Jacobi;
    cfg.interp = InterpKind::Classical;
    cfg.max_coarse = 8;
    return cfg;
}

// Linear interpolation from the even nodes of a 1D chain of length n.
SparseMatrix linear_interpolation(index_t n) {
    std::vector<Triplet> t;
    for (index_t r = 0; r < n; ++r) {
        if (r % 2 == 1) {
            t.push_back({r, r / 2, 1.0});
            continue;
        }
        if (r / 2 - 1 >= 0)
            t.push_back({r, r / 2 - 1, 0.5});
        if (r / 2 < n / 2)
            t.push_back({r, r / 2, 0.5});
    }
    return SparseMatrix::from_triplets(n, n / 2, t);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST(Config, ValidationRejectsBadValues) {
    AmgConfig cfg;
    cfg.nu1 = cfg.nu2 = 0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = AmgConfig{};
    cfg.filter_rho = 0.0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = AmgConfig{};
    cfg.stall_fraction = 1.5;
    EXPECT_THROW(cfg.validate(), Error);
    EXPECT_NO_THROW(AmgConfig{}.validate());
}

TEST(Setup, SmallMatrixIsSingleLevelDirectSolve) {
    std::vector<double> d(10);
    for (int r = 0; r < 10; ++r)
        d[r] = 1.0 + r;
    AmgConfig cfg;
    cfg.max_coarse = 16;
    const auto H = AmgHierarchy::setup(SparseMatrix::diagonal(d), cfg);
    EXPECT_EQ(H.n_levels(), 1u);
    EXPECT_DOUBLE_EQ(H.grid_complexity(), 1.0);
    EXPECT_DOUBLE_EQ(H.operator_complexity(), 1.0);
    std::vector<double> y(10, 1.0), x(10);
    H.vcycle(y, x);
    for (int r = 0; r < 10; ++r)
        EXPECT_NEAR(x[r], 1.0 / d[r], 1e-15);
}

TEST(Setup, Poisson1dCoarsensByHalf) {
    const auto A = oracle::sparse(oracle::poisson1d(64));
    const auto H = AmgHierarchy::setup(A, classical_config());
    ASSERT_GE(H.n_levels(), 2u);
    for (std::size_t k = 1; k < H.n_levels(); ++k) {
        EXPECT_LE(H.level(k).A.nrows(), 0.6 * H.level(k - 1).A.nrows());
        EXPECT_EQ(H.level(k - 1).P.ncols(), H.level(k).A.nrows());
    }
    EXPECT_LE(H.level(H.n_levels() - 1).A.nrows(), 8);
}

TEST(Setup, Poisson3dStructuralBands) {
    const auto H = AmgHierarchy::setup(gen_poisson7(16, 16, 16), AmgConfig{});
    EXPECT_LE(H.n_levels(), 10u);
    EXPECT_LE(H.level(H.n_levels() - 1).A.nrows(), 200);
    EXPECT_GE(H.grid_complexity(), 1.05);
    EXPECT_LE(H.grid_complexity(), 1.7);
    EXPECT_GE(H.operator_complexity(), 1.2);
    EXPECT_LE(H.operator_complexity(), 5.0);
    EXPECT_FALSE(H.requires_nonsymmetric_solver());
}

TEST(Setup, MaxLevelsCapsDepth) {
    auto cfg = classical_config();
    cfg.max_levels = 2;
    cfg.max_coarse = 1;
    const auto H = AmgHierarchy::setup(oracle::sparse(oracle::poisson1d(64)), cfg);
    EXPECT_EQ(H.n_levels(), 2u);
}

TEST(Setup, OperatorFilteringFlagsNonsymmetricLevels) {
    AmgConfig cfg;
    cfg.filter_target = FilterTarget::Operator;
    cfg.filter_rho = 0.9;
    const auto H = AmgHierarchy::setup(gen_poisson7(12, 12, 12), cfg);
    EXPECT_TRUE(H.requires_nonsymmetric_solver());
}

TEST(Complexities, Arithmetic) {
    // 16 decoupled 2x2 blocks (n=32, nnz=64) and a dense 32x4 prolongation
    // give a dense 4x4 coarse operator: (1 + 4/32, 1 + 16/64).
    std::vector<Triplet> t;
    for (index_t p = 0; p < 16; ++p) {
        t.push_back({2 * p, 2 * p, 3.0});
        t.push_back({2 * p, 2 * p + 1, -1.0});
        t.push_back({2 * p + 1, 2 * p, -1.0});
        t.push_back({2 * p + 1, 2 * p + 1, 3.0});
    }
    const auto A = SparseMatrix::from_triplets(32, 32, t);
    std::mt19937_64 rng(1);
    Dense P = oracle::random_sparse(rng, 32, 4, 1.0);
    P.topRows(4) += 4.0 * Dense::Identity(4, 4);
    AmgConfig cfg;
    cfg.smoother = SmootherKind::Jacobi;
    const auto H = AmgHierarchy::from_prolongations(A, {oracle::sparse(P)}, cfg);
    ASSERT_EQ(H.level(1).A.nnz(), 16u);
    EXPECT_DOUBLE_EQ(H.grid_complexity(), 1.125);
    EXPECT_DOUBLE_EQ(H.operator_complexity(), 1.25);
}

TEST(VCycle, ZeroInLinearAndDimensionChecked) {
    const auto A = oracle::sparse(oracle::poisson2d(20));
    const auto H = AmgHierarchy::setup(A, classical_config());
    std::vector<double> zero(400, 0.0), x(400, 1.0);
    H.vcycle(zero, x);
    for (double v : x)
        EXPECT_EQ(v, 0.0);

    std::mt19937_64 rng(2);
    const auto y1 = oracle::random_vector(rng, 400), y2 = oracle::random_vector(rng, 400);
    std::vector<double> comb(400), x1(400), x2(400), xc(400);
    for (int r = 0; r < 400; ++r)
        comb[r] = 2.0 * y1[r] - 3.0 * y2[r];
    H.vcycle(y1, x1);
    H.vcycle(y2, x2);
    H.vcycle(comb, xc);
    for (int r = 0; r < 400; ++r)
        EXPECT_NEAR(xc[r], 2.0 * x1[r] - 3.0 * x2[r], 1e-12 * (1.0 + std::abs(xc[r])));

    std::vector<double> bad(3);
    EXPECT_THROW(H.vcycle(bad, bad), DimensionError);
}

TEST(VCycle, SymmetricForEqualSmoothingSteps) {
    std::mt19937_64 rng(3);
    for (auto kind : {SmootherKind::Jacobi, SmootherKind::Fsai}) {
        AmgConfig cfg;
        cfg.smoother = kind;
        cfg.max_coarse = 20;
        const auto H = AmgHierarchy::setup(oracle::sparse(oracle::poisson2d(20)), cfg);
        ASSERT_GE(H.n_levels(), 2u);
        for (int t = 0; t < 5; ++t) {
            const auto y1 = oracle::random_vector(rng, 400), y2 = oracle::random_vector(rng, 400);
            std::vector<double> x1(400), x2(400);
            H.vcycle(y1, x1);
            H.vcycle(y2, x2);
            EXPECT_NEAR(dot(x1, y2), dot(y1, x2), 1e-10 * std::abs(dot(x1, y2)));
        }
    }
}

TEST(VCycle, TwoGridMatchesDenseErrorPropagation) {
    const index_t n = 8;
    const Dense Ad = oracle::poisson1d(n);
    const auto A = oracle::sparse(Ad);
    const auto P = linear_interpolation(n);
    for (auto [nu1, nu2] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{0, 2}}) {
        AmgConfig cfg;
        cfg.smoother = SmootherKind::Jacobi;
        cfg.nu1 = nu1;
        cfg.nu2 = nu2;
        const auto H = AmgHierarchy::from_prolongations(A, {P}, cfg);
        ASSERT_EQ(H.n_levels(), 2u);
        const double omega = H.level(0).smoother.omega;

        const Dense I = Dense::Identity(n, n);
        const Dense S = I - omega * Ad.diagonal().cwiseInverse().asDiagonal() * Ad;
        const Dense Pd = oracle::dense(P);
        const Dense Ac = Pd.transpose() * Ad * Pd;
        const Dense CGC = I - Pd * Ac.llt().solve(Pd.transpose() * Ad);
        Dense Spre = I, Spost = I;
        for (int s = 0; s < nu1; ++s)
            Spre = S * Spre;
        for (int s = 0; s < nu2; ++s)
            Spost = S * Spost;
        const Dense E = Spost * CGC * Spre;

        std::mt19937_64 rng(4);
        for (int t = 0; t < 20; ++t) {
            const auto e = oracle::random_vector(rng, n);
            std::vector<double> Ae(n), Be(n);
            spmv(A, e, Ae);
            H.vcycle(Ae, Be);
            Eigen::VectorXd got(n);
            for (index_t r = 0; r < n; ++r)
                got(r) = e[r] - Be[r];
            EXPECT_LE(oracle::rel_diff(got, E * oracle::vec(e)), 1e-12);
        }
    }
}

TEST(CoarseSolver, ExactOnLastLevelAndShiftRetry) {
    std::mt19937_64 rng(5);
    const Dense S = oracle::random_spd(rng, 30, 0.3);
    const auto f = factor_coarsest(oracle::sparse(S), true);
    const auto b = oracle::random_vector(rng, 30);
    std::vector<double> x(30);
    coarse_solve(*f, b, x);
    EXPECT_LE((S * oracle::vec(x) - oracle::vec(b)).norm(), 1e-12 * oracle::vec(b).norm());

    // nonsymmetric coarse operator goes through LU
    Dense N = S;
    N(0, 1) += 0.3;
    const auto g = factor_coarsest(oracle::sparse(N), false);
    coarse_solve(*g, b, x);
    EXPECT_LE((N * oracle::vec(x) - oracle::vec(b)).norm(), 1e-12 * oracle::vec(b).norm());
}

TEST(FromProlongations, RejectsBrokenChains) {
    const auto A = oracle::sparse(oracle::poisson1d(8));
    EXPECT_THROW(AmgHierarchy::from_prolongations(A, {SparseMatrix::identity(8)}, AmgConfig{}), DimensionError);
    EXPECT_THROW(AmgHierarchy::from_prolongations(A, {linear_interpolation(6)}, AmgConfig{}), DimensionError);
}

TEST(Summary, GoldenPoisson1d) {
    const auto H = AmgHierarchy::setup(oracle::sparse(oracle::poisson1d(64)), classical_config());
    std::ostringstream out;
    H.print_summary(out);
    EXPECT_EQ(out.str(), read_file(std::string(CLAMG_GOLDEN_DIR) + "/summary_poisson1d_64.txt"));
}

TEST(Setup, BamgWithRigidBodyOnBeam) {
    const auto beam = gen_elasticity3d(12, 4, 4, 1e6, 0.45, BoundaryKind::Clamped);
    AmgConfig cfg;
    cfg.soc = SocKind::StrongCoupling;
    cfg.interp = InterpKind::Bamg;
    cfg.testspace = TestSpaceKind::RigidBody;
    const auto H = AmgHierarchy::setup(beam.A, cfg, &beam.coords);
    ASSERT_GE(H.n_levels(), 2u);
    EXPECT_EQ(H.level(0).V.ncols(), 6);
    EXPECT_EQ(H.level(1).V.nrows(), H.level(1).A.nrows());
}

TEST(Setup, RigidBodyWithoutCoordsFails) {
    AmgConfig cfg;
    cfg.interp = InterpKind::Bamg;
    cfg.testspace = TestSpaceKind::RigidBody;
    EXPECT_THROW(AmgHierarchy::setup(gen_poisson7(9, 9, 9), cfg), DimensionError);
}
