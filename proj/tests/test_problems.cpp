#include <cmath>

#include <gtest/gtest.h>

#include "clamg/hierarchy.hpp"
#include "clamg/krylov.hpp"
#include "clamg/problems.hpp"
#include "clamg/testspace.hpp"
#include "oracle.hpp"

using namespace clamg;
using oracle::Dense;

namespace {

// Kronecker-sum Laplacian, x fastest.
Dense kron_laplacian(int nx, int ny, int nz) {
    auto I = [](int m) { return Dense::Identity(m, m); };
    auto kron = [](const Dense& A, const Dense& B) {
        Dense K(A.rows() * B.rows(), A.cols() * B.cols());
        for (Eigen::Index p = 0; p < A.rows(); ++p)
            for (Eigen::Index q = 0; q < A.cols(); ++q)
                K.block(p * B.rows(), q * B.cols(), B.rows(), B.cols()) = A(p, q) * B;
        return K;
    };
    return kron(I(nz), kron(I(ny), oracle::poisson1d(nx))) + kron(I(nz), kron(oracle::poisson1d(ny), I(nx))) +
           kron(oracle::poisson1d(nz), kron(I(ny), I(nx)));
}

int rank_of(const Dense& D, double rel) {
    Eigen::SelfAdjointEigenSolver<Dense> eig(D);
    const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
    int r = 0;
    for (Eigen::Index p = 0; p < eig.eigenvalues().size(); ++p)
        r += std::abs(eig.eigenvalues()(p)) > rel * top ? 1 : 0;
    return r;
}

void expect_zero_interior_row_sums(const SparseMatrix& A) {
    const Dense D = oracle::dense(A);
    int zero_rows = 0;
    for (Eigen::Index r = 0; r < D.rows(); ++r) {
        const double s = D.row(r).sum();
        if (std::abs(s) <= 1e-12 * D.row(r).cwiseAbs().sum())
            ++zero_rows;
        else
            EXPECT_GT(s, 0.0); // boundary rows are diagonally dominant
    }
    EXPECT_GT(zero_rows, 0);
}

} // namespace

TEST(Poisson7, SmallCases) {
    const auto A = gen_poisson7(2, 2, 2);
    EXPECT_EQ(A.nrows(), 8);
    for (double d : A.diagonal_values())
        EXPECT_EQ(d, 6.0);
    EXPECT_TRUE(is_symmetric(A));
    EXPECT_GT(oracle::smallest_eigenvalue(oracle::dense(A)), 0.0);

    EXPECT_EQ(oracle::dense(gen_poisson7(7, 2, 2)), kron_laplacian(7, 2, 2));
    EXPECT_EQ(oracle::dense(gen_poisson7(4, 3, 5)), kron_laplacian(4, 3, 5));
    EXPECT_GT(oracle::smallest_eigenvalue(oracle::dense(gen_poisson7(4, 4, 4))), 0.0);
    expect_zero_interior_row_sums(gen_poisson7(5, 5, 5));
}

TEST(Anisotropy, IsotropicReductionAndRotationSymmetry) {
    EXPECT_EQ(gen_rotated_anisotropy(5, 4, 3, 0.0, 1.0, 1.0, 1.0), gen_poisson7(5, 4, 3));
    const Dense a = oracle::dense(gen_rotated_anisotropy(6, 6, 3, 90.0, 1e-3, 10.0, 1e-6));
    const Dense b = oracle::dense(gen_rotated_anisotropy(6, 6, 3, 0.0, 10.0, 1e-3, 1e-6));
    EXPECT_LE(oracle::rel_diff(a, b), 1e-13);
}

TEST(Anisotropy, AppendixValuesSymmetricPositiveDiagonal) {
    const auto A = gen_rotated_anisotropy(8, 8, 4, 30.0, 10.0, 1e-3, 1e-6);
    EXPECT_TRUE(is_symmetric(A));
    for (double d : A.diagonal_values())
        EXPECT_GT(d, 0.0);
    EXPECT_GT(oracle::smallest_eigenvalue(oracle::dense(A)), 0.0);
    // interior rows of the rotated operator sum to zero
    const Dense D = oracle::dense(A);
    EXPECT_NEAR(D.row((2 * 8 + 3) * 8 + 3).sum(), 0.0, 1e-12 * D(0, 0));
    EXPECT_THROW(gen_rotated_anisotropy(4, 4, 4, 30.0, -1.0, 1.0, 1.0), Error);
}

TEST(Elasticity, UnitCubeElementHasRigidBodyKernel) {
    const auto Ke = hex_element_stiffness(1, 1, 1, 1.0, 0.0);
    const Dense K = Eigen::Map<const Eigen::Matrix<double, 24, 24, Eigen::RowMajor>>(Ke.data());
    EXPECT_LE((K - K.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(rank_of(K, 1e-10), 18);
    EXPECT_THROW(hex_element_stiffness(1, 1, 1, 1.0, 0.5), Error);
}

TEST(Elasticity, FreeBeamKernelAndClampedDefiniteness) {
    const auto free_beam = gen_elasticity3d(6, 3, 3, 1e6, 0.45, BoundaryKind::Free);
    EXPECT_EQ(free_beam.A.nrows(), 3 * 7 * 4 * 4);
    EXPECT_TRUE(is_symmetric(free_beam.A, 1e-12));
    const auto ts = analytic_near_kernel(KernelKind::RigidBody3D, free_beam.A.nrows(), &free_beam.coords);
    const auto AV = spmv(free_beam.A, ts.V);
    double m = 0.0;
    for (double v : AV.data())
        m = std::max(m, std::abs(v));
    EXPECT_LE(m, 1e-10 * max_abs(free_beam.A));

    const auto clamped = gen_elasticity3d(3, 2, 2, 1e6, 0.45, BoundaryKind::Clamped);
    EXPECT_EQ(clamped.A.nrows(), 3 * 3 * 3 * 3);
    EXPECT_EQ(clamped.coords.nrows(), 27);
    EXPECT_GT(oracle::smallest_eigenvalue(oracle::dense(clamped.A)), 0.0);
}

TEST(Heterogeneous, ContrastOneIsPoissonAndSeedsAreDeterministic) {
    EXPECT_EQ(oracle::dense(gen_heterogeneous(9, 9, 1.0, 3)), oracle::poisson2d(9));
    const auto a = gen_heterogeneous(16, 16, 1e4, 7);
    EXPECT_EQ(a, gen_heterogeneous(16, 16, 1e4, 7));
    EXPECT_NE(a, gen_heterogeneous(16, 16, 1e4, 8));
    EXPECT_TRUE(is_symmetric(a));
    expect_zero_interior_row_sums(a);
    EXPECT_THROW(gen_heterogeneous(4, 4, 0.5, 1), Error);
}

TEST(Heterogeneous, HighContrastAmgConverges) {
    const auto A = gen_heterogeneous(32, 32, 1e6, 11);
    const auto H = AmgHierarchy::setup(A, AmgConfig{});
    const LinearOperator M = [&H](std::span<const double> y, std::span<double> x) { H.vcycle(y, x); };
    std::vector<double> b(A.nrows());
    for (index_t r = 0; r < A.nrows(); ++r)
        b[r] = std::sin(0.37 * r) + 1.0;
    const auto res = pcg(matrix_operator(A), M, b, std::vector<double>(b.size(), 0.0));
    EXPECT_TRUE(res.converged);
    EXPECT_LE(res.iterations, 100);
}

TEST(GeneratorSpec, ParsesAndRejects) {
    const auto g = parse_generator("elasticity:4,2,2,1e6,0.3,free");
    EXPECT_EQ(g.kind, "elasticity");
    EXPECT_EQ(g.params, (std::vector<double>{4, 2, 2, 1e6, 0.3}));
    EXPECT_EQ(g.option, "free");
    EXPECT_EQ(generate(parse_generator("poisson7:3,3,3")).A, gen_poisson7(3, 3, 3));
    EXPECT_EQ(generate(g).coords.nrows(), 5 * 3 * 3);
    EXPECT_EQ(generate(parse_generator("anisotropy:4,4,4")).A, gen_rotated_anisotropy(4, 4, 4, 30, 10, 1e-3, 1e-6));
    EXPECT_THROW(parse_generator("poisson7"), Error);
    EXPECT_THROW(parse_generator("poisson7:3,,3"), Error);
    EXPECT_THROW(generate(parse_generator("poisson7:3,3")), Error);
    EXPECT_THROW(generate(parse_generator("poisson7:3.5,3,3")), Error);
    EXPECT_THROW(generate(parse_generator("spiral:3,3,3")), Error);
}
