#include <sstream>

#include <gtest/gtest.h>

#include "clamg/matrix_io.hpp"
#include "clamg/sparse.hpp"
#include "oracle.hpp"

using namespace clamg;
using oracle::Dense;

namespace {

MultiVector column_block(const std::vector<double>& v) { return MultiVector::from_column(v); }

} // namespace

TEST(SparseMatrix, RejectsMalformedStructure) {
    EXPECT_THROW(SparseMatrix(2, 2, {0, 1}, {0}, {1.0}), Error);             // short offsets
    EXPECT_THROW(SparseMatrix(1, 2, {0, 2}, {1, 0}, {1.0, 2.0}), Error);    // unsorted
    EXPECT_THROW(SparseMatrix(1, 2, {0, 2}, {1, 1}, {1.0, 2.0}), Error);    // duplicate
    EXPECT_THROW(SparseMatrix(1, 2, {0, 1}, {2}, {1.0}), Error);            // out of range
    EXPECT_THROW(SparseMatrix(2, 2, {0, 2, 1}, {0, 1}, {1.0, 1.0}), Error); // decreasing
    EXPECT_NO_THROW(SparseMatrix(2, 3, {0, 2, 2}, {0, 2}, {1.0, 2.0}));
}

TEST(SparseMatrix, TripletsSumDuplicatesAndDropZeros) {
    const auto A = SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {0, 1, 2.0}, {1, 0, 1.0}, {1, 0, -1.0}});
    EXPECT_EQ(A.nnz(), 1u);
    EXPECT_EQ(A.at(0, 1), 3.0);
    EXPECT_EQ(A.at(1, 0), 0.0);
    EXPECT_THROW(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), DimensionError);
}

TEST(Spmv, SpecExamples) {
    const auto I = SparseMatrix::identity(3);
    const std::vector<double> v{1.5, -2.0, 7.0};
    EXPECT_EQ(spmv(I, column_block(v)).column(0), v);

    const auto A = SparseMatrix::from_dense(2, 2, std::vector<double>{2, 1, 0, 3});
    EXPECT_EQ(spmv(A, MultiVector(2, 1, 0.0)).column(0), (std::vector<double>{0, 0}));
    EXPECT_EQ(spmv(A, MultiVector(2, 1, 1.0)).column(0), (std::vector<double>{3, 3}));
}

TEST(Spmv, DimensionMismatch) {
    const auto A = SparseMatrix::identity(3);
    std::vector<double> x(2), y(3);
    EXPECT_THROW(spmv(A, x, y), DimensionError);
    EXPECT_THROW(spmv(A, MultiVector(4, 2)), DimensionError);
}

TEST(Spmv, TransposeProductMatchesDenseOracle) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const int r = 1 + static_cast<int>(rng() % 120), c = 1 + static_cast<int>(rng() % 120);
        const Dense D = oracle::random_sparse(rng, r, c, 0.1);
        const auto x = oracle::random_vector(rng, r);
        std::vector<double> y(c);
        spmv(transpose(oracle::sparse(D)), x, y);
        const Dense ref = D.transpose() * oracle::vec(x);
        EXPECT_LE(oracle::rel_diff(oracle::vec(y), ref), 1e-14);
    }
}

TEST(Transpose, SpecExamples) {
    std::mt19937_64 rng(3);
    const Dense S = oracle::random_spd(rng, 20, 0.2);
    const auto As = oracle::sparse(S);
    EXPECT_EQ(transpose(As), As);

    const Dense D = oracle::random_sparse(rng, 50, 30, 0.1);
    const auto A = oracle::sparse(D);
    EXPECT_EQ(transpose(transpose(A)), A);
    EXPECT_EQ(oracle::dense(transpose(A)), D.transpose());
}

TEST(Spgemm, IdentityAndDenseOracle) {
    std::mt19937_64 rng(5);
    const auto A = oracle::sparse(oracle::random_sparse(rng, 40, 40, 0.15));
    const auto B = oracle::sparse(oracle::random_sparse(rng, 40, 40, 0.15));
    EXPECT_EQ(spgemm(A, SparseMatrix::identity(40)), A);
    EXPECT_EQ(spgemm(SparseMatrix::identity(40), B), B);
    const Dense ref = oracle::dense(A) * oracle::dense(B);
    EXPECT_LE(oracle::rel_diff(oracle::dense(spgemm(A, B)), ref), 1e-14);
    EXPECT_THROW(spgemm(A, SparseMatrix::identity(3)), DimensionError);
}

TEST(Spgemm, DropsExactCancellation) {
    // [1 1] * [1; -1] cancels exactly
    const auto A = SparseMatrix::from_dense(1, 2, std::vector<double>{1, 1});
    const auto B = SparseMatrix::from_dense(2, 1, std::vector<double>{1, -1});
    EXPECT_EQ(spgemm(A, B).nnz(), 0u);
}

TEST(Spgemm, Associativity) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 10; ++t) {
        const auto A = oracle::sparse(oracle::random_sparse(rng, 15, 12, 0.3));
        const auto B = oracle::sparse(oracle::random_sparse(rng, 12, 18, 0.3));
        const auto C = oracle::sparse(oracle::random_sparse(rng, 18, 10, 0.3));
        EXPECT_LE(oracle::rel_diff(oracle::dense(spgemm(spgemm(A, B), C)), oracle::dense(spgemm(A, spgemm(B, C)))),
                  1e-12);
    }
}

TEST(Galerkin, SpecExamples) {
    std::mt19937_64 rng(13);
    const auto A = oracle::sparse(oracle::random_spd(rng, 12, 0.3));
    EXPECT_LE(oracle::rel_diff(oracle::dense(galerkin_product(A, SparseMatrix::identity(12))), oracle::dense(A)),
              1e-15);

    const auto ones = SparseMatrix::from_dense(5, 1, std::vector<double>(5, 1.0));
    const auto c = galerkin_product(SparseMatrix::identity(5), ones);
    ASSERT_EQ(c.nrows(), 1);
    EXPECT_EQ(c.at(0, 0), 5.0);

    const Dense S = oracle::random_spd(rng, 30, 0.2);
    const Dense P = oracle::random_sparse(rng, 30, 10, 0.3);
    const auto G = galerkin_product(oracle::sparse(S), oracle::sparse(P));
    EXPECT_LE(oracle::rel_diff(oracle::dense(G), P.transpose() * S * P), 1e-13);
    EXPECT_TRUE(is_symmetric(G, 0.0));
    EXPECT_THROW(galerkin_product(oracle::sparse(S), SparseMatrix::identity(4)), DimensionError);
}

TEST(Galerkin, PreservesDefiniteness) {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 10; ++t) {
        const Dense S = oracle::random_spd(rng, 60, 0.1);
        Dense P = oracle::random_sparse(rng, 60, 20, 0.2);
        P.topRows(20) += Dense::Identity(20, 20) * 5.0; // full column rank
        const auto G = galerkin_product(oracle::sparse(S), oracle::sparse(P));
        EXPECT_GT(oracle::smallest_eigenvalue(oracle::dense(G)), 0.0);
    }
}

TEST(Kernels, AddScaleLowerTriangle) {
    const auto A = SparseMatrix::from_dense(2, 2, std::vector<double>{1, 2, 3, 4});
    const auto B = SparseMatrix::identity(2);
    EXPECT_EQ(oracle::dense(add(2.0, A, -1.0, B)), (Dense(2, 2) << 1, 4, 6, 7).finished());
    const std::vector<double> d{2, -1};
    EXPECT_EQ(oracle::dense(scale_rows(A, d)), (Dense(2, 2) << 2, 4, -3, -4).finished());
    EXPECT_EQ(oracle::dense(lower_triangle(A)), (Dense(2, 2) << 1, 0, 3, 4).finished());
    EXPECT_FALSE(is_symmetric(A));
    EXPECT_EQ(max_abs(A), 4.0);
}

TEST(CfPartition, CoarseIndexIsBijectionInNodeOrder) {
    const auto cf = CfPartition::from_labels({NodeLabel::Fine, NodeLabel::Coarse, NodeLabel::Fine, NodeLabel::Coarse});
    EXPECT_EQ(cf.n_coarse, 2);
    EXPECT_EQ(cf.coarse_index, (std::vector<index_t>{-1, 0, -1, 1}));
}

TEST(MatrixMarket, RoundTripGeneralAndSymmetric) {
    std::mt19937_64 rng(21);
    const auto A = oracle::sparse(oracle::random_sparse(rng, 17, 9, 0.3));
    std::stringstream s;
    io::write_matrix_market(s, A);
    EXPECT_EQ(io::read_matrix_market(s), A);

    const auto S = oracle::sparse(oracle::random_spd(rng, 15, 0.3));
    std::stringstream t;
    io::write_matrix_market(t, S, true);
    EXPECT_NE(t.str().find("symmetric"), std::string::npos);
    EXPECT_EQ(io::read_matrix_market(t), S);
}

TEST(MatrixMarket, SymmetricExpansionAndPattern) {
    std::istringstream in("%%MatrixMarket matrix coordinate pattern symmetric\n% comment\n3 3 2\n1 1\n3 1\n");
    const auto A = io::read_matrix_market(in);
    EXPECT_EQ(A.at(0, 0), 1.0);
    EXPECT_EQ(A.at(2, 0), 1.0);
    EXPECT_EQ(A.at(0, 2), 1.0);
    EXPECT_EQ(A.nnz(), 3u);
}

TEST(MatrixMarket, ParseErrorsCarryLineNumbers) {
    std::istringstream bad_header("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n");
    EXPECT_THROW(io::read_matrix_market(bad_header), ParseError);
    std::istringstream bad_entry("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n5 1 2.0\n");
    try {
        io::read_matrix_market(bad_entry);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
    }
}

TEST(MatrixMarket, ArrayRoundTrip) {
    MultiVector V(3, 2);
    V(0, 0) = 1; V(1, 0) = 2; V(2, 0) = 3; V(0, 1) = -1; V(2, 1) = 0.125;
    std::stringstream s;
    io::write_matrix_market_array(s, V);
    EXPECT_EQ(io::read_matrix_market_array(s), V);
}

TEST(BinaryFormat, RoundTripAndHeader) {
    std::mt19937_64 rng(23);
    const auto A = oracle::sparse(oracle::random_sparse(rng, 30, 30, 0.1));
    std::stringstream s;
    io::write_binary(s, A);
    const std::string bytes = s.str();
    ASSERT_GE(bytes.size(), 32u);
    EXPECT_EQ(bytes.substr(0, 4), "AMGF");
    EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1u); // version, little-endian
    EXPECT_EQ(io::read_binary(s), A);

    std::stringstream junk("NOPE0000");
    EXPECT_THROW(io::read_binary(junk), Error);
}
