#ifndef CLAMG_SPARSE_HPP
#define CLAMG_SPARSE_HPP

#include <optional>
#include <span>
#include <vector>

#include "clamg/types.hpp"

namespace clamg {

struct Triplet {
    index_t row;
    index_t col;
    double value;
};

/// Compressed sparse row matrix. Immutable after construction; the
/// constructor checks that offsets are monotone, columns are in range and
/// strictly increasing inside every row.
class SparseMatrix {
public:
    struct RowView {
        std::span<const index_t> cols;
        std::span<const double> vals;
        std::size_t size() const { return cols.size(); }
    };

    SparseMatrix() : row_offsets_(1, 0) {}
    SparseMatrix(index_t nrows, index_t ncols, std::vector<index_t> row_offsets,
                 std::vector<index_t> col_indices, std::vector<double> values);

    static SparseMatrix identity(index_t n);
    static SparseMatrix diagonal(std::span<const double> d);
    /// Duplicates are summed; exact zeros are kept only if `keep_zeros`.
    static SparseMatrix from_triplets(index_t nrows, index_t ncols, std::vector<Triplet> entries,
                                      bool keep_zeros = false);
    /// Row-major dense input; exact zeros are not stored.
    static SparseMatrix from_dense(index_t nrows, index_t ncols, std::span<const double> dense);

    index_t nrows() const { return nrows_; }
    index_t ncols() const { return ncols_; }
    std::size_t nnz() const { return values_.size(); }
    bool is_square() const { return nrows_ == ncols_; }

    std::span<const index_t> row_offsets() const { return row_offsets_; }
    std::span<const index_t> col_indices() const { return col_indices_; }
    std::span<const double> values() const { return values_; }

    RowView row(index_t i) const {
        const auto b = static_cast<std::size_t>(row_offsets_[i]);
        const auto e = static_cast<std::size_t>(row_offsets_[i + 1]);
        return {std::span<const index_t>(col_indices_).subspan(b, e - b),
                std::span<const double>(values_).subspan(b, e - b)};
    }

    /// Entry (i, j), zero when not stored.
    double at(index_t i, index_t j) const;
    /// Position of (i, j) in the value array, if stored.
    std::optional<std::size_t> find(index_t i, index_t j) const;
    std::vector<double> diagonal_values() const;
    std::vector<double> to_dense() const;

    bool operator==(const SparseMatrix& other) const = default;

private:
    index_t nrows_ = 0;
    index_t ncols_ = 0;
    std::vector<index_t> row_offsets_;
    std::vector<index_t> col_indices_;
    std::vector<double> values_;
};

/// n x m dense block of column vectors, stored row-major.
class MultiVector {
public:
    MultiVector() = default;
    MultiVector(index_t nrows, index_t ncols, double fill = 0.0);
    MultiVector(index_t nrows, index_t ncols, std::vector<double> values);
    static MultiVector from_column(std::span<const double> v);

    index_t nrows() const { return nrows_; }
    index_t ncols() const { return ncols_; }

    double& operator()(index_t i, index_t j) { return values_[static_cast<std::size_t>(i) * ncols_ + j]; }
    double operator()(index_t i, index_t j) const { return values_[static_cast<std::size_t>(i) * ncols_ + j]; }

    std::span<double> data() { return values_; }
    std::span<const double> data() const { return values_; }
    std::span<const double> row(index_t i) const {
        return std::span<const double>(values_).subspan(static_cast<std::size_t>(i) * ncols_, ncols_);
    }
    std::vector<double> column(index_t j) const;
    void set_column(index_t j, std::span<const double> v);

    bool operator==(const MultiVector& other) const = default;

private:
    index_t nrows_ = 0;
    index_t ncols_ = 0;
    std::vector<double> values_;
};

enum class NodeLabel : unsigned char { Fine, Coarse };

/// Fine/coarse split of the unknowns. Coarse nodes are numbered in
/// ascending node order.
struct CfPartition {
    std::vector<NodeLabel> label;
    std::vector<index_t> coarse_index; ///< -1 for fine nodes
    index_t n_coarse = 0;

    static CfPartition from_labels(std::vector<NodeLabel> labels);
    index_t size() const { return static_cast<index_t>(label.size()); }
    bool is_coarse(index_t i) const { return label[i] == NodeLabel::Coarse; }
};

// Kernels. All reductions run in ascending column order.

/// y = A x for a single vector (x.size() == ncols).
void spmv(const SparseMatrix& A, std::span<const double> x, std::span<double> y);
/// y = alpha A x + beta y.
void spmv(double alpha, const SparseMatrix& A, std::span<const double> x, double beta, std::span<double> y);
MultiVector spmv(const SparseMatrix& A, const MultiVector& x);

SparseMatrix transpose(const SparseMatrix& A);
/// Exact product; entries that cancel to exactly zero are dropped.
SparseMatrix spgemm(const SparseMatrix& A, const SparseMatrix& B);
/// alpha A + beta B, exact zeros dropped.
SparseMatrix add(double alpha, const SparseMatrix& A, double beta, const SparseMatrix& B);
SparseMatrix scale_rows(const SparseMatrix& A, std::span<const double> d);
/// P^T A P; with `symmetrize` the result is replaced by (C + C^T) / 2.
SparseMatrix galerkin_product(const SparseMatrix& A, const SparseMatrix& P, bool symmetrize = true);

/// Lower triangle including the diagonal.
SparseMatrix lower_triangle(const SparseMatrix& A);
bool is_symmetric(const SparseMatrix& A, double rel_tol = 0.0);
double max_abs(const SparseMatrix& A);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
/// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

} // namespace clamg

#endif // CLAMG_SPARSE_HPP
