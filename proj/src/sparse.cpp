#include "clamg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace clamg {

namespace {

int g_threads = 1;

std::string shape(index_t r, index_t c) { return std::to_string(r) + "x" + std::to_string(c); }

} // namespace

void set_num_threads(int n) {
    g_threads = std::max(1, n);
#ifdef _OPENMP
    omp_set_num_threads(g_threads);
#endif
}

int num_threads() { return g_threads; }

SparseMatrix::SparseMatrix(index_t nrows, index_t ncols, std::vector<index_t> row_offsets,
                           std::vector<index_t> col_indices, std::vector<double> values)
    : nrows_(nrows), ncols_(ncols), row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)), values_(std::move(values)) {
    if (nrows_ < 0 || ncols_ < 0)
        throw DimensionError("negative matrix dimension");
    if (row_offsets_.size() != static_cast<std::size_t>(nrows_) + 1)
        throw Error("row_offsets must have nrows+1 entries");
    if (row_offsets_.front() != 0)
        throw Error("row_offsets must start at 0");
    if (col_indices_.size() != values_.size())
        throw Error("col_indices and values differ in length");
    if (static_cast<std::size_t>(row_offsets_.back()) != col_indices_.size())
        throw Error("row_offsets end does not match nnz");
    for (index_t i = 0; i < nrows_; ++i) {
        if (row_offsets_[i + 1] < row_offsets_[i])
            throw Error("row_offsets decrease at row " + std::to_string(i));
        for (index_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
            const index_t c = col_indices_[k];
            if (c < 0 || c >= ncols_)
                throw Error("column index out of range in row " + std::to_string(i));
            if (k > row_offsets_[i] && col_indices_[k - 1] >= c)
                throw Error("columns not strictly increasing in row " + std::to_string(i));
        }
    }
}

SparseMatrix SparseMatrix::identity(index_t n) {
    std::vector<index_t> off(n + 1), col(n);
    std::iota(off.begin(), off.end(), 0);
    std::iota(col.begin(), col.end(), 0);
    return SparseMatrix(n, n, std::move(off), std::move(col), std::vector<double>(n, 1.0));
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> d) {
    const auto n = static_cast<index_t>(d.size());
    std::vector<index_t> off(1, 0), col;
    std::vector<double> val;
    for (index_t i = 0; i < n; ++i) {
        if (d[i] != 0.0) {
            col.push_back(i);
            val.push_back(d[i]);
        }
        off.push_back(static_cast<index_t>(col.size()));
    }
    return SparseMatrix(n, n, std::move(off), std::move(col), std::move(val));
}

SparseMatrix SparseMatrix::from_triplets(index_t nrows, index_t ncols, std::vector<Triplet> entries,
                                         bool keep_zeros) {
    for (const auto& t : entries) {
        if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols)
            throw DimensionError("triplet (" + std::to_string(t.row) + "," + std::to_string(t.col) +
                                 ") outside " + shape(nrows, ncols));
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<index_t> off(nrows + 1, 0), col;
    std::vector<double> val;
    col.reserve(entries.size());
    val.reserve(entries.size());
    std::size_t k = 0;
    for (index_t i = 0; i < nrows; ++i) {
        while (k < entries.size() && entries[k].row == i) {
            const index_t c = entries[k].col;
            double s = 0.0;
            while (k < entries.size() && entries[k].row == i && entries[k].col == c)
                s += entries[k++].value;
            if (s != 0.0 || keep_zeros) {
                col.push_back(c);
                val.push_back(s);
            }
        }
        off[i + 1] = static_cast<index_t>(col.size());
    }
    return SparseMatrix(nrows, ncols, std::move(off), std::move(col), std::move(val));
}

SparseMatrix SparseMatrix::from_dense(index_t nrows, index_t ncols, std::span<const double> dense) {
    if (dense.size() != static_cast<std::size_t>(nrows) * ncols)
        throw DimensionError("dense buffer does not match " + shape(nrows, ncols));
    std::vector<index_t> off(1, 0), col;
    std::vector<double> val;
    for (index_t i = 0; i < nrows; ++i) {
        for (index_t j = 0; j < ncols; ++j) {
            const double v = dense[static_cast<std::size_t>(i) * ncols + j];
            if (v != 0.0) {
                col.push_back(j);
                val.push_back(v);
            }
        }
        off.push_back(static_cast<index_t>(col.size()));
    }
    return SparseMatrix(nrows, ncols, std::move(off), std::move(col), std::move(val));
}

std::optional<std::size_t> SparseMatrix::find(index_t i, index_t j) const {
    const auto b = col_indices_.begin() + row_offsets_[i];
    const auto e = col_indices_.begin() + row_offsets_[i + 1];
    const auto it = std::lower_bound(b, e, j);
    if (it == e || *it != j)
        return std::nullopt;
    return static_cast<std::size_t>(it - col_indices_.begin());
}

double SparseMatrix::at(index_t i, index_t j) const {
    const auto pos = find(i, j);
    return pos ? values_[*pos] : 0.0;
}

std::vector<double> SparseMatrix::diagonal_values() const {
    std::vector<double> d(std::min(nrows_, ncols_), 0.0);
    for (index_t i = 0; i < static_cast<index_t>(d.size()); ++i)
        d[i] = at(i, i);
    return d;
}

std::vector<double> SparseMatrix::to_dense() const {
    std::vector<double> d(static_cast<std::size_t>(nrows_) * ncols_, 0.0);
    for (index_t i = 0; i < nrows_; ++i)
        for (index_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
            d[static_cast<std::size_t>(i) * ncols_ + col_indices_[k]] = values_[k];
    return d;
}

MultiVector::MultiVector(index_t nrows, index_t ncols, double fill)
    : nrows_(nrows), ncols_(ncols), values_(static_cast<std::size_t>(nrows) * ncols, fill) {}

MultiVector::MultiVector(index_t nrows, index_t ncols, std::vector<double> values)
    : nrows_(nrows), ncols_(ncols), values_(std::move(values)) {
    if (values_.size() != static_cast<std::size_t>(nrows) * ncols)
        throw DimensionError("MultiVector buffer does not match " + shape(nrows, ncols));
}

MultiVector MultiVector::from_column(std::span<const double> v) {
    return MultiVector(static_cast<index_t>(v.size()), 1, std::vector<double>(v.begin(), v.end()));
}

std::vector<double> MultiVector::column(index_t j) const {
    std::vector<double> c(nrows_);
    for (index_t i = 0; i < nrows_; ++i)
        c[i] = (*this)(i, j);
    return c;
}

void MultiVector::set_column(index_t j, std::span<const double> v) {
    if (v.size() != static_cast<std::size_t>(nrows_))
        throw DimensionError("column length mismatch");
    for (index_t i = 0; i < nrows_; ++i)
        (*this)(i, j) = v[i];
}

CfPartition CfPartition::from_labels(std::vector<NodeLabel> labels) {
    CfPartition cf;
    cf.label = std::move(labels);
    cf.coarse_index.assign(cf.label.size(), -1);
    for (std::size_t i = 0; i < cf.label.size(); ++i)
        if (cf.label[i] == NodeLabel::Coarse)
            cf.coarse_index[i] = cf.n_coarse++;
    return cf;
}

void spmv(double alpha, const SparseMatrix& A, std::span<const double> x, double beta, std::span<double> y) {
    if (x.size() != static_cast<std::size_t>(A.ncols()) || y.size() != static_cast<std::size_t>(A.nrows()))
        throw DimensionError("spmv: " + shape(A.nrows(), A.ncols()) + " times vector of length " +
                             std::to_string(x.size()));
    const auto off = A.row_offsets();
    const auto col = A.col_indices();
    const auto val = A.values();
    const index_t n = A.nrows();
#pragma omp parallel for schedule(static) if (n > 20000)
    for (index_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (index_t k = off[i]; k < off[i + 1]; ++k)
            s += val[k] * x[col[k]];
        y[i] = beta == 0.0 ? alpha * s : alpha * s + beta * y[i];
    }
}

void spmv(const SparseMatrix& A, std::span<const double> x, std::span<double> y) { spmv(1.0, A, x, 0.0, y); }

MultiVector spmv(const SparseMatrix& A, const MultiVector& x) {
    if (A.ncols() != x.nrows())
        throw DimensionError("spmv: " + shape(A.nrows(), A.ncols()) + " times block " +
                             shape(x.nrows(), x.ncols()));
    const index_t m = x.ncols();
    MultiVector y(A.nrows(), m);
    if (m == 1) {
        spmv(A, x.data(), y.data());
        return y;
    }
    const auto off = A.row_offsets();
    const auto col = A.col_indices();
    const auto val = A.values();
    for (index_t i = 0; i < A.nrows(); ++i) {
        for (index_t k = off[i]; k < off[i + 1]; ++k) {
            const auto xr = x.row(col[k]);
            for (index_t j = 0; j < m; ++j)
                y(i, j) += val[k] * xr[j];
        }
    }
    return y;
}

SparseMatrix transpose(const SparseMatrix& A) {
    const index_t m = A.ncols();
    std::vector<index_t> off(m + 1, 0);
    for (const index_t c : A.col_indices())
        ++off[c + 1];
    std::partial_sum(off.begin(), off.end(), off.begin());
    std::vector<index_t> next(off.begin(), off.end() - 1);
    std::vector<index_t> col(A.nnz());
    std::vector<double> val(A.nnz());
    for (index_t i = 0; i < A.nrows(); ++i) {
        const auto r = A.row(i);
        for (std::size_t k = 0; k < r.size(); ++k) {
            const index_t pos = next[r.cols[k]]++;
            col[pos] = i;
            val[pos] = r.vals[k];
        }
    }
    return SparseMatrix(m, A.nrows(), std::move(off), std::move(col), std::move(val));
}

SparseMatrix spgemm(const SparseMatrix& A, const SparseMatrix& B) {
    if (A.ncols() != B.nrows())
        throw DimensionError("spgemm: " + shape(A.nrows(), A.ncols()) + " times " + shape(B.nrows(), B.ncols()));
    const index_t n = A.nrows();
    const index_t m = B.ncols();
    std::vector<index_t> marker(m, -1);
    std::vector<double> acc(m, 0.0);
    std::vector<index_t> row_cols;
    std::vector<index_t> off(n + 1, 0), col;
    std::vector<double> val;
    for (index_t i = 0; i < n; ++i) {
        row_cols.clear();
        const auto ra = A.row(i);
        for (std::size_t ka = 0; ka < ra.size(); ++ka) {
            const double a = ra.vals[ka];
            const auto rb = B.row(ra.cols[ka]);
            for (std::size_t kb = 0; kb < rb.size(); ++kb) {
                const index_t c = rb.cols[kb];
                if (marker[c] != i) {
                    marker[c] = i;
                    acc[c] = 0.0;
                    row_cols.push_back(c);
                }
                acc[c] += a * rb.vals[kb];
            }
        }
        std::sort(row_cols.begin(), row_cols.end());
        for (const index_t c : row_cols) {
            if (acc[c] != 0.0) {
                col.push_back(c);
                val.push_back(acc[c]);
            }
        }
        off[i + 1] = static_cast<index_t>(col.size());
    }
    return SparseMatrix(n, m, std::move(off), std::move(col), std::move(val));
}

SparseMatrix add(double alpha, const SparseMatrix& A, double beta, const SparseMatrix& B) {
    if (A.nrows() != B.nrows() || A.ncols() != B.ncols())
        throw DimensionError("add: " + shape(A.nrows(), A.ncols()) + " vs " + shape(B.nrows(), B.ncols()));
    std::vector<index_t> off(A.nrows() + 1, 0), col;
    std::vector<double> val;
    col.reserve(A.nnz() + B.nnz());
    val.reserve(A.nnz() + B.nnz());
    for (index_t i = 0; i < A.nrows(); ++i) {
        const auto ra = A.row(i);
        const auto rb = B.row(i);
        std::size_t p = 0, q = 0;
        while (p < ra.size() || q < rb.size()) {
            index_t c;
            double v;
            if (q == rb.size() || (p < ra.size() && ra.cols[p] < rb.cols[q])) {
                c = ra.cols[p];
                v = alpha * ra.vals[p++];
            } else if (p == ra.size() || rb.cols[q] < ra.cols[p]) {
                c = rb.cols[q];
                v = beta * rb.vals[q++];
            } else {
                c = ra.cols[p];
                v = alpha * ra.vals[p++] + beta * rb.vals[q++];
            }
            if (v != 0.0) {
                col.push_back(c);
                val.push_back(v);
            }
        }
        off[i + 1] = static_cast<index_t>(col.size());
    }
    return SparseMatrix(A.nrows(), A.ncols(), std::move(off), std::move(col), std::move(val));
}

SparseMatrix scale_rows(const SparseMatrix& A, std::span<const double> d) {
    if (d.size() != static_cast<std::size_t>(A.nrows()))
        throw DimensionError("scale_rows: scaling vector length mismatch");
    std::vector<double> val(A.values().begin(), A.values().end());
    for (index_t i = 0; i < A.nrows(); ++i)
        for (index_t k = A.row_offsets()[i]; k < A.row_offsets()[i + 1]; ++k)
            val[k] *= d[i];
    return SparseMatrix(A.nrows(), A.ncols(), {A.row_offsets().begin(), A.row_offsets().end()},
                        {A.col_indices().begin(), A.col_indices().end()}, std::move(val));
}

SparseMatrix galerkin_product(const SparseMatrix& A, const SparseMatrix& P, bool symmetrize) {
    if (!A.is_square() || A.nrows() != P.nrows())
        throw DimensionError("galerkin_product: A " + shape(A.nrows(), A.ncols()) + ", P " +
                             shape(P.nrows(), P.ncols()));
    const SparseMatrix C = spgemm(transpose(P), spgemm(A, P));
    if (!symmetrize)
        return C;
    return add(0.5, C, 0.5, transpose(C));
}

SparseMatrix lower_triangle(const SparseMatrix& A) {
    std::vector<index_t> off(1, 0), col;
    std::vector<double> val;
    for (index_t i = 0; i < A.nrows(); ++i) {
        const auto r = A.row(i);
        for (std::size_t k = 0; k < r.size() && r.cols[k] <= i; ++k) {
            col.push_back(r.cols[k]);
            val.push_back(r.vals[k]);
        }
        off.push_back(static_cast<index_t>(col.size()));
    }
    return SparseMatrix(A.nrows(), A.ncols(), std::move(off), std::move(col), std::move(val));
}

bool is_symmetric(const SparseMatrix& A, double rel_tol) {
    if (!A.is_square())
        return false;
    const SparseMatrix T = transpose(A);
    const double scale = max_abs(A);
    if (rel_tol == 0.0)
        return T == A;
    const SparseMatrix D = add(1.0, A, -1.0, T);
    return max_abs(D) <= rel_tol * scale;
}

double max_abs(const SparseMatrix& A) {
    double m = 0.0;
    for (const double v : A.values())
        m = std::max(m, std::abs(v));
    return m;
}

double dot(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw DimensionError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        s += x[i] * y[i];
    return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    if (x.size() != y.size())
        throw DimensionError("axpy: length mismatch");
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] += alpha * x[i];
}

} // namespace clamg
