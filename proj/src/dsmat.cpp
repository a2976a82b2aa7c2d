#include "clamg/dsmat.hpp"

#include <algorithm>
#include <ostream>
#include <string>

namespace clamg {

const char* to_string(BlockSide side) {
    switch (side) {
    case BlockSide::Left: return "Left";
    case BlockSide::Diagonal: return "Diagonal";
    case BlockSide::Right: return "Right";
    }
    return "?";
}

std::vector<index_t> stripe_bounds(index_t n, index_t p) {
    if (p < 1 || p > n)
        throw Error("n_stripes must lie in [1, " + std::to_string(n) + "], got " + std::to_string(p));
    std::vector<index_t> b(p + 1, 0);
    const index_t base = n / p;
    const index_t extra = n % p;
    for (index_t s = 0; s < p; ++s)
        b[s + 1] = b[s] + base + (s < extra ? 1 : 0);
    return b;
}

StripedMatrix StripedMatrix::from_csr(const SparseMatrix& A, index_t n_stripes) {
    if (!A.is_square())
        throw DimensionError("striped storage needs a square matrix");
    StripedMatrix M;
    M.n_ = A.nrows();
    M.bounds_ = stripe_bounds(A.nrows(), n_stripes);
    M.stripes_.resize(n_stripes);

    for (index_t s = 0; s < n_stripes; ++s) {
        Stripe& st = M.stripes_[s];
        st.row_begin = M.bounds_[s];
        st.row_end = M.bounds_[s + 1];

        // Per-neighbor local CSR assembled in one pass over the stripe rows.
        struct Builder {
            std::vector<index_t> off, col;
            std::vector<double> val;
        };
        std::vector<Builder> builders(n_stripes);
        std::vector<char> touched(n_stripes, 0);
        for (index_t i = st.row_begin; i < st.row_end; ++i) {
            const auto r = A.row(i);
            for (std::size_t k = 0; k < r.size(); ++k) {
                const index_t owner = M.owner_of(r.cols[k]);
                Builder& b = builders[owner];
                if (!touched[owner]) {
                    touched[owner] = 1;
                    b.off.assign(static_cast<std::size_t>(i - st.row_begin) + 1, 0);
                }
                while (b.off.size() < static_cast<std::size_t>(i - st.row_begin) + 1)
                    b.off.push_back(static_cast<index_t>(b.col.size()));
                b.col.push_back(r.cols[k] - M.bounds_[owner]);
                b.val.push_back(r.vals[k]);
            }
        }
        for (index_t nb = 0; nb < n_stripes; ++nb) {
            if (!touched[nb])
                continue;
            Builder& b = builders[nb];
            while (b.off.size() < static_cast<std::size_t>(st.size()) + 1)
                b.off.push_back(static_cast<index_t>(b.col.size()));
            StripeBlock blk;
            blk.neighbor = nb;
            blk.side = nb < s ? BlockSide::Left : (nb > s ? BlockSide::Right : BlockSide::Diagonal);
            blk.block = SparseMatrix(st.size(), M.bounds_[nb + 1] - M.bounds_[nb], std::move(b.off),
                                     std::move(b.col), std::move(b.val));
            st.blocks.push_back(std::move(blk));
        }
    }
    return M;
}

index_t StripedMatrix::owner_of(index_t i) const {
    const auto it = std::upper_bound(bounds_.begin(), bounds_.end(), i);
    return static_cast<index_t>(it - bounds_.begin()) - 1;
}

std::size_t StripedMatrix::nnz() const {
    std::size_t n = 0;
    for (const auto& st : stripes_)
        for (const auto& b : st.blocks)
            n += b.block.nnz();
    return n;
}

SparseMatrix StripedMatrix::to_csr() const {
    std::vector<index_t> off(1, 0), col;
    std::vector<double> val;
    col.reserve(nnz());
    val.reserve(nnz());
    for (const auto& st : stripes_) {
        for (index_t li = 0; li < st.size(); ++li) {
            for (const auto& b : st.blocks) {
                const auto r = b.block.row(li);
                const index_t shift = bounds_[b.neighbor];
                for (std::size_t k = 0; k < r.size(); ++k) {
                    col.push_back(r.cols[k] + shift);
                    val.push_back(r.vals[k]);
                }
            }
            off.push_back(static_cast<index_t>(col.size()));
        }
    }
    return SparseMatrix(n_, n_, std::move(off), std::move(col), std::move(val));
}

void StripedMatrix::spmv(std::span<const double> x, std::span<double> y) const {
    if (x.size() != static_cast<std::size_t>(n_) || y.size() != static_cast<std::size_t>(n_))
        throw DimensionError("striped spmv: vector length mismatch");
    const auto ns = static_cast<index_t>(stripes_.size());
    // Stripes write disjoint slices of y and read neighbor slices of x in place.
#pragma omp parallel for schedule(dynamic, 1) if (ns > 1 && n_ > 20000)
    for (index_t s = 0; s < ns; ++s) {
        const Stripe& st = stripes_[s];
        auto ys = y.subspan(st.row_begin, st.size());
        std::fill(ys.begin(), ys.end(), 0.0);
        for (const auto& b : st.blocks) {
            const auto xs = x.subspan(bounds_[b.neighbor], bounds_[b.neighbor + 1] - bounds_[b.neighbor]);
            const auto off = b.block.row_offsets();
            const auto col = b.block.col_indices();
            const auto val = b.block.values();
            for (index_t li = 0; li < st.size(); ++li)
                for (index_t k = off[li]; k < off[li + 1]; ++k)
                    ys[li] += val[k] * xs[col[k]];
        }
    }
}

MultiVector StripedMatrix::spmv(const MultiVector& x) const {
    if (x.nrows() != n_)
        throw DimensionError("striped spmv: block has " + std::to_string(x.nrows()) + " rows, expected " +
                             std::to_string(n_));
    MultiVector y(n_, x.ncols());
    if (x.ncols() == 1) {
        spmv(x.data(), y.data());
        return y;
    }
    for (index_t j = 0; j < x.ncols(); ++j) {
        const auto xc = x.column(j);
        std::vector<double> yc(n_);
        spmv(xc, yc);
        y.set_column(j, yc);
    }
    return y;
}

void StripedMatrix::dump_inventory(std::ostream& out) const {
    out << "stripes " << stripes_.size() << " rows " << n_ << " nnz " << nnz() << "\n";
    for (std::size_t s = 0; s < stripes_.size(); ++s) {
        const Stripe& st = stripes_[s];
        for (const auto& b : st.blocks) {
            out << "stripe " << s << " neighbor " << b.neighbor << " " << to_string(b.side) << " "
                << b.block.nrows() << "x" << b.block.ncols() << " nnz " << b.block.nnz() << "\n";
        }
    }
}

} // namespace clamg
