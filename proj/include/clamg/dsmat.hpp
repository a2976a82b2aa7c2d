#ifndef CLAMG_DSMAT_HPP
#define CLAMG_DSMAT_HPP

#include <iosfwd>
#include <vector>

#include "clamg/sparse.hpp"

namespace clamg {

enum class BlockSide { Left, Diagonal, Right };

const char* to_string(BlockSide side);

/// One compressed-row block of a stripe, numbered locally: rows run over the
/// owning stripe, columns over the neighbor stripe.
struct StripeBlock {
    index_t neighbor = 0;
    BlockSide side = BlockSide::Diagonal;
    SparseMatrix block;
};

struct Stripe {
    index_t row_begin = 0;
    index_t row_end = 0;
    /// Sorted by ascending neighbor id; only non-empty blocks are stored.
    std::vector<StripeBlock> blocks;

    index_t size() const { return row_end - row_begin; }
};

/// Row-striped block storage of a square sparse matrix. Each stripe keeps its
/// diagonal block plus the list of left/right neighbor blocks it couples to.
class StripedMatrix {
public:
    static StripedMatrix from_csr(const SparseMatrix& A, index_t n_stripes);

    index_t n_stripes() const { return static_cast<index_t>(stripes_.size()); }
    index_t nrows() const { return n_; }
    const Stripe& stripe(index_t s) const { return stripes_[s]; }
    std::size_t nnz() const;
    /// Stripe owning global row `i`.
    index_t owner_of(index_t i) const;

    SparseMatrix to_csr() const;

    /// y = A x. Per stripe, blocks are accumulated left to right by
    /// ascending neighbor id, which reproduces the CSR summation order.
    MultiVector spmv(const MultiVector& x) const;
    void spmv(std::span<const double> x, std::span<double> y) const;

    /// Text inventory: one line per stored block.
    void dump_inventory(std::ostream& out) const;

private:
    index_t n_ = 0;
    std::vector<index_t> bounds_;
    std::vector<Stripe> stripes_;
};

/// Stripe boundaries for `n` rows over `p` stripes: the first n mod p stripes
/// get one extra row.
std::vector<index_t> stripe_bounds(index_t n, index_t p);

} // namespace clamg

#endif // CLAMG_DSMAT_HPP
