#ifndef CLAMG_COARSEN_HPP
#define CLAMG_COARSEN_HPP

#include <cstdint>
#include <vector>

#include "clamg/sparse.hpp"

namespace clamg {

enum class SocKind { Classical, StrongCoupling, Affinity };

/// Off-diagonal adjacency of A annotated with strength values and a kept
/// flag per edge. Edge e of row i is (i, cols[e]).
struct SocGraph {
    index_t n = 0;
    SocKind kind = SocKind::Classical;
    std::vector<index_t> offsets;
    std::vector<index_t> cols;
    std::vector<double> strength;
    std::vector<char> kept;

    std::size_t n_edges() const { return cols.size(); }
    std::size_t n_kept() const;
    /// Columns j with (i, j) kept, ascending: the set of nodes strongly
    /// influencing i.
    std::vector<index_t> strong(index_t i) const;
    bool is_kept(index_t i, index_t j) const;
};

/// Strength of connection of every off-diagonal edge.
///  Classical:      max(-a_ij, 0) / max_{k != i}(-a_ik, -a_ki)^+
///  StrongCoupling: |a_ij| / sqrt(a_ii a_jj)
///  Affinity:       (v_i . v_j)^2 / (|v_i|^2 |v_j|^2) over rows of V
/// All edges start out kept.
SocGraph compute_soc(const SparseMatrix& A, SocKind kind, const MultiVector* V = nullptr);

struct FilterRule {
    enum class Kind { Threshold, AvgDegree };
    Kind kind = Kind::Threshold;
    double value = 0.25; ///< theta, or target average degree

    static FilterRule threshold(double theta) { return {Kind::Threshold, theta}; }
    static FilterRule avg_degree(double d) { return {Kind::AvgDegree, d}; }
};

/// Threshold: relative per row (s_ij >= theta max_k s_ik) for Classical and
/// StrongCoupling, absolute (s_ij >= theta) for Affinity. With theta > 0
/// zero-strength edges are never kept.
/// AvgDegree: the n*d strongest edges globally, then the kept set is
/// symmetrized by union.
SocGraph filter_soc(const SocGraph& G, FilterRule rule);

/// Parallel modified independent set coarsening on the kept graph, treated
/// as undirected. Node weights are the number of nodes a node strongly
/// influences plus a uniform [0,1) draw keyed by (seed, node).
CfPartition pmis(const SocGraph& G, std::uint64_t seed);

/// Deterministic uniform [0,1) draw for (seed, key).
double keyed_uniform(std::uint64_t seed, std::uint64_t key);

/// Undirected kept adjacency (union of both directions), sorted rows.
std::vector<std::vector<index_t>> kept_adjacency(const SocGraph& G);

} // namespace clamg

#endif // CLAMG_COARSEN_HPP
