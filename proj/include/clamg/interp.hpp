#ifndef CLAMG_INTERP_HPP
#define CLAMG_INTERP_HPP

#include <optional>
#include <vector>

#include "clamg/coarsen.hpp"
#include "clamg/sparse.hpp"

namespace clamg {

enum class InterpKind { Classical, ExtendedI, Hybrid, Bamg };

/// Prolongation n x n_c plus per-row diagnostics. Coarse rows are unit
/// injection rows; fine rows that reach no coarse point ("orphans") are zero.
struct Prolongation {
    SparseMatrix P;
    InterpKind kind = InterpKind::Classical;
    std::vector<char> orphan;     ///< per node
    std::vector<int> distance;    ///< BAMG: interpolation distance used, else 1 or 2
    std::vector<double> residual; ///< BAMG: relative fit residual r_i, else 0
    std::vector<char> at_lmax;    ///< BAMG: accepted only because l reached l_max
    int n_orphans = 0;
    int n_warnings = 0;
};

/// Index sets of one fine node i, all sorted ascending.
struct FineNodeSets {
    std::vector<index_t> neighbors;     ///< N_i
    std::vector<index_t> strong_fine;   ///< F_i^S
    std::vector<index_t> strong_coarse; ///< C_i^S
    std::vector<index_t> weak;          ///< N_i^W
    std::vector<index_t> fstar;         ///< strong fine neighbors sharing no coarse point with C_i^S
    std::vector<index_t> extended;      ///< C_i^S united with C_k^S over k in F_i^S
    std::vector<index_t> hybrid;        ///< greedy minimal extension of C_i^S
    std::vector<index_t> uncovered;     ///< strong fine neighbors the hybrid cover could not reach
};

/// Sets of every node (empty for coarse nodes).
struct InterpContext {
    std::vector<FineNodeSets> nodes;
};

InterpContext build_context(const SparseMatrix& A, const SocGraph& G, const CfPartition& cf);

/// Greedy cover: starting from C_i^S, repeatedly add the distance-two coarse
/// node strongly connected to the most still-uncovered strong fine
/// neighbors (ties to the smallest id) until every strong fine neighbor
/// shares a coarse point with the set.
std::vector<index_t> hybrid_set(const SocGraph& G, const CfPartition& cf, index_t i,
                                std::vector<index_t>* uncovered = nullptr);

Prolongation classical_weights(const SparseMatrix& A, const SocGraph& G, const CfPartition& cf);
Prolongation extended_i_weights(const SparseMatrix& A, const SocGraph& G, const CfPartition& cf);
/// Extended+i weight formula evaluated on the hybrid interpolatory set.
Prolongation hybrid_weights(const SparseMatrix& A, const SocGraph& G, const CfPartition& cf);

struct BamgConfig {
    int l_min = 1;
    int l_max = 3;
    /// Negative selects 1e-10 for n_t <= 2 and 1e-8 otherwise.
    double eps = -1.0;
    double mu = 10.0;
    int max_swaps = 50;
    double maxvol_delta = 1e-2;
};

/// Least-squares interpolation against the rows of the test space V. For a
/// fine node the coarse candidates are the coarse nodes within graph
/// distance l; a maxvol subset of their test-vector rows is fitted to the
/// node's own row, and l grows until the fit satisfies eps and mu.
/// Distances are measured on the kept SoC graph when `G` is given, else on
/// the adjacency of A.
Prolongation bamg_prolongation(const SparseMatrix& A, const CfPartition& cf, const MultiVector& V,
                               const BamgConfig& cfg = {}, const SocGraph* G = nullptr);

/// Rows of a tall dense row-major matrix `phi` (n_rows x n_cols) spanning
/// a near-maximal-volume square submatrix. Fewer than n_cols rows are
/// returned when phi is rank deficient.
std::vector<index_t> maxvol_select(std::span<const double> phi, index_t n_rows, index_t n_cols,
                                   int max_swaps = 50, double delta = 1e-2);

/// (I - omega D^{-1} A) P. Without omega, 0.9 / rho(D^{-1} A) is used.
SparseMatrix smooth_prolongation(const SparseMatrix& A, const SparseMatrix& P,
                                 std::optional<double> omega = std::nullopt);

/// Drops the smallest entries of each row of M, keeping the shortest prefix
/// (by decreasing magnitude) whose absolute sum reaches rho times the row's
/// absolute sum, then adds a correction on the kept pattern so that the
/// filtered row acts on W as closely as possible (least squares, minimum
/// norm) as the original one. The diagonal is always kept when
/// `keep_diagonal` is set.
SparseMatrix filter_with_compensation(const SparseMatrix& M, const MultiVector& W, double rho,
                                      bool keep_diagonal = true);
/// Plain dropping with the same pattern rule, no compensation.
SparseMatrix filter_without_compensation(const SparseMatrix& M, double rho, bool keep_diagonal = true);

const char* to_string(InterpKind kind);

} // namespace clamg

#endif // CLAMG_INTERP_HPP
