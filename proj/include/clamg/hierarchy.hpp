#ifndef CLAMG_HIERARCHY_HPP
#define CLAMG_HIERARCHY_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "clamg/coarsen.hpp"
#include "clamg/interp.hpp"
#include "clamg/smoother.hpp"
#include "clamg/sparse.hpp"
#include "clamg/testspace.hpp"

namespace clamg {

enum class FilterTarget { None, Prolongation, Operator, Both };

/// Where the level-0 test space comes from. The SRQM kinds refine their
/// starting block (random, or the analytic kernel) on every level.
enum class TestSpaceKind { Constant, RigidBody, Srqm, SrqmFromAnalytic };

const char* to_string(FilterTarget t);
const char* to_string(SmootherKind k);
const char* to_string(SocKind k);
const char* to_string(TestSpaceKind k);

struct AmgConfig {
    int nu1 = 1;
    int nu2 = 1;
    index_t max_coarse = 200;
    int max_levels = 20;
    double stall_fraction = 0.9;

    SmootherKind smoother = SmootherKind::Fsai;
    FsaiConfig fsai;
    RelaxationConfig relax;

    SocKind soc = SocKind::Classical;
    /// Unset: threshold 0.25, or average degree 4 for affinity strength.
    std::optional<FilterRule> soc_filter;
    std::uint64_t seed = 42;

    InterpKind interp = InterpKind::ExtendedI;
    BamgConfig bamg;
    bool smooth_prolongation = false;
    std::optional<double> smooth_omega;

    FilterTarget filter_target = FilterTarget::None;
    double filter_rho = 0.9;

    TestSpaceKind testspace = TestSpaceKind::Constant;
    int srqm_iters = 10;      ///< used by the SRQM kinds only
    int n_test_vectors = 4;   ///< columns of the random SRQM start

    void validate() const;
    bool needs_test_space() const;
};

struct CoarseSolver;

struct AmgLevel {
    SparseMatrix A;
    Smoother smoother;
    SparseMatrix P; ///< empty on the last level
    SparseMatrix R; ///< P^T
    MultiVector V;  ///< test space on this level, when one was used
    bool symmetric = true;
    int n_orphans = 0;
    int n_warnings = 0;
};

class AmgHierarchy {
public:
    static AmgHierarchy setup(const SparseMatrix& A, const AmgConfig& cfg, const MultiVector* coords = nullptr);
    /// Hierarchy from caller-supplied prolongations; A_{k+1} = P_k^T A_k P_k.
    static AmgHierarchy from_prolongations(const SparseMatrix& A, const std::vector<SparseMatrix>& Ps,
                                           const AmgConfig& cfg);

    std::size_t n_levels() const { return levels_.size(); }
    const AmgLevel& level(std::size_t k) const { return levels_.at(k); }
    const AmgConfig& config() const { return cfg_; }
    index_t size() const { return levels_.front().A.nrows(); }

    /// One V-cycle applied to y with a zero initial guess.
    void vcycle(std::span<const double> y, std::span<double> x) const;
    MultiVector vcycle(const MultiVector& y) const;

    double grid_complexity() const;
    double operator_complexity() const;
    /// True when some level operator is nonsymmetric (operator filtering).
    bool requires_nonsymmetric_solver() const;
    int total_orphans() const;

    void print_summary(std::ostream& out) const;

private:
    void cycle(std::size_t k, std::span<const double> y, std::span<double> x) const;
    void finish_coarsest();

    std::vector<AmgLevel> levels_;
    std::shared_ptr<const CoarseSolver> coarse_;
    AmgConfig cfg_;
};

/// Per-level factor used on the last level: Cholesky, or LU for a
/// nonsymmetric operator.
std::shared_ptr<const CoarseSolver> factor_coarsest(const SparseMatrix& A, bool symmetric);
void coarse_solve(const CoarseSolver& s, std::span<const double> b, std::span<double> x);

} // namespace clamg

#endif // CLAMG_HIERARCHY_HPP
