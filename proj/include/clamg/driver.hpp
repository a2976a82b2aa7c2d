#ifndef CLAMG_DRIVER_HPP
#define CLAMG_DRIVER_HPP

#include <string>
#include <vector>

#include "clamg/config.hpp"
#include "clamg/hierarchy.hpp"
#include "clamg/report.hpp"

namespace clamg {

struct LoadedProblem {
    SparseMatrix A;
    MultiVector coords; ///< empty when no geometry is known
    std::string label;
};

/// Reads the matrix file (Matrix Market, or the binary format when the file
/// starts with its magic) or runs the generator, plus optional coordinates.
LoadedProblem load_problem(const RunConfig& cfg);

/// Seeded uniform [0, 1) vector, or the first column of a Matrix Market array.
std::vector<double> make_rhs(const RunConfig& cfg, index_t n);

AmgHierarchy build_hierarchy(const RunConfig& cfg, const LoadedProblem& prob);

struct RunResult {
    SolveReport report;
    std::vector<double> solution;
};

/// Load, set up (timed), solve (timed) and report.
RunResult run(const RunConfig& cfg);

} // namespace clamg

#endif // CLAMG_DRIVER_HPP
