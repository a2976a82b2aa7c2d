#ifndef CLAMG_REPORT_HPP
#define CLAMG_REPORT_HPP

#include <string>
#include <vector>

#include "clamg/types.hpp"

namespace clamg {

struct LevelInfo {
    index_t n = 0;
    std::size_t nnz = 0;
    double ratio = 1.0; ///< n_k / n_{k-1}; 1 on the finest level

    bool operator==(const LevelInfo&) const = default;
};

struct SolveReport {
    std::string problem;
    index_t n = 0;
    std::size_t nnz = 0;
    std::string method;
    std::string interp;
    std::string smoother;
    std::string soc;
    std::string filter_target;

    int iterations = 0;
    bool converged = false;
    double rel_residual = 0.0;
    double grid_complexity = 1.0;
    double operator_complexity = 1.0;
    double setup_time = 0.0; ///< seconds, millisecond resolution
    double solve_time = 0.0;
    double total_time = 0.0;
    int orphans = 0;
    std::vector<LevelInfo> levels;
    std::vector<double> history;
};

enum class ReportFormat { Text, Json, Csv };

ReportFormat parse_report_format(const std::string& s);

inline constexpr int kReportSchemaVersion = 1;

/// Field order is fixed; the history is omitted when empty.
std::string report_emit(const SolveReport& r, ReportFormat format);

/// Per-level rows of a CSV report (the table after the blank line).
std::vector<LevelInfo> parse_level_csv(const std::string& csv);

} // namespace clamg

#endif // CLAMG_REPORT_HPP
