#include "clamg/report.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace clamg {

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Shortest text that parses back to the same double.
std::string exact(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string emit_text(const SolveReport& r) {
    std::ostringstream o;
    o << "problem              " << r.problem << '\n';
    o << "unknowns             " << r.n << '\n';
    o << "nonzeros             " << r.nnz << '\n';
    o << "method               " << r.method << '\n';
    o << "interpolation        " << r.interp << '\n';
    o << "smoother             " << r.smoother << '\n';
    o << "strength             " << r.soc << '\n';
    o << "filter target        " << r.filter_target << '\n';
    o << "converged            " << (r.converged ? "yes" : "no") << '\n';
    o << "iterations           " << r.iterations << '\n';
    o << "relative residual    " << fmt("%.3e", r.rel_residual) << '\n';
    o << "grid complexity      " << fmt("%.3f", r.grid_complexity) << '\n';
    o << "operator complexity  " << fmt("%.3f", r.operator_complexity) << '\n';
    o << "setup time [s]       " << fmt("%.3f", r.setup_time) << '\n';
    o << "solve time [s]       " << fmt("%.3f", r.solve_time) << '\n';
    o << "total time [s]       " << fmt("%.3f", r.total_time) << '\n';
    o << "orphan rows          " << r.orphans << '\n';
    o << "level          n          nnz    ratio\n";
    char buf[96];
    for (std::size_t k = 0; k < r.levels.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%5zu %10d %12zu %8.4f\n", k, r.levels[k].n, r.levels[k].nnz,
                      r.levels[k].ratio);
        o << buf;
    }
    if (!r.history.empty()) {
        o << "history\n";
        for (std::size_t k = 0; k < r.history.size(); ++k)
            o << "  " << k << ' ' << fmt("%.6e", r.history[k]) << '\n';
    }
    return o.str();
}

std::string emit_json(const SolveReport& r) {
    nlohmann::ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["problem"] = r.problem;
    j["n"] = r.n;
    j["nnz"] = r.nnz;
    j["method"] = r.method;
    j["interp"] = r.interp;
    j["smoother"] = r.smoother;
    j["soc"] = r.soc;
    j["filter_target"] = r.filter_target;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["rel_residual"] = r.rel_residual;
    j["grid_complexity"] = r.grid_complexity;
    j["operator_complexity"] = r.operator_complexity;
    j["setup_time"] = r.setup_time;
    j["solve_time"] = r.solve_time;
    j["total_time"] = r.total_time;
    j["orphans"] = r.orphans;
    auto levels = nlohmann::ordered_json::array();
    for (const auto& L : r.levels)
        levels.push_back({{"n", L.n}, {"nnz", L.nnz}, {"ratio", L.ratio}});
    j["levels"] = std::move(levels);
    if (!r.history.empty())
        j["history"] = r.history;
    return j.dump(2) + "\n";
}

std::string emit_csv(const SolveReport& r) {
    std::ostringstream o;
    o << "field,value\n";
    o << "schema_version," << kReportSchemaVersion << '\n';
    o << "problem," << r.problem << '\n';
    o << "n," << r.n << '\n';
    o << "nnz," << r.nnz << '\n';
    o << "method," << r.method << '\n';
    o << "interp," << r.interp << '\n';
    o << "smoother," << r.smoother << '\n';
    o << "soc," << r.soc << '\n';
    o << "filter_target," << r.filter_target << '\n';
    o << "converged," << (r.converged ? "true" : "false") << '\n';
    o << "iterations," << r.iterations << '\n';
    o << "rel_residual," << exact(r.rel_residual) << '\n';
    o << "grid_complexity," << exact(r.grid_complexity) << '\n';
    o << "operator_complexity," << exact(r.operator_complexity) << '\n';
    o << "setup_time," << fmt("%.3f", r.setup_time) << '\n';
    o << "solve_time," << fmt("%.3f", r.solve_time) << '\n';
    o << "total_time," << fmt("%.3f", r.total_time) << '\n';
    o << "orphans," << r.orphans << '\n';
    o << '\n' << "level,n,nnz,ratio\n";
    for (std::size_t k = 0; k < r.levels.size(); ++k)
        o << k << ',' << r.levels[k].n << ',' << r.levels[k].nnz << ',' << exact(r.levels[k].ratio) << '\n';
    if (!r.history.empty()) {
        o << '\n' << "iteration,relative_residual\n";
        for (std::size_t k = 0; k < r.history.size(); ++k)
            o << k << ',' << exact(r.history[k]) << '\n';
    }
    return o.str();
}

} // namespace

ReportFormat parse_report_format(const std::string& s) {
    if (s == "text")
        return ReportFormat::Text;
    if (s == "json")
        return ReportFormat::Json;
    if (s == "csv")
        return ReportFormat::Csv;
    throw Error("unknown report format '" + s + "' (text, json, csv)");
}

std::string report_emit(const SolveReport& r, ReportFormat format) {
    switch (format) {
    case ReportFormat::Text: return emit_text(r);
    case ReportFormat::Json: return emit_json(r);
    case ReportFormat::Csv: return emit_csv(r);
    }
    return {};
}

std::vector<LevelInfo> parse_level_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    int lineno = 0;
    bool in_table = false;
    std::vector<LevelInfo> out;
    while (std::getline(in, line)) {
        ++lineno;
        if (!in_table) {
            in_table = line == "level,n,nnz,ratio";
            continue;
        }
        if (line.empty())
            break;
        std::istringstream row(line);
        std::string f[4];
        for (auto& s : f)
            if (!std::getline(row, s, ','))
                throw ParseError("level table row has fewer than 4 fields", lineno);
        try {
            if (std::stoul(f[0]) != out.size())
                throw ParseError("level table rows out of order", lineno);
            out.push_back({static_cast<index_t>(std::stol(f[1])), static_cast<std::size_t>(std::stoull(f[2])),
                           std::stod(f[3])});
        } catch (const std::logic_error&) {
            throw ParseError("level table row does not parse: '" + line + "'", lineno);
        }
    }
    if (!in_table)
        throw ParseError("no level table header found", lineno);
    return out;
}

} // namespace clamg
