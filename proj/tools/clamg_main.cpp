// clamg command-line driver: solve, gen, inspect.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"

#include "clamg/config.hpp"
#include "clamg/driver.hpp"
#include "clamg/matrix_io.hpp"
#include "clamg/problems.hpp"

namespace {

struct KeyFlags {
    std::string recipe;
    std::map<std::string, std::string> values;
    std::map<std::string, std::string> alias_values;
};

const std::map<std::string, std::string>& aliases() {
    static const std::map<std::string, std::string> a = {
        {"interp", "interp-kind"}, {"soc", "soc-kind"}, {"theta", "soc-theta"}, {"smoother", "smoother-kind"}};
    return a;
}

void add_key_flags(CLI::App* app, KeyFlags& flags) {
    app->add_option("--recipe", flags.recipe, "recipe file with [section] key = value lines");
    for (const auto& k : clamg::known_keys())
        app->add_option("--" + k.name, flags.values[k.name], k.help);
    for (const auto& [alias, key] : aliases())
        app->add_option("--" + alias, flags.alias_values[alias], "same as --" + key);
}

// Recipe file, then CLAMG_* environment, then command-line flags.
clamg::RunConfig resolve(const CLI::App* app, const KeyFlags& flags) {
    clamg::RunConfig cfg;
    if (!flags.recipe.empty())
        clamg::load_recipe_file(cfg, flags.recipe);
    clamg::apply_environment(cfg);
    for (const auto& k : clamg::known_keys())
        if (app->count("--" + k.name) > 0)
            clamg::apply_key(cfg, k.name, flags.values.at(k.name));
    for (const auto& [alias, key] : aliases()) {
        if (app->count("--" + alias) == 0)
            continue;
        if (app->count("--" + key) > 0)
            throw clamg::Error("--" + alias + " and --" + key + " both given");
        clamg::apply_key(cfg, key, flags.alias_values.at(alias));
    }
    return cfg;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw clamg::Error("cannot write '" + path + "'");
    out << text;
}

int cmd_solve(const CLI::App* app, const KeyFlags& flags) {
    const clamg::RunConfig cfg = resolve(app, flags);
    const auto result = clamg::run(cfg);
    write_text(cfg.report, clamg::report_emit(result.report, clamg::parse_report_format(cfg.format)));
    if (!cfg.history.empty()) {
        std::ofstream h(cfg.history);
        if (!h)
            throw clamg::Error("cannot write '" + cfg.history + "'");
        clamg::write_history_csv(h, result.report.history);
    }
    return result.report.converged ? 0 : 2;
}

int cmd_inspect(const CLI::App* app, const KeyFlags& flags) {
    const clamg::RunConfig cfg = resolve(app, flags);
    cfg.validate();
    clamg::set_num_threads(cfg.threads);
    const auto prob = clamg::load_problem(cfg);
    const auto H = clamg::build_hierarchy(cfg, prob);
    std::cout << "problem " << prob.label << '\n';
    H.print_summary(std::cout);
    if (H.total_orphans() > 0)
        std::cout << "orphan rows " << H.total_orphans() << '\n';
    std::cout << "solver " << clamg::to_string(cfg.resolved_method()) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"clamg: classical algebraic multigrid preconditioned solvers"};
    app.require_subcommand(1);

    KeyFlags solve_flags, inspect_flags;
    auto* solve = app.add_subcommand("solve", "set up the hierarchy and run the preconditioned Krylov solve");
    add_key_flags(solve, solve_flags);
    auto* inspect = app.add_subcommand("inspect", "print the hierarchy summary without solving");
    add_key_flags(inspect, inspect_flags);

    std::string spec, out_path, coords_path;
    bool binary = false, symmetric = false;
    auto* gen = app.add_subcommand("gen", "write a generated matrix");
    gen->add_option("spec", spec, "poisson7:nx,ny,nz | anisotropy:nx,ny,nz[,theta,kx,ky,kz] | "
                                  "elasticity:nx,ny,nz[,E,nu][,clamped|free] | heterogeneous:nx,ny,contrast,seed")
        ->required();
    gen->add_option("-o,--output", out_path, "matrix output path")->required();
    gen->add_option("--coords", coords_path, "coordinates sidecar path (elasticity)");
    gen->add_flag("--binary", binary, "write the binary CSR format");
    gen->add_flag("--symmetric", symmetric, "write Matrix Market in symmetric storage");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*solve)
            return cmd_solve(solve, solve_flags);
        if (*inspect)
            return cmd_inspect(inspect, inspect_flags);
        const auto problem = clamg::generate(clamg::parse_generator(spec));
        if (binary) {
            std::ofstream out(out_path, std::ios::binary);
            if (!out)
                throw clamg::Error("cannot write '" + out_path + "'");
            clamg::io::write_binary(out, problem.A);
        } else {
            clamg::io::write_matrix_market(out_path, problem.A, symmetric);
        }
        if (!coords_path.empty()) {
            if (problem.coords.nrows() == 0)
                throw clamg::Error("generator '" + spec + "' has no coordinates");
            clamg::io::write_matrix_market_array(coords_path, problem.coords);
        }
        std::printf("wrote %s: %d rows, %zu nonzeros\n", out_path.c_str(), problem.A.nrows(), problem.A.nnz());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
