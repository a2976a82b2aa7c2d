#include "clamg/driver.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>

#include "clamg/matrix_io.hpp"
#include "clamg/problems.hpp"

namespace clamg {

namespace {

double elapsed_ms_as_seconds(std::chrono::steady_clock::time_point t0, std::chrono::steady_clock::time_point t1) {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    return static_cast<double>(ms) / 1000.0;
}

bool has_binary_magic(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[4] = {};
    in.read(magic, 4);
    return in.gcount() == 4 && std::string(magic, 4) == "AMGF";
}

} // namespace

LoadedProblem load_problem(const RunConfig& cfg) {
    LoadedProblem p;
    if (!cfg.generator.empty()) {
        auto g = generate(parse_generator(cfg.generator));
        p.A = std::move(g.A);
        p.coords = std::move(g.coords);
        p.label = cfg.generator;
    } else {
        if (has_binary_magic(cfg.matrix)) {
            std::ifstream in(cfg.matrix, std::ios::binary);
            p.A = io::read_binary(in);
        } else {
            p.A = io::read_matrix_market(cfg.matrix);
        }
        p.label = cfg.matrix;
    }
    if (!cfg.coords.empty())
        p.coords = io::read_matrix_market_array(cfg.coords);
    if (!p.A.is_square())
        throw DimensionError("input matrix is " + std::to_string(p.A.nrows()) + "x" + std::to_string(p.A.ncols()) +
                             ", expected square");
    return p;
}

std::vector<double> make_rhs(const RunConfig& cfg, index_t n) {
    if (cfg.rhs == "random") {
        std::mt19937_64 rng(cfg.rhs_seed);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<double> b(n);
        for (auto& v : b)
            v = unif(rng);
        return b;
    }
    const MultiVector B = io::read_matrix_market_array(cfg.rhs);
    if (B.nrows() != n || B.ncols() < 1)
        throw DimensionError("right-hand side has " + std::to_string(B.nrows()) + " rows, matrix has " +
                             std::to_string(n));
    return B.column(0);
}

AmgHierarchy build_hierarchy(const RunConfig& cfg, const LoadedProblem& prob) {
    const MultiVector* coords = prob.coords.nrows() > 0 ? &prob.coords : nullptr;
    return AmgHierarchy::setup(prob.A, cfg.amg, coords);
}

RunResult run(const RunConfig& cfg) {
    cfg.validate();
    set_num_threads(cfg.threads);
    const auto t_start = std::chrono::steady_clock::now();
    const LoadedProblem prob = load_problem(cfg);
    const auto b = make_rhs(cfg, prob.A.nrows());

    const auto t_setup = std::chrono::steady_clock::now();
    const AmgHierarchy H = build_hierarchy(cfg, prob);
    const auto t_solve = std::chrono::steady_clock::now();

    KrylovConfig kc;
    kc.method = cfg.resolved_method();
    kc.rtol = cfg.rtol;
    kc.max_iters = cfg.max_iters;
    kc.record_history = !cfg.history.empty();
    if (kc.method == KrylovMethod::Pcg && H.requires_nonsymmetric_solver())
        throw Error("the hierarchy has nonsymmetric levels; PCG cannot be used");
    const std::vector<double> x0(b.size(), 0.0);
    const LinearOperator M = [&H](std::span<const double> r, std::span<double> z) { H.vcycle(r, z); };
    KrylovResult kr = krylov_solve(matrix_operator(prob.A), M, b, x0, kc);
    const auto t_end = std::chrono::steady_clock::now();

    RunResult out;
    SolveReport& r = out.report;
    r.problem = prob.label;
    r.n = prob.A.nrows();
    r.nnz = prob.A.nnz();
    r.method = to_string(kc.method);
    r.interp = to_string(cfg.amg.interp);
    r.smoother = to_string(cfg.amg.smoother);
    r.soc = to_string(cfg.amg.soc);
    r.filter_target = to_string(cfg.amg.filter_target);
    r.iterations = kr.iterations;
    r.converged = kr.converged;
    r.rel_residual = kr.rel_residual;
    r.grid_complexity = H.grid_complexity();
    r.operator_complexity = H.operator_complexity();
    r.setup_time = elapsed_ms_as_seconds(t_setup, t_solve);
    r.solve_time = elapsed_ms_as_seconds(t_solve, t_end);
    r.total_time = elapsed_ms_as_seconds(t_start, t_end);
    r.orphans = H.total_orphans();
    for (std::size_t k = 0; k < H.n_levels(); ++k) {
        const auto& A = H.level(k).A;
        const double ratio = k == 0 ? 1.0 : static_cast<double>(A.nrows()) / H.level(k - 1).A.nrows();
        r.levels.push_back({A.nrows(), A.nnz(), ratio});
    }
    r.history = kr.history;
    out.solution = std::move(kr.x);
    return out;
}

} // namespace clamg
