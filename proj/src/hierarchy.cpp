#include "clamg/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include <Eigen/Dense>

namespace clamg {

struct CoarseSolver {
    bool symmetric = true;
    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
};

const char* to_string(FilterTarget t) {
    switch (t) {
    case FilterTarget::None: return "none";
    case FilterTarget::Prolongation: return "prolongation";
    case FilterTarget::Operator: return "operator";
    case FilterTarget::Both: return "both";
    }
    return "?";
}

const char* to_string(SmootherKind k) { return k == SmootherKind::Fsai ? "fsai" : "jacobi"; }

const char* to_string(SocKind k) {
    switch (k) {
    case SocKind::Classical: return "classical";
    case SocKind::StrongCoupling: return "strong-coupling";
    case SocKind::Affinity: return "affinity";
    }
    return "?";
}

const char* to_string(TestSpaceKind k) {
    switch (k) {
    case TestSpaceKind::Constant: return "constant";
    case TestSpaceKind::RigidBody: return "rigid-body";
    case TestSpaceKind::Srqm: return "srqm";
    case TestSpaceKind::SrqmFromAnalytic: return "srqm-from-analytic";
    }
    return "?";
}

void AmgConfig::validate() const {
    if (nu1 < 0 || nu2 < 0 || nu1 + nu2 < 1)
        throw Error("smoothing steps must be non-negative with at least one step in total");
    if (max_coarse < 1)
        throw Error("max-coarse must be at least 1");
    if (max_levels < 1)
        throw Error("max-levels must be at least 1");
    if (!(stall_fraction > 0.0 && stall_fraction <= 1.0))
        throw Error("stall fraction must lie in (0, 1]");
    if (!(filter_rho > 0.0 && filter_rho <= 1.0))
        throw Error("filter-rho must lie in (0, 1]");
    if (srqm_iters < 0)
        throw Error("srqm iterations must be non-negative");
    if (n_test_vectors < 1)
        throw Error("n-test-vectors must be at least 1");
}

bool AmgConfig::needs_test_space() const {
    return interp == InterpKind::Bamg || soc == SocKind::Affinity || testspace != TestSpaceKind::Constant ||
           filter_target != FilterTarget::None;
}

std::shared_ptr<const CoarseSolver> factor_coarsest(const SparseMatrix& A, bool symmetric) {
    const auto n = static_cast<Eigen::Index>(A.nrows());
    const auto dense = A.to_dense();
    Eigen::MatrixXd M = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        dense.data(), n, n);
    auto s = std::make_shared<CoarseSolver>();
    s->symmetric = symmetric;
    if (!symmetric) {
        s->lu.compute(M);
        return s;
    }
    s->llt.compute(M);
    if (s->llt.info() != Eigen::Success) {
        const double shift = n > 0 ? 1e-12 * M.trace() / static_cast<double>(n) : 0.0;
        M.diagonal().array() += shift;
        s->llt.compute(M);
        if (s->llt.info() != Eigen::Success)
            throw NotSpdError("coarsest-level Cholesky factorization failed after a diagonal shift");
    }
    return s;
}

void coarse_solve(const CoarseSolver& s, std::span<const double> b, std::span<double> x) {
    const auto n = static_cast<Eigen::Index>(b.size());
    const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), n);
    Eigen::Map<Eigen::VectorXd> out(x.data(), n);
    if (s.symmetric)
        out = s.llt.solve(rhs);
    else
        out = s.lu.solve(rhs);
}

namespace {

bool refines(const AmgConfig& cfg) {
    return (cfg.testspace == TestSpaceKind::Srqm || cfg.testspace == TestSpaceKind::SrqmFromAnalytic) &&
           cfg.srqm_iters > 0;
}

MultiVector initial_test_space(const SparseMatrix& A, const AmgConfig& cfg, const MultiVector* coords) {
    const index_t n = A.nrows();
    switch (cfg.testspace) {
    case TestSpaceKind::Constant: return analytic_near_kernel(KernelKind::Constant, n).V;
    case TestSpaceKind::RigidBody: return analytic_near_kernel(KernelKind::RigidBody3D, n, coords).V;
    case TestSpaceKind::SrqmFromAnalytic:
        return coords != nullptr ? analytic_near_kernel(KernelKind::RigidBody3D, n, coords).V
                                 : analytic_near_kernel(KernelKind::Constant, n).V;
    case TestSpaceKind::Srqm: break;
    }
    const index_t k = std::min<index_t>(cfg.n_test_vectors, n);
    MultiVector V(n, k);
    for (index_t i = 0; i < n; ++i)
        for (index_t j = 0; j < k; ++j)
            V(i, j) = keyed_uniform(cfg.seed, static_cast<std::uint64_t>(i) * k + j) - 0.5;
    return orthonormalize(V);
}

Smoother make_smoother(const SparseMatrix& A, const AmgConfig& cfg) {
    return cfg.smoother == SmootherKind::Fsai ? build_fsai(A, cfg.fsai, cfg.relax) : build_jacobi(A, cfg.relax);
}

MultiVector ones(index_t n) { return MultiVector(n, 1, 1.0 / std::sqrt(static_cast<double>(n))); }

MultiVector inject(const MultiVector& V, const CfPartition& cf) {
    MultiVector Vc(cf.n_coarse, V.ncols());
    for (index_t i = 0; i < cf.size(); ++i)
        if (cf.is_coarse(i))
            for (index_t j = 0; j < V.ncols(); ++j)
                Vc(cf.coarse_index[i], j) = V(i, j);
    try {
        return orthonormalize(Vc);
    } catch (const Error&) {
        return ones(cf.n_coarse);
    }
}

Prolongation build_prolongation(const SparseMatrix& A, const SocGraph& G, const CfPartition& cf,
                                const MultiVector& V, const AmgConfig& cfg) {
    switch (cfg.interp) {
    case InterpKind::Classical: return classical_weights(A, G, cf);
    case InterpKind::ExtendedI: return extended_i_weights(A, G, cf);
    case InterpKind::Hybrid: return hybrid_weights(A, G, cf);
    case InterpKind::Bamg: return bamg_prolongation(A, cf, V, cfg.bamg, &G);
    }
    throw Error("unknown interpolation kind");
}

} // namespace

AmgHierarchy AmgHierarchy::setup(const SparseMatrix& A, const AmgConfig& cfg, const MultiVector* coords) {
    cfg.validate();
    if (!A.is_square() || A.nrows() == 0)
        throw DimensionError("setup: matrix must be square and non-empty");
    AmgHierarchy H;
    H.cfg_ = cfg;
    const bool use_v = cfg.needs_test_space();
    const FilterRule rule = cfg.soc_filter.value_or(
        cfg.soc == SocKind::Affinity ? FilterRule::avg_degree(4.0) : FilterRule::threshold(0.25));
    const bool filter_p = cfg.filter_target == FilterTarget::Prolongation || cfg.filter_target == FilterTarget::Both;
    const bool filter_a = cfg.filter_target == FilterTarget::Operator || cfg.filter_target == FilterTarget::Both;

    SparseMatrix Ak = A;
    bool sym = is_symmetric(A, 1e-12);
    MultiVector V;
    if (use_v)
        V = initial_test_space(A, cfg, coords);

    for (int k = 0;; ++k) {
        AmgLevel L;
        L.A = Ak;
        L.symmetric = sym;
        const index_t n = Ak.nrows();
        if (n <= cfg.max_coarse || k + 1 >= cfg.max_levels) {
            L.V = V;
            H.levels_.push_back(std::move(L));
            break;
        }
        L.smoother = make_smoother(Ak, cfg);
        if (use_v && refines(cfg))
            V = srqm(Ak, L.smoother, V, cfg.srqm_iters).V;

        const SocGraph G = filter_soc(compute_soc(Ak, cfg.soc, use_v ? &V : nullptr), rule);
        const CfPartition cf = pmis(G, cfg.seed + static_cast<std::uint64_t>(k));
        if (cf.n_coarse == 0 || cf.n_coarse >= cfg.stall_fraction * n) {
            L.V = V;
            H.levels_.push_back(std::move(L));
            break;
        }
        Prolongation pr = build_prolongation(Ak, G, cf, V, cfg);
        SparseMatrix P = std::move(pr.P);
        if (cfg.smooth_prolongation)
            P = smooth_prolongation(Ak, P, cfg.smooth_omega);
        const MultiVector Vc = use_v ? inject(V, cf) : MultiVector();
        const MultiVector Wc = use_v ? Vc : ones(cf.n_coarse);
        if (filter_p)
            P = filter_with_compensation(P, Wc, cfg.filter_rho, false);
        SparseMatrix Ac = galerkin_product(Ak, P, sym);
        bool sym_c = sym;
        if (filter_a) {
            Ac = filter_with_compensation(Ac, Wc, cfg.filter_rho, true);
            sym_c = is_symmetric(Ac, 1e-12);
        }
        L.P = std::move(P);
        L.R = transpose(L.P);
        L.V = std::move(V);
        L.n_orphans = pr.n_orphans;
        L.n_warnings = pr.n_warnings;
        H.levels_.push_back(std::move(L));
        Ak = std::move(Ac);
        sym = sym_c;
        V = Vc;
    }
    H.finish_coarsest();
    return H;
}

AmgHierarchy AmgHierarchy::from_prolongations(const SparseMatrix& A, const std::vector<SparseMatrix>& Ps,
                                              const AmgConfig& cfg) {
    cfg.validate();
    if (!A.is_square())
        throw DimensionError("from_prolongations: matrix must be square");
    AmgHierarchy H;
    H.cfg_ = cfg;
    SparseMatrix Ak = A;
    const bool sym = is_symmetric(A, 1e-12);
    for (const auto& P : Ps) {
        if (P.nrows() != Ak.nrows() || P.ncols() >= P.nrows())
            throw DimensionError("from_prolongations: prolongation shapes do not form a coarsening chain");
        AmgLevel L;
        L.A = Ak;
        L.symmetric = sym;
        L.smoother = make_smoother(Ak, cfg);
        L.P = P;
        L.R = transpose(P);
        Ak = galerkin_product(Ak, P, sym);
        H.levels_.push_back(std::move(L));
    }
    AmgLevel last;
    last.A = std::move(Ak);
    last.symmetric = sym;
    H.levels_.push_back(std::move(last));
    H.finish_coarsest();
    return H;
}

void AmgHierarchy::finish_coarsest() {
    const AmgLevel& last = levels_.back();
    coarse_ = factor_coarsest(last.A, last.symmetric);
}

void AmgHierarchy::vcycle(std::span<const double> y, std::span<double> x) const {
    if (y.size() != static_cast<std::size_t>(size()) || x.size() != y.size())
        throw DimensionError("vcycle: vector length " + std::to_string(y.size()) + " does not match level 0 size " +
                             std::to_string(size()));
    cycle(0, y, x);
}

MultiVector AmgHierarchy::vcycle(const MultiVector& y) const {
    MultiVector x(y.nrows(), y.ncols());
    std::vector<double> out(y.nrows());
    for (index_t j = 0; j < y.ncols(); ++j) {
        vcycle(y.column(j), out);
        x.set_column(j, out);
    }
    return x;
}

void AmgHierarchy::cycle(std::size_t k, std::span<const double> y, std::span<double> x) const {
    if (k + 1 == levels_.size()) {
        coarse_solve(*coarse_, y, x);
        return;
    }
    const AmgLevel& L = levels_[k];
    const auto n = y.size();
    std::vector<double> s(n, 0.0);
    if (cfg_.nu1 > 0)
        s = apply_smoother(L.smoother, L.A, y, s, cfg_.nu1);

    std::vector<double> r(y.begin(), y.end());
    spmv(-1.0, L.A, s, 1.0, r);
    std::vector<double> rc(L.R.nrows()), ec(L.R.nrows());
    spmv(L.R, r, rc);
    cycle(k + 1, rc, ec);
    spmv(1.0, L.P, ec, 1.0, s);

    if (cfg_.nu2 > 0)
        s = apply_smoother(L.smoother, L.A, y, s, cfg_.nu2);
    std::copy(s.begin(), s.end(), x.begin());
}

double AmgHierarchy::grid_complexity() const {
    double sum = 0.0;
    for (const auto& L : levels_)
        sum += static_cast<double>(L.A.nrows());
    return sum / static_cast<double>(levels_.front().A.nrows());
}

double AmgHierarchy::operator_complexity() const {
    double sum = 0.0;
    for (const auto& L : levels_)
        sum += static_cast<double>(L.A.nnz());
    return sum / static_cast<double>(levels_.front().A.nnz());
}

bool AmgHierarchy::requires_nonsymmetric_solver() const {
    for (const auto& L : levels_)
        if (!L.symmetric)
            return true;
    return false;
}

int AmgHierarchy::total_orphans() const {
    int s = 0;
    for (const auto& L : levels_)
        s += L.n_orphans;
    return s;
}

void AmgHierarchy::print_summary(std::ostream& out) const {
    char buf[128];
    out << "levels " << levels_.size() << '\n';
    out << "level          n          nnz   nnz/row    ratio\n";
    for (std::size_t k = 0; k < levels_.size(); ++k) {
        const auto& A = levels_[k].A;
        const double avg = A.nrows() ? static_cast<double>(A.nnz()) / A.nrows() : 0.0;
        if (k == 0)
            std::snprintf(buf, sizeof buf, "%5zu %10d %12zu %9.2f %8s\n", k, A.nrows(), A.nnz(), avg, "-");
        else
            std::snprintf(buf, sizeof buf, "%5zu %10d %12zu %9.2f %8.4f\n", k, A.nrows(), A.nnz(), avg,
                          static_cast<double>(A.nrows()) / levels_[k - 1].A.nrows());
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "grid complexity     %.4f\noperator complexity %.4f\n", grid_complexity(),
                  operator_complexity());
    out << buf;
}

} // namespace clamg
