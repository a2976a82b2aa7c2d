#include "clamg/smoother.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Dense>

namespace clamg {

namespace {

void check_square(const SparseMatrix& A, const char* who) {
    if (!A.is_square())
        throw DimensionError(std::string(who) + ": matrix must be square");
}

std::vector<double> positive_diagonal(const SparseMatrix& A, const char* who, bool require_positive) {
    auto d = A.diagonal_values();
    for (index_t i = 0; i < A.nrows(); ++i) {
        if (d[i] == 0.0 || !std::isfinite(d[i]))
            throw Error(std::string(who) + ": zero or missing diagonal entry in row " + std::to_string(i));
        if (require_positive && d[i] < 0.0)
            throw Error(std::string(who) + ": non-positive diagonal entry in row " + std::to_string(i));
    }
    return d;
}

void finish_relaxation(const SparseMatrix& A, Smoother& S, const RelaxationConfig& relax) {
    const double target = relax.target > 0.0 ? relax.target : default_relax_target(S.kind);
    if (target >= 2.0)
        throw Error("relaxation target must be below 2");
    S.rho_estimate = estimate_spectral_radius(A, S, relax.power_iters, relax.seed);
    S.omega = target / S.rho_estimate;
}

// One FSAI row on a sorted pattern whose last entry is the row index itself.
// Returns false when the local matrix is not positive definite.
bool fsai_row(const SparseMatrix& A, std::span<const index_t> pattern, std::vector<double>& g) {
    const auto m = static_cast<Eigen::Index>(pattern.size());
    Eigen::MatrixXd local(m, m);
    for (Eigen::Index p = 0; p < m; ++p)
        for (Eigen::Index q = 0; q < m; ++q)
            local(p, q) = A.at(pattern[p], pattern[q]);
    Eigen::LLT<Eigen::MatrixXd> llt(local);
    if (llt.info() != Eigen::Success)
        return false;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    e(m - 1) = 1.0;
    const Eigen::VectorXd y = llt.solve(e);
    if (!(y(m - 1) > 0.0) || !y.allFinite())
        return false;
    const double s = 1.0 / std::sqrt(y(m - 1));
    g.resize(pattern.size());
    for (Eigen::Index p = 0; p < m; ++p)
        g[p] = y(p) * s;
    return true;
}

} // namespace

double default_relax_target(SmootherKind kind) { return kind == SmootherKind::Fsai ? 1.0 : 0.9; }

index_t Smoother::size() const {
    return kind == SmootherKind::Jacobi ? static_cast<index_t>(inv_diag.size()) : G.nrows();
}

void Smoother::apply_inverse(std::span<const double> r, std::span<double> z) const {
    if (kind == SmootherKind::Jacobi) {
        if (r.size() != inv_diag.size() || z.size() != inv_diag.size())
            throw DimensionError("smoother: vector length mismatch");
        for (std::size_t i = 0; i < r.size(); ++i)
            z[i] = inv_diag[i] * r[i];
        return;
    }
    std::vector<double> t(G.nrows());
    spmv(G, r, t);
    spmv(Gt, t, z);
}

Smoother build_jacobi(const SparseMatrix& A, const RelaxationConfig& relax) {
    check_square(A, "build_jacobi");
    Smoother S;
    S.kind = SmootherKind::Jacobi;
    const auto d = positive_diagonal(A, "build_jacobi", false);
    S.inv_diag.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        S.inv_diag[i] = 1.0 / d[i];
    finish_relaxation(A, S, relax);
    return S;
}

Smoother build_fsai(const SparseMatrix& A, const FsaiConfig& cfg, const RelaxationConfig& relax) {
    check_square(A, "build_fsai");
    const index_t n = A.nrows();
    const auto diag = positive_diagonal(A, "build_fsai", true);
    const auto tril_nnz = static_cast<double>(lower_triangle(A).nnz());

    // Patterns kept sorted with the row index last.
    std::vector<std::vector<index_t>> pattern(n);
    for (index_t i = 0; i < n; ++i)
        pattern[i] = {i};
    std::size_t g_nnz = static_cast<std::size_t>(n);

    std::vector<double> g;
    std::vector<double> grad(n, 0.0);
    std::vector<index_t> mark(n, -1);
    std::vector<index_t> touched;
    struct Candidate {
        double score;
        index_t row;
        index_t col;
    };
    std::vector<Candidate> cands;

    for (int step = 0; step < cfg.nsteps && cfg.candidates_per_step > 0; ++step) {
        if (static_cast<double>(g_nnz) > cfg.target_density * tril_nnz)
            break;
        cands.clear();
        for (index_t i = 0; i < n; ++i) {
            if (!fsai_row(A, pattern[i], g))
                continue;
            // Gradient of the row functional: (A g)_j for j < i outside the pattern.
            touched.clear();
            for (std::size_t p = 0; p < pattern[i].size(); ++p) {
                const auto r = A.row(pattern[i][p]);
                for (std::size_t k = 0; k < r.size(); ++k) {
                    const index_t j = r.cols[k];
                    if (j >= i)
                        break;
                    if (mark[j] != i) {
                        mark[j] = i;
                        grad[j] = 0.0;
                        touched.push_back(j);
                    }
                    grad[j] += r.vals[k] * g[p];
                }
            }
            std::vector<Candidate> row_cands;
            for (const index_t j : touched) {
                const bool in_pattern = std::binary_search(pattern[i].begin(), pattern[i].end() - 1, j);
                const double score = std::abs(grad[j]) / std::sqrt(diag[j]);
                if (!in_pattern && score > 1e-14)
                    row_cands.push_back({score, i, j});
            }
            const auto keep = std::min<std::size_t>(row_cands.size(), cfg.candidates_per_step);
            std::partial_sort(row_cands.begin(), row_cands.begin() + keep, row_cands.end(),
                              [](const Candidate& a, const Candidate& b) {
                                  return a.score != b.score ? a.score > b.score : a.col < b.col;
                              });
            cands.insert(cands.end(), row_cands.begin(), row_cands.begin() + keep);
        }
        if (cands.empty())
            break;
        for (const auto& c : cands) {
            auto& p = pattern[c.row];
            p.insert(std::lower_bound(p.begin(), p.end() - 1, c.col), c.col);
        }
        g_nnz += cands.size();
    }

    Smoother S;
    S.kind = SmootherKind::Fsai;
    std::vector<index_t> off(1, 0), col;
    std::vector<double> val;
    col.reserve(g_nnz);
    val.reserve(g_nnz);
    for (index_t i = 0; i < n; ++i) {
        if (fsai_row(A, pattern[i], g)) {
            col.insert(col.end(), pattern[i].begin(), pattern[i].end());
            val.insert(val.end(), g.begin(), g.end());
        } else {
            ++S.fallback_rows;
            col.push_back(i);
            val.push_back(1.0 / std::sqrt(diag[i]));
        }
        off.push_back(static_cast<index_t>(col.size()));
    }
    S.G = SparseMatrix(n, n, std::move(off), std::move(col), std::move(val));
    S.Gt = transpose(S.G);
    S.density = tril_nnz > 0 ? static_cast<double>(S.G.nnz()) / tril_nnz : 0.0;
    finish_relaxation(A, S, relax);
    return S;
}

std::vector<double> apply_smoother(const Smoother& S, const SparseMatrix& A, std::span<const double> b,
                                   std::span<const double> x0, int steps) {
    const auto n = static_cast<std::size_t>(A.nrows());
    if (b.size() != n || x0.size() != n || static_cast<std::size_t>(S.size()) != n)
        throw DimensionError("apply_smoother: dimension mismatch");
    std::vector<double> x(x0.begin(), x0.end()), r(n), z(n);
    for (int s = 0; s < steps; ++s) {
        std::copy(b.begin(), b.end(), r.begin());
        spmv(-1.0, A, x, 1.0, r);
        S.apply_inverse(r, z);
        axpy(S.omega, z, x);
    }
    return x;
}

MultiVector apply_smoother(const Smoother& S, const SparseMatrix& A, const MultiVector& b, const MultiVector& x0,
                           int steps) {
    if (b.ncols() != x0.ncols() || b.nrows() != x0.nrows())
        throw DimensionError("apply_smoother: block shapes differ");
    MultiVector x(x0.nrows(), x0.ncols());
    for (index_t j = 0; j < b.ncols(); ++j)
        x.set_column(j, apply_smoother(S, A, b.column(j), x0.column(j), steps));
    return x;
}

double estimate_spectral_radius(const SparseMatrix& A, const Smoother& S, int power_iters, std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(A.nrows());
    if (n == 0)
        return 1.0;
    std::vector<double> x(n), ax(n), y(n);
    for (int attempt = 0; attempt < 4; ++attempt) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt) * 7919u);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        for (auto& v : x)
            v = unif(rng);
        double nx = norm2(x);
        if (nx == 0.0)
            continue;
        for (auto& v : x)
            v /= nx;
        double rho = 0.0;
        bool broke = false;
        for (int it = 0; it < std::max(1, power_iters); ++it) {
            spmv(A, x, ax);
            S.apply_inverse(ax, y);
            const double xax = dot(x, ax);
            const double ny = norm2(y);
            if (ny == 0.0 || !std::isfinite(ny)) {
                broke = true;
                break;
            }
            rho = xax > 0.0 ? dot(y, ax) / xax : ny;
            for (std::size_t i = 0; i < n; ++i)
                x[i] = y[i] / ny;
        }
        if (!broke && rho > 0.0 && std::isfinite(rho))
            return rho;
    }
    throw Error("power method broke down after 3 retries");
}

double estimate_relaxation(const SparseMatrix& A, const Smoother& S, int power_iters, double relax_target,
                           std::uint64_t seed) {
    if (!(relax_target > 0.0 && relax_target < 2.0))
        throw Error("relaxation target must lie in (0, 2)");
    return relax_target / estimate_spectral_radius(A, S, power_iters, seed);
}

} // namespace clamg
