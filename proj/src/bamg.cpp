#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "clamg/interp.hpp"

namespace clamg {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<std::vector<index_t>> matrix_adjacency(const SparseMatrix& A) {
    const index_t n = A.nrows();
    std::vector<std::vector<index_t>> adj(n);
    for (index_t i = 0; i < n; ++i) {
        for (const index_t j : A.row(i).cols) {
            if (j == i)
                continue;
            adj[i].push_back(j);
            adj[j].push_back(i);
        }
    }
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return adj;
}

// Minimum-norm least-squares solution of M x = b.
Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& M, const Eigen::VectorXd& b) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
    return cod.solve(b);
}

} // namespace

std::vector<index_t> maxvol_select(std::span<const double> phi, index_t n_rows, index_t n_cols, int max_swaps,
                                   double delta) {
    if (n_rows < 0 || n_cols < 0 || phi.size() != static_cast<std::size_t>(n_rows) * n_cols)
        throw DimensionError("maxvol_select: data size does not match the given shape");
    if (n_rows == 0 || n_cols == 0)
        return {};
    const RowMat Phi = Eigen::Map<const RowMat>(phi.data(), n_rows, n_cols);
    const double scale = Phi.cwiseAbs().maxCoeff();
    if (!(scale > 0.0))
        return {};

    // Complete-pivot elimination: rank and a well-conditioned starting set.
    RowMat M = Phi;
    std::vector<char> row_used(n_rows, 0), col_used(n_cols, 0);
    std::vector<index_t> rows;
    const double tol = 1e-12 * scale;
    for (index_t step = 0; step < std::min(n_rows, n_cols); ++step) {
        index_t pr = -1, pc = -1;
        double best = tol;
        for (index_t r = 0; r < n_rows; ++r) {
            if (row_used[r])
                continue;
            for (index_t c = 0; c < n_cols; ++c) {
                if (!col_used[c] && std::abs(M(r, c)) > best) {
                    best = std::abs(M(r, c));
                    pr = r;
                    pc = c;
                }
            }
        }
        if (pr < 0)
            break;
        row_used[pr] = 1;
        col_used[pc] = 1;
        rows.push_back(pr);
        for (index_t r = 0; r < n_rows; ++r) {
            if (row_used[r])
                continue;
            const double f = M(r, pc) / M(pr, pc);
            M.row(r) -= f * M.row(pr);
        }
    }

    if (static_cast<index_t>(rows.size()) == n_cols && n_rows > n_cols) {
        for (int s = 0; s < max_swaps; ++s) {
            RowMat S(n_cols, n_cols);
            for (index_t k = 0; k < n_cols; ++k)
                S.row(k) = Phi.row(rows[k]);
            // B = Phi S^{-1}, i.e. S^T B^T = Phi^T
            const Eigen::MatrixXd B = S.transpose().partialPivLu().solve(Phi.transpose()).transpose();
            Eigen::Index bi = 0, bj = 0;
            const double bmax = B.cwiseAbs().maxCoeff(&bi, &bj);
            if (!(bmax > 1.0 + delta))
                break;
            rows[bj] = static_cast<index_t>(bi);
        }
    }
    std::sort(rows.begin(), rows.end());
    return rows;
}

Prolongation bamg_prolongation(const SparseMatrix& A, const CfPartition& cf, const MultiVector& V,
                               const BamgConfig& cfg, const SocGraph* G) {
    if (!A.is_square() || cf.size() != A.nrows() || V.nrows() != A.nrows())
        throw DimensionError("bamg: matrix, partition and test space sizes differ");
    if (G != nullptr && G->n != A.nrows())
        throw DimensionError("bamg: strength graph size differs from the matrix");
    if (V.ncols() < 1)
        throw DimensionError("bamg: test space has no columns");
    if (cfg.l_min < 1 || cfg.l_max < cfg.l_min)
        throw Error("bamg: need 1 <= l_min <= l_max");
    const index_t n = A.nrows();
    const index_t nt = V.ncols();
    const double eps = cfg.eps >= 0.0 ? cfg.eps : (nt <= 2 ? 1e-10 : 1e-8);
    const auto adj = G != nullptr ? kept_adjacency(*G) : matrix_adjacency(A);

    Prolongation res;
    res.kind = InterpKind::Bamg;
    res.orphan.assign(n, 0);
    res.distance.assign(n, 0);
    res.residual.assign(n, 0.0);
    res.at_lmax.assign(n, 0);

    std::vector<index_t> off(1, 0), col;
    std::vector<double> val;
    std::vector<int> stamp(n, -1);
    std::vector<index_t> frontier, next, cands;

    for (index_t i = 0; i < n; ++i) {
        if (cf.is_coarse(i)) {
            col.push_back(cf.coarse_index[i]);
            val.push_back(1.0);
            off.push_back(static_cast<index_t>(col.size()));
            continue;
        }
        const auto phi_i = V.row(i);
        const Eigen::VectorXd target = Eigen::Map<const Eigen::VectorXd>(phi_i.data(), nt);
        const double tnorm = target.norm();

        frontier.assign(1, i);
        stamp[i] = static_cast<int>(i);
        cands.clear();
        std::vector<index_t> chosen;
        Eigen::VectorXd weights;
        bool have_fit = false;
        std::size_t fitted_cands = 0;
        for (int l = 1; l <= cfg.l_max; ++l) {
            next.clear();
            for (const index_t u : frontier)
                for (const index_t v : adj[u])
                    if (stamp[v] != static_cast<int>(i)) {
                        stamp[v] = static_cast<int>(i);
                        next.push_back(v);
                        if (cf.is_coarse(v))
                            cands.push_back(v);
                    }
            frontier.swap(next);
            if (l < cfg.l_min || cands.empty())
                continue;
            if (have_fit && cands.size() == fitted_cands)
                break; // nothing new within reach
            std::sort(cands.begin(), cands.end());
            const auto nc = static_cast<index_t>(cands.size());
            std::vector<double> phi(static_cast<std::size_t>(nc) * nt);
            for (index_t c = 0; c < nc; ++c)
                std::copy_n(V.row(cands[c]).data(), nt, phi.begin() + static_cast<std::ptrdiff_t>(c) * nt);
            const auto sel = maxvol_select(phi, nc, nt, cfg.max_swaps, cfg.maxvol_delta);
            Eigen::MatrixXd Phi_sel(nt, static_cast<Eigen::Index>(sel.size()));
            for (std::size_t q = 0; q < sel.size(); ++q)
                for (index_t t = 0; t < nt; ++t)
                    Phi_sel(t, static_cast<Eigen::Index>(q)) = phi[static_cast<std::size_t>(sel[q]) * nt + t];
            Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sel.size()));
            double r = 0.0;
            if (tnorm > 0.0 && !sel.empty()) {
                w = min_norm_solve(Phi_sel, target);
                r = (target - Phi_sel * w).norm() / tnorm;
            } else if (tnorm > 0.0) {
                r = 1.0;
            }
            chosen.clear();
            for (const index_t s : sel)
                chosen.push_back(cands[s]);
            weights = w;
            have_fit = true;
            fitted_cands = cands.size();
            res.distance[i] = l;
            res.residual[i] = r;
            if (r <= eps && w.norm() <= cfg.mu) {
                res.at_lmax[i] = 0;
                break;
            }
            res.at_lmax[i] = 1;
        }
        if (!have_fit) {
            res.orphan[i] = 1;
            ++res.n_orphans;
        } else {
            if (res.at_lmax[i])
                ++res.n_warnings;
            for (std::size_t q = 0; q < chosen.size(); ++q) {
                if (weights(static_cast<Eigen::Index>(q)) == 0.0)
                    continue;
                col.push_back(cf.coarse_index[chosen[q]]);
                val.push_back(weights(static_cast<Eigen::Index>(q)));
            }
        }
        off.push_back(static_cast<index_t>(col.size()));
    }
    res.P = SparseMatrix(n, cf.n_coarse, std::move(off), std::move(col), std::move(val));
    return res;
}

namespace {

// Kept positions (indices into the row) after the magnitude-prefix rule.
std::vector<std::size_t> kept_positions(const SparseMatrix::RowView& r, index_t row, double rho, bool keep_diagonal) {
    std::vector<std::size_t> kept, off;
    double total = 0.0, running = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        total += std::abs(r.vals[k]);
        if (keep_diagonal && r.cols[k] == row) {
            kept.push_back(k);
            running += std::abs(r.vals[k]);
        } else {
            off.push_back(k);
        }
    }
    std::stable_sort(off.begin(), off.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(r.vals[a]) > std::abs(r.vals[b]); });
    for (const std::size_t k : off) {
        if (running >= rho * total)
            break;
        kept.push_back(k);
        running += std::abs(r.vals[k]);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

SparseMatrix filter_impl(const SparseMatrix& M, const MultiVector* W, double rho, bool keep_diagonal) {
    if (!(rho > 0.0 && rho <= 1.0))
        throw Error("filter: rho must lie in (0, 1]");
    if (W != nullptr && W->nrows() != M.ncols())
        throw DimensionError("filter: W must have one row per column of M");
    if (rho >= 1.0)
        return M;
    const bool diag = keep_diagonal && M.is_square();
    std::vector<index_t> off(1, 0), col;
    std::vector<double> val;
    for (index_t i = 0; i < M.nrows(); ++i) {
        const auto r = M.row(i);
        const auto kept = kept_positions(r, i, rho, diag);
        std::vector<double> kv(kept.size());
        for (std::size_t q = 0; q < kept.size(); ++q)
            kv[q] = r.vals[kept[q]];
        if (W != nullptr && kept.size() < r.size() && !kept.empty()) {
            const index_t nt = W->ncols();
            Eigen::VectorXd t = Eigen::VectorXd::Zero(nt);
            std::size_t q = 0;
            for (std::size_t k = 0; k < r.size(); ++k) {
                if (q < kept.size() && kept[q] == k) {
                    ++q;
                    continue;
                }
                const auto wj = W->row(r.cols[k]);
                for (index_t c = 0; c < nt; ++c)
                    t(c) += r.vals[k] * wj[c];
            }
            Eigen::MatrixXd WK(nt, static_cast<Eigen::Index>(kept.size()));
            for (std::size_t p = 0; p < kept.size(); ++p) {
                const auto wj = W->row(r.cols[kept[p]]);
                for (index_t c = 0; c < nt; ++c)
                    WK(c, static_cast<Eigen::Index>(p)) = wj[c];
            }
            const Eigen::VectorXd d = min_norm_solve(WK, t);
            for (std::size_t p = 0; p < kept.size(); ++p)
                kv[p] += d(static_cast<Eigen::Index>(p));
        }
        for (std::size_t p = 0; p < kept.size(); ++p) {
            col.push_back(r.cols[kept[p]]);
            val.push_back(kv[p]);
        }
        off.push_back(static_cast<index_t>(col.size()));
    }
    return SparseMatrix(M.nrows(), M.ncols(), std::move(off), std::move(col), std::move(val));
}

} // namespace

SparseMatrix filter_with_compensation(const SparseMatrix& M, const MultiVector& W, double rho, bool keep_diagonal) {
    return filter_impl(M, &W, rho, keep_diagonal);
}

SparseMatrix filter_without_compensation(const SparseMatrix& M, double rho, bool keep_diagonal) {
    return filter_impl(M, nullptr, rho, keep_diagonal);
}

} // namespace clamg
