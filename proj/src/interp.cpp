#include "clamg/interp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "clamg/smoother.hpp"

namespace clamg {

namespace {

// a-bar: couplings with the same sign as the diagonal are discarded.
double abar(double a_kl, double a_kk) {
    if (a_kl == 0.0)
        return 0.0;
    return (a_kl > 0.0) == (a_kk > 0.0) ? 0.0 : a_kl;
}

std::vector<index_t> strong_coarse_of(const SocGraph& G, const CfPartition& cf, index_t k) {
    std::vector<index_t> s;
    for (index_t e = G.offsets[k]; e < G.offsets[k + 1]; ++e)
        if (G.kept[e] && cf.is_coarse(G.cols[e]))
            s.push_back(G.cols[e]);
    return s;
}

bool intersects(const std::vector<index_t>& a, const std::vector<index_t>& b) {
    auto p = a.begin();
    auto q = b.begin();
    while (p != a.end() && q != b.end()) {
        if (*p == *q)
            return true;
        if (*p < *q)
            ++p;
        else
            ++q;
    }
    return false;
}

void check_inputs(const SparseMatrix& A, const SocGraph& G, const CfPartition& cf) {
    if (!A.is_square() || G.n != A.nrows() || cf.size() != A.nrows())
        throw DimensionError("interpolation: matrix, strength graph and partition sizes differ");
}

// Assembles P from per-fine-row weights keyed by node id.
SparseMatrix assemble(const CfPartition& cf, const std::vector<std::vector<std::pair<index_t, double>>>& rows) {
    const index_t n = cf.size();
    std::vector<index_t> off(1, 0), col;
    std::vector<double> val;
    for (index_t i = 0; i < n; ++i) {
        if (cf.is_coarse(i)) {
            col.push_back(cf.coarse_index[i]);
            val.push_back(1.0);
        } else {
            for (const auto& [node, w] : rows[i]) {
                if (w == 0.0)
                    continue;
                col.push_back(cf.coarse_index[node]);
                val.push_back(w);
            }
        }
        off.push_back(static_cast<index_t>(col.size()));
    }
    return SparseMatrix(n, cf.n_coarse, std::move(off), std::move(col), std::move(val));
}

Prolongation make_result(InterpKind kind, index_t n) {
    Prolongation p;
    p.kind = kind;
    p.orphan.assign(n, 0);
    p.distance.assign(n, 0);
    p.residual.assign(n, 0.0);
    p.at_lmax.assign(n, 0);
    return p;
}

// Extended+i weights of fine node i on the interpolatory set `chat`.
bool extended_row(const SparseMatrix& A, const FineNodeSets& s, index_t i, const std::vector<index_t>& chat,
                  std::vector<std::pair<index_t, double>>& out, int& warnings) {
    out.clear();
    if (chat.empty())
        return false;
    const double a_ii = A.at(i, i);
    std::map<index_t, double> num;
    for (const index_t c : chat)
        num[c] = A.at(i, c);
    auto in_chat = [&](index_t l) { return std::binary_search(chat.begin(), chat.end(), l); };

    double diag = a_ii;
    for (const index_t w : s.weak)
        if (!in_chat(w))
            diag += A.at(i, w);
    for (const index_t k : s.strong_fine) {
        const double a_ik = A.at(i, k);
        const double a_kk = A.at(k, k);
        const auto rk = A.row(k);
        double denom = 0.0;
        for (std::size_t q = 0; q < rk.size(); ++q) {
            const index_t l = rk.cols[q];
            if (l == i || in_chat(l))
                denom += abar(rk.vals[q], a_kk);
        }
        if (denom == 0.0) {
            diag += a_ik;
            ++warnings;
            continue;
        }
        for (std::size_t q = 0; q < rk.size(); ++q) {
            const index_t l = rk.cols[q];
            if (l == i)
                diag += a_ik * abar(rk.vals[q], a_kk) / denom;
            else if (in_chat(l))
                num[l] += a_ik * abar(rk.vals[q], a_kk) / denom;
        }
    }
    if (diag == 0.0 || !std::isfinite(diag)) {
        ++warnings;
        return false;
    }
    for (const auto& [c, v] : num)
        out.emplace_back(c, -v / diag);
    return true;
}

Prolongation distance_two(const SparseMatrix& A, const SocGraph& G, const CfPartition& cf, InterpKind kind) {
    check_inputs(A, G, cf);
    const InterpContext ctx = build_context(A, G, cf);
    const index_t n = A.nrows();
    Prolongation res = make_result(kind, n);
    std::vector<std::vector<std::pair<index_t, double>>> rows(n);
    for (index_t i = 0; i < n; ++i) {
        if (cf.is_coarse(i))
            continue;
        const FineNodeSets& s = ctx.nodes[i];
        const auto& chat = kind == InterpKind::Hybrid ? s.hybrid : s.extended;
        if (kind == InterpKind::Hybrid && !s.uncovered.empty())
            ++res.n_warnings;
        if (!extended_row(A, s, i, chat, rows[i], res.n_warnings)) {
            res.orphan[i] = 1;
            ++res.n_orphans;
            rows[i].clear();
        }
        res.distance[i] = 2;
    }
    res.P = assemble(cf, rows);
    return res;
}

} // namespace

const char* to_string(InterpKind kind) {
    switch (kind) {
    case InterpKind::Classical: return "classical";
    case InterpKind::ExtendedI: return "extended-i";
    case InterpKind::Hybrid: return "hybrid";
    case InterpKind::Bamg: return "bamg";
    }
    return "?";
}

std::vector<index_t> hybrid_set(const SocGraph& G, const CfPartition& cf, index_t i, std::vector<index_t>* uncovered) {
    std::vector<index_t> set = strong_coarse_of(G, cf, i);
    std::vector<index_t> fprime;
    std::map<index_t, std::vector<index_t>> coarse_of; // C_j^S for j in F'
    for (const index_t j : G.strong(i)) {
        if (cf.is_coarse(j))
            continue;
        auto cj = strong_coarse_of(G, cf, j);
        if (!intersects(cj, set)) {
            fprime.push_back(j);
            coarse_of[j] = std::move(cj);
        }
    }
    while (!fprime.empty()) {
        std::map<index_t, int> degree; // C'' with degrees counted against F'
        for (const index_t j : fprime)
            for (const index_t c : coarse_of[j])
                ++degree[c];
        if (degree.empty())
            break;
        index_t best = -1;
        int best_deg = 0;
        for (const auto& [c, d] : degree) {
            if (d > best_deg) {
                best = c;
                best_deg = d;
            }
        }
        set.insert(std::lower_bound(set.begin(), set.end(), best), best);
        std::erase_if(fprime, [&](index_t j) {
            return std::binary_search(coarse_of[j].begin(), coarse_of[j].end(), best);
        });
    }
    if (uncovered)
        *uncovered = fprime;
    return set;
}

InterpContext build_context(const SparseMatrix& A, const SocGraph& G, const CfPartition& cf) {
    check_inputs(A, G, cf);
    const index_t n = A.nrows();
    InterpContext ctx;
    ctx.nodes.resize(n);
    for (index_t i = 0; i < n; ++i) {
        if (cf.is_coarse(i))
            continue;
        FineNodeSets& s = ctx.nodes[i];
        const auto r = A.row(i);
        for (std::size_t k = 0; k < r.size(); ++k)
            if (r.cols[k] != i && r.vals[k] != 0.0)
                s.neighbors.push_back(r.cols[k]);
        for (const index_t j : G.strong(i)) {
            if (A.at(i, j) == 0.0)
                continue;
            (cf.is_coarse(j) ? s.strong_coarse : s.strong_fine).push_back(j);
        }
        for (const index_t j : s.neighbors)
            if (!std::binary_search(s.strong_fine.begin(), s.strong_fine.end(), j) &&
                !std::binary_search(s.strong_coarse.begin(), s.strong_coarse.end(), j))
                s.weak.push_back(j);
        s.extended = s.strong_coarse;
        for (const index_t k : s.strong_fine) {
            const double a_kk = A.at(k, k);
            double sum = 0.0;
            for (const index_t m : s.strong_coarse)
                sum += abar(A.at(k, m), a_kk);
            if (sum == 0.0)
                s.fstar.push_back(k);
            const auto ck = strong_coarse_of(G, cf, k);
            s.extended.insert(s.extended.end(), ck.begin(), ck.end());
        }
        std::sort(s.extended.begin(), s.extended.end());
        s.extended.erase(std::unique(s.extended.begin(), s.extended.end()), s.extended.end());
        s.hybrid = hybrid_set(G, cf, i, &s.uncovered);
    }
    return ctx;
}

Prolongation classical_weights(const SparseMatrix& A, const SocGraph& G, const CfPartition& cf) {
    check_inputs(A, G, cf);
    const InterpContext ctx = build_context(A, G, cf);
    const index_t n = A.nrows();
    Prolongation res = make_result(InterpKind::Classical, n);
    std::vector<std::vector<std::pair<index_t, double>>> rows(n);
    for (index_t i = 0; i < n; ++i) {
        if (cf.is_coarse(i))
            continue;
        const FineNodeSets& s = ctx.nodes[i];
        res.distance[i] = 1;
        if (s.strong_coarse.empty()) {
            res.orphan[i] = 1;
            ++res.n_orphans;
            continue;
        }
        double denom = A.at(i, i);
        for (const index_t k : s.weak)
            denom += A.at(i, k);
        for (const index_t k : s.fstar)
            denom += A.at(i, k);
        std::map<index_t, double> num;
        for (const index_t j : s.strong_coarse)
            num[j] = A.at(i, j);
        for (const index_t k : s.strong_fine) {
            if (std::binary_search(s.fstar.begin(), s.fstar.end(), k))
                continue;
            const double a_ik = A.at(i, k);
            const double a_kk = A.at(k, k);
            double dk = 0.0;
            for (const index_t m : s.strong_coarse)
                dk += abar(A.at(k, m), a_kk);
            if (dk == 0.0) {
                // Cannot redistribute: treat k as a weak neighbor.
                denom += a_ik;
                ++res.n_warnings;
                continue;
            }
            for (const index_t m : s.strong_coarse)
                num[m] += a_ik * abar(A.at(k, m), a_kk) / dk;
        }
        if (denom == 0.0 || !std::isfinite(denom)) {
            res.orphan[i] = 1;
            ++res.n_orphans;
            ++res.n_warnings;
            continue;
        }
        for (const auto& [j, v] : num)
            rows[i].emplace_back(j, -v / denom);
    }
    res.P = assemble(cf, rows);
    return res;
}

Prolongation extended_i_weights(const SparseMatrix& A, const SocGraph& G, const CfPartition& cf) {
    return distance_two(A, G, cf, InterpKind::ExtendedI);
}

Prolongation hybrid_weights(const SparseMatrix& A, const SocGraph& G, const CfPartition& cf) {
    return distance_two(A, G, cf, InterpKind::Hybrid);
}

SparseMatrix smooth_prolongation(const SparseMatrix& A, const SparseMatrix& P, std::optional<double> omega) {
    if (!A.is_square() || A.ncols() != P.nrows())
        throw DimensionError("smooth_prolongation: A and P do not conform");
    const auto d = A.diagonal_values();
    std::vector<double> inv(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] == 0.0)
            throw Error("smooth_prolongation: zero diagonal in row " + std::to_string(i));
        inv[i] = 1.0 / d[i];
    }
    double w;
    if (omega) {
        w = *omega;
    } else {
        Smoother jac;
        jac.inv_diag = inv;
        w = 0.9 / estimate_spectral_radius(A, jac, 20);
    }
    if (w == 0.0)
        return P;
    const SparseMatrix DinvAP = spgemm(scale_rows(A, inv), P);
    return add(1.0, P, -w, DinvAP);
}

} // namespace clamg
