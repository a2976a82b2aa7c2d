#include "clamg/coarsen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace clamg {

std::size_t SocGraph::n_kept() const {
    return static_cast<std::size_t>(std::count(kept.begin(), kept.end(), 1));
}

std::vector<index_t> SocGraph::strong(index_t i) const {
    std::vector<index_t> s;
    for (index_t e = offsets[i]; e < offsets[i + 1]; ++e)
        if (kept[e])
            s.push_back(cols[e]);
    return s;
}

bool SocGraph::is_kept(index_t i, index_t j) const {
    const auto b = cols.begin() + offsets[i];
    const auto e = cols.begin() + offsets[i + 1];
    const auto it = std::lower_bound(b, e, j);
    return it != e && *it == j && kept[it - cols.begin()];
}

SocGraph compute_soc(const SparseMatrix& A, SocKind kind, const MultiVector* V) {
    if (!A.is_square())
        throw DimensionError("compute_soc: matrix must be square");
    const index_t n = A.nrows();
    SocGraph G;
    G.n = n;
    G.kind = kind;
    G.offsets.assign(n + 1, 0);
    for (index_t i = 0; i < n; ++i) {
        index_t cnt = 0;
        for (const index_t c : A.row(i).cols)
            cnt += c != i ? 1 : 0;
        G.offsets[i + 1] = G.offsets[i] + cnt;
    }
    G.cols.resize(G.offsets[n]);
    G.strength.assign(G.offsets[n], 0.0);
    G.kept.assign(G.offsets[n], 1);
    for (index_t i = 0, e = 0; i < n; ++i)
        for (const index_t c : A.row(i).cols)
            if (c != i)
                G.cols[e++] = c;

    const auto diag = A.diagonal_values();
    switch (kind) {
    case SocKind::Classical: {
        // Largest negative coupling magnitude over row i and column i.
        std::vector<double> denom(n, 0.0);
        for (index_t i = 0; i < n; ++i) {
            const auto r = A.row(i);
            for (std::size_t k = 0; k < r.size(); ++k) {
                const index_t j = r.cols[k];
                if (j == i)
                    continue;
                denom[i] = std::max(denom[i], -r.vals[k]);
                denom[j] = std::max(denom[j], -r.vals[k]);
            }
        }
        for (index_t i = 0, e = 0; i < n; ++i) {
            const auto r = A.row(i);
            for (std::size_t k = 0; k < r.size(); ++k) {
                if (r.cols[k] == i)
                    continue;
                G.strength[e++] = denom[i] > 0.0 ? std::max(-r.vals[k], 0.0) / denom[i] : 0.0;
            }
        }
        break;
    }
    case SocKind::StrongCoupling: {
        for (index_t i = 0; i < n; ++i)
            if (!(diag[i] > 0.0))
                throw Error("strong-coupling strength needs a positive diagonal; row " + std::to_string(i) +
                            " has " + std::to_string(diag[i]));
        for (index_t i = 0, e = 0; i < n; ++i) {
            const auto r = A.row(i);
            for (std::size_t k = 0; k < r.size(); ++k) {
                const index_t j = r.cols[k];
                if (j == i)
                    continue;
                G.strength[e++] = std::abs(r.vals[k]) / std::sqrt(diag[i] * diag[j]);
            }
        }
        break;
    }
    case SocKind::Affinity: {
        if (V == nullptr || V->ncols() < 1 || V->nrows() != n)
            throw DimensionError("affinity strength needs a test space with n rows and at least one column");
        std::vector<double> sq(n);
        for (index_t i = 0; i < n; ++i) {
            const auto vi = V->row(i);
            sq[i] = dot(vi, vi);
        }
        for (index_t i = 0, e = 0; i < n; ++i) {
            for (const index_t j : A.row(i).cols) {
                if (j == i)
                    continue;
                double s = 0.0;
                if (sq[i] > 0.0 && sq[j] > 0.0) {
                    const double d = dot(V->row(i), V->row(j));
                    s = std::min(1.0, d * d / (sq[i] * sq[j]));
                }
                G.strength[e++] = s;
            }
        }
        break;
    }
    }
    return G;
}

SocGraph filter_soc(const SocGraph& G, FilterRule rule) {
    SocGraph F = G;
    if (rule.kind == FilterRule::Kind::Threshold) {
        const double theta = rule.value;
        if (!(theta >= 0.0 && theta <= 1.0))
            throw Error("soc threshold must lie in [0, 1]");
        const bool absolute = G.kind == SocKind::Affinity;
        for (index_t i = 0; i < G.n; ++i) {
            double rmax = 0.0;
            for (index_t e = G.offsets[i]; e < G.offsets[i + 1]; ++e)
                rmax = std::max(rmax, G.strength[e]);
            const double cut = absolute ? theta : theta * rmax;
            for (index_t e = G.offsets[i]; e < G.offsets[i + 1]; ++e) {
                const double s = G.strength[e];
                F.kept[e] = theta == 0.0 || (s > 0.0 && s >= cut) ? 1 : 0;
            }
        }
        return F;
    }

    const double d = rule.value;
    if (!(d >= 1.0))
        throw Error("soc average degree must be >= 1");
    std::vector<index_t> order;
    for (index_t e = 0; e < static_cast<index_t>(G.n_edges()); ++e)
        if (G.strength[e] > 0.0)
            order.push_back(e);
    // Edge ids are already ordered by (row, col), so they break ties.
    std::stable_sort(order.begin(), order.end(),
                     [&](index_t a, index_t b) { return G.strength[a] > G.strength[b]; });
    const auto budget = std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::floor(G.n * d)));
    std::fill(F.kept.begin(), F.kept.end(), 0);
    for (std::size_t k = 0; k < budget; ++k)
        F.kept[order[k]] = 1;
    // Union with the reverse direction where that edge exists.
    std::vector<char> sym = F.kept;
    for (index_t i = 0; i < G.n; ++i) {
        for (index_t e = G.offsets[i]; e < G.offsets[i + 1]; ++e) {
            if (!F.kept[e])
                continue;
            const index_t j = G.cols[e];
            const auto b = G.cols.begin() + G.offsets[j];
            const auto en = G.cols.begin() + G.offsets[j + 1];
            const auto it = std::lower_bound(b, en, i);
            if (it != en && *it == i)
                sym[it - G.cols.begin()] = 1;
        }
    }
    F.kept = std::move(sym);
    return F;
}

double keyed_uniform(std::uint64_t seed, std::uint64_t key) {
    // splitmix64 over a combined key
    std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + key + 0x632BE59BD9B4E019ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

std::vector<std::vector<index_t>> kept_adjacency(const SocGraph& G) {
    std::vector<std::vector<index_t>> adj(G.n);
    for (index_t i = 0; i < G.n; ++i) {
        for (index_t e = G.offsets[i]; e < G.offsets[i + 1]; ++e) {
            if (!G.kept[e])
                continue;
            adj[i].push_back(G.cols[e]);
            adj[G.cols[e]].push_back(i);
        }
    }
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return adj;
}

CfPartition pmis(const SocGraph& G, std::uint64_t seed) {
    const index_t n = G.n;
    const auto adj = kept_adjacency(G);

    std::vector<char> has_edge(n, 0);
    std::vector<double> weight(n, 0.0);
    for (index_t i = 0; i < n; ++i) {
        for (index_t e = G.offsets[i]; e < G.offsets[i + 1]; ++e) {
            has_edge[i] = 1;
            has_edge[G.cols[e]] = 1;
            if (G.kept[e])
                weight[G.cols[e]] += 1.0; // i depends on cols[e]
        }
    }
    for (index_t i = 0; i < n; ++i)
        weight[i] += keyed_uniform(seed, static_cast<std::uint64_t>(i));

    enum : char { Undecided, Fine, Coarse };
    std::vector<char> state(n, Undecided);
    std::vector<index_t> undecided;
    for (index_t i = 0; i < n; ++i) {
        if (adj[i].empty())
            state[i] = has_edge[i] ? Fine : Coarse;
        else
            undecided.push_back(i);
    }

    auto beats = [&](index_t a, index_t b) {
        return weight[a] != weight[b] ? weight[a] > weight[b] : a < b;
    };
    std::vector<index_t> fresh;
    while (!undecided.empty()) {
        fresh.clear();
        for (const index_t i : undecided) {
            bool local_max = true;
            for (const index_t j : adj[i]) {
                if (state[j] == Undecided && !beats(i, j)) {
                    local_max = false;
                    break;
                }
            }
            if (local_max)
                fresh.push_back(i);
        }
        for (const index_t c : fresh)
            state[c] = Coarse;
        for (const index_t c : fresh)
            for (const index_t j : adj[c])
                if (state[j] == Undecided)
                    state[j] = Fine;
        std::erase_if(undecided, [&](index_t i) { return state[i] != Undecided; });
    }

    std::vector<NodeLabel> labels(n);
    for (index_t i = 0; i < n; ++i)
        labels[i] = state[i] == Coarse ? NodeLabel::Coarse : NodeLabel::Fine;
    return CfPartition::from_labels(std::move(labels));
}

} // namespace clamg
