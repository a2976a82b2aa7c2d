// The interpolatory-set example graph: node i to be interpolated, coarse
// points m, n, l, o, all couplings strong.
#ifndef CLAMG_TESTS_FIG1_FIXTURE_HPP
#define CLAMG_TESTS_FIG1_FIXTURE_HPP

#include <utility>
#include <vector>

#include "clamg/coarsen.hpp"

namespace fig1 {

enum Node : clamg::index_t { m, a, k, n, b, i, j, c, o, d, l, e, f, kNodes };

struct Fixture {
    clamg::SparseMatrix A;
    clamg::SocGraph G;
    clamg::CfPartition cf;
};

inline Fixture build() {
    using namespace clamg;
    const std::vector<std::pair<index_t, index_t>> edges = {
        {m, a}, {m, b}, {a, k}, {b, k}, {m, k}, {k, n}, {a, n}, {b, i}, {b, o}, {k, i}, {k, j}, {n, j}, {n, c}, {j, c},
        {j, i}, {i, o}, {i, d}, {j, d}, {j, l}, {c, l}, {d, l}, {o, d}, {o, e}, {d, e}, {d, f}, {l, f}, {e, f}};
    std::vector<Triplet> t;
    std::vector<double> deg(kNodes, 0.0);
    for (auto [p, q] : edges) {
        t.push_back({p, q, -1.0});
        t.push_back({q, p, -1.0});
        deg[p] += 1.0;
        deg[q] += 1.0;
    }
    for (index_t v = 0; v < kNodes; ++v)
        t.push_back({v, v, deg[v] + 0.1});
    Fixture fx;
    fx.A = SparseMatrix::from_triplets(kNodes, kNodes, t);
    fx.G = filter_soc(compute_soc(fx.A, SocKind::Classical), FilterRule::threshold(0.25));
    std::vector<NodeLabel> labels(kNodes, NodeLabel::Fine);
    for (index_t v : {m, n, o, l})
        labels[v] = NodeLabel::Coarse;
    fx.cf = CfPartition::from_labels(labels);
    return fx;
}

} // namespace fig1

#endif // CLAMG_TESTS_FIG1_FIXTURE_HPP
