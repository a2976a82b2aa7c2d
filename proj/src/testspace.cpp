#include "clamg/testspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

namespace clamg {

namespace {

using ColumnSet = std::vector<std::vector<double>>;

// Modified Gram-Schmidt over `cols`, appending surviving columns to `basis`.
void mgs_append(ColumnSet& basis, const ColumnSet& cols) {
    for (const auto& c : cols) {
        std::vector<double> v = c;
        const double n0 = norm2(v);
        if (n0 == 0.0 || !std::isfinite(n0))
            continue;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis)
                axpy(-dot(q, v), q, v);
        const double nv = norm2(v);
        if (nv <= 1e-13 * n0)
            continue;
        for (auto& x : v)
            x /= nv;
        basis.push_back(std::move(v));
    }
}

ColumnSet columns_of(const MultiVector& V) {
    ColumnSet c(V.ncols());
    for (index_t j = 0; j < V.ncols(); ++j)
        c[j] = V.column(j);
    return c;
}

MultiVector from_columns(const ColumnSet& cols, index_t n) {
    MultiVector V(n, static_cast<index_t>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        V.set_column(static_cast<index_t>(j), cols[j]);
    return V;
}

// Rayleigh-Ritz on the orthonormal basis Q; keeps the k smallest pairs.
void rayleigh_ritz(const SparseMatrix& A, const ColumnSet& Q, std::size_t k, ColumnSet& V,
                   std::vector<double>& lambda) {
    const auto m = static_cast<Eigen::Index>(Q.size());
    const auto n = static_cast<index_t>(A.nrows());
    ColumnSet AQ(Q.size(), std::vector<double>(n));
    for (std::size_t j = 0; j < Q.size(); ++j)
        spmv(A, Q[j], AQ[j]);
    Eigen::MatrixXd H(m, m);
    for (Eigen::Index p = 0; p < m; ++p)
        for (Eigen::Index q = 0; q < m; ++q)
            H(p, q) = dot(Q[p], AQ[q]);
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
    const auto keep = std::min<std::size_t>(k, Q.size());
    V.assign(keep, std::vector<double>(n, 0.0));
    lambda.assign(keep, 0.0);
    for (std::size_t c = 0; c < keep; ++c) {
        lambda[c] = eig.eigenvalues()(static_cast<Eigen::Index>(c));
        for (Eigen::Index p = 0; p < m; ++p)
            axpy(eig.eigenvectors()(p, static_cast<Eigen::Index>(c)), Q[p], V[c]);
    }
}

} // namespace

MultiVector orthonormalize(const MultiVector& V) {
    ColumnSet basis;
    mgs_append(basis, columns_of(V));
    if (basis.empty())
        throw Error("orthonormalize: every column is numerically dependent");
    return from_columns(basis, V.nrows());
}

std::vector<double> rayleigh_quotients(const SparseMatrix& A, const MultiVector& V) {
    std::vector<double> rq(V.ncols());
    std::vector<double> av(V.nrows());
    for (index_t j = 0; j < V.ncols(); ++j) {
        const auto v = V.column(j);
        spmv(A, v, av);
        rq[j] = dot(v, av) / dot(v, v);
    }
    return rq;
}

TestSpace analytic_near_kernel(KernelKind kind, index_t n, const MultiVector* coords) {
    TestSpace ts;
    if (kind == KernelKind::Constant) {
        if (n < 1)
            throw DimensionError("constant kernel needs n >= 1");
        ts.V = MultiVector(n, 1, 1.0 / std::sqrt(static_cast<double>(n)));
        return ts;
    }
    if (coords == nullptr || coords->ncols() != 3)
        throw DimensionError("rigid-body modes need a coordinate block with 3 columns");
    if (n % 3 != 0 || coords->nrows() != n / 3)
        throw DimensionError("rigid-body modes need n = 3 * number of nodes (n = " + std::to_string(n) +
                             ", nodes = " + std::to_string(coords->nrows()) + ")");
    const index_t nodes = coords->nrows();
    double c[3] = {0.0, 0.0, 0.0};
    for (index_t p = 0; p < nodes; ++p)
        for (int d = 0; d < 3; ++d)
            c[d] += (*coords)(p, d);
    for (double& v : c)
        v /= static_cast<double>(nodes);
    MultiVector R(n, 6);
    for (index_t p = 0; p < nodes; ++p) {
        const double x = (*coords)(p, 0) - c[0];
        const double y = (*coords)(p, 1) - c[1];
        const double z = (*coords)(p, 2) - c[2];
        for (int d = 0; d < 3; ++d)
            R(3 * p + d, d) = 1.0;
        // about z
        R(3 * p + 0, 3) = -y;
        R(3 * p + 1, 3) = x;
        // about x
        R(3 * p + 1, 4) = -z;
        R(3 * p + 2, 4) = y;
        // about y
        R(3 * p + 0, 5) = z;
        R(3 * p + 2, 5) = -x;
    }
    ts.V = orthonormalize(R);
    return ts;
}

TestSpace srqm(const SparseMatrix& A, const Smoother& S, const MultiVector& V0, int iters) {
    if (V0.nrows() != A.nrows())
        throw DimensionError("srqm: test space has " + std::to_string(V0.nrows()) + " rows, matrix " +
                             std::to_string(A.nrows()));
    const index_t n = A.nrows();
    const auto k = static_cast<std::size_t>(V0.ncols());
    TestSpace ts;

    ColumnSet basis;
    mgs_append(basis, columns_of(V0));
    if (basis.empty())
        throw Error("srqm: initial test space is numerically zero");
    ts.rank_warning = basis.size() < k;

    ColumnSet V;
    std::vector<double> lambda;
    rayleigh_ritz(A, basis, k, V, lambda);
    ts.history.push_back(lambda);

    std::vector<double> av(n), r(n);
    ColumnSet P; // previous update directions, empty on the first sweep
    for (int it = 0; it < iters; ++it) {
        ColumnSet Z(V.size(), std::vector<double>(n));
        for (std::size_t j = 0; j < V.size(); ++j) {
            spmv(A, V[j], av);
            for (index_t i = 0; i < n; ++i)
                r[i] = av[i] - lambda[j] * V[j][i];
            S.apply_inverse(r, Z[j]);
        }
        ColumnSet Q;
        mgs_append(Q, V);
        if (Q.size() < V.size()) {
            ColumnSet retry;
            mgs_append(retry, Q);
            if (retry.size() < V.size()) {
                ts.rank_warning = true;
                break;
            }
            Q = std::move(retry);
        }
        const std::size_t before = Q.size();
        mgs_append(Q, Z);
        if (Q.size() == before)
            break; // residual directions already inside span(V)
        mgs_append(Q, P);

        const ColumnSet old = V;
        rayleigh_ritz(A, Q, k, V, lambda);
        ts.history.push_back(lambda);

        P = V;
        for (auto& p : P)
            for (const auto& o : old)
                axpy(-dot(o, p), o, p);
    }
    ts.V = from_columns(V, n);
    ts.rayleigh = lambda;
    return ts;
}

} // namespace clamg
