#include "clamg/krylov.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace clamg {

namespace {

void check_sizes(std::span<const double> b, std::span<const double> x0) {
    if (b.size() != x0.size())
        throw DimensionError("krylov: right-hand side and initial guess lengths differ");
}

double true_residual(const LinearOperator& A, std::span<const double> b, std::span<const double> x,
                     std::vector<double>& r) {
    A(x, r);
    for (std::size_t i = 0; i < b.size(); ++i)
        r[i] = b[i] - r[i];
    return norm2(r);
}

} // namespace

const char* to_string(KrylovMethod m) { return m == KrylovMethod::Pcg ? "pcg" : "bicgstab"; }

LinearOperator matrix_operator(const SparseMatrix& A) {
    return [&A](std::span<const double> x, std::span<double> y) { spmv(A, x, y); };
}

LinearOperator identity_operator() {
    return [](std::span<const double> x, std::span<double> y) { std::copy(x.begin(), x.end(), y.begin()); };
}

KrylovResult pcg(const LinearOperator& A, const LinearOperator& M, std::span<const double> b,
                 std::span<const double> x0, const KrylovConfig& cfg) {
    check_sizes(b, x0);
    if (!(cfg.rtol > 0.0))
        throw Error("krylov: rtol must be positive");
    const std::size_t n = b.size();
    KrylovResult res;
    res.x.assign(x0.begin(), x0.end());
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        std::fill(res.x.begin(), res.x.end(), 0.0);
        res.converged = true;
        if (cfg.record_history)
            res.history.push_back(0.0);
        return res;
    }
    const double tol = cfg.rtol * bnorm;
    std::vector<double> r(n), z(n), p(n), q(n);
    double rnorm = true_residual(A, b, res.x, r);
    if (cfg.record_history)
        res.history.push_back(rnorm / bnorm);
    if (rnorm <= tol) {
        res.converged = true;
        res.rel_residual = rnorm / bnorm;
        return res;
    }
    M(r, z);
    p = z;
    double rz = dot(r, z);
    for (int k = 1; k <= cfg.max_iters; ++k) {
        A(p, q);
        const double pq = dot(p, q);
        if (!(pq > 0.0))
            throw NotSpdError("operator not SPD");
        const double alpha = rz / pq;
        axpy(alpha, p, res.x);
        axpy(-alpha, q, r);
        res.iterations = k;
        rnorm = k % 50 == 0 ? true_residual(A, b, res.x, r) : norm2(r);
        if (rnorm <= tol) {
            rnorm = true_residual(A, b, res.x, r);
            if (rnorm <= tol) {
                res.converged = true;
                if (cfg.record_history)
                    res.history.push_back(rnorm / bnorm);
                break;
            }
        }
        if (cfg.record_history)
            res.history.push_back(rnorm / bnorm);
        M(r, z);
        const double rz_new = dot(r, z);
        if (rz_new < 0.0)
            throw NotSpdError("preconditioner not SPD");
        if (rz_new == 0.0 || !std::isfinite(rz_new))
            throw Error("pcg breakdown: r^T M r vanished before convergence");
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i)
            p[i] = z[i] + beta * p[i];
    }
    res.rel_residual = true_residual(A, b, res.x, r) / bnorm;
    return res;
}

KrylovResult bicgstab(const LinearOperator& A, const LinearOperator& M, std::span<const double> b,
                      std::span<const double> x0, const KrylovConfig& cfg) {
    check_sizes(b, x0);
    if (!(cfg.rtol > 0.0))
        throw Error("krylov: rtol must be positive");
    const std::size_t n = b.size();
    KrylovResult res;
    res.x.assign(x0.begin(), x0.end());
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        std::fill(res.x.begin(), res.x.end(), 0.0);
        res.converged = true;
        if (cfg.record_history)
            res.history.push_back(0.0);
        return res;
    }
    const double tol = cfg.rtol * bnorm;
    std::vector<double> r(n), rhat(n), p(n, 0.0), v(n, 0.0), phat(n), s(n), shat(n), t(n), tmp(n);
    double rnorm = true_residual(A, b, res.x, r);
    if (cfg.record_history)
        res.history.push_back(rnorm / bnorm);
    if (rnorm <= tol) {
        res.converged = true;
        res.rel_residual = rnorm / bnorm;
        return res;
    }
    rhat = r;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    bool restarted = false;
    auto restart = [&]() {
        if (restarted)
            throw Error("bicgstab breakdown persists after restart");
        restarted = true;
        rhat = r;
        std::fill(p.begin(), p.end(), 0.0);
        std::fill(v.begin(), v.end(), 0.0);
        rho = alpha = omega = 1.0;
    };

    for (int k = 1; k <= cfg.max_iters; ++k) {
        double rho_new = dot(rhat, r);
        if (rho_new == 0.0 || !std::isfinite(rho_new)) {
            restart();
            rho_new = dot(rhat, r);
        }
        const double beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for (std::size_t i = 0; i < n; ++i)
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        M(p, phat);
        A(phat, v);
        const double rv = dot(rhat, v);
        if (rv == 0.0 || !std::isfinite(rv)) {
            restart();
            --k;
            continue;
        }
        alpha = rho / rv;
        for (std::size_t i = 0; i < n; ++i)
            s[i] = r[i] - alpha * v[i];
        res.iterations = k;
        if (norm2(s) <= tol) {
            axpy(alpha, phat, res.x);
            rnorm = true_residual(A, b, res.x, r);
            if (cfg.record_history)
                res.history.push_back(rnorm / bnorm);
            if (rnorm <= tol) {
                res.converged = true;
                break;
            }
            continue;
        }
        M(s, shat);
        A(shat, t);
        const double tt = dot(t, t);
        omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
        axpy(alpha, phat, res.x);
        axpy(omega, shat, res.x);
        for (std::size_t i = 0; i < n; ++i)
            r[i] = s[i] - omega * t[i];
        rnorm = k % 50 == 0 ? true_residual(A, b, res.x, r) : norm2(r);
        if (rnorm <= tol)
            rnorm = true_residual(A, b, res.x, r);
        if (cfg.record_history)
            res.history.push_back(rnorm / bnorm);
        if (rnorm <= tol) {
            res.converged = true;
            break;
        }
        if (omega == 0.0)
            restart();
    }
    res.rel_residual = true_residual(A, b, res.x, tmp) / bnorm;
    return res;
}

KrylovResult krylov_solve(const LinearOperator& A, const LinearOperator& M, std::span<const double> b,
                          std::span<const double> x0, const KrylovConfig& cfg) {
    return cfg.method == KrylovMethod::Pcg ? pcg(A, M, b, x0, cfg) : bicgstab(A, M, b, x0, cfg);
}

void write_history_csv(std::ostream& out, const std::vector<double>& history) {
    out << "iteration,relative_residual\n";
    char buf[64];
    for (std::size_t k = 0; k < history.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", k, history[k]);
        out << buf;
    }
}

} // namespace clamg
