#ifndef CLAMG_SMOOTHER_HPP
#define CLAMG_SMOOTHER_HPP

#include <cstdint>
#include <vector>

#include "clamg/sparse.hpp"

namespace clamg {

enum class SmootherKind { Jacobi, Fsai };

struct FsaiConfig {
    int nsteps = 4;
    int candidates_per_step = 2;
    /// Pattern growth stops once nnz(G) / nnz(tril(A)) exceeds this value.
    double target_density = 0.4;
};

struct RelaxationConfig {
    int power_iters = 20;
    std::uint64_t seed = 42;
    /// omega = target / rho_hat. Negative means the per-kind default
    /// (0.9 for Jacobi, 1.0 for FSAI).
    double target = -1.0;
};

/// Relaxed stationary smoother x <- x + omega M^{-1} (b - A x), with
/// M^{-1} = diag(A)^{-1} (Jacobi) or G^T G (FSAI).
struct Smoother {
    SmootherKind kind = SmootherKind::Jacobi;
    std::vector<double> inv_diag;
    SparseMatrix G;  ///< lower triangular, FSAI only
    SparseMatrix Gt; ///< cached transpose of G
    double omega = 1.0;
    double rho_estimate = 1.0;
    double density = 0.0;    ///< nnz(G) / nnz(tril(A)), FSAI only
    int fallback_rows = 0;   ///< FSAI rows that fell back to a Jacobi row

    index_t size() const;
    /// z = M^{-1} r
    void apply_inverse(std::span<const double> r, std::span<double> z) const;
};

Smoother build_jacobi(const SparseMatrix& A, const RelaxationConfig& relax = {});
Smoother build_fsai(const SparseMatrix& A, const FsaiConfig& cfg = {}, const RelaxationConfig& relax = {});

/// `steps` sweeps of the relaxed smoother starting from x0.
std::vector<double> apply_smoother(const Smoother& S, const SparseMatrix& A, std::span<const double> b,
                                   std::span<const double> x0, int steps);
MultiVector apply_smoother(const Smoother& S, const SparseMatrix& A, const MultiVector& b, const MultiVector& x0,
                           int steps);

/// Power-method estimate of rho(M^{-1} A). Uses the A-weighted Rayleigh
/// quotient while x^T A x > 0, the norm ratio otherwise.
double estimate_spectral_radius(const SparseMatrix& A, const Smoother& S, int power_iters,
                                std::uint64_t seed = 42);
/// omega = relax_target / rho_hat, which keeps omega * rho_hat < 2.
double estimate_relaxation(const SparseMatrix& A, const Smoother& S, int power_iters, double relax_target,
                           std::uint64_t seed = 42);

double default_relax_target(SmootherKind kind);

} // namespace clamg

#endif // CLAMG_SMOOTHER_HPP
