#ifndef CLAMG_TESTSPACE_HPP
#define CLAMG_TESTSPACE_HPP

#include <optional>
#include <vector>

#include "clamg/smoother.hpp"
#include "clamg/sparse.hpp"

namespace clamg {

enum class KernelKind { Constant, RigidBody3D };

/// Orthonormal near-kernel basis V (n x n_t) with the current Rayleigh
/// quotients of its columns, ascending.
struct TestSpace {
    MultiVector V;
    std::vector<double> rayleigh;
    /// Per SRQM iteration, the Rayleigh quotients after that iteration.
    std::vector<std::vector<double>> history;
    bool rank_warning = false;

    index_t size() const { return V.ncols(); }
};

/// Modified Gram-Schmidt with one reorthogonalization pass. Columns whose
/// norm falls below 1e-13 of their initial norm are dropped.
MultiVector orthonormalize(const MultiVector& V);

/// Constant vector, or the six rigid-body modes built from node coordinates
/// (one row per node, three dofs per node in xyz order). Rotations are taken
/// about the centroid.
TestSpace analytic_near_kernel(KernelKind kind, index_t n, const MultiVector* coords = nullptr);

/// Block preconditioned minimization of the Rayleigh quotient, using the
/// smoother's M^{-1} as preconditioner and Rayleigh-Ritz on span[V, M^{-1} R, P]
/// where P holds the previous update directions (locally optimal block CG).
TestSpace srqm(const SparseMatrix& A, const Smoother& S, const MultiVector& V0, int iters);

/// Rayleigh quotients v^T A v of the (orthonormal) columns of V.
std::vector<double> rayleigh_quotients(const SparseMatrix& A, const MultiVector& V);

} // namespace clamg

#endif // CLAMG_TESTSPACE_HPP
