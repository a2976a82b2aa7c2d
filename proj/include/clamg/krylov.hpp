#ifndef CLAMG_KRYLOV_HPP
#define CLAMG_KRYLOV_HPP

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "clamg/sparse.hpp"

namespace clamg {

/// y = Op(x)
using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

enum class KrylovMethod { Pcg, BiCGstab };

const char* to_string(KrylovMethod m);

struct KrylovConfig {
    KrylovMethod method = KrylovMethod::Pcg;
    double rtol = 1e-8;
    int max_iters = 5000;
    bool record_history = false;
};

struct KrylovResult {
    std::vector<double> x;
    int iterations = 0;
    bool converged = false;
    double rel_residual = 0.0; ///< true residual at exit, relative to ||b||
    /// Relative residual after each iteration, entry 0 for the initial guess.
    std::vector<double> history;
};

LinearOperator matrix_operator(const SparseMatrix& A);
LinearOperator identity_operator();

/// Throws NotSpdError("operator not SPD") when p^T A p <= 0.
KrylovResult pcg(const LinearOperator& A, const LinearOperator& M, std::span<const double> b,
                 std::span<const double> x0, const KrylovConfig& cfg = {});
/// Right-preconditioned BiCGstab.
KrylovResult bicgstab(const LinearOperator& A, const LinearOperator& M, std::span<const double> b,
                      std::span<const double> x0, const KrylovConfig& cfg = {});
KrylovResult krylov_solve(const LinearOperator& A, const LinearOperator& M, std::span<const double> b,
                          std::span<const double> x0, const KrylovConfig& cfg);

/// "iteration,relative_residual" rows.
void write_history_csv(std::ostream& out, const std::vector<double>& history);

} // namespace clamg

#endif // CLAMG_KRYLOV_HPP
