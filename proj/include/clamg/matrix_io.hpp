#ifndef CLAMG_MATRIX_IO_HPP
#define CLAMG_MATRIX_IO_HPP

#include <iosfwd>
#include <string>

#include "clamg/sparse.hpp"

namespace clamg::io {

/// Matrix Market coordinate reader. `symmetric` / `skew-symmetric` files are
/// expanded to full storage; `pattern` entries read as 1.
SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market(const std::string& path);

/// Writes `general` coordinate format, or the lower triangle under the
/// `symmetric` qualifier when `as_symmetric` is set (caller guarantees symmetry).
void write_matrix_market(std::ostream& out, const SparseMatrix& A, bool as_symmetric = false);
void write_matrix_market(const std::string& path, const SparseMatrix& A, bool as_symmetric = false);

/// Dense `array` format, column-major as the format prescribes.
MultiVector read_matrix_market_array(std::istream& in);
MultiVector read_matrix_market_array(const std::string& path);
void write_matrix_market_array(std::ostream& out, const MultiVector& V);
void write_matrix_market_array(const std::string& path, const MultiVector& V);

/// Binary dump: "AMGF", u32 version, u64 nrows, ncols, nnz (little-endian),
/// then offsets (u64 each), column indices (u32) and values (f64).
inline constexpr std::uint32_t kBinaryVersion = 1;
void write_binary(std::ostream& out, const SparseMatrix& A);
SparseMatrix read_binary(std::istream& in);

} // namespace clamg::io

#endif // CLAMG_MATRIX_IO_HPP
