#ifndef CLAMG_PROBLEMS_HPP
#define CLAMG_PROBLEMS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "clamg/sparse.hpp"

namespace clamg {

/// 7-point Laplacian on an nx x ny x nz interior grid, unit spacing,
/// homogeneous Dirichlet boundary eliminated.
SparseMatrix gen_poisson7(index_t nx, index_t ny, index_t nz);

/// -div(K grad u) with K = Q^T diag(kx, ky, kz) Q, Q an in-plane rotation
/// by theta_deg degrees. Unit spacing, Dirichlet boundary. Cross terms use
/// the four-corner mixed-derivative stencil, so the matrix collapses to 7
/// points when theta is a multiple of 90 degrees.
SparseMatrix gen_rotated_anisotropy(index_t nx, index_t ny, index_t nz, double theta_deg, double kx, double ky,
                                    double kz);

enum class BoundaryKind { Clamped, Free };

struct ElasticityProblem {
    SparseMatrix A;
    MultiVector coords; ///< one row per free node: x, y, z
};

/// Trilinear hexahedral elements on a box of nx x ny x nz unit cubes with
/// three displacement unknowns per node (xyz interleaved). Clamped removes
/// the nodes of the x = 0 face.
ElasticityProblem gen_elasticity3d(index_t nx, index_t ny, index_t nz, double E, double nu, BoundaryKind bc);

/// 24 x 24 stiffness of one hexahedron with edge lengths hx, hy, hz,
/// row-major, 2x2x2 Gauss integration.
std::vector<double> hex_element_stiffness(double hx, double hy, double hz, double E, double nu);

/// Cell-centred 5-point diffusion on nx x ny cells; cell coefficient
/// 10^(u log10(contrast)) with u uniform from `seed`; harmonic face means.
SparseMatrix gen_heterogeneous(index_t nx, index_t ny, double contrast, std::uint64_t seed);

/// Parsed generator description, e.g. "poisson7:16,16,16".
struct GeneratorSpec {
    std::string kind;
    std::vector<double> params;
    std::string option;
};

GeneratorSpec parse_generator(const std::string& spec);

struct GeneratedProblem {
    SparseMatrix A;
    MultiVector coords; ///< empty unless the generator produces geometry
};

GeneratedProblem generate(const GeneratorSpec& spec);

} // namespace clamg

#endif // CLAMG_PROBLEMS_HPP
