#include "clamg/problems.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace clamg {

namespace {

void check_dims(std::initializer_list<index_t> dims, const char* who) {
    for (const index_t d : dims)
        if (d < 2)
            throw DimensionError(std::string(who) + ": every grid dimension must be at least 2");
}

} // namespace

SparseMatrix gen_poisson7(index_t nx, index_t ny, index_t nz) {
    return gen_rotated_anisotropy(nx, ny, nz, 0.0, 1.0, 1.0, 1.0);
}

SparseMatrix gen_rotated_anisotropy(index_t nx, index_t ny, index_t nz, double theta_deg, double kx, double ky,
                                    double kz) {
    check_dims({nx, ny, nz}, "grid generator");
    if (!(kx > 0.0 && ky > 0.0 && kz > 0.0))
        throw Error("anisotropy coefficients must be positive");
    const double t = theta_deg * std::numbers::pi / 180.0;
    const double c = std::cos(t), s = std::sin(t);
    const double kxx = c * c * kx + s * s * ky;
    const double kyy = s * s * kx + c * c * ky;
    const double kxy = c * s * (ky - kx);
    const bool cross = kxy != 0.0;

    auto id = [&](index_t i, index_t j, index_t k) { return (k * ny + j) * nx + i; };
    const index_t n = nx * ny * nz;
    std::vector<Triplet> e;
    e.reserve(static_cast<std::size_t>(n) * (cross ? 11 : 7));
    for (index_t k = 0; k < nz; ++k)
        for (index_t j = 0; j < ny; ++j)
            for (index_t i = 0; i < nx; ++i) {
                const index_t row = id(i, j, k);
                e.push_back({row, row, 2.0 * (kxx + kyy + kz)});
                auto link = [&](index_t di, index_t dj, index_t dk, double v) {
                    const index_t a = i + di, b = j + dj, d = k + dk;
                    if (a < 0 || a >= nx || b < 0 || b >= ny || d < 0 || d >= nz)
                        return;
                    e.push_back({row, id(a, b, d), v});
                };
                link(-1, 0, 0, -kxx);
                link(1, 0, 0, -kxx);
                link(0, -1, 0, -kyy);
                link(0, 1, 0, -kyy);
                link(0, 0, -1, -kz);
                link(0, 0, 1, -kz);
                if (cross) {
                    link(1, 1, 0, -0.5 * kxy);
                    link(-1, -1, 0, -0.5 * kxy);
                    link(1, -1, 0, 0.5 * kxy);
                    link(-1, 1, 0, 0.5 * kxy);
                }
            }
    return SparseMatrix::from_triplets(n, n, std::move(e));
}

std::vector<double> hex_element_stiffness(double hx, double hy, double hz, double E, double nu) {
    if (!(nu > -1.0 && nu < 0.5) || !(E > 0.0))
        throw Error("elasticity: need E > 0 and -1 < nu < 0.5");
    const double lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    const double mu = E / (2.0 * (1.0 + nu));
    double D[6][6] = {};
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b)
            D[a][b] = lambda;
        D[a][a] = lambda + 2.0 * mu;
        D[a + 3][a + 3] = mu;
    }
    static constexpr int corner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                         {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
    const double g = 1.0 / std::sqrt(3.0);
    const double h[3] = {hx, hy, hz};
    std::vector<double> K(24 * 24, 0.0);
    for (int gp = 0; gp < 8; ++gp) {
        const double xi[3] = {(gp & 1) ? g : -g, (gp & 2) ? g : -g, (gp & 4) ? g : -g};
        // Shape-function gradients in physical coordinates (box element).
        double dN[8][3];
        for (int a = 0; a < 8; ++a) {
            double s[3];
            for (int d = 0; d < 3; ++d)
                s[d] = corner[a][d] ? 1.0 : -1.0;
            const double f[3] = {1.0 + s[0] * xi[0], 1.0 + s[1] * xi[1], 1.0 + s[2] * xi[2]};
            dN[a][0] = s[0] * f[1] * f[2] / 8.0 * 2.0 / h[0];
            dN[a][1] = f[0] * s[1] * f[2] / 8.0 * 2.0 / h[1];
            dN[a][2] = f[0] * f[1] * s[2] / 8.0 * 2.0 / h[2];
        }
        double B[6][24] = {};
        for (int a = 0; a < 8; ++a) {
            const int c = 3 * a;
            B[0][c] = dN[a][0];
            B[1][c + 1] = dN[a][1];
            B[2][c + 2] = dN[a][2];
            B[3][c] = dN[a][1];
            B[3][c + 1] = dN[a][0];
            B[4][c + 1] = dN[a][2];
            B[4][c + 2] = dN[a][1];
            B[5][c] = dN[a][2];
            B[5][c + 2] = dN[a][0];
        }
        const double detJ = hx * hy * hz / 8.0;
        double DB[6][24];
        for (int p = 0; p < 6; ++p)
            for (int q = 0; q < 24; ++q) {
                double v = 0.0;
                for (int r = 0; r < 6; ++r)
                    v += D[p][r] * B[r][q];
                DB[p][q] = v;
            }
        for (int p = 0; p < 24; ++p)
            for (int q = 0; q < 24; ++q) {
                double v = 0.0;
                for (int r = 0; r < 6; ++r)
                    v += B[r][p] * DB[r][q];
                K[p * 24 + q] += v * detJ;
            }
    }
    return K;
}

ElasticityProblem gen_elasticity3d(index_t nx, index_t ny, index_t nz, double E, double nu, BoundaryKind bc) {
    if (nx < 1 || ny < 1 || nz < 1)
        throw DimensionError("elasticity: need at least one element per direction");
    const auto Ke = hex_element_stiffness(1.0, 1.0, 1.0, E, nu);
    const index_t px = nx + 1, py = ny + 1, pz = nz + 1;
    const index_t nodes = px * py * pz;
    std::vector<index_t> free_id(nodes, -1);
    index_t nfree = 0;
    for (index_t k = 0; k < pz; ++k)
        for (index_t j = 0; j < py; ++j)
            for (index_t i = 0; i < px; ++i)
                if (!(bc == BoundaryKind::Clamped && i == 0))
                    free_id[(k * py + j) * px + i] = nfree++;
    ElasticityProblem out;
    out.coords = MultiVector(nfree, 3);
    for (index_t k = 0; k < pz; ++k)
        for (index_t j = 0; j < py; ++j)
            for (index_t i = 0; i < px; ++i) {
                const index_t f = free_id[(k * py + j) * px + i];
                if (f < 0)
                    continue;
                out.coords(f, 0) = i;
                out.coords(f, 1) = j;
                out.coords(f, 2) = k;
            }
    static constexpr int corner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                         {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
    std::vector<Triplet> e;
    e.reserve(static_cast<std::size_t>(nx) * ny * nz * 576);
    for (index_t k = 0; k < nz; ++k)
        for (index_t j = 0; j < ny; ++j)
            for (index_t i = 0; i < nx; ++i) {
                index_t dof[24];
                for (int a = 0; a < 8; ++a) {
                    const index_t node =
                        ((k + corner[a][2]) * py + (j + corner[a][1])) * px + (i + corner[a][0]);
                    const index_t f = free_id[node];
                    for (int d = 0; d < 3; ++d)
                        dof[3 * a + d] = f < 0 ? -1 : 3 * f + d;
                }
                for (int p = 0; p < 24; ++p) {
                    if (dof[p] < 0)
                        continue;
                    for (int q = 0; q < 24; ++q)
                        if (dof[q] >= 0)
                            e.push_back({dof[p], dof[q], Ke[p * 24 + q]});
                }
            }
    out.A = SparseMatrix::from_triplets(3 * nfree, 3 * nfree, std::move(e));
    return out;
}

SparseMatrix gen_heterogeneous(index_t nx, index_t ny, double contrast, std::uint64_t seed) {
    check_dims({nx, ny}, "heterogeneous generator");
    if (!(contrast >= 1.0))
        throw Error("heterogeneous generator: contrast must be at least 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double decades = std::log10(contrast);
    const index_t n = nx * ny;
    std::vector<double> kc(n);
    for (auto& v : kc)
        v = std::pow(10.0, unif(rng) * decades);
    auto face = [](double a, double b) { return 2.0 * a * b / (a + b); };
    std::vector<Triplet> e;
    e.reserve(static_cast<std::size_t>(n) * 5);
    for (index_t j = 0; j < ny; ++j)
        for (index_t i = 0; i < nx; ++i) {
            const index_t row = j * nx + i;
            double diag = 0.0;
            const index_t di[4] = {-1, 1, 0, 0}, dj[4] = {0, 0, -1, 1};
            for (int f = 0; f < 4; ++f) {
                const index_t a = i + di[f], b = j + dj[f];
                if (a < 0 || a >= nx || b < 0 || b >= ny) {
                    diag += kc[row];
                    continue;
                }
                const double t = face(kc[row], kc[b * nx + a]);
                diag += t;
                e.push_back({row, b * nx + a, -t});
            }
            e.push_back({row, row, diag});
        }
    return SparseMatrix::from_triplets(n, n, std::move(e));
}

GeneratorSpec parse_generator(const std::string& spec) {
    GeneratorSpec g;
    const auto colon = spec.find(':');
    if (colon == std::string::npos || colon == 0)
        throw Error("generator spec '" + spec + "' must look like kind:p1,p2,...");
    g.kind = spec.substr(0, colon);
    std::stringstream ss(spec.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty())
            throw Error("generator spec '" + spec + "' has an empty field");
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size())
                throw std::invalid_argument(tok);
            g.params.push_back(v);
        } catch (const std::exception&) {
            if (!g.option.empty())
                throw Error("generator spec '" + spec + "' has more than one option word");
            g.option = tok;
        }
    }
    return g;
}

namespace {

index_t as_dim(double v, const std::string& kind) {
    if (v != std::floor(v) || v < 1 || v > 1e7)
        throw Error(kind + ": grid dimensions must be positive integers");
    return static_cast<index_t>(v);
}

void expect_params(const GeneratorSpec& g, std::size_t lo, std::size_t hi) {
    if (g.params.size() < lo || g.params.size() > hi)
        throw Error(g.kind + ": expected between " + std::to_string(lo) + " and " + std::to_string(hi) +
                    " numeric parameters, got " + std::to_string(g.params.size()));
}

} // namespace

GeneratedProblem generate(const GeneratorSpec& g) {
    GeneratedProblem out;
    const auto& p = g.params;
    if (g.kind == "poisson7") {
        expect_params(g, 3, 3);
        out.A = gen_poisson7(as_dim(p[0], g.kind), as_dim(p[1], g.kind), as_dim(p[2], g.kind));
    } else if (g.kind == "anisotropy") {
        if (p.size() != 3 && p.size() != 7)
            throw Error("anisotropy: expected nx,ny,nz or nx,ny,nz,theta,kx,ky,kz");
        const bool custom = p.size() == 7;
        out.A = gen_rotated_anisotropy(as_dim(p[0], g.kind), as_dim(p[1], g.kind), as_dim(p[2], g.kind),
                                       custom ? p[3] : 30.0, custom ? p[4] : 10.0, custom ? p[5] : 1e-3,
                                       custom ? p[6] : 1e-6);
    } else if (g.kind == "elasticity") {
        if (p.size() != 3 && p.size() != 5)
            throw Error("elasticity: expected nx,ny,nz[,E,nu][,clamped|free]");
        BoundaryKind bc = BoundaryKind::Clamped;
        if (g.option == "free")
            bc = BoundaryKind::Free;
        else if (!g.option.empty() && g.option != "clamped")
            throw Error("elasticity: unknown boundary option '" + g.option + "'");
        auto prob = gen_elasticity3d(as_dim(p[0], g.kind), as_dim(p[1], g.kind), as_dim(p[2], g.kind),
                                     p.size() == 5 ? p[3] : 1e6, p.size() == 5 ? p[4] : 0.45, bc);
        out.A = std::move(prob.A);
        out.coords = std::move(prob.coords);
        return out;
    } else if (g.kind == "heterogeneous") {
        expect_params(g, 4, 4);
        if (p[3] < 0 || p[3] != std::floor(p[3]))
            throw Error("heterogeneous: seed must be a non-negative integer");
        out.A = gen_heterogeneous(as_dim(p[0], g.kind), as_dim(p[1], g.kind), p[2], static_cast<std::uint64_t>(p[3]));
    } else {
        throw Error("unknown generator '" + g.kind + "' (poisson7, anisotropy, elasticity, heterogeneous)");
    }
    if (!g.option.empty())
        throw Error(g.kind + ": unexpected option '" + g.option + "'");
    return out;
}

} // namespace clamg
