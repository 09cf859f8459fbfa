#pragma once

#include <memory>
#include <utility>

#include "eulerlab/fields.hpp"

namespace eulerlab {

enum class AxisBc { even_symmetry };
enum class WallBc { dirichlet_zero };

struct EllipticOptions {
    AxisBc axis_bc = AxisBc::even_symmetry;
    WallBc wall_bc = WallBc::dirichlet_zero;
    double tolerance = 1e-12;
};

// Direct solver for  -[ d2/dr2 + (3/r) d/dr + d2/dz2 ] psi1 = omega1  on the
// periodic-in-z strip: DFT along z, then one tridiagonal boundary-value solve
// in r per wavenumber. Second-order central differences in r with the 3/r
// coefficient at cell centers; even-symmetry ghost across r = 0, Dirichlet
// psi1 = 0 at the wall face r = 1 via linear extrapolation.
class StreamSolver {
  public:
    StreamSolver(const GridSpec& grid, EllipticOptions opts = {});
    ~StreamSolver();

    StreamSolver(StreamSolver&&) noexcept;
    StreamSolver& operator=(StreamSolver&&) noexcept;
    StreamSolver(const StreamSolver&) = delete;
    StreamSolver& operator=(const StreamSolver&) = delete;

    const GridSpec& grid() const;
    const EllipticOptions& options() const;

    // Solves for psi1 and verifies the discrete residual against `tolerance`.
    ScalarField2D solve(const ScalarField2D& omega1) const;

    // Applies the discrete operator (same stencils and ghost conventions).
    ScalarField2D apply(const ScalarField2D& psi1) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrapper around StreamSolver.
ScalarField2D solve_stream(const ScalarField2D& omega1, EllipticOptions opts = {});

// u_r = -r d(psi1)/dz,  u_z = 2 psi1 + r d(psi1)/dr, with the shared stencils.
std::pair<ScalarField2D, ScalarField2D> velocity_from_stream(const ScalarField2D& psi1);

// Discrete cylindrical divergence (1/r) d(r u_r)/dr + d(u_z)/dz.
ScalarField2D divergence(const ScalarField2D& ur, const ScalarField2D& uz);

}  // namespace eulerlab
