#pragma once

#include "eulerlab/fields.hpp"

namespace eulerlab {

// Second-order radial derivative: central differences inside, one-sided
// three-point stencils at the first and last radial cells. These are the
// stencils shared by velocity recovery, divergence, advection and curl so
// that discrete identities (e.g. small divergence) hold between them.
ScalarField2D ddr(const ScalarField2D& f);

// Second-order axial derivative, periodic central differences.
ScalarField2D ddz(const ScalarField2D& f);

// Fourth-order variants for convergence studies: five-point interior
// stencils, falling back to the second-order treatment in the two cells
// adjacent to each radial edge.
ScalarField2D ddr4(const ScalarField2D& f);
ScalarField2D ddz4(const ScalarField2D& f);

}  // namespace eulerlab
