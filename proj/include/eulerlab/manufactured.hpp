#pragma once

#include <cmath>

#include "eulerlab/fields.hpp"

namespace eulerlab::mms {

// Manufactured stream function psi1 = (1 - r^2) sin(2 pi z / L); it obeys the
// wall condition psi1(1, z) = 0 and is even across the axis.
inline double stream_exact(double r, double z, double length) {
    return (1.0 - r * r) * std::sin(2.0 * M_PI * z / length);
}

// Applying -[d2/dr2 + (3/r) d/dr + d2/dz2] to the stream above:
// psi_rr = -2 s, (3/r) psi_r = -6 s, psi_zz = -(2 pi/L)^2 (1 - r^2) s.
inline double vorticity_exact(double r, double z, double length) {
    const double k = 2.0 * M_PI / length;
    return (8.0 + k * k * (1.0 - r * r)) * std::sin(k * z);
}

inline double ur_exact(double r, double z, double length) {
    const double k = 2.0 * M_PI / length;
    return -r * k * (1.0 - r * r) * std::cos(k * z);
}

inline double uz_exact(double r, double z, double length) {
    return 2.0 * (1.0 - 2.0 * r * r) * std::sin(2.0 * M_PI * z / length);
}

inline ScalarField2D stream_field(const GridSpec& g) {
    return ScalarField2D::sample(g, [&](double r, double z) { return stream_exact(r, z, g.length); });
}

inline ScalarField2D vorticity_field(const GridSpec& g) {
    return ScalarField2D::sample(g,
                                 [&](double r, double z) { return vorticity_exact(r, z, g.length); });
}

}  // namespace eulerlab::mms
