#include "eulerlab/stencils.hpp"

namespace eulerlab {

ScalarField2D ddr(const ScalarField2D& f) {
    const GridSpec& g = f.grid();
    ScalarField2D out(g);
    const double inv2h = 1.0 / (2.0 * g.dr());
    const int nr = g.nr, nz = g.nz;
    for (int j = 0; j < nz; ++j) {
        out(0, j) = (-3.0 * f(0, j) + 4.0 * f(1, j) - f(2, j)) * inv2h;
        out(nr - 1, j) = (3.0 * f(nr - 1, j) - 4.0 * f(nr - 2, j) + f(nr - 3, j)) * inv2h;
    }
    for (int i = 1; i < nr - 1; ++i)
        for (int j = 0; j < nz; ++j) out(i, j) = (f(i + 1, j) - f(i - 1, j)) * inv2h;
    return out;
}

ScalarField2D ddz(const ScalarField2D& f) {
    const GridSpec& g = f.grid();
    ScalarField2D out(g);
    const double inv2h = 1.0 / (2.0 * g.dz());
    const int nr = g.nr, nz = g.nz;
    for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < nz; ++j) {
            const int jp = (j + 1 == nz) ? 0 : j + 1;
            const int jm = (j == 0) ? nz - 1 : j - 1;
            out(i, j) = (f(i, jp) - f(i, jm)) * inv2h;
        }
    }
    return out;
}

ScalarField2D ddr4(const ScalarField2D& f) {
    const GridSpec& g = f.grid();
    ScalarField2D out = ddr(f);  // edge cells keep the second-order treatment
    const double inv12h = 1.0 / (12.0 * g.dr());
    const int nr = g.nr, nz = g.nz;
    for (int i = 2; i < nr - 2; ++i)
        for (int j = 0; j < nz; ++j)
            out(i, j) = (f(i - 2, j) - 8.0 * f(i - 1, j) + 8.0 * f(i + 1, j) - f(i + 2, j)) *
                        inv12h;
    return out;
}

ScalarField2D ddz4(const ScalarField2D& f) {
    const GridSpec& g = f.grid();
    ScalarField2D out(g);
    const double inv12h = 1.0 / (12.0 * g.dz());
    const int nr = g.nr, nz = g.nz;
    for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < nz; ++j) {
            const int jp = (j + 1) % nz, jpp = (j + 2) % nz;
            const int jm = (j + nz - 1) % nz, jmm = (j + nz - 2) % nz;
            out(i, j) = (f(i, jmm) - 8.0 * f(i, jm) + 8.0 * f(i, jp) - f(i, jpp)) * inv12h;
        }
    }
    return out;
}

}  // namespace eulerlab
