#include "eulerlab/elliptic.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "eulerlab/parallel.hpp"
#include "eulerlab/stencils.hpp"

namespace eulerlab {

namespace {

// FFTW plan creation is not thread-safe; execution on distinct arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    double* real = nullptr;
    fftw_complex* cplx = nullptr;
    FftwBuffer(size_t nreal, size_t ncplx) {
        real = fftw_alloc_real(nreal);
        cplx = fftw_alloc_complex(ncplx);
        if (!real || !cplx) throw std::bad_alloc();
    }
    ~FftwBuffer() {
        fftw_free(real);
        fftw_free(cplx);
    }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

}  // namespace

struct StreamSolver::Impl {
    GridSpec grid;
    EllipticOptions opts;
    int nc = 0;  // nz/2 + 1 retained modes of the real transform

    std::vector<double> lambda;     // symbol of the periodic second difference, per mode
    std::vector<double> sub;        // mode-independent tridiagonal bands
    std::vector<double> super;
    std::vector<double> diag_base;  // includes the axis / wall ghost folds

    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    std::unique_ptr<FftwBuffer> tmpl;  // template arrays the plans were built on

    explicit Impl(const GridSpec& g, EllipticOptions o) : grid(g), opts(o) {
        if (!(opts.tolerance > 0.0))
            throw std::invalid_argument("EllipticOptions: tolerance must be positive");
        const int nr = grid.nr, nz = grid.nz;
        nc = nz / 2 + 1;
        const double h = grid.dr();
        const double dz = grid.dz();
        const double ih2 = 1.0 / (h * h);

        lambda.resize(nc);
        for (int k = 0; k < nc; ++k) {
            const double s = std::sin(M_PI * k / nz);
            lambda[k] = 4.0 * s * s / (dz * dz);
        }

        sub.resize(nr);
        super.resize(nr);
        diag_base.resize(nr);
        for (int i = 0; i < nr; ++i) {
            const double c = 3.0 / (2.0 * grid.r(i) * h);
            sub[i] = -ih2 + c;
            super[i] = -ih2 - c;
            diag_base[i] = 2.0 * ih2;
        }
        // Even ghost at the axis: psi(-1) = psi(0).
        diag_base[0] += sub[0];
        // Dirichlet wall face: ghost psi(nr) = -psi(nr-1).
        diag_base[nr - 1] -= super[nr - 1];

        tmpl = std::make_unique<FftwBuffer>(static_cast<size_t>(nr) * nz,
                                            static_cast<size_t>(nr) * nc);
        const int n[1] = {nz};
        std::lock_guard<std::mutex> lock(planner_mutex());
        fwd = fftw_plan_many_dft_r2c(1, n, nr, tmpl->real, nullptr, 1, nz, tmpl->cplx, nullptr, 1,
                                     nc, FFTW_ESTIMATE);
        bwd = fftw_plan_many_dft_c2r(1, n, nr, tmpl->cplx, nullptr, 1, nc, tmpl->real, nullptr, 1,
                                     nz, FFTW_ESTIMATE);
        if (!fwd || !bwd) throw std::runtime_error("StreamSolver: FFT planning failed");
    }

    ~Impl() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
    }

    // Solves (diag_base + lambda_k) with bands (sub, super) for the real and
    // imaginary parts of mode k in place.
    void solve_mode(int k, double* re, double* im) const {
        const int nr = grid.nr;
        std::vector<double> cp(nr - 1);
        double w = diag_base[0] + lambda[k];
        if (std::abs(w) < 1e-300) throw std::runtime_error("singular per-mode system");
        re[0] /= w;
        im[0] /= w;
        for (int i = 1; i < nr; ++i) {
            cp[i - 1] = super[i - 1] / w;
            w = diag_base[i] + lambda[k] - sub[i] * cp[i - 1];
            if (std::abs(w) < 1e-300) throw std::runtime_error("singular per-mode system");
            re[i] = (re[i] - sub[i] * re[i - 1]) / w;
            im[i] = (im[i] - sub[i] * im[i - 1]) / w;
        }
        for (int i = nr - 2; i >= 0; --i) {
            re[i] -= cp[i] * re[i + 1];
            im[i] -= cp[i] * im[i + 1];
        }
    }
};

StreamSolver::StreamSolver(const GridSpec& grid, EllipticOptions opts)
    : impl_(std::make_unique<Impl>(grid, opts)) {}

StreamSolver::~StreamSolver() = default;
StreamSolver::StreamSolver(StreamSolver&&) noexcept = default;
StreamSolver& StreamSolver::operator=(StreamSolver&&) noexcept = default;

const GridSpec& StreamSolver::grid() const { return impl_->grid; }
const EllipticOptions& StreamSolver::options() const { return impl_->opts; }

ScalarField2D StreamSolver::apply(const ScalarField2D& psi) const {
    const GridSpec& g = impl_->grid;
    if (!(psi.grid() == g)) throw std::invalid_argument("StreamSolver::apply: grid mismatch");
    const int nr = g.nr, nz = g.nz;
    const double ih2 = 1.0 / (g.dr() * g.dr());
    const double izz = 1.0 / (g.dz() * g.dz());
    ScalarField2D out(g);
    for (int i = 0; i < nr; ++i) {
        const double c = 3.0 / g.r(i);
        for (int j = 0; j < nz; ++j) {
            const int jp = (j + 1 == nz) ? 0 : j + 1;
            const int jm = (j == 0) ? nz - 1 : j - 1;
            const double below = (i == 0) ? psi(0, j) : psi(i - 1, j);          // even axis ghost
            const double above = (i == nr - 1) ? -psi(nr - 1, j) : psi(i + 1, j);  // wall ghost
            const double d_rr = (below - 2.0 * psi(i, j) + above) * ih2;
            const double d_r = (above - below) / (2.0 * g.dr());
            const double d_zz = (psi(i, jm) - 2.0 * psi(i, j) + psi(i, jp)) * izz;
            out(i, j) = -(d_rr + c * d_r + d_zz);
        }
    }
    return out;
}

ScalarField2D StreamSolver::solve(const ScalarField2D& omega) const {
    const GridSpec& g = impl_->grid;
    if (!(omega.grid() == g)) throw std::invalid_argument("StreamSolver::solve: grid mismatch");
    omega.require_finite("StreamSolver::solve input");

    const int nr = g.nr, nz = g.nz, nc = impl_->nc;
    FftwBuffer buf(static_cast<size_t>(nr) * nz, static_cast<size_t>(nr) * nc);

    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nz; ++j) buf.real[static_cast<size_t>(i) * nz + j] = omega(i, j);
    fftw_execute_dft_r2c(impl_->fwd, buf.real, buf.cplx);

    // Independent boundary-value problems per wavenumber.
    std::vector<double> re(static_cast<size_t>(nc) * nr), im(static_cast<size_t>(nc) * nr);
    for (int k = 0; k < nc; ++k)
        for (int i = 0; i < nr; ++i) {
            re[static_cast<size_t>(k) * nr + i] = buf.cplx[static_cast<size_t>(i) * nc + k][0];
            im[static_cast<size_t>(k) * nr + i] = buf.cplx[static_cast<size_t>(i) * nc + k][1];
        }
    parallel_for(nc, [&](int k) {
        impl_->solve_mode(k, re.data() + static_cast<size_t>(k) * nr,
                          im.data() + static_cast<size_t>(k) * nr);
    });
    for (int k = 0; k < nc; ++k)
        for (int i = 0; i < nr; ++i) {
            buf.cplx[static_cast<size_t>(i) * nc + k][0] = re[static_cast<size_t>(k) * nr + i];
            buf.cplx[static_cast<size_t>(i) * nc + k][1] = im[static_cast<size_t>(k) * nr + i];
        }

    fftw_execute_dft_c2r(impl_->bwd, buf.cplx, buf.real);

    ScalarField2D psi(g);
    const double scale = 1.0 / nz;
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nz; ++j) psi(i, j) = buf.real[static_cast<size_t>(i) * nz + j] * scale;

    // Direct solves must reproduce the data to the requested residual.
    const double wnorm = omega.max_abs();
    if (wnorm > 0.0) {
        ScalarField2D res = apply(psi);
        res -= omega;
        if (res.max_abs() > impl_->opts.tolerance * wnorm)
            throw std::runtime_error("StreamSolver: residual exceeds tolerance");
    }
    return psi;
}

ScalarField2D solve_stream(const ScalarField2D& omega, EllipticOptions opts) {
    return StreamSolver(omega.grid(), opts).solve(omega);
}

std::pair<ScalarField2D, ScalarField2D> velocity_from_stream(const ScalarField2D& psi) {
    const GridSpec& g = psi.grid();
    ScalarField2D dpsi_dz = ddz(psi);
    ScalarField2D dpsi_dr = ddr(psi);
    ScalarField2D ur(g), uz(g);
    for (int i = 0; i < g.nr; ++i) {
        const double r = g.r(i);
        for (int j = 0; j < g.nz; ++j) {
            ur(i, j) = -r * dpsi_dz(i, j);
            uz(i, j) = 2.0 * psi(i, j) + r * dpsi_dr(i, j);
        }
    }
    return {std::move(ur), std::move(uz)};
}

ScalarField2D divergence(const ScalarField2D& ur, const ScalarField2D& uz) {
    const GridSpec& g = ur.grid();
    if (!(uz.grid() == g)) throw std::invalid_argument("divergence: grid mismatch");
    ScalarField2D r_ur(g);
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.nz; ++j) r_ur(i, j) = g.r(i) * ur(i, j);
    ScalarField2D flux = ddr(r_ur);
    ScalarField2D duz_dz = ddz(uz);
    ScalarField2D div(g);
    for (int i = 0; i < g.nr; ++i) {
        const double inv_r = 1.0 / g.r(i);
        for (int j = 0; j < g.nz; ++j) div(i, j) = inv_r * flux(i, j) + duz_dz(i, j);
    }
    return div;
}

}  // namespace eulerlab
