#include "eulerlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eulerlab/elliptic.hpp"
#include "eulerlab/linalg.hpp"
#include "eulerlab/stencils.hpp"

namespace eulerlab {

PhysicalFields physical_fields(const State& s) {
    const GridSpec& g = s.u1.grid();
    auto [ur, uz] = velocity_from_stream(s.psi1);

    ScalarField2D u_theta(g), omega_theta(g), r_u_theta(g);
    for (int i = 0; i < g.nr; ++i) {
        const double r = g.r(i);
        for (int j = 0; j < g.nz; ++j) {
            u_theta(i, j) = r * s.u1(i, j);
            omega_theta(i, j) = r * s.omega1(i, j);
            r_u_theta(i, j) = r * u_theta(i, j);
        }
    }

    ScalarField2D omega_r = ddz(u_theta);
    omega_r *= -1.0;
    ScalarField2D flux = ddr(r_u_theta);
    ScalarField2D omega_z(g);
    for (int i = 0; i < g.nr; ++i) {
        const double inv_r = 1.0 / g.r(i);
        for (int j = 0; j < g.nz; ++j) omega_z(i, j) = inv_r * flux(i, j);
    }

    return PhysicalFields{std::move(ur),      std::move(u_theta), std::move(uz),
                          std::move(omega_r), std::move(omega_theta), std::move(omega_z)};
}

double family_b_vorticity(double r, double kappa, double gamma) {
    if (!(gamma > 0.0)) throw std::domain_error("family_b_vorticity: gamma must be positive");
    if (!(r > 0.0) || r >= 1.0)
        throw std::domain_error("family_b_vorticity: r must lie in (0, 1), the wall is singular");
    const double alpha = 0.5 - 1.0 / gamma;
    const double beta = 0.5 + 1.0 / gamma;
    return kappa * (2.0 - (alpha + 2.0) * r) / std::pow(1.0 - r, beta);
}

BkmSeries::BkmSeries(std::vector<BkmEntry> entries, double horizon)
    : entries_(std::move(entries)), horizon_(horizon) {
    if (entries_.empty()) throw std::invalid_argument("BkmSeries: empty series");
    if (!(horizon_ > 0.0)) throw std::invalid_argument("BkmSeries: horizon must be positive");
    for (size_t k = 0; k < entries_.size(); ++k) {
        if (!std::isfinite(entries_[k].t) || !std::isfinite(entries_[k].sup))
            throw std::invalid_argument("BkmSeries: non-finite entry");
        if (entries_[k].sup < 0.0) throw std::invalid_argument("BkmSeries: negative sup value");
        if (!(entries_[k].t < horizon_))
            throw std::invalid_argument("BkmSeries: entries must precede the horizon");
        if (k > 0 && !(entries_[k].t > entries_[k - 1].t))
            throw std::invalid_argument("BkmSeries: times must be strictly increasing");
    }
}

namespace {

PowerLawFit fit_power_law_entries(std::span<const BkmEntry> entries, double horizon,
                                  int min_usable) {
    std::vector<double> x, y;
    int excluded = 0;
    for (const BkmEntry& e : entries) {
        if (e.sup > 0.0) {
            x.push_back(std::log(horizon - e.t));
            y.push_back(std::log(e.sup));
        } else {
            ++excluded;
        }
    }
    if (static_cast<int>(x.size()) < min_usable)
        throw std::invalid_argument("power-law fit: fewer usable entries than required");
    const LineFit lf = fit_line(x, y);
    PowerLawFit fit;
    fit.exponent = -lf.slope;
    fit.prefactor = std::exp(lf.intercept);
    fit.r_squared = lf.r_squared;
    fit.max_log_residual = lf.max_abs_residual;
    fit.excluded_entries = excluded;
    return fit;
}

}  // namespace

PowerLawFit fit_power_law(const BkmSeries& series) {
    return fit_power_law_entries(series.entries(), series.horizon(), 8);
}

BkmResult bkm_integral(const BkmSeries& series, double window) {
    const auto& e = series.entries();
    if (e.size() < 8) throw std::invalid_argument("bkm_integral: need at least 8 entries");
    if (!(window > 0.0)) throw std::invalid_argument("bkm_integral: window must be positive");
    if (!(e.back().t > series.horizon() - window))
        throw std::invalid_argument("bkm_integral: final entries must approach the horizon");

    const size_t tail_len = std::max<size_t>(3, e.size() / 3);
    const std::span<const BkmEntry> tail(e.data() + (e.size() - tail_len), tail_len);

    BkmResult out;
    out.tail = fit_power_law_entries(tail, series.horizon(), 3);
    const double p = out.tail.exponent;
    // p >= 1 up to fit roundoff; an exactly-critical series must not fall on
    // the convergent side of the threshold.
    out.divergent = p >= 1.0 - 1e-9;
    out.marginal = std::abs(p - 1.0) <= 0.02;
    if (!out.divergent) {
        double data = 0.0;
        for (size_t k = 0; k + 1 < e.size(); ++k)
            data += 0.5 * (e[k].sup + e[k + 1].sup) * (e[k + 1].t - e[k].t);
        const double rem = series.horizon() - e.back().t;
        out.value = data + out.tail.prefactor * std::pow(rem, 1.0 - p) / (1.0 - p);
    }
    return out;
}

VorticityMax max_vorticity_location(const State& s) {
    const PhysicalFields f = physical_fields(s);
    const GridSpec& g = s.u1.grid();
    VorticityMax best;
    double best_sq = -1.0;
    for (int i = 0; i < g.nr; ++i) {
        for (int j = 0; j < g.nz; ++j) {
            const double sq = f.omega_r(i, j) * f.omega_r(i, j) +
                              f.omega_theta(i, j) * f.omega_theta(i, j) +
                              f.omega_z(i, j) * f.omega_z(i, j);
            const double r = g.r(i), az = std::abs(g.z(j));
            const bool better =
                sq > best_sq ||
                (sq == best_sq &&
                 (r > best.r || (r == best.r && az < std::abs(best.z))));
            if (better) {
                best_sq = sq;
                best = VorticityMax{r, g.z(j), std::sqrt(sq), i, j};
            }
        }
    }
    return best;
}

VorticitySups vorticity_sups(const State& s, const SelfSimilarParams& p) {
    const PhysicalFields f = physical_fields(s);
    const GridSpec& g = s.u1.grid();
    VorticitySups out;
    for (int i = 0; i < g.nr; ++i) {
        const bool r_in = g.r(i) > 1.0 - p.delta;
        for (int j = 0; j < g.nz; ++j) {
            const double mag =
                std::sqrt(f.omega_r(i, j) * f.omega_r(i, j) +
                          f.omega_theta(i, j) * f.omega_theta(i, j) +
                          f.omega_z(i, j) * f.omega_z(i, j));
            out.full = std::max(out.full, mag);
            const double zc = g.z(j) <= 0.5 * g.length ? g.z(j) : g.z(j) - g.length;
            if (!(r_in && std::abs(zc) < p.delta))
                out.outside_window = std::max(out.outside_window, mag);
        }
    }
    return out;
}

const char* to_string(TrendVerdict v) {
    switch (v) {
        case TrendVerdict::satisfied: return "satisfied";
        case TrendVerdict::violated: return "violated";
        default: return "inconclusive";
    }
}

namespace {

constexpr double kNegligible = 1e-12;

TrendVerdict trend_of(const std::vector<double>& v) {
    bool all_small = true;
    for (double x : v) all_small = all_small && x <= kNegligible;
    if (all_small) return TrendVerdict::satisfied;

    bool nonincreasing = true;
    for (size_t k = 0; k + 1 < v.size(); ++k)
        if (v[k + 1] > 1.05 * v[k]) nonincreasing = false;
    if (nonincreasing && v.back() <= 0.9 * v.front()) return TrendVerdict::satisfied;
    if (v.back() >= 1.1 * v.front()) return TrendVerdict::violated;
    return TrendVerdict::inconclusive;
}

// Log-log slope of arc values against |R|; a clearly negative slope means the
// quantity grows without bound toward the R = 0 edge of the half-plane.
double axis_slope(const std::vector<double>& abs_r, const std::vector<double>& vals) {
    std::vector<double> x, y;
    for (size_t k = 0; k < vals.size(); ++k)
        if (vals[k] > kNegligible && abs_r[k] > 0.0) {
            x.push_back(std::log(abs_r[k]));
            y.push_back(std::log(vals[k]));
        }
    if (x.size() < 3) return 0.0;
    return fit_line(x, y).slope;
}

}  // namespace

DecayReport decay_condition_check(const ProfileSet& ps, double gamma,
                                  std::span<const double> radii) {
    if (!(gamma > 0.0)) throw std::domain_error("decay_condition_check: gamma must be positive");
    if (radii.size() < 3)
        throw std::invalid_argument("decay_condition_check: need at least 3 radii");
    for (size_t k = 0; k < radii.size(); ++k) {
        if (!(radii[k] > 0.0))
            throw std::invalid_argument("decay_condition_check: radii must be positive");
        if (k > 0 && !(radii[k] > radii[k - 1]))
            throw std::invalid_argument("decay_condition_check: radii must be increasing");
    }

    constexpr int kArcPoints = 64;
    DecayReport rep;
    std::vector<double> swirl_trend, grad_trend;
    std::vector<double> last_abs_r, last_swirl, last_grad;

    for (double rho : radii) {
        DecayArc arc;
        arc.radius = rho;
        std::vector<double> abs_r, swirls, grads;
        for (int m = 0; m < kArcPoints; ++m) {
            const double theta = 0.5 * M_PI + (m + 0.5) * M_PI / kArcPoints;
            const double R = rho * std::cos(theta);
            const double Z = rho * std::sin(theta);
            if (ps.singular_at(R, Z)) {
                ++arc.skipped;
                continue;
            }
            const ProfileValues v = ps.eval(R, Z);
            const double grad = std::hypot(v.stream_R, v.stream_Z);
            arc.max_swirl = std::max(arc.max_swirl, std::abs(v.swirl));
            arc.max_stream_gradient_ratio = std::max(arc.max_stream_gradient_ratio, grad / rho);
            abs_r.push_back(-R);
            swirls.push_back(std::abs(v.swirl));
            grads.push_back(grad);
        }
        swirl_trend.push_back(arc.max_swirl);
        grad_trend.push_back(arc.max_stream_gradient_ratio);
        if (rho == radii.back()) {
            last_abs_r = abs_r;
            last_swirl = swirls;
            last_grad = grads;
        }
        rep.arcs.push_back(arc);
    }

    rep.swirl_axis_slope = axis_slope(last_abs_r, last_swirl);
    rep.stream_axis_slope = axis_slope(last_abs_r, last_grad);

    rep.swirl_condition_in_range = gamma < 2.0;
    if (!rep.swirl_condition_in_range) {
        rep.swirl_decay = TrendVerdict::inconclusive;
    } else if (rep.swirl_axis_slope < -0.05) {
        rep.swirl_decay = TrendVerdict::violated;
    } else {
        rep.swirl_decay = trend_of(swirl_trend);
    }

    rep.stream_gradient_decay = rep.stream_axis_slope < -0.05 ? TrendVerdict::violated
                                                              : trend_of(grad_trend);
    return rep;
}

}  // namespace eulerlab
