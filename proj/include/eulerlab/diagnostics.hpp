#pragma once

#include <optional>
#include <span>
#include <vector>

#include "eulerlab/fields.hpp"
#include "eulerlab/profiles.hpp"

namespace eulerlab {

struct PhysicalFields {
    ScalarField2D u_r, u_theta, u_z;
    ScalarField2D omega_r, omega_theta, omega_z;
};

// u_theta = r u1, (u_r, u_z) from the stream function, omega_theta = r omega1,
// omega_r = -d(u_theta)/dz, omega_z = (1/r) d(r u_theta)/dr, all with the
// shared stencils.
PhysicalFields physical_fields(const State& s);

// Closed-form axial vorticity of the stationary-swirl family,
//   omega_z = kappa (2 - (alpha+2) r) / (1-r)^beta,
// with alpha = 1/2 - 1/gamma and beta = 1/2 + 1/gamma; 0 < r < 1.
double family_b_vorticity(double r, double kappa, double gamma);

struct BkmEntry {
    double t = 0.0;
    double sup = 0.0;
};

// Sampled sup-norm history of the vorticity approaching the horizon T.
class BkmSeries {
  public:
    BkmSeries(std::vector<BkmEntry> entries, double horizon);
    const std::vector<BkmEntry>& entries() const { return entries_; }
    double horizon() const { return horizon_; }

  private:
    std::vector<BkmEntry> entries_;
    double horizon_;
};

struct PowerLawFit {
    double exponent = 0.0;   // y ~ A (T-t)^(-exponent); positive means growth toward T
    double prefactor = 0.0;
    double r_squared = 1.0;
    double max_log_residual = 0.0;
    int excluded_entries = 0;  // nonpositive values dropped from the log fit
};

// Log-log least squares over all positive entries; needs >= 8 of them.
PowerLawFit fit_power_law(const BkmSeries& series);

struct BkmResult {
    bool divergent = false;
    bool marginal = false;        // tail exponent within 0.02 of the threshold
    std::optional<double> value;  // data integral plus extrapolated tail when convergent
    PowerLawFit tail;
};

// Trapezoid over the samples plus a fitted power-law tail on the last third;
// the integral of (T-t)^(-p) near T diverges iff p >= 1. `window` bounds how
// close the final sample must be to the horizon.
BkmResult bkm_integral(const BkmSeries& series, double window = 0.1);

struct VorticityMax {
    double r = 0.0;
    double z = 0.0;
    double value = 0.0;
    int i = 0;
    int j = 0;
};

// Grid argmax of |omega|; ties resolve to the largest r, then smallest |z|.
VorticityMax max_vorticity_location(const State& s);

struct VorticitySups {
    double full = 0.0;            // sup over the whole strip
    double outside_window = 0.0;  // sup over the complement of the window's spatial section
};

// Both sup-norm variants, with z reduced to its periodic representative
// centered at 0 when testing window membership.
VorticitySups vorticity_sups(const State& s, const SelfSimilarParams& p);

enum class TrendVerdict { satisfied, violated, inconclusive };

const char* to_string(TrendVerdict v);

struct DecayArc {
    double radius = 0.0;
    double max_swirl = 0.0;
    double max_stream_gradient_ratio = 0.0;  // max ||grad Psi|| / radius over the arc
    int skipped = 0;
};

struct DecayReport {
    std::vector<DecayArc> arcs;
    bool swirl_condition_in_range = true;  // the |U| = o(1) condition is stated for gamma < 2
    TrendVerdict swirl_decay = TrendVerdict::inconclusive;
    TrendVerdict stream_gradient_decay = TrendVerdict::inconclusive;
    double swirl_axis_slope = 0.0;   // log|U| vs log|R| slope across the largest arc
    double stream_axis_slope = 0.0;  // same for ||grad Psi||
};

// Probes 64 mid-angle points per half-circle of each radius in the left
// half-plane and reports decay trends of max|U| and max ||grad Psi|| / rho.
// A negative log-log slope toward R = 0 on the largest arc marks a profile
// unbounded near the Z-axis, which violates the uniform decay conditions.
DecayReport decay_condition_check(const ProfileSet& ps, double gamma,
                                  std::span<const double> radii);

}  // namespace eulerlab
