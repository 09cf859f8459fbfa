#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "eulerlab/fields.hpp"

namespace eulerlab {

// One evaluation of the blow-up profile trio (swirl U, vorticity Omega,
// stream Psi) with first partial derivatives and the second partials of the
// stream profile.
struct ProfileValues {
    double swirl = 0.0, swirl_R = 0.0, swirl_Z = 0.0;
    double vort = 0.0, vort_R = 0.0, vort_Z = 0.0;
    double stream = 0.0, stream_R = 0.0, stream_Z = 0.0;
    double stream_RR = 0.0, stream_ZZ = 0.0;
};

// Profile trio on the closed left half-plane R <= 0, analytic or sampled on
// a lattice. Evaluation at a declared singular locus throws std::domain_error.
class ProfileSet {
  public:
    virtual ~ProfileSet() = default;
    virtual ProfileValues eval(double R, double Z) const = 0;
    virtual bool singular_at(double R, double Z) const { return false; }
};

// Trivial family: U = 0, Omega = 0, Psi = b Z + c.
class FamilyAProfiles final : public ProfileSet {
  public:
    FamilyAProfiles(double b, double c) : b_(b), c_(c) {}
    ProfileValues eval(double R, double Z) const override;
    double b() const { return b_; }
    double c() const { return c_; }

  private:
    double b_, c_;
};

// Stationary-swirl family: U = kappa (-R)^(1/2 - 1/gamma), Omega = 0,
// Psi = c. Singular on {R = 0} when gamma < 2.
class FamilyBProfiles final : public ProfileSet {
  public:
    FamilyBProfiles(double kappa, double c, double gamma);
    ProfileValues eval(double R, double Z) const override;
    bool singular_at(double R, double Z) const override;
    double kappa() const { return kappa_; }
    double c() const { return c_; }
    double gamma() const { return gamma_; }
    double exponent() const { return exponent_; }

  private:
    double kappa_, c_, gamma_, exponent_;
};

std::shared_ptr<const ProfileSet> family_a(double b, double c);
std::shared_ptr<const ProfileSet> family_b(double kappa, double c, double gamma);

enum class ProfileComponent { swirl, vorticity, stream };

// Monomial bump coeff * R^pow_r * Z^pow_z added to one profile component.
struct ProfileTerm {
    ProfileComponent component = ProfileComponent::stream;
    double coeff = 0.0;
    int pow_r = 0;
    int pow_z = 0;
};

// Base profiles plus polynomial perturbations; used for sensitivity and
// adversarial classification experiments.
class PerturbedProfileSet final : public ProfileSet {
  public:
    PerturbedProfileSet(std::shared_ptr<const ProfileSet> base, std::vector<ProfileTerm> terms)
        : base_(std::move(base)), terms_(std::move(terms)) {}
    ProfileValues eval(double R, double Z) const override;
    bool singular_at(double R, double Z) const override { return base_->singular_at(R, Z); }

  private:
    std::shared_ptr<const ProfileSet> base_;
    std::vector<ProfileTerm> terms_;
};

// Profiles sampled on a rectangular (R, Z) lattice; derivatives by
// second-order differences on the lattice (one-sided at edges), values off
// the nodes by bilinear interpolation. Queries outside the lattice hull
// throw std::domain_error.
class GridProfileSet final : public ProfileSet {
  public:
    GridProfileSet(std::vector<double> r_nodes, std::vector<double> z_nodes,
                   std::vector<double> swirl, std::vector<double> vort,
                   std::vector<double> stream);

    ProfileValues eval(double R, double Z) const override;

    const std::vector<double>& r_nodes() const { return r_; }
    const std::vector<double>& z_nodes() const { return z_; }
    std::span<const double> swirl_values() const { return swirl_; }
    std::span<const double> vorticity_values() const { return vort_; }
    std::span<const double> stream_values() const { return stream_; }

  private:
    std::vector<double> r_, z_;
    // row-major, R index outer
    std::vector<double> swirl_, vort_, stream_;
    std::vector<double> swirl_dr_, swirl_dz_, vort_dr_, vort_dz_;
    std::vector<double> stream_dr_, stream_dz_, stream_drr_, stream_dzz_;

    double cell(const std::vector<double>& a, int i, int j) const {
        return a[static_cast<size_t>(i) * z_.size() + j];
    }
};

GridProfileSet sample_profiles(const ProfileSet& ps, std::vector<double> r_nodes,
                               std::vector<double> z_nodes);

// Canonical probe lattices: |R| log-spaced so both the near-wall and far
// field are covered while avoiding the R = 0 singular locus of the swirl
// family below gamma = 2.
std::vector<double> log_spaced_radial_nodes(int n, double r_min = -10.0, double r_max = -0.1);
std::vector<double> linear_axial_nodes(int n, double z_min = -10.0, double z_max = 10.0);

struct ProfileLattice {
    std::vector<double> R;
    std::vector<double> Z;
    std::vector<RZPoint> points() const;
};

ProfileLattice default_residual_lattice();       // 32 x 33
ProfileLattice classification_lattice(int n_r = 64, int n_z = 65);

struct EquationResidual {
    std::string equation;
    double sup = 0.0;
    double rms = 0.0;
    RZPoint argmax;
};

struct ResidualReport {
    std::vector<EquationResidual> equations;
    int samples_evaluated = 0;
    int samples_skipped = 0;

    double max_sup() const;
};

// First dominant group:
//   (1 - g/2) U + g Y.grad U + grad_perp Psi . grad U = 0
//   Omega + g Y.grad Omega + grad_perp Psi . grad Omega = d(U^2)/dZ
//   -lap Psi = Omega
ResidualReport residual_group1(const ProfileSet& ps, double gamma,
                               std::span<const RZPoint> samples);

// Second dominant group:
//   R (grad_perp Psi . grad U) + 2 Psi dU/dZ = 2 U dPsi/dZ
//   R (grad_perp Psi . grad Omega) + 2 Psi dOmega/dZ = 0
//   dPsi/dR = 0
ResidualReport residual_group2(const ProfileSet& ps, std::span<const RZPoint> samples);

// Full substituted equations before the t -> T limit, every (T-t)-weighted
// term retained, including the exact wall factor 3/(1 + R (T-t)^gamma).
// Samples that map outside the spatial window section are skipped.
ResidualReport residual_timedependent(const ProfileSet& ps, const SelfSimilarParams& p, double t,
                                      std::span<const RZPoint> samples);

// Time-dependent fields reconstructed from profiles:
//   u1 = (T-t)^(-1+g/2) U,  omega1 = (T-t)^(-1) Omega,  psi1 = (T-t)^(-1+2g) Psi
// at (R, Z) = to_selfsimilar(r, z, t). Evaluation outside C(delta,T) throws.
class SelfSimilarField {
  public:
    SelfSimilarField(std::shared_ptr<const ProfileSet> ps, SelfSimilarParams params);

    double u1(double r, double z, double t) const;
    double omega1(double r, double z, double t) const;
    double psi1(double r, double z, double t) const;

    const SelfSimilarParams& params() const { return params_; }
    const ProfileSet& profiles() const { return *ps_; }

  private:
    std::shared_ptr<const ProfileSet> ps_;
    SelfSimilarParams params_;

    RZPoint mapped(double r, double z, double t) const;
};

// Samples the ansatz over a full grid at time t, taking the periodic z
// representative centered at 0 so the window straddling z = 0 stays
// consistent with the z = L identification. The formula is extended outside
// the window for synthesis purposes.
State sample_ansatz_state(const SelfSimilarField& field, const GridSpec& grid, double t);

struct ExtractionResult {
    GridProfileSet profiles;
    double collapse_metric = 0.0;
    int dropped_points = 0;
};

// Inverse of the ansatz: rescale snapshot fields onto the (R, Z) lattice at
// each snapshot time, average, and report the worst pairwise sup distance.
// Lattice points leaving the window at any snapshot time are dropped.
ExtractionResult extract_profiles(std::span<const State> snapshots, const SelfSimilarParams& p,
                                  const std::vector<double>& r_nodes,
                                  const std::vector<double>& z_nodes);

struct Classification {
    enum class Verdict { family_a, family_b, not_solution };
    Verdict verdict = Verdict::not_solution;
    double b = 0.0;
    double c = 0.0;
    double kappa = 0.0;
    double stream_fit_residual = 0.0;
    double swirl_fit_residual = 0.0;
    std::string failed_check;
    double failed_residual = 0.0;

    bool classified() const { return verdict != Verdict::not_solution; }
};

// Decision chain: radial independence of Psi, quadratic fit of Psi in Z with
// the Poisson and exchange checks, rejection of a nonzero quadratic
// coefficient, then the affine (family A) or power-law (family B) fit.
Classification classify(const ProfileSet& ps, double gamma, double tol,
                        std::span<const RZPoint> samples);

std::string to_string(Classification::Verdict v);

}  // namespace eulerlab
