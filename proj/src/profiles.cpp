#include "eulerlab/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "eulerlab/linalg.hpp"

namespace eulerlab {

namespace {

double ipow(double x, int n) {
    double out = 1.0;
    for (int k = 0; k < n; ++k) out *= x;
    return out;
}

}  // namespace

ProfileValues FamilyAProfiles::eval(double /*R*/, double Z) const {
    ProfileValues v;
    v.stream = b_ * Z + c_;
    v.stream_Z = b_;
    return v;
}

FamilyBProfiles::FamilyBProfiles(double kappa, double c, double gamma)
    : kappa_(kappa), c_(c), gamma_(gamma), exponent_(0.5 - 1.0 / gamma) {
    if (!(gamma > 0.0)) throw std::domain_error("FamilyBProfiles: gamma must be positive");
}

bool FamilyBProfiles::singular_at(double R, double Z) const {
    (void)Z;
    return R == 0.0 && exponent_ < 0.0;
}

ProfileValues FamilyBProfiles::eval(double R, double Z) const {
    if (R > 0.0)
        throw std::domain_error("FamilyBProfiles: profiles live on the left half-plane");
    if (singular_at(R, Z))
        throw std::domain_error("FamilyBProfiles: singular locus R = 0 for gamma < 2");
    ProfileValues v;
    const double x = -R;
    v.stream = c_;
    if (exponent_ == 0.0) {
        v.swirl = kappa_;
        v.swirl_R = 0.0;
    } else {
        v.swirl = kappa_ * std::pow(x, exponent_);
        v.swirl_R = -kappa_ * exponent_ * std::pow(x, exponent_ - 1.0);
    }
    return v;
}

std::shared_ptr<const ProfileSet> family_a(double b, double c) {
    return std::make_shared<FamilyAProfiles>(b, c);
}

std::shared_ptr<const ProfileSet> family_b(double kappa, double c, double gamma) {
    return std::make_shared<FamilyBProfiles>(kappa, c, gamma);
}

ProfileValues PerturbedProfileSet::eval(double R, double Z) const {
    ProfileValues v = base_->eval(R, Z);
    for (const ProfileTerm& t : terms_) {
        const double val = t.coeff * ipow(R, t.pow_r) * ipow(Z, t.pow_z);
        const double d_r =
            t.pow_r == 0 ? 0.0 : t.coeff * t.pow_r * ipow(R, t.pow_r - 1) * ipow(Z, t.pow_z);
        const double d_z =
            t.pow_z == 0 ? 0.0 : t.coeff * t.pow_z * ipow(R, t.pow_r) * ipow(Z, t.pow_z - 1);
        switch (t.component) {
            case ProfileComponent::swirl:
                v.swirl += val;
                v.swirl_R += d_r;
                v.swirl_Z += d_z;
                break;
            case ProfileComponent::vorticity:
                v.vort += val;
                v.vort_R += d_r;
                v.vort_Z += d_z;
                break;
            case ProfileComponent::stream: {
                v.stream += val;
                v.stream_R += d_r;
                v.stream_Z += d_z;
                if (t.pow_r >= 2)
                    v.stream_RR +=
                        t.coeff * t.pow_r * (t.pow_r - 1) * ipow(R, t.pow_r - 2) * ipow(Z, t.pow_z);
                if (t.pow_z >= 2)
                    v.stream_ZZ +=
                        t.coeff * t.pow_z * (t.pow_z - 1) * ipow(R, t.pow_r) * ipow(Z, t.pow_z - 2);
                break;
            }
        }
    }
    return v;
}

namespace {

void check_lattice_axis(const std::vector<double>& x, const char* name) {
    if (x.size() < 3) throw std::invalid_argument(std::string(name) + ": need >= 3 lattice nodes");
    for (size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i] < x[i + 1]))
            throw std::invalid_argument(std::string(name) + ": nodes must be strictly increasing");
}

// First derivative along an axis on a non-uniform lattice, three-point
// stencils, one-sided at the edges. get(k) indexes along the axis.
template <typename Get>
double d1_at(const std::vector<double>& x, int k, Get get) {
    const int n = static_cast<int>(x.size());
    if (k == 0) {
        const double h1 = x[1] - x[0], h2 = x[2] - x[1];
        return -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * get(0) + (h1 + h2) / (h1 * h2) * get(1) -
               h1 / (h2 * (h1 + h2)) * get(2);
    }
    if (k == n - 1) {
        const double h1 = x[n - 1] - x[n - 2], h2 = x[n - 2] - x[n - 3];
        return (2.0 * h1 + h2) / (h1 * (h1 + h2)) * get(n - 1) -
               (h1 + h2) / (h1 * h2) * get(n - 2) + h1 / (h2 * (h1 + h2)) * get(n - 3);
    }
    const double hm = x[k] - x[k - 1], hp = x[k + 1] - x[k];
    return -hp / (hm * (hm + hp)) * get(k - 1) + (hp - hm) / (hm * hp) * get(k) +
           hm / (hp * (hm + hp)) * get(k + 1);
}

// Three-point second derivative; the edge value reuses the quadratic through
// the first (last) three nodes.
template <typename Get>
double d2_at(const std::vector<double>& x, int k, Get get) {
    const int n = static_cast<int>(x.size());
    int c = k;
    if (k == 0) c = 1;
    if (k == n - 1) c = n - 2;
    const double hm = x[c] - x[c - 1], hp = x[c + 1] - x[c];
    return 2.0 * (get(c - 1) * hp - get(c) * (hm + hp) + get(c + 1) * hm) /
           (hm * hp * (hm + hp));
}

}  // namespace

GridProfileSet::GridProfileSet(std::vector<double> r_nodes, std::vector<double> z_nodes,
                               std::vector<double> swirl, std::vector<double> vort,
                               std::vector<double> stream)
    : r_(std::move(r_nodes)),
      z_(std::move(z_nodes)),
      swirl_(std::move(swirl)),
      vort_(std::move(vort)),
      stream_(std::move(stream)) {
    check_lattice_axis(r_, "GridProfileSet R");
    check_lattice_axis(z_, "GridProfileSet Z");
    if (r_.back() > 0.0)
        throw std::invalid_argument("GridProfileSet: lattice must lie in the left half-plane");
    const size_t count = r_.size() * z_.size();
    if (swirl_.size() != count || vort_.size() != count || stream_.size() != count)
        throw std::invalid_argument("GridProfileSet: value arrays do not match the lattice");
    for (const auto* a : {&swirl_, &vort_, &stream_})
        for (double x : *a)
            if (!std::isfinite(x))
                throw std::invalid_argument("GridProfileSet: non-finite sample value");

    const int m = static_cast<int>(r_.size());
    const int n = static_cast<int>(z_.size());
    auto d_r = [&](const std::vector<double>& f, int order) {
        std::vector<double> out(f.size());
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < m; ++i) {
                auto get = [&](int k) { return f[static_cast<size_t>(k) * n + j]; };
                out[static_cast<size_t>(i) * n + j] =
                    order == 1 ? d1_at(r_, i, get) : d2_at(r_, i, get);
            }
        return out;
    };
    auto d_z = [&](const std::vector<double>& f, int order) {
        std::vector<double> out(f.size());
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
                auto get = [&](int k) { return f[static_cast<size_t>(i) * n + k]; };
                out[static_cast<size_t>(i) * n + j] =
                    order == 1 ? d1_at(z_, j, get) : d2_at(z_, j, get);
            }
        return out;
    };
    swirl_dr_ = d_r(swirl_, 1);
    swirl_dz_ = d_z(swirl_, 1);
    vort_dr_ = d_r(vort_, 1);
    vort_dz_ = d_z(vort_, 1);
    stream_dr_ = d_r(stream_, 1);
    stream_dz_ = d_z(stream_, 1);
    stream_drr_ = d_r(stream_, 2);
    stream_dzz_ = d_z(stream_, 2);
}

ProfileValues GridProfileSet::eval(double R, double Z) const {
    const int m = static_cast<int>(r_.size());
    const int n = static_cast<int>(z_.size());

    const double slack_r = 1e-12 * (r_.back() - r_.front());
    const double slack_z = 1e-12 * (z_.back() - z_.front());
    if (R < r_.front() - slack_r || R > r_.back() + slack_r || Z < z_.front() - slack_z ||
        Z > z_.back() + slack_z)
        throw std::domain_error("GridProfileSet: query outside the sampled lattice");

    auto assemble = [&](auto value_at) {
        ProfileValues v;
        v.swirl = value_at(swirl_);
        v.swirl_R = value_at(swirl_dr_);
        v.swirl_Z = value_at(swirl_dz_);
        v.vort = value_at(vort_);
        v.vort_R = value_at(vort_dr_);
        v.vort_Z = value_at(vort_dz_);
        v.stream = value_at(stream_);
        v.stream_R = value_at(stream_dr_);
        v.stream_Z = value_at(stream_dz_);
        v.stream_RR = value_at(stream_drr_);
        v.stream_ZZ = value_at(stream_dzz_);
        return v;
    };

    const auto ri = std::lower_bound(r_.begin(), r_.end(), R);
    const auto zi = std::lower_bound(z_.begin(), z_.end(), Z);
    if (ri != r_.end() && *ri == R && zi != z_.end() && *zi == Z) {
        const int i = static_cast<int>(ri - r_.begin());
        const int j = static_cast<int>(zi - z_.begin());
        return assemble([&](const std::vector<double>& a) { return cell(a, i, j); });
    }

    int i0 = static_cast<int>(std::upper_bound(r_.begin(), r_.end(), R) - r_.begin()) - 1;
    int j0 = static_cast<int>(std::upper_bound(z_.begin(), z_.end(), Z) - z_.begin()) - 1;
    i0 = std::clamp(i0, 0, m - 2);
    j0 = std::clamp(j0, 0, n - 2);
    const double tr = (R - r_[i0]) / (r_[i0 + 1] - r_[i0]);
    const double tz = (Z - z_[j0]) / (z_[j0 + 1] - z_[j0]);
    return assemble([&](const std::vector<double>& a) {
        const double a00 = cell(a, i0, j0), a01 = cell(a, i0, j0 + 1);
        const double a10 = cell(a, i0 + 1, j0), a11 = cell(a, i0 + 1, j0 + 1);
        return (1.0 - tr) * ((1.0 - tz) * a00 + tz * a01) + tr * ((1.0 - tz) * a10 + tz * a11);
    });
}

GridProfileSet sample_profiles(const ProfileSet& ps, std::vector<double> r_nodes,
                               std::vector<double> z_nodes) {
    const size_t m = r_nodes.size(), n = z_nodes.size();
    std::vector<double> swirl(m * n), vort(m * n), stream(m * n);
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < n; ++j) {
            const ProfileValues v = ps.eval(r_nodes[i], z_nodes[j]);
            swirl[i * n + j] = v.swirl;
            vort[i * n + j] = v.vort;
            stream[i * n + j] = v.stream;
        }
    return GridProfileSet(std::move(r_nodes), std::move(z_nodes), std::move(swirl),
                          std::move(vort), std::move(stream));
}

std::vector<double> log_spaced_radial_nodes(int n, double r_min, double r_max) {
    if (n < 2 || !(r_min < r_max) || !(r_max < 0.0))
        throw std::invalid_argument("log_spaced_radial_nodes: need r_min < r_max < 0");
    std::vector<double> out(n);
    const double l0 = std::log(-r_min), l1 = std::log(-r_max);
    for (int k = 0; k < n; ++k) out[k] = -std::exp(l0 + (l1 - l0) * k / (n - 1));
    out.front() = r_min;
    out.back() = r_max;
    return out;
}

std::vector<double> linear_axial_nodes(int n, double z_min, double z_max) {
    if (n < 2 || !(z_min < z_max))
        throw std::invalid_argument("linear_axial_nodes: need z_min < z_max");
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k) out[k] = z_min + (z_max - z_min) * k / (n - 1);
    out.front() = z_min;
    out.back() = z_max;
    return out;
}

std::vector<RZPoint> ProfileLattice::points() const {
    std::vector<RZPoint> pts;
    pts.reserve(R.size() * Z.size());
    for (double r : R)
        for (double z : Z) pts.push_back({r, z});
    return pts;
}

ProfileLattice default_residual_lattice() {
    return {log_spaced_radial_nodes(32), linear_axial_nodes(33)};
}

ProfileLattice classification_lattice(int n_r, int n_z) {
    return {log_spaced_radial_nodes(n_r), linear_axial_nodes(n_z)};
}

double ResidualReport::max_sup() const {
    double m = 0.0;
    for (const EquationResidual& e : equations) m = std::max(m, e.sup);
    return m;
}

namespace {

class ResidualAccum {
  public:
    explicit ResidualAccum(std::string id) { eq_.equation = std::move(id); }
    void add(double res, RZPoint pt) {
        const double a = std::abs(res);
        if (a > eq_.sup) {
            eq_.sup = a;
            eq_.argmax = pt;
        }
        sumsq_ += res * res;
        ++n_;
    }
    EquationResidual finish() const {
        EquationResidual out = eq_;
        out.rms = n_ > 0 ? std::sqrt(sumsq_ / n_) : 0.0;
        return out;
    }

  private:
    EquationResidual eq_;
    double sumsq_ = 0.0;
    long n_ = 0;
};

}  // namespace

ResidualReport residual_group1(const ProfileSet& ps, double gamma,
                               std::span<const RZPoint> samples) {
    if (!(gamma > 0.0)) throw std::domain_error("residual_group1: gamma must be positive");
    ResidualAccum a1("swirl-limit"), a2("vorticity-limit"), a3("stream-limit");
    ResidualReport rep;
    for (const RZPoint& pt : samples) {
        if (ps.singular_at(pt.R, pt.Z)) {
            ++rep.samples_skipped;
            continue;
        }
        const ProfileValues v = ps.eval(pt.R, pt.Z);
        const double adv_u = -v.stream_Z * v.swirl_R + v.stream_R * v.swirl_Z;
        const double adv_w = -v.stream_Z * v.vort_R + v.stream_R * v.vort_Z;
        a1.add((1.0 - 0.5 * gamma) * v.swirl + gamma * (pt.R * v.swirl_R + pt.Z * v.swirl_Z) +
                   adv_u,
               pt);
        a2.add(v.vort + gamma * (pt.R * v.vort_R + pt.Z * v.vort_Z) + adv_w -
                   2.0 * v.swirl * v.swirl_Z,
               pt);
        a3.add(-(v.stream_RR + v.stream_ZZ) - v.vort, pt);
        ++rep.samples_evaluated;
    }
    rep.equations = {a1.finish(), a2.finish(), a3.finish()};
    return rep;
}

ResidualReport residual_group2(const ProfileSet& ps, std::span<const RZPoint> samples) {
    ResidualAccum a1("swirl-exchange"), a2("vorticity-exchange"), a3("stream-gradient");
    ResidualReport rep;
    for (const RZPoint& pt : samples) {
        if (ps.singular_at(pt.R, pt.Z)) {
            ++rep.samples_skipped;
            continue;
        }
        const ProfileValues v = ps.eval(pt.R, pt.Z);
        const double adv_u = -v.stream_Z * v.swirl_R + v.stream_R * v.swirl_Z;
        const double adv_w = -v.stream_Z * v.vort_R + v.stream_R * v.vort_Z;
        a1.add(pt.R * adv_u + 2.0 * v.stream * v.swirl_Z - 2.0 * v.swirl * v.stream_Z, pt);
        a2.add(pt.R * adv_w + 2.0 * v.stream * v.vort_Z, pt);
        a3.add(v.stream_R, pt);
        ++rep.samples_evaluated;
    }
    rep.equations = {a1.finish(), a2.finish(), a3.finish()};
    return rep;
}

ResidualReport residual_timedependent(const ProfileSet& ps, const SelfSimilarParams& p, double t,
                                      std::span<const RZPoint> samples) {
    if (!(t < p.T))
        throw std::domain_error("residual_timedependent: t must precede the blow-up time");
    if (t < p.T - p.delta)
        throw std::domain_error("residual_timedependent: t must lie inside the window");

    const double g = p.gamma;
    const double tau = p.T - t;
    const double tau_g = std::pow(tau, g);
    const double p_m2_g2 = std::pow(tau, -2.0 + 0.5 * g);
    const double p_m2_3g2 = std::pow(tau, -2.0 + 1.5 * g);
    const double p_m1_2g = std::pow(tau, -1.0 + 2.0 * g);
    const double p_m1_g = std::pow(tau, -1.0 + g);
    const double p_m1_mg2 = std::pow(tau, -1.0 - 0.5 * g);
    const double p_m1_mg = std::pow(tau, -1.0 - g);
    const double p_m2 = 1.0 / (tau * tau);
    const double p_m1 = 1.0 / tau;

    ResidualAccum a1("swirl-full"), a2("vorticity-full"), a3("stream-full");
    ResidualReport rep;
    for (const RZPoint& pt : samples) {
        if (ps.singular_at(pt.R, pt.Z)) {
            ++rep.samples_skipped;
            continue;
        }
        const double r = 1.0 + pt.R * tau_g;
        const double z = pt.Z * tau_g;
        if (!(r > 1.0 - p.delta && r < 1.0 && z > -p.delta && z < p.delta)) {
            ++rep.samples_skipped;
            continue;
        }
        const ProfileValues v = ps.eval(pt.R, pt.Z);
        const double wall = 1.0 + pt.R * tau_g;
        const double flux = 2.0 * p_m1_2g * v.stream + wall * p_m1_g * v.stream_R;

        a1.add((1.0 - 0.5 * g) * p_m2_g2 * v.swirl +
                   g * p_m2_g2 * (pt.R * v.swirl_R + pt.Z * v.swirl_Z) -
                   wall * p_m2_g2 * v.stream_Z * v.swirl_R + flux * p_m1_mg2 * v.swirl_Z -
                   2.0 * p_m2_3g2 * v.swirl * v.stream_Z,
               pt);
        a2.add(p_m2 * v.vort + g * p_m2 * (pt.R * v.vort_R + pt.Z * v.vort_Z) -
                   wall * p_m2 * v.stream_Z * v.vort_R + flux * p_m1_mg * v.vort_Z -
                   p_m2 * 2.0 * v.swirl * v.swirl_Z,
               pt);
        a3.add(-p_m1 * (v.stream_RR + v.stream_ZZ) - 3.0 * p_m1_g / wall * v.stream_R -
                   p_m1 * v.vort,
               pt);
        ++rep.samples_evaluated;
    }
    rep.equations = {a1.finish(), a2.finish(), a3.finish()};
    return rep;
}

SelfSimilarField::SelfSimilarField(std::shared_ptr<const ProfileSet> ps, SelfSimilarParams params)
    : ps_(std::move(ps)), params_(params) {
    if (!ps_) throw std::invalid_argument("SelfSimilarField: null profile set");
}

RZPoint SelfSimilarField::mapped(double r, double z, double t) const {
    if (!in_window(r, z, t, params_))
        throw std::domain_error("SelfSimilarField: point outside the self-similar window");
    return to_selfsimilar(r, z, t, params_);
}

double SelfSimilarField::u1(double r, double z, double t) const {
    const RZPoint p = mapped(r, z, t);
    return std::pow(params_.T - t, -1.0 + 0.5 * params_.gamma) * ps_->eval(p.R, p.Z).swirl;
}

double SelfSimilarField::omega1(double r, double z, double t) const {
    const RZPoint p = mapped(r, z, t);
    return ps_->eval(p.R, p.Z).vort / (params_.T - t);
}

double SelfSimilarField::psi1(double r, double z, double t) const {
    const RZPoint p = mapped(r, z, t);
    return std::pow(params_.T - t, -1.0 + 2.0 * params_.gamma) * ps_->eval(p.R, p.Z).stream;
}

State sample_ansatz_state(const SelfSimilarField& field, const GridSpec& grid, double t) {
    const SelfSimilarParams& p = field.params();
    if (!(t < p.T))
        throw std::domain_error("sample_ansatz_state: t must precede the blow-up time");
    const double tau = p.T - t;
    const double s = std::pow(tau, p.gamma);
    const double a_u = std::pow(tau, -1.0 + 0.5 * p.gamma);
    const double a_w = 1.0 / tau;
    const double a_s = std::pow(tau, -1.0 + 2.0 * p.gamma);

    ScalarField2D u1(grid), omega1(grid), psi1(grid);
    const ProfileSet& ps = field.profiles();
    for (int i = 0; i < grid.nr; ++i) {
        const double big_r = (grid.r(i) - 1.0) / s;
        for (int j = 0; j < grid.nz; ++j) {
            const double zc = grid.z(j) <= 0.5 * grid.length ? grid.z(j) : grid.z(j) - grid.length;
            const ProfileValues v = ps.eval(big_r, zc / s);
            u1(i, j) = a_u * v.swirl;
            omega1(i, j) = a_w * v.vort;
            psi1(i, j) = a_s * v.stream;
        }
    }
    return State{t, std::move(u1), std::move(omega1), std::move(psi1)};
}

namespace {

double interp_field(const ScalarField2D& f, double r, double z) {
    const GridSpec& g = f.grid();
    double zw = z - g.length * std::floor(z / g.length);
    if (zw >= g.length) zw = 0.0;
    const double uz = zw / g.dz();
    int j0 = static_cast<int>(std::floor(uz));
    if (j0 > g.nz - 1) j0 = g.nz - 1;
    const double tz = uz - j0;
    const int j1 = (j0 + 1) % g.nz;

    const double xr = r / g.dr() - 0.5;
    int i0 = static_cast<int>(std::floor(xr));
    i0 = std::clamp(i0, 0, g.nr - 2);
    const double tr = xr - i0;  // outside [0,1] extrapolates linearly

    const double v00 = f(i0, j0), v01 = f(i0, j1);
    const double v10 = f(i0 + 1, j0), v11 = f(i0 + 1, j1);
    return (1.0 - tr) * ((1.0 - tz) * v00 + tz * v01) + tr * ((1.0 - tz) * v10 + tz * v11);
}

}  // namespace

ExtractionResult extract_profiles(std::span<const State> snapshots, const SelfSimilarParams& p,
                                  const std::vector<double>& r_nodes,
                                  const std::vector<double>& z_nodes) {
    if (snapshots.size() < 2)
        throw std::invalid_argument("extract_profiles: need at least two snapshots");
    const GridSpec& grid = snapshots.front().u1.grid();
    for (const State& s : snapshots) {
        if (!(s.t > p.T - p.delta && s.t < p.T))
            throw std::invalid_argument("extract_profiles: snapshot time outside the window");
        if (!(s.u1.grid() == grid))
            throw std::invalid_argument("extract_profiles: snapshots on different grids");
    }

    const int k_count = static_cast<int>(snapshots.size());
    std::vector<double> scale(k_count);
    for (int k = 0; k < k_count; ++k) scale[k] = std::pow(p.T - snapshots[k].t, p.gamma);

    auto keep_r = [&](double R) {
        for (int k = 0; k < k_count; ++k) {
            const double r = 1.0 + R * scale[k];
            if (!(r > 1.0 - p.delta && r < 1.0)) return false;
        }
        return true;
    };
    auto keep_z = [&](double Z) {
        for (int k = 0; k < k_count; ++k) {
            const double z = Z * scale[k];
            if (!(z > -p.delta && z < p.delta)) return false;
        }
        return true;
    };

    std::vector<double> rs, zs;
    for (double R : r_nodes)
        if (keep_r(R)) rs.push_back(R);
    for (double Z : z_nodes)
        if (keep_z(Z)) zs.push_back(Z);
    if (rs.empty() || zs.empty())
        throw std::invalid_argument("extract_profiles: every lattice point leaves the window");
    if (rs.size() < 3 || zs.size() < 3)
        throw std::invalid_argument("extract_profiles: too few lattice points remain in the window");

    const int dropped = static_cast<int>(r_nodes.size() * z_nodes.size() - rs.size() * zs.size());
    const size_t m = rs.size(), n = zs.size();

    std::vector<std::vector<double>> u_k(k_count), w_k(k_count), s_k(k_count);
    for (int k = 0; k < k_count; ++k) {
        const State& snap = snapshots[k];
        const double tau = p.T - snap.t;
        const double a_u = std::pow(tau, 1.0 - 0.5 * p.gamma);
        const double a_w = tau;
        const double a_s = std::pow(tau, 1.0 - 2.0 * p.gamma);
        u_k[k].resize(m * n);
        w_k[k].resize(m * n);
        s_k[k].resize(m * n);
        for (size_t i = 0; i < m; ++i) {
            const double r = 1.0 + rs[i] * scale[k];
            for (size_t j = 0; j < n; ++j) {
                const double z = zs[j] * scale[k];
                u_k[k][i * n + j] = a_u * interp_field(snap.u1, r, z);
                w_k[k][i * n + j] = a_w * interp_field(snap.omega1, r, z);
                s_k[k][i * n + j] = a_s * interp_field(snap.psi1, r, z);
            }
        }
    }

    std::vector<double> u_mean(m * n, 0.0), w_mean(m * n, 0.0), s_mean(m * n, 0.0);
    for (int k = 0; k < k_count; ++k)
        for (size_t q = 0; q < m * n; ++q) {
            u_mean[q] += u_k[k][q];
            w_mean[q] += w_k[k][q];
            s_mean[q] += s_k[k][q];
        }
    for (size_t q = 0; q < m * n; ++q) {
        u_mean[q] /= k_count;
        w_mean[q] /= k_count;
        s_mean[q] /= k_count;
    }

    double collapse = 0.0;
    for (int k = 0; k < k_count; ++k)
        for (int l = k + 1; l < k_count; ++l) {
            double worst = 0.0;
            for (size_t q = 0; q < m * n; ++q) {
                const double d = std::abs(u_k[k][q] - u_k[l][q]) +
                                 std::abs(w_k[k][q] - w_k[l][q]) +
                                 std::abs(s_k[k][q] - s_k[l][q]);
                worst = std::max(worst, d);
            }
            collapse = std::max(collapse, worst);
        }

    return ExtractionResult{GridProfileSet(std::move(rs), std::move(zs), std::move(u_mean),
                                           std::move(w_mean), std::move(s_mean)),
                            collapse, dropped};
}

std::string to_string(Classification::Verdict v) {
    switch (v) {
        case Classification::Verdict::family_a: return "FamilyA";
        case Classification::Verdict::family_b: return "FamilyB";
        default: return "NotSolution";
    }
}

Classification classify(const ProfileSet& ps, double gamma, double tol,
                        std::span<const RZPoint> samples) {
    if (!(gamma > 0.0)) throw std::domain_error("classify: gamma must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("classify: tolerance must be positive");

    std::vector<RZPoint> pts;
    pts.reserve(samples.size());
    for (const RZPoint& pt : samples)
        if (!ps.singular_at(pt.R, pt.Z)) pts.push_back(pt);

    std::set<double> distinct_r, distinct_z;
    for (const RZPoint& pt : pts) {
        distinct_r.insert(pt.R);
        distinct_z.insert(pt.Z);
    }
    if (distinct_r.size() < 10 || distinct_z.size() < 10)
        throw std::invalid_argument(
            "classify: degenerate sample geometry, need >= 10 distinct R and Z values");

    std::vector<ProfileValues> vals;
    vals.reserve(pts.size());
    for (const RZPoint& pt : pts) vals.push_back(ps.eval(pt.R, pt.Z));

    Classification out;
    auto reject = [&](const std::string& check, double residual) {
        out.verdict = Classification::Verdict::not_solution;
        out.failed_check = check;
        out.failed_residual = residual;
        return out;
    };

    double sup_stream_r = 0.0;
    for (const ProfileValues& v : vals) sup_stream_r = std::max(sup_stream_r, std::abs(v.stream_R));
    if (sup_stream_r > tol) return reject("stream-gradient", sup_stream_r);

    // Quadratic fit of the stream profile in Z.
    const int n = static_cast<int>(pts.size());
    std::vector<double> basis(static_cast<size_t>(n) * 3), rhs_fit(n);
    for (int q = 0; q < n; ++q) {
        basis[3 * q] = 1.0;
        basis[3 * q + 1] = pts[q].Z;
        basis[3 * q + 2] = pts[q].Z * pts[q].Z;
    }
    for (int q = 0; q < n; ++q) rhs_fit[q] = vals[q].stream;
    const std::vector<double> coef = least_squares(std::move(basis), n, 3, std::move(rhs_fit));
    const double c0 = coef[0], c1 = coef[1], c2 = coef[2];

    double sup_poisson = 0.0;
    for (const ProfileValues& v : vals)
        sup_poisson = std::max(sup_poisson, std::abs(v.vort + v.stream_ZZ));
    if (sup_poisson > tol) return reject("stream-poisson", sup_poisson);

    double sup_exchange = 0.0;
    for (const ProfileValues& v : vals)
        sup_exchange = std::max(sup_exchange, std::abs(v.stream * v.vort_Z));
    if (sup_exchange > tol) return reject("vorticity-exchange", sup_exchange);

    if (std::abs(c2) > tol) return reject("quadratic-stream", std::abs(c2));

    double sup_vort = 0.0;
    for (const ProfileValues& v : vals) sup_vort = std::max(sup_vort, std::abs(v.vort));
    if (sup_vort > tol) return reject("vorticity-nonzero", sup_vort);

    double fit_res = 0.0;
    for (int q = 0; q < n; ++q) {
        const double model = c0 + c1 * pts[q].Z + c2 * pts[q].Z * pts[q].Z;
        fit_res = std::max(fit_res, std::abs(vals[q].stream - model));
    }
    if (fit_res > tol) return reject("stream-fit", fit_res);

    double sup_swirl = 0.0;
    for (const ProfileValues& v : vals) sup_swirl = std::max(sup_swirl, std::abs(v.swirl));
    if (sup_swirl <= tol) {
        out.verdict = Classification::Verdict::family_a;
        out.b = c1;
        out.c = c0;
        out.stream_fit_residual = fit_res;
        return out;
    }

    // Family B branch: Psi must be constant and U a pure power of -R.
    if (std::abs(c1) > tol) return reject("stream-axial-gradient", std::abs(c1));

    std::map<double, std::pair<double, double>> swirl_range;
    for (int q = 0; q < n; ++q) {
        auto [it, inserted] =
            swirl_range.try_emplace(pts[q].R, vals[q].swirl, vals[q].swirl);
        if (!inserted) {
            it->second.first = std::min(it->second.first, vals[q].swirl);
            it->second.second = std::max(it->second.second, vals[q].swirl);
        }
    }
    double sup_spread = 0.0;
    for (const auto& [r, mm] : swirl_range) sup_spread = std::max(sup_spread, mm.second - mm.first);
    if (sup_spread > tol) return reject("swirl-z-dependence", sup_spread);

    int anchor = 0;
    for (int q = 1; q < n; ++q)
        if (std::abs(pts[q].R + 1.0) < std::abs(pts[anchor].R + 1.0)) anchor = q;
    const double sgn = vals[anchor].swirl > 0.0 ? 1.0 : (vals[anchor].swirl < 0.0 ? -1.0 : 0.0);
    if (sgn == 0.0) return reject("swirl-sign", 0.0);

    std::vector<double> log_r, log_u;
    for (int q = 0; q < n; ++q) {
        const double w = sgn * vals[q].swirl;
        if (w <= 0.0) return reject("swirl-sign-change", std::abs(vals[q].swirl));
        if (pts[q].R == 0.0) continue;
        log_r.push_back(std::log(-pts[q].R));
        log_u.push_back(std::log(w));
    }
    const LineFit lf = fit_line(log_r, log_u);
    const double expected_slope = 0.5 - 1.0 / gamma;
    if (std::abs(lf.slope - expected_slope) > tol)
        return reject("swirl-power-law", std::abs(lf.slope - expected_slope));
    if (lf.max_abs_residual > tol) return reject("swirl-power-fit", lf.max_abs_residual);

    out.verdict = Classification::Verdict::family_b;
    out.kappa = sgn * std::exp(lf.intercept);
    out.c = c0;
    out.b = c1;
    out.stream_fit_residual = fit_res;
    out.swirl_fit_residual = lf.max_abs_residual;
    return out;
}

}  // namespace eulerlab
