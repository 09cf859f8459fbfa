#include "eulerlab/fields.hpp"

#include <cmath>
#include <stdexcept>

namespace eulerlab {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

GridSpec::GridSpec(int nr_, int nz_, double length_) : nr(nr_), nz(nz_), length(length_) {
    if (nr < 8) throw std::invalid_argument("GridSpec: nr must be >= 8");
    if (nz < 8) throw std::invalid_argument("GridSpec: nz must be >= 8");
    if (!is_power_of_two(nz)) throw std::invalid_argument("GridSpec: nz must be a power of two");
    if (!(length > 0.0) || !std::isfinite(length))
        throw std::invalid_argument("GridSpec: axial period must be positive");
}

ScalarField2D::ScalarField2D(const GridSpec& grid, double fill)
    : grid_(grid), v_(static_cast<size_t>(grid.nr) * grid.nz, fill) {}

ScalarField2D ScalarField2D::sample(const GridSpec& grid,
                                    const std::function<double(double, double)>& f) {
    ScalarField2D out(grid);
    for (int i = 0; i < grid.nr; ++i)
        for (int j = 0; j < grid.nz; ++j) out(i, j) = f(grid.r(i), grid.z(j));
    return out;
}

void ScalarField2D::require_same_grid(const ScalarField2D& other) const {
    if (!(grid_ == other.grid_))
        throw std::invalid_argument("ScalarField2D: operands live on different grids");
}

ScalarField2D& ScalarField2D::operator+=(const ScalarField2D& other) {
    require_same_grid(other);
    for (size_t k = 0; k < v_.size(); ++k) v_[k] += other.v_[k];
    return *this;
}

ScalarField2D& ScalarField2D::operator-=(const ScalarField2D& other) {
    require_same_grid(other);
    for (size_t k = 0; k < v_.size(); ++k) v_[k] -= other.v_[k];
    return *this;
}

ScalarField2D& ScalarField2D::operator*=(double a) {
    for (double& x : v_) x *= a;
    return *this;
}

void ScalarField2D::add_scaled(double a, const ScalarField2D& other) {
    require_same_grid(other);
    for (size_t k = 0; k < v_.size(); ++k) v_[k] += a * other.v_[k];
}

double ScalarField2D::max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

bool ScalarField2D::all_finite() const {
    for (double x : v_)
        if (!std::isfinite(x)) return false;
    return true;
}

void ScalarField2D::require_finite(const std::string& what) const {
    if (!all_finite()) throw std::runtime_error("non-finite values in " + what);
}

SelfSimilarParams::SelfSimilarParams(double gamma_, double T_, double delta_)
    : gamma(gamma_), T(T_), delta(delta_) {
    if (!(gamma > 0.0)) throw std::invalid_argument("SelfSimilarParams: gamma must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("SelfSimilarParams: T must be positive");
    if (!(delta > 0.0) || !(delta < std::min(1.0, T)))
        throw std::invalid_argument("SelfSimilarParams: delta must lie in (0, min(1, T))");
}

ScalingExponents scaling_exponents(double gamma) {
    if (!(gamma > 0.0)) throw std::domain_error("scaling_exponents: gamma must be positive");
    return {-1.0 + 0.5 * gamma, -1.0, -1.0 + 2.0 * gamma, gamma};
}

bool constantin_admissible(double gamma) { return gamma >= 0.4; }

RZPoint to_selfsimilar(double r, double z, double t, const SelfSimilarParams& p) {
    if (!(t < p.T))
        throw std::domain_error("to_selfsimilar: map undefined at or after the blow-up time");
    const double s = std::pow(p.T - t, p.gamma);
    return {(r - 1.0) / s, z / s};
}

RZPhysical from_selfsimilar(double R, double Z, double t, const SelfSimilarParams& p) {
    if (!(t < p.T))
        throw std::domain_error("from_selfsimilar: map undefined at or after the blow-up time");
    const double s = std::pow(p.T - t, p.gamma);
    return {1.0 + R * s, Z * s};
}

bool in_window(double r, double z, double t, const SelfSimilarParams& p) {
    return r > 1.0 - p.delta && r < 1.0 && z > -p.delta && z < p.delta && t > p.T - p.delta &&
           t < p.T;
}

}  // namespace eulerlab
