#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace eulerlab {

// Uniform cell-centered grid on the strip 0 < r < 1, z periodic with period
// `length`. Radial nodes sit at (i+1/2)/nr so neither the axis r = 0 nor the
// wall r = 1 carries a node; the wall is a cell face where boundary data is
// imposed through ghost values.
struct GridSpec {
    int nr = 0;
    int nz = 0;
    double length = 0.0;

    GridSpec(int nr_, int nz_, double length_);

    double dr() const { return 1.0 / nr; }
    double dz() const { return length / nz; }
    double r(int i) const { return (i + 0.5) / nr; }
    double z(int j) const { return j * length / nz; }

    bool operator==(const GridSpec&) const = default;
};

// Discrete scalar field on a GridSpec, row-major with the radial index outer:
// value(i, j) = data[i*nz + j].
class ScalarField2D {
  public:
    explicit ScalarField2D(const GridSpec& grid, double fill = 0.0);

    static ScalarField2D sample(const GridSpec& grid,
                                const std::function<double(double, double)>& f);

    const GridSpec& grid() const { return grid_; }
    int nr() const { return grid_.nr; }
    int nz() const { return grid_.nz; }

    double& operator()(int i, int j) { return v_[static_cast<size_t>(i) * grid_.nz + j]; }
    double operator()(int i, int j) const { return v_[static_cast<size_t>(i) * grid_.nz + j]; }

    std::span<double> values() { return v_; }
    std::span<const double> values() const { return v_; }

    ScalarField2D& operator+=(const ScalarField2D& other);
    ScalarField2D& operator-=(const ScalarField2D& other);
    ScalarField2D& operator*=(double a);

    friend ScalarField2D operator+(ScalarField2D a, const ScalarField2D& b) { return a += b; }
    friend ScalarField2D operator-(ScalarField2D a, const ScalarField2D& b) { return a -= b; }
    friend ScalarField2D operator*(double a, ScalarField2D f) { return f *= a; }

    // this += a * other (shared grid required)
    void add_scaled(double a, const ScalarField2D& other);

    double max_abs() const;
    bool all_finite() const;

    // Throws std::runtime_error naming `what` if any value is NaN/Inf.
    void require_finite(const std::string& what) const;

  private:
    GridSpec grid_;
    std::vector<double> v_;

    void require_same_grid(const ScalarField2D& other) const;
};

// Parameters of the self-similar ansatz: scaling parameter gamma, candidate
// blow-up time T, and the half-size delta of the space-time window
// C(delta,T) = { 1-delta < r < 1, -delta < z < delta, T-delta < t < T }.
struct SelfSimilarParams {
    double gamma = 0.0;
    double T = 0.0;
    double delta = 0.1;

    SelfSimilarParams(double gamma_, double T_, double delta_ = 0.1);
};

struct ScalingExponents {
    double u = 0.0;
    double omega = 0.0;
    double psi = 0.0;
    double l = 0.0;
};

// (gamma_u, gamma_omega, gamma_psi, gamma_l) = (-1 + g/2, -1, -1 + 2g, g).
ScalingExponents scaling_exponents(double gamma);

// Energy conservation requires gamma >= 2/5 for a finite-time blow-up of
// this scaling type.
bool constantin_admissible(double gamma);

// Time-stamped trio of transformed fields. Solver-produced states satisfy
// psi1 = elliptic solve of omega1 (see make_consistent_state); states
// synthesized from the self-similar ansatz carry the ansatz stream field
// instead, which does not meet the wall condition of the global solve.
struct State {
    double t = 0.0;
    ScalarField2D u1;
    ScalarField2D omega1;
    ScalarField2D psi1;
};

struct RZPoint {
    double R = 0.0;
    double Z = 0.0;
};

// R = (r-1)/(T-t)^gamma, Z = z/(T-t)^gamma. Only defined for t < T.
RZPoint to_selfsimilar(double r, double z, double t, const SelfSimilarParams& p);

struct RZPhysical {
    double r = 0.0;
    double z = 0.0;
};

// Inverse map: r = 1 + R (T-t)^gamma, z = Z (T-t)^gamma.
RZPhysical from_selfsimilar(double R, double Z, double t, const SelfSimilarParams& p);

// Strict membership in C(delta,T).
bool in_window(double r, double z, double t, const SelfSimilarParams& p);

}  // namespace eulerlab
