#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "eulerlab/elliptic.hpp"
#include "eulerlab/fields.hpp"

namespace eulerlab {

// State factory enforcing the elliptic constraint.
State make_consistent_state(double t, ScalarField2D u1, ScalarField2D omega1,
                            const StreamSolver& solver);

struct Tendencies {
    ScalarField2D du1;
    ScalarField2D domega1;
};

// Advection stencil order; velocities are always recovered with the shared
// second-order stencils. The fourth-order variant exists for convergence
// studies.
enum class AdvectionOrder { second, fourth };

// du1/dt = -u_r d(u1)/dr - u_z d(u1)/dz + 2 u1 d(psi1)/dz
// domega1/dt = -u_r d(omega1)/dr - u_z d(omega1)/dz + d(u1^2)/dz
// with (u_r, u_z) recovered from psi1.
Tendencies rhs(const State& s, AdvectionOrder order = AdvectionOrder::second);

class IntegrationError : public std::runtime_error {
  public:
    IntegrationError(std::string stage_, double time_);
    std::string stage;
    double time;
};

// Classical four-stage Runge-Kutta step; the elliptic constraint is re-solved
// after every stage. Throws IntegrationError naming the stage on NaN/Inf.
State step_rk4(const State& s, double dt, const StreamSolver& solver,
               AdvectionOrder order = AdvectionOrder::second);

// dt = cfl / (max|u_r|/dr + max|u_z|/dz + 1e-30); the rest state imposes no
// advective restriction and is capped by the configured dt_max in run().
double cfl_dt_from_speeds(double max_ur, double max_uz, double dr, double dz, double cfl);
double cfl_dt(const State& s, double cfl);

// Discrete kinetic energy: sum of (u_r^2 + u_theta^2 + u_z^2) r dr dz,
// accumulated in a fixed order.
double kinetic_energy(const State& s);

// max over the grid of |r^2 u1| = max |r u_theta|, materially conserved by
// the exact dynamics.
double max_abs_circulation(const ScalarField2D& u1);

struct StepRecord {
    double t = 0.0;
    double dt = 0.0;
    double max_abs_u1 = 0.0;
    double max_abs_omega1 = 0.0;
    double max_abs_circulation = 0.0;
    double energy = 0.0;
    double r_star = 0.0;  // grid vorticity maximum location
    double z_star = 0.0;
};

struct SolverConfig {
    int nr = 64;
    int nz = 64;
    double length = 1.0;
    double cfl = 0.5;
    double dt_max = 1e-2;
    double t_end = 1.0;
    int snapshot_every = 10;
    long max_steps = 1000000;
    double omega_ceiling = 1e8;
    double elliptic_tolerance = 1e-12;
    int advection_order = 2;      // 2 | 4
    std::string preset = "rest";  // "rest" | "wall-swirl"
    double amplitude = 0.5;       // wall-swirl strength A
    double ripple = 0.1;          // wall-swirl axial perturbation

    GridSpec grid() const { return GridSpec(nr, nz, length); }
    void validate() const;
};

State initial_state(const SolverConfig& cfg, const StreamSolver& solver);

struct Trajectory {
    std::vector<State> snapshots;
    std::vector<StepRecord> steps;
    bool blowup_flagged = false;
};

Trajectory run(const SolverConfig& cfg);

}  // namespace eulerlab
