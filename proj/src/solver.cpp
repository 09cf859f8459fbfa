#include "eulerlab/solver.hpp"

#include <cmath>

#include "eulerlab/diagnostics.hpp"
#include "eulerlab/stencils.hpp"

namespace eulerlab {

State make_consistent_state(double t, ScalarField2D u1, ScalarField2D omega1,
                            const StreamSolver& solver) {
    u1.require_finite("State u1");
    ScalarField2D psi1 = solver.solve(omega1);
    return State{t, std::move(u1), std::move(omega1), std::move(psi1)};
}

Tendencies rhs(const State& s, AdvectionOrder order) {
    auto [ur, uz] = velocity_from_stream(s.psi1);
    const GridSpec& g = s.u1.grid();

    const bool high = order == AdvectionOrder::fourth;
    auto d_r = [high](const ScalarField2D& f) { return high ? ddr4(f) : ddr(f); };
    auto d_z = [high](const ScalarField2D& f) { return high ? ddz4(f) : ddz(f); };

    ScalarField2D du1_dr = d_r(s.u1);
    ScalarField2D du1_dz = d_z(s.u1);
    ScalarField2D dw_dr = d_r(s.omega1);
    ScalarField2D dw_dz = d_z(s.omega1);
    ScalarField2D dpsi_dz = d_z(s.psi1);

    ScalarField2D u1_sq(g);
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.nz; ++j) u1_sq(i, j) = s.u1(i, j) * s.u1(i, j);
    ScalarField2D du1sq_dz = d_z(u1_sq);

    Tendencies out{ScalarField2D(g), ScalarField2D(g)};
    for (int i = 0; i < g.nr; ++i) {
        for (int j = 0; j < g.nz; ++j) {
            out.du1(i, j) = -ur(i, j) * du1_dr(i, j) - uz(i, j) * du1_dz(i, j) +
                            2.0 * s.u1(i, j) * dpsi_dz(i, j);
            out.domega1(i, j) =
                -ur(i, j) * dw_dr(i, j) - uz(i, j) * dw_dz(i, j) + du1sq_dz(i, j);
        }
    }
    return out;
}

IntegrationError::IntegrationError(std::string stage_, double time_)
    : std::runtime_error("integration failure in " + stage_ + " at t = " + std::to_string(time_)),
      stage(std::move(stage_)),
      time(time_) {}

namespace {

State stage_state(const State& base, double frac_dt, const Tendencies& k, double t_stage,
                  const StreamSolver& solver, const char* stage_name) {
    ScalarField2D u = base.u1;
    u.add_scaled(frac_dt, k.du1);
    ScalarField2D w = base.omega1;
    w.add_scaled(frac_dt, k.domega1);
    if (!u.all_finite() || !w.all_finite()) throw IntegrationError(stage_name, t_stage);
    ScalarField2D psi = solver.solve(w);
    return State{t_stage, std::move(u), std::move(w), std::move(psi)};
}

}  // namespace

State step_rk4(const State& s, double dt, const StreamSolver& solver, AdvectionOrder order) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be positive");

    const Tendencies k1 = rhs(s, order);
    const State s2 = stage_state(s, 0.5 * dt, k1, s.t + 0.5 * dt, solver, "RK4 stage 2");
    const Tendencies k2 = rhs(s2, order);
    const State s3 = stage_state(s, 0.5 * dt, k2, s.t + 0.5 * dt, solver, "RK4 stage 3");
    const Tendencies k3 = rhs(s3, order);
    const State s4 = stage_state(s, dt, k3, s.t + dt, solver, "RK4 stage 4");
    const Tendencies k4 = rhs(s4, order);

    const GridSpec& g = s.u1.grid();
    ScalarField2D u = s.u1;
    ScalarField2D w = s.omega1;
    const double c = dt / 6.0;
    for (int i = 0; i < g.nr; ++i) {
        for (int j = 0; j < g.nz; ++j) {
            u(i, j) += c * (k1.du1(i, j) + 2.0 * k2.du1(i, j) + 2.0 * k3.du1(i, j) + k4.du1(i, j));
            w(i, j) += c * (k1.domega1(i, j) + 2.0 * k2.domega1(i, j) + 2.0 * k3.domega1(i, j) +
                            k4.domega1(i, j));
        }
    }
    if (!u.all_finite() || !w.all_finite()) throw IntegrationError("RK4 combination", s.t + dt);
    ScalarField2D psi = solver.solve(w);
    return State{s.t + dt, std::move(u), std::move(w), std::move(psi)};
}

double cfl_dt_from_speeds(double max_ur, double max_uz, double dr, double dz, double cfl) {
    if (!(cfl > 0.0) || cfl > 1.0) throw std::invalid_argument("cfl must lie in (0, 1]");
    return cfl / (max_ur / dr + max_uz / dz + 1e-30);
}

double cfl_dt(const State& s, double cfl) {
    auto [ur, uz] = velocity_from_stream(s.psi1);
    const GridSpec& g = s.psi1.grid();
    return cfl_dt_from_speeds(ur.max_abs(), uz.max_abs(), g.dr(), g.dz(), cfl);
}

double kinetic_energy(const State& s) {
    auto [ur, uz] = velocity_from_stream(s.psi1);
    const GridSpec& g = s.u1.grid();
    const double cell = g.dr() * g.dz();
    double e = 0.0;
    for (int i = 0; i < g.nr; ++i) {
        const double r = g.r(i);
        double row = 0.0;
        for (int j = 0; j < g.nz; ++j) {
            const double utheta = r * s.u1(i, j);
            row += ur(i, j) * ur(i, j) + utheta * utheta + uz(i, j) * uz(i, j);
        }
        e += row * r * cell;
    }
    return e;
}

double max_abs_circulation(const ScalarField2D& u1) {
    const GridSpec& g = u1.grid();
    double m = 0.0;
    for (int i = 0; i < g.nr; ++i) {
        const double r2 = g.r(i) * g.r(i);
        for (int j = 0; j < g.nz; ++j) m = std::max(m, std::abs(r2 * u1(i, j)));
    }
    return m;
}

void SolverConfig::validate() const {
    GridSpec check = grid();
    (void)check;
    if (!(cfl > 0.0) || cfl > 1.0) throw std::invalid_argument("SolverConfig: cfl must be in (0, 1]");
    if (!(t_end > 0.0)) throw std::invalid_argument("SolverConfig: t_end must be positive");
    if (!(dt_max > 0.0)) throw std::invalid_argument("SolverConfig: dt_max must be positive");
    if (snapshot_every < 1)
        throw std::invalid_argument("SolverConfig: snapshot_every must be positive");
    if (max_steps < 1) throw std::invalid_argument("SolverConfig: max_steps must be positive");
    if (!(omega_ceiling > 0.0))
        throw std::invalid_argument("SolverConfig: omega_ceiling must be positive");
    if (advection_order != 2 && advection_order != 4)
        throw std::invalid_argument("SolverConfig: advection_order must be 2 or 4");
    if (preset != "rest" && preset != "wall-swirl")
        throw std::invalid_argument("SolverConfig: unknown preset '" + preset + "'");
}

State initial_state(const SolverConfig& cfg, const StreamSolver& solver) {
    const GridSpec g = cfg.grid();
    ScalarField2D u1(g), omega1(g);
    if (cfg.preset == "wall-swirl") {
        const double two_pi_over_l = 2.0 * M_PI / g.length;
        for (int i = 0; i < g.nr; ++i) {
            const double r = g.r(i);
            const double q = 1.0 - r * r;
            const double radial = cfg.amplitude * std::exp(-30.0 * q * q * q * q);
            for (int j = 0; j < g.nz; ++j)
                u1(i, j) = radial * (1.0 + cfg.ripple * std::sin(two_pi_over_l * g.z(j)));
        }
    } else if (cfg.preset != "rest") {
        throw std::invalid_argument("initial_state: unknown preset '" + cfg.preset + "'");
    }
    return make_consistent_state(0.0, std::move(u1), std::move(omega1), solver);
}

Trajectory run(const SolverConfig& cfg) {
    cfg.validate();
    const GridSpec g = cfg.grid();
    EllipticOptions opts;
    opts.tolerance = cfg.elliptic_tolerance;
    StreamSolver solver(g, opts);

    Trajectory traj;
    State state = initial_state(cfg, solver);
    traj.snapshots.push_back(state);

    const AdvectionOrder order =
        cfg.advection_order == 4 ? AdvectionOrder::fourth : AdvectionOrder::second;
    long step = 0;
    while (state.t < cfg.t_end * (1.0 - 1e-14) && step < cfg.max_steps) {
        const double dt =
            std::min({cfl_dt(state, cfg.cfl), cfg.dt_max, cfg.t_end - state.t});
        state = step_rk4(state, dt, solver, order);
        ++step;

        const VorticityMax vmax = max_vorticity_location(state);
        traj.steps.push_back(StepRecord{state.t, dt, state.u1.max_abs(), state.omega1.max_abs(),
                                        max_abs_circulation(state.u1), kinetic_energy(state),
                                        vmax.r, vmax.z});
        if (step % cfg.snapshot_every == 0) traj.snapshots.push_back(state);
        if (state.omega1.max_abs() > cfg.omega_ceiling) {
            traj.blowup_flagged = true;
            break;
        }
    }
    if (traj.snapshots.empty() || traj.snapshots.back().t != state.t)
        traj.snapshots.push_back(state);
    return traj;
}

}  // namespace eulerlab
