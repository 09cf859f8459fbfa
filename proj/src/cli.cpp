#include "eulerlab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "eulerlab/diagnostics.hpp"
#include "eulerlab/elliptic.hpp"
#include "eulerlab/fields.hpp"
#include "eulerlab/manufactured.hpp"
#include "eulerlab/profiles.hpp"
#include "eulerlab/snapshot.hpp"
#include "eulerlab/solver.hpp"

namespace eulerlab::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json load_config_from_argv(int argc, const char* const* argv) {
    std::string path;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) path = argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
    }
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    json cfg = json::parse(in, nullptr, false);
    if (cfg.is_discarded() || !cfg.is_object())
        throw std::runtime_error("config file " + path + " is not a JSON object");
    return cfg;
}

template <typename T>
void from_cfg(const json& cfg, const char* key, T& target) {
    if (cfg.contains(key)) target = cfg.at(key).get<T>();
}

struct SimulateArgs {
    SolverConfig solver;
    std::string out = "out";
    unsigned long seed = 0;
};

int do_simulate(const SimulateArgs& a) {
    try {
        a.solver.validate();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "invalid configuration: %s\n", e.what());
        return kUsageError;
    }

    const fs::path out_dir(a.out);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    {
        std::ofstream probe(out_dir / "diagnostics.csv", std::ios::trunc);
        if (!probe) {
            std::fprintf(stderr, "output directory %s is not writable\n", a.out.c_str());
            return kUsageError;
        }
    }

    Trajectory traj;
    try {
        traj = run(a.solver);
    } catch (const IntegrationError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kNumericalFailure;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid configuration: %s\n", e.what());
        return kUsageError;
    } catch (const std::runtime_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumericalFailure;
    }

    try {
        io::write_diagnostics_csv(out_dir / "diagnostics.csv", traj.steps);
        for (size_t k = 0; k < traj.snapshots.size(); ++k) {
            char name[64];
            std::snprintf(name, sizeof name, "state_%06zu.snap", k);
            io::write_state(out_dir / name, traj.snapshots[k]);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "write failed: %s\n", e.what());
        return kUsageError;
    }

    json summary;
    summary["steps"] = traj.steps.size();
    summary["snapshots"] = traj.snapshots.size();
    summary["t_final"] = traj.snapshots.back().t;
    summary["blowup"] = traj.blowup_flagged;
    summary["seed"] = a.seed;
    std::printf("%s\n", summary.dump().c_str());
    return kOk;
}

struct VerifyArgs {
    double gamma = 2.9133;
    double T = 1.0;
    double delta = 0.1;
    double tol = 1e-10;
    int trials = 10;
    unsigned long seed = 12345;
};

int do_verify_families(const VerifyArgs& a) {
    SelfSimilarParams params(a.gamma, a.T, a.delta);
    const ProfileLattice lattice = default_residual_lattice();
    const std::vector<RZPoint> pts = lattice.points();
    const double times[3] = {a.T - 0.8 * a.delta, a.T - 0.5 * a.delta, a.T - 0.3 * a.delta};

    std::mt19937_64 rng(a.seed);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);

    struct Worst {
        std::string family, equation;
        double sup = 0.0, rms = 0.0;
        RZPoint at;
    };
    std::vector<Worst> worst;
    auto absorb = [&](const std::string& family, const ResidualReport& rep) {
        for (const EquationResidual& eq : rep.equations) {
            auto it = std::find_if(worst.begin(), worst.end(), [&](const Worst& w) {
                return w.family == family && w.equation == eq.equation;
            });
            if (it == worst.end()) {
                worst.push_back({family, eq.equation, eq.sup, eq.rms, eq.argmax});
            } else if (eq.sup > it->sup) {
                it->sup = eq.sup;
                it->rms = eq.rms;
                it->at = eq.argmax;
            }
        }
    };

    for (int trial = 0; trial < a.trials; ++trial) {
        const auto fam_a = family_a(coef(rng), coef(rng));
        const auto fam_b = family_b(coef(rng), coef(rng), a.gamma);
        for (const auto& [name, ps] :
             {std::pair<std::string, std::shared_ptr<const ProfileSet>>{"A", fam_a},
              std::pair<std::string, std::shared_ptr<const ProfileSet>>{"B", fam_b}}) {
            absorb(name, residual_group1(*ps, a.gamma, pts));
            absorb(name, residual_group2(*ps, pts));
            for (double t : times) absorb(name, residual_timedependent(*ps, params, t, pts));
        }
    }

    std::printf("%-8s %-20s %-14s %-14s %s\n", "family", "equation", "sup", "rms", "argmax (R,Z)");
    bool ok = true;
    for (const Worst& w : worst) {
        std::printf("%-8s %-20s %-14.3e %-14.3e (%.6g, %.6g)\n", w.family.c_str(),
                    w.equation.c_str(), w.sup, w.rms, w.at.R, w.at.Z);
        ok = ok && w.sup <= a.tol;
    }
    if (!ok) {
        for (const Worst& w : worst)
            if (w.sup > a.tol)
                std::printf("FAIL %s/%s sup %.3e > tol %.3e at (R,Z) = (%.6g, %.6g)\n",
                            w.family.c_str(), w.equation.c_str(), w.sup, a.tol, w.at.R, w.at.Z);
        return kVerificationFailure;
    }
    std::printf("all residuals within tolerance %.3e\n", a.tol);
    return kOk;
}

struct ClassifyArgs {
    std::string file;
    double gamma = 2.9133;
    double tol = 1e-6;
};

int do_classify(const ClassifyArgs& a) {
    std::unique_ptr<ProfileSet> ps;
    try {
        ps = io::read_profiles(a.file);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "cannot read profile file: %s\n", e.what());
        return kUsageError;
    }

    std::vector<RZPoint> samples;
    if (const auto* gp = dynamic_cast<const GridProfileSet*>(ps.get())) {
        for (double r : gp->r_nodes())
            for (double z : gp->z_nodes()) samples.push_back({r, z});
    } else {
        samples = classification_lattice().points();
    }

    Classification verdict;
    try {
        verdict = classify(*ps, a.gamma, a.tol, samples);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "classification failed: %s\n", e.what());
        return kUsageError;
    }

    json out;
    out["verdict"] = to_string(verdict.verdict);
    if (verdict.verdict == Classification::Verdict::family_a) {
        out["b"] = verdict.b;
        out["c"] = verdict.c;
        out["stream_fit_residual"] = verdict.stream_fit_residual;
    } else if (verdict.verdict == Classification::Verdict::family_b) {
        out["kappa"] = verdict.kappa;
        out["c"] = verdict.c;
        out["stream_fit_residual"] = verdict.stream_fit_residual;
        out["swirl_fit_residual"] = verdict.swirl_fit_residual;
    } else {
        out["failed_check"] = verdict.failed_check;
        out["failed_residual"] = verdict.failed_residual;
    }
    std::printf("%s\n", out.dump().c_str());
    return verdict.classified() ? kOk : kVerificationFailure;
}

double observed_order(double coarse, double fine) { return std::log2(coarse / fine); }

int do_convergence(const std::string& which) {
    std::vector<double> errors;
    std::vector<std::string> labels;

    if (which == "elliptic" || which == "divergence") {
        for (int n : {32, 64, 128}) {
            const GridSpec g(n, n, 1.0);
            labels.push_back(std::to_string(n) + "x" + std::to_string(n));
            if (which == "elliptic") {
                StreamSolver solver(g);
                const ScalarField2D psi_h = solver.solve(mms::vorticity_field(g));
                ScalarField2D err = psi_h;
                err -= mms::stream_field(g);
                errors.push_back(err.max_abs());
            } else {
                auto [ur, uz] = velocity_from_stream(mms::stream_field(g));
                errors.push_back(divergence(ur, uz).max_abs());
            }
        }
    } else if (which == "curl") {
        const double gamma = 2.9133, kappa = 1.0;
        const double alpha = 0.5 - 1.0 / gamma;
        auto circ = [&](double r) { return kappa * r * r * std::pow(1.0 - r, alpha); };
        for (double h : {1e-5, 5e-6, 2.5e-6}) {
            char lab[32];
            std::snprintf(lab, sizeof lab, "h=%.2e", h);
            labels.push_back(lab);
            double sup = 0.0;
            for (int k = 0; k <= 100; ++k) {
                const double r = 0.5 + (0.999 - 0.5) * k / 100.0;
                const double fd = (circ(r + h) - circ(r - h)) / (2.0 * h) / r;
                sup = std::max(sup, std::abs(fd - family_b_vorticity(r, kappa, gamma)));
            }
            errors.push_back(sup);
        }
    } else {
        std::fprintf(stderr, "unknown convergence case '%s'\n", which.c_str());
        return kUsageError;
    }

    bool ok = true;
    for (size_t k = 0; k < errors.size(); ++k) {
        if (k == 0) {
            std::printf("%-12s error %.6e\n", labels[k].c_str(), errors[k]);
        } else {
            const double order = observed_order(errors[k - 1], errors[k]);
            std::printf("%-12s error %.6e order %.3f\n", labels[k].c_str(), errors[k], order);
            ok = ok && order >= 1.8;
        }
    }
    std::printf("%s\n", ok ? "observed order >= 1.8" : "observed order below 1.8");
    return ok ? kOk : kVerificationFailure;
}

struct BkmArgs {
    std::string file;
    double T = 1.0;
    double window = 0.1;
};

int do_bkm(const BkmArgs& a) {
    BkmResult res;
    try {
        const BkmSeries series = io::read_bkm_csv(a.file, a.T);
        res = bkm_integral(series, a.window);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "bkm: %s\n", e.what());
        return kUsageError;
    }
    json out;
    out["divergent"] = res.divergent;
    out["marginal"] = res.marginal;
    out["p"] = res.tail.exponent;
    out["A"] = res.tail.prefactor;
    out["r2"] = res.tail.r_squared;
    out["excluded_entries"] = res.tail.excluded_entries;
    if (res.value)
        out["value"] = *res.value;
    else
        out["value"] = nullptr;
    std::printf("%s\n", out.dump().c_str());
    return kOk;
}

struct ExtractArgs {
    std::string glob;
    double gamma = 2.9133;
    double T = 1.0;
    double delta = 0.1;
    std::string out = "profiles.snap";
};

int do_extract(const ExtractArgs& a) {
    const std::vector<fs::path> files = io::expand_glob(a.glob);
    if (files.size() < 2) {
        std::fprintf(stderr, "extract: need at least 2 snapshots, pattern matched %zu\n",
                     files.size());
        return kUsageError;
    }

    std::vector<State> snaps;
    try {
        for (const fs::path& f : files) snaps.push_back(io::read_state(f));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "extract: %s\n", e.what());
        return kUsageError;
    }
    std::sort(snaps.begin(), snaps.end(),
              [](const State& x, const State& y) { return x.t < y.t; });

    try {
        const SelfSimilarParams params(a.gamma, a.T, a.delta);
        const ProfileLattice lattice = default_residual_lattice();
        const ExtractionResult res = extract_profiles(snaps, params, lattice.R, lattice.Z);
        io::write_profiles(a.out, res.profiles);
        json out;
        out["collapse_metric"] = res.collapse_metric;
        out["dropped_points"] = res.dropped_points;
        out["snapshots"] = snaps.size();
        out["profile_file"] = a.out;
        std::printf("%s\n", out.dump().c_str());
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "extract: %s\n", e.what());
        return kUsageError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "extract: %s\n", e.what());
        return kNumericalFailure;
    }
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
    json cfg;
    try {
        cfg = load_config_from_argv(argc, argv);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kUsageError;
    }

    CLI::App app{"euler-lab: transformed axisymmetric Euler laboratory"};
    app.require_subcommand(1);
    std::string config_path;

    SimulateArgs sim;
    from_cfg(cfg, "nr", sim.solver.nr);
    from_cfg(cfg, "nz", sim.solver.nz);
    from_cfg(cfg, "length", sim.solver.length);
    from_cfg(cfg, "cfl", sim.solver.cfl);
    from_cfg(cfg, "dt-max", sim.solver.dt_max);
    from_cfg(cfg, "t-end", sim.solver.t_end);
    from_cfg(cfg, "snapshot-every", sim.solver.snapshot_every);
    from_cfg(cfg, "omega-ceiling", sim.solver.omega_ceiling);
    from_cfg(cfg, "advection-order", sim.solver.advection_order);
    from_cfg(cfg, "preset", sim.solver.preset);
    from_cfg(cfg, "amplitude", sim.solver.amplitude);
    from_cfg(cfg, "ripple", sim.solver.ripple);
    from_cfg(cfg, "out", sim.out);
    from_cfg(cfg, "seed", sim.seed);
    CLI::App* simulate = app.add_subcommand("simulate", "integrate the transformed system");
    simulate->add_option("--config", config_path, "JSON config file (flags override)");
    simulate->add_option("--nr", sim.solver.nr, "radial cells");
    simulate->add_option("--nz", sim.solver.nz, "axial cells (power of two)");
    simulate->add_option("--length", sim.solver.length, "axial period L");
    simulate->add_option("--cfl", sim.solver.cfl, "Courant number in (0,1]");
    simulate->add_option("--dt-max", sim.solver.dt_max, "time step cap");
    simulate->add_option("--t-end", sim.solver.t_end, "final time");
    simulate->add_option("--snapshot-every", sim.solver.snapshot_every, "steps between snapshots");
    simulate->add_option("--omega-ceiling", sim.solver.omega_ceiling, "blow-up guard on max|omega1|");
    simulate->add_option("--advection-order", sim.solver.advection_order,
                         "advection stencil order: 2 | 4");
    simulate->add_option("--preset", sim.solver.preset, "initial condition: rest | wall-swirl");
    simulate->add_option("--amplitude", sim.solver.amplitude, "wall-swirl amplitude");
    simulate->add_option("--ripple", sim.solver.ripple, "wall-swirl axial perturbation");
    simulate->add_option("--out", sim.out, "output directory");
    simulate->add_option("--seed", sim.seed, "recorded run seed");

    VerifyArgs ver;
    from_cfg(cfg, "gamma", ver.gamma);
    from_cfg(cfg, "T", ver.T);
    from_cfg(cfg, "delta", ver.delta);
    from_cfg(cfg, "tol", ver.tol);
    from_cfg(cfg, "trials", ver.trials);
    from_cfg(cfg, "seed", ver.seed);
    CLI::App* verify =
        app.add_subcommand("verify-families", "residuals of both exact solution families");
    verify->add_option("--config", config_path, "JSON config file (flags override)");
    verify->add_option("--gamma", ver.gamma, "scaling parameter");
    verify->add_option("--T", ver.T, "candidate blow-up time");
    verify->add_option("--delta", ver.delta, "window half-size");
    verify->add_option("--tol", ver.tol, "sup-residual tolerance");
    verify->add_option("--trials", ver.trials, "randomized parameter sets per family");
    verify->add_option("--seed", ver.seed, "RNG seed");

    ClassifyArgs cls;
    from_cfg(cfg, "gamma", cls.gamma);
    from_cfg(cfg, "tol", cls.tol);
    CLI::App* classify_cmd = app.add_subcommand("classify", "classify a profile snapshot");
    classify_cmd->add_option("--config", config_path, "JSON config file (flags override)");
    classify_cmd->add_option("file", cls.file, "profile snapshot file")->required();
    classify_cmd->add_option("--gamma", cls.gamma, "scaling parameter");
    classify_cmd->add_option("--tol", cls.tol, "classification tolerance");

    std::string conv_case;
    CLI::App* conv = app.add_subcommand("convergence", "manufactured-solution order studies");
    conv->add_option("case", conv_case, "elliptic | divergence | curl")
        ->required()
        ->check(CLI::IsMember({"elliptic", "divergence", "curl"}));

    BkmArgs bkm;
    from_cfg(cfg, "T", bkm.T);
    from_cfg(cfg, "window", bkm.window);
    CLI::App* bkm_cmd = app.add_subcommand("bkm", "vorticity sup-norm integral diagnostics");
    bkm_cmd->add_option("--config", config_path, "JSON config file (flags override)");
    bkm_cmd->add_option("csv", bkm.file, "CSV with (t, sup) columns")->required();
    bkm_cmd->add_option("--T", bkm.T, "horizon time")->required();
    bkm_cmd->add_option("--window", bkm.window, "required closeness of the last sample to T");

    ExtractArgs ext;
    from_cfg(cfg, "gamma", ext.gamma);
    from_cfg(cfg, "T", ext.T);
    from_cfg(cfg, "delta", ext.delta);
    from_cfg(cfg, "out", ext.out);
    CLI::App* extract_cmd =
        app.add_subcommand("extract", "extract self-similar profiles from snapshots");
    extract_cmd->add_option("--config", config_path, "JSON config file (flags override)");
    extract_cmd->add_option("glob", ext.glob, "snapshot file glob")->required();
    extract_cmd->add_option("--gamma", ext.gamma, "scaling parameter");
    extract_cmd->add_option("--T", ext.T, "candidate blow-up time");
    extract_cmd->add_option("--delta", ext.delta, "window half-size");
    extract_cmd->add_option("--out", ext.out, "output profile file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    try {
        if (simulate->parsed()) return do_simulate(sim);
        if (verify->parsed()) return do_verify_families(ver);
        if (classify_cmd->parsed()) return do_classify(cls);
        if (conv->parsed()) return do_convergence(conv_case);
        if (bkm_cmd->parsed()) return do_bkm(bkm);
        if (extract_cmd->parsed()) return do_extract(ext);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kUsageError;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kUsageError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kNumericalFailure;
    }
    return kUsageError;
}

}  // namespace eulerlab::cli
