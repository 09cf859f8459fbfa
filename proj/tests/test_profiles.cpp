#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "eulerlab/profiles.hpp"

using namespace eulerlab;

namespace {

std::shared_ptr<const ProfileSet> perturb(std::shared_ptr<const ProfileSet> base,
                                          ProfileComponent comp, double coeff, int pow_r,
                                          int pow_z) {
    return std::make_shared<PerturbedProfileSet>(
        std::move(base), std::vector<ProfileTerm>{{comp, coeff, pow_r, pow_z}});
}

}  // namespace

TEST_CASE("trivial family evaluation") {
    const auto zero = family_a(0.0, 0.0);
    const ProfileValues z = zero->eval(-3.0, 4.0);
    CHECK(z.swirl == 0.0);
    CHECK(z.vort == 0.0);
    CHECK(z.stream == 0.0);

    const auto fa = family_a(1.0, 2.0);
    const ProfileValues v = fa->eval(0.0, 3.0);
    CHECK(v.stream == 5.0);
    CHECK(v.stream_R == 0.0);
    CHECK(v.stream_Z == 1.0);
    CHECK(v.stream_RR == 0.0);
    CHECK(v.stream_ZZ == 0.0);
}

TEST_CASE("stationary-swirl family evaluation") {
    const auto fb = family_b(2.5, -1.0, 2.9133);
    CHECK(fb->eval(-1.0, 7.0).swirl == 2.5);  // (-R) = 1
    CHECK(fb->eval(-4.0, 0.0).stream == -1.0);
    CHECK(fb->eval(-4.0, 0.0).vort == 0.0);

    // the profile exponent equals the physical-space exponent (gamma-2)/(2 gamma)
    const double gamma = 2.9133;
    const double lhs = 0.5 - 1.0 / gamma;
    const double rhs = (gamma - 2.0) / (2.0 * gamma);
    CHECK(lhs == doctest::Approx(0.15675).epsilon(1e-4));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));

    const auto flat = family_b(3.0, 0.0, 2.0);
    CHECK(flat->eval(-2.0, 0.0).swirl == 3.0);
    CHECK(flat->eval(0.0, 0.0).swirl == 3.0);  // no singular locus at gamma = 2
    CHECK_FALSE(flat->singular_at(0.0, 0.0));

    const auto steep = family_b(1.0, 0.0, 1.0);
    CHECK(steep->singular_at(0.0, 5.0));
    CHECK_THROWS_AS(steep->eval(0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(steep->eval(0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(family_b(1.0, 0.0, 0.0), std::domain_error);
}

TEST_CASE("both families null the dominant groups exactly or to 1e-12") {
    const std::vector<RZPoint> pts = default_residual_lattice().points();
    for (double gamma : {0.4, 1.0, 2.0, 2.9133, 5.0}) {
        const auto fa = family_a(1.3, -0.7);
        CHECK(residual_group1(*fa, gamma, pts).max_sup() == 0.0);
        CHECK(residual_group2(*fa, pts).max_sup() == 0.0);

        const auto fb = family_b(-1.8, 2.2, gamma);
        CHECK(residual_group1(*fb, gamma, pts).max_sup() <= 1e-12);
        CHECK(residual_group2(*fb, pts).max_sup() == 0.0);
    }
}

TEST_CASE("quadratic stream perturbation leaves an exact Poisson residual") {
    const std::vector<RZPoint> pts = default_residual_lattice().points();
    const auto ps = perturb(family_a(1.0, 0.0), ProfileComponent::stream, 0.1, 2, 0);
    const ResidualReport rep = residual_group1(*ps, 2.9133, pts);
    CHECK(rep.equations[2].equation == "stream-limit");
    CHECK(rep.equations[2].sup == 0.2);  // -lap(0.1 R^2) = -0.2 exactly

    const auto lin = perturb(family_a(1.0, 0.0), ProfileComponent::stream, 0.1, 1, 0);
    const ResidualReport rep2 = residual_group2(*lin, pts);
    CHECK(rep2.equations[2].equation == "stream-gradient");
    CHECK(rep2.equations[2].sup == 0.1);
}

TEST_CASE("time-dependent residuals vanish on both families") {
    const SelfSimilarParams p(2.9133, 1.0, 0.1);
    const std::vector<RZPoint> pts = default_residual_lattice().points();
    for (double t : {p.T - 0.8 * p.delta, p.T - 0.5 * p.delta, p.T - 0.3 * p.delta}) {
        const auto fa = family_a(1.1, 0.4);
        const ResidualReport ra = residual_timedependent(*fa, p, t, pts);
        CHECK(ra.max_sup() <= 1e-12);
        CHECK(ra.samples_evaluated > 0);

        const auto fb = family_b(1.6, -0.9, p.gamma);
        CHECK(residual_timedependent(*fb, p, t, pts).max_sup() <= 1e-12);
    }
    CHECK_THROWS_AS(residual_timedependent(*family_a(1, 0), p, p.T, pts), std::domain_error);
    CHECK_THROWS_AS(residual_timedependent(*family_a(1, 0), p, p.T - 0.5, pts),
                    std::domain_error);
}

TEST_CASE("retained wall term appears in the perturbed stream residual") {
    // Psi -> b Z + c + R leaves only the wall term in the full stream
    // equation: residual = -3 (T-t)^(gamma-1) / (1 + R (T-t)^gamma).
    const SelfSimilarParams p(2.0, 1.0, 0.1);
    const double t = p.T - 0.05;
    const auto ps = perturb(family_a(0.7, 0.3), ProfileComponent::stream, 1.0, 1, 0);
    const std::vector<RZPoint> pts{{-1.0, 0.0}, {-4.0, 2.0}};
    const ResidualReport rep = residual_timedependent(*ps, p, t, pts);
    REQUIRE(rep.samples_evaluated == 2);

    const double tau = p.T - t;
    double expect = 0.0;
    for (const RZPoint& pt : pts) {
        const double wall = 1.0 + pt.R * std::pow(tau, p.gamma);
        expect = std::max(expect, std::abs(3.0 * std::pow(tau, p.gamma - 1.0) / wall));
    }
    CHECK(rep.equations[2].sup == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("swirl family satisfies its radial ODE pointwise") {
    for (double gamma : {0.5, 1.0, 2.0, 2.9133, 5.0}) {
        const auto fb = family_b(1.0, 0.0, gamma);
        for (int k = 0; k <= 200; ++k) {
            const double x = std::exp(std::log(1e-3) + k * (std::log(10.0) - std::log(1e-3)) / 200);
            const ProfileValues v = fb->eval(-x, 0.0);
            const double residual = (1.0 - 0.5 * gamma) * v.swirl + gamma * (-x) * v.swirl_R;
            CHECK(std::abs(residual) <= 1e-12 * std::max(1.0, std::abs(v.swirl)));
        }
    }
}

TEST_CASE("reconstructed trivial-family stream matches its closed form") {
    const SelfSimilarParams p(2.9133, 1.0, 0.1);
    const double b = 1.4, c = -0.6;
    const SelfSimilarField field(family_a(b, c), p);
    for (double t : {p.T - 0.09, p.T - 0.04}) {
        const double tau = p.T - t;
        for (double r : {0.92, 0.97}) {
            for (double z : {-0.05, 0.0, 0.03}) {
                const double expect = b * std::pow(tau, -1.0 + p.gamma) * z +
                                      c * std::pow(tau, -1.0 + 2.0 * p.gamma);
                CHECK(field.psi1(r, z, t) ==
                      doctest::Approx(expect).epsilon(1e-12));
                CHECK(field.u1(r, z, t) == 0.0);
                CHECK(field.omega1(r, z, t) == 0.0);
            }
        }
    }
    CHECK_THROWS_AS(field.u1(0.5, 0.0, p.T - 0.05), std::domain_error);
    CHECK_THROWS_AS(field.u1(0.95, 0.0, p.T - 0.5), std::domain_error);
}

TEST_CASE("reconstructed swirl-family velocity is time independent") {
    const SelfSimilarParams p(2.9133, 1.0, 0.1);
    const double kappa = 1.9;
    const SelfSimilarField field(family_b(kappa, 0.8, p.gamma), p);
    for (double r : {0.905, 0.95, 0.999}) {
        const double u_ref = field.u1(r, 0.0, p.T - 0.09);
        CHECK(u_ref == doctest::Approx(kappa * std::pow(1.0 - r, (p.gamma - 2.0) /
                                                                      (2.0 * p.gamma)))
                           .epsilon(1e-12));
        for (double t : {p.T - 0.06, p.T - 0.02, p.T - 0.005})
            CHECK(std::abs(field.u1(r, 0.0, t) - u_ref) <= 1e-13 * std::max(1.0, std::abs(u_ref)));
    }
}

TEST_CASE("zero profiles reconstruct to zero fields") {
    const SelfSimilarParams p(1.0, 1.0, 0.1);
    const SelfSimilarField field(family_a(0.0, 0.0), p);
    CHECK(field.u1(0.95, 0.0, p.T - 0.05) == 0.0);
    CHECK(field.omega1(0.95, 0.0, p.T - 0.05) == 0.0);
    CHECK(field.psi1(0.95, 0.0, p.T - 0.05) == 0.0);
}

TEST_CASE("profile extraction round-trips bilinear-exact families") {
    const GridSpec grid(64, 64, 1.0);
    const ProfileLattice lattice = default_residual_lattice();
    const std::vector<double> times{0.91, 0.93, 0.95, 0.97, 0.98};

    SUBCASE("trivial family") {
        const SelfSimilarParams p(2.9133, 1.0, 0.1);
        const SelfSimilarField field(family_a(1.3, -0.4), p);
        std::vector<State> snaps;
        for (double t : times) snaps.push_back(sample_ansatz_state(field, grid, t));
        const ExtractionResult res = extract_profiles(snaps, p, lattice.R, lattice.Z);
        CHECK(res.collapse_metric <= 1e-10);
        CHECK(res.dropped_points == 0);
        const ProfileValues v = res.profiles.eval(lattice.R[5], lattice.Z[7]);
        CHECK(v.stream == doctest::Approx(1.3 * lattice.Z[7] - 0.4).epsilon(1e-10));
        CHECK(std::abs(v.swirl) <= 1e-13);
    }

    SUBCASE("swirl family at the exponent-free parameter") {
        const SelfSimilarParams p(2.0, 1.0, 0.1);
        const SelfSimilarField field(family_b(1.7, 0.9, p.gamma), p);
        std::vector<State> snaps;
        for (double t : times) snaps.push_back(sample_ansatz_state(field, grid, t));
        const ExtractionResult res = extract_profiles(snaps, p, lattice.R, lattice.Z);
        CHECK(res.collapse_metric <= 1e-10);
        const ProfileValues v = res.profiles.eval(lattice.R[3], lattice.Z[16]);
        CHECK(v.swirl == doctest::Approx(1.7).epsilon(1e-12));
        CHECK(v.stream == doctest::Approx(0.9).epsilon(1e-12));
    }
}

TEST_CASE("fractional-exponent extraction matches to interpolation error") {
    // gamma = 1 keeps the window resolvable on a fine grid; the recovered
    // swirl profile agrees with kappa (-R)^(-1/2) to bilinear accuracy while
    // the collapse metric is interpolation-dominated.
    const SelfSimilarParams p(1.0, 1.0, 0.1);
    const double kappa = 1.2;
    const SelfSimilarField field(family_b(kappa, 0.0, p.gamma), p);
    const GridSpec grid(512, 64, 1.0);
    std::vector<State> snaps;
    for (double t : {0.92, 0.94, 0.96}) snaps.push_back(sample_ansatz_state(field, grid, t));

    const std::vector<double> rs = log_spaced_radial_nodes(12, -1.0, -0.5);
    const std::vector<double> zs = linear_axial_nodes(9, -0.5, 0.5);
    const ExtractionResult res = extract_profiles(snaps, p, rs, zs);
    CHECK(res.collapse_metric <= 0.05);
    for (double r : rs) {
        const double expect = kappa * std::pow(-r, 0.5 - 1.0 / p.gamma);
        CHECK(res.profiles.eval(r, 0.0).swirl == doctest::Approx(expect).epsilon(0.02));
    }
}

TEST_CASE("mixing snapshots from different families breaks the collapse") {
    const GridSpec grid(64, 64, 1.0);
    const ProfileLattice lattice = default_residual_lattice();
    const SelfSimilarParams p(2.0, 1.0, 0.1);
    const SelfSimilarField fa(family_a(1.0, 0.5), p);
    const SelfSimilarField fb(family_b(1.5, 0.5, p.gamma), p);
    const std::vector<State> snaps{
        sample_ansatz_state(fa, grid, 0.92), sample_ansatz_state(fa, grid, 0.95),
        sample_ansatz_state(fb, grid, 0.96), sample_ansatz_state(fb, grid, 0.98)};
    const ExtractionResult res = extract_profiles(snaps, p, lattice.R, lattice.Z);
    CHECK(res.collapse_metric >= 1e-2);
}

TEST_CASE("residual reports keep sup >= rms >= 0") {
    const std::vector<RZPoint> pts = default_residual_lattice().points();
    const auto ps = perturb(family_a(1.0, 0.0), ProfileComponent::stream, 0.3, 2, 1);
    for (const ResidualReport& rep :
         {residual_group1(*ps, 2.9133, pts), residual_group2(*ps, pts)}) {
        for (const EquationResidual& eq : rep.equations) {
            CHECK(eq.rms >= 0.0);
            CHECK(eq.sup >= eq.rms);
        }
    }
}

TEST_CASE("gamma mismatch breaks the collapse") {
    const GridSpec grid(64, 64, 1.0);
    const ProfileLattice lattice = default_residual_lattice();
    const SelfSimilarParams truth(2.9133, 1.0, 0.1);
    const SelfSimilarField field(family_a(1.0, 0.5), truth);
    std::vector<State> snaps;
    for (double t : {0.91, 0.93, 0.95, 0.97, 0.98})
        snaps.push_back(sample_ansatz_state(field, grid, t));

    const SelfSimilarParams wrong(2.0, 1.0, 0.1);
    const ExtractionResult res = extract_profiles(snaps, wrong, lattice.R, lattice.Z);
    CHECK(res.collapse_metric >= 1e-2);
}

TEST_CASE("extraction input validation") {
    const GridSpec grid(32, 32, 1.0);
    const SelfSimilarParams p(1.0, 1.0, 0.05);
    const SelfSimilarField field(family_a(1.0, 0.0), p);
    const State one = sample_ansatz_state(field, grid, 0.97);
    CHECK_THROWS_AS(
        extract_profiles(std::vector<State>{one}, p, log_spaced_radial_nodes(8, -2, -0.5),
                         linear_axial_nodes(9, -1, 1)),
        std::invalid_argument);

    std::vector<State> snaps{one, sample_ansatz_state(field, grid, 0.98)};
    // all radial nodes map outside 1-delta < r < 1 for these parameters
    CHECK_THROWS_AS(
        extract_profiles(snaps, p, log_spaced_radial_nodes(8, -10.0, -5.0),
                         linear_axial_nodes(9, -0.5, 0.5)),
        std::invalid_argument);

    const State stale = sample_ansatz_state(field, grid, 0.5);
    std::vector<State> bad{stale, snaps[0]};
    CHECK_THROWS_AS(extract_profiles(bad, p, log_spaced_radial_nodes(8, -2, -0.5),
                                     linear_axial_nodes(9, -1, 1)),
                    std::invalid_argument);
}

TEST_CASE("classifier recovers grid-sampled families") {
    const ProfileLattice lattice = classification_lattice();
    const std::vector<RZPoint> pts = lattice.points();

    const GridProfileSet ga = sample_profiles(*family_a(1.5, -0.5), lattice.R, lattice.Z);
    const Classification ca = classify(ga, 2.9133, 1e-6, pts);
    REQUIRE(ca.verdict == Classification::Verdict::family_a);
    CHECK(std::abs(ca.b - 1.5) <= 1e-8);
    CHECK(std::abs(ca.c + 0.5) <= 1e-8);

    const GridProfileSet gb = sample_profiles(*family_b(2.0, 3.0, 2.9133), lattice.R, lattice.Z);
    const Classification cb = classify(gb, 2.9133, 1e-6, pts);
    REQUIRE(cb.verdict == Classification::Verdict::family_b);
    CHECK(std::abs(cb.kappa - 2.0) <= 1e-6);
    CHECK(std::abs(cb.c - 3.0) <= 1e-12);

    // constant swirl at gamma = 2 is still the swirl family
    const GridProfileSet gflat = sample_profiles(*family_b(-1.1, 0.2, 2.0), lattice.R, lattice.Z);
    const Classification cflat = classify(gflat, 2.0, 1e-6, pts);
    REQUIRE(cflat.verdict == Classification::Verdict::family_b);
    CHECK(std::abs(cflat.kappa + 1.1) <= 1e-6);
}

TEST_CASE("classifier rejects perturbed inputs with named checks") {
    const ProfileLattice lattice = classification_lattice();
    const std::vector<RZPoint> pts = lattice.points();

    const auto tilted = perturb(family_a(1.0, 0.0), ProfileComponent::stream, 0.1, 1, 0);
    const GridProfileSet g1 = sample_profiles(*tilted, lattice.R, lattice.Z);
    const Classification c1 = classify(g1, 2.9133, 1e-6, pts);
    REQUIRE(c1.verdict == Classification::Verdict::not_solution);
    CHECK(c1.failed_check == "stream-gradient");
    CHECK(c1.failed_residual == doctest::Approx(0.1).epsilon(1e-9));

    const auto bent = perturb(family_a(1.0, 0.0), ProfileComponent::stream, 0.1, 0, 2);
    const Classification c2 =
        classify(*bent, 2.9133, 1e-6, pts);
    REQUIRE(c2.verdict == Classification::Verdict::not_solution);
    CHECK(c2.failed_check == "stream-poisson");

    // consistent quadratic stream with matching vorticity survives until the
    // quadratic-coefficient rejection
    const auto quad = std::make_shared<PerturbedProfileSet>(
        family_a(1.0, 0.0),
        std::vector<ProfileTerm>{{ProfileComponent::stream, 0.1, 0, 2},
                                 {ProfileComponent::vorticity, -0.2, 0, 0}});
    const Classification c3 = classify(*quad, 2.9133, 1e-6, pts);
    REQUIRE(c3.verdict == Classification::Verdict::not_solution);
    CHECK(c3.failed_check == "quadratic-stream");
    CHECK(c3.failed_residual == doctest::Approx(0.1).epsilon(1e-9));

    // with b = 0 the swirl branch is reached and the Z-dependence check fires
    const auto swirled = perturb(family_a(0.0, 0.5), ProfileComponent::swirl, 0.1, 0, 1);
    const Classification c4 = classify(*swirled, 2.9133, 1e-6, pts);
    REQUIRE(c4.verdict == Classification::Verdict::not_solution);
    CHECK(c4.failed_check == "swirl-z-dependence");

    // with b != 0 the same perturbation is rejected on the axial gradient
    const auto tilted_swirl = perturb(family_a(1.0, 0.0), ProfileComponent::swirl, 0.1, 0, 1);
    const Classification c4b = classify(*tilted_swirl, 2.9133, 1e-6, pts);
    REQUIRE(c4b.verdict == Classification::Verdict::not_solution);
    CHECK(c4b.failed_check == "stream-axial-gradient");

    const auto off_power = perturb(family_b(2.0, 3.0, 2.9133), ProfileComponent::swirl, 0.1, 1, 0);
    const Classification c5 = classify(*off_power, 2.9133, 1e-6, pts);
    REQUIRE(c5.verdict == Classification::Verdict::not_solution);

    const auto leaky = perturb(family_b(2.0, 3.0, 2.9133), ProfileComponent::stream, 0.1, 0, 1);
    const Classification c6 = classify(*leaky, 2.9133, 1e-6, pts);
    REQUIRE(c6.verdict == Classification::Verdict::not_solution);
    CHECK(c6.failed_check == "stream-axial-gradient");
}

TEST_CASE("classifier demands well-spread samples") {
    std::vector<RZPoint> few;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) few.push_back({-1.0 - i, -2.0 + j});
    CHECK_THROWS_AS(classify(*family_a(1, 0), 2.0, 1e-6, few), std::invalid_argument);
    const std::vector<RZPoint> pts = default_residual_lattice().points();
    CHECK_THROWS_AS(classify(*family_a(1, 0), -1.0, 1e-6, pts), std::domain_error);
    CHECK_THROWS_AS(classify(*family_a(1, 0), 2.0, 0.0, pts), std::invalid_argument);
}

TEST_CASE("single-term perturbations are detectable at half their size") {
    const std::vector<RZPoint> pts = default_residual_lattice().points();
    const double gamma = 2.9133;
    const auto base = family_a(1.0, 0.5);

    const std::vector<ProfileTerm> cases{
        {ProfileComponent::stream, 0.0, 1, 0}, {ProfileComponent::stream, 0.0, 2, 0},
        {ProfileComponent::stream, 0.0, 0, 2}, {ProfileComponent::stream, 0.0, 1, 1},
        {ProfileComponent::swirl, 0.0, 0, 0},  {ProfileComponent::swirl, 0.0, 0, 1},
        {ProfileComponent::vorticity, 0.0, 0, 0}, {ProfileComponent::vorticity, 0.0, 0, 1}};

    for (double eps : {0.1, 1e-3}) {
        for (ProfileTerm term : cases) {
            term.coeff = eps;
            const PerturbedProfileSet ps(base, {term});
            const double worst = std::max(residual_group1(ps, gamma, pts).max_sup(),
                                          residual_group2(ps, pts).max_sup());
            CHECK(worst >= 0.5 * eps);
        }
    }
}

TEST_CASE("grid-backed residuals stay within the stencil tolerance") {
    const std::vector<double> rs = linear_axial_nodes(201, -5.0, -0.5);
    const std::vector<double> zs = linear_axial_nodes(201, -5.0, 5.0);
    const double h = 0.05;  // max lattice spacing

    std::vector<RZPoint> pts;
    for (double r : rs)
        for (double z : zs) pts.push_back({r, z});

    const GridProfileSet ga = sample_profiles(*family_a(1.2, -0.3), rs, zs);
    CHECK(residual_group1(ga, 2.9133, pts).max_sup() <= 10 * h * h);
    CHECK(residual_group2(ga, pts).max_sup() <= 10 * h * h);

    const GridProfileSet gb = sample_profiles(*family_b(1.0, 0.7, 2.9133), rs, zs);
    CHECK(residual_group1(gb, 2.9133, pts).max_sup() <= 10 * h * h);
    CHECK(residual_group2(gb, pts).max_sup() <= 10 * h * h);
}

TEST_CASE("grid profile queries outside the lattice hull fail") {
    const GridProfileSet g = sample_profiles(*family_a(1.0, 0.0),
                                             log_spaced_radial_nodes(16, -4.0, -0.5),
                                             linear_axial_nodes(17, -2.0, 2.0));
    CHECK_THROWS_AS(g.eval(-5.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(g.eval(-1.0, 3.0), std::domain_error);
    CHECK_NOTHROW(g.eval(-1.234, 0.567));  // interior interpolation
}

TEST_CASE("lattice constructors reject bad input") {
    CHECK_THROWS_AS(log_spaced_radial_nodes(8, -0.1, -10.0), std::invalid_argument);
    CHECK_THROWS_AS(log_spaced_radial_nodes(8, -1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(linear_axial_nodes(1, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(GridProfileSet({-1.0, -0.5, 0.5}, {0.0, 1.0, 2.0},
                                   std::vector<double>(9, 0.0), std::vector<double>(9, 0.0),
                                   std::vector<double>(9, 0.0)),
                    std::invalid_argument);
}
