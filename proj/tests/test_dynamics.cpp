#include <doctest.h>

#include <cmath>
#include <random>

#include "beamlab/dynamics.hpp"
#include "test_helpers.hpp"

using namespace beamlab;
using namespace beamlab::testing;

TEST_CASE("implicit midpoint conserves energy exactly without damping") {
    const auto sys = assemble(unit_config(), {}, build_mesh(M_PI, 8));
    std::mt19937_64 rng(1);
    const StateVector u = random_state(sys, rng);
    const double e0 = energy(sys, u);
    const StateVector u1 = step_implicit_midpoint(sys, u, 0.01);
    CHECK(std::abs(energy(sys, u1) / e0 - 1.0) < 1e-12);

    const StateVector z = step_implicit_midpoint(sys, StateVector::zero(sys.layout), 0.01);
    CHECK(z.q.norm() == 0.0);
    CHECK(z.p.norm() == 0.0);

    CHECK_THROWS_AS(step_implicit_midpoint(sys, u, 0.0), ValidationError);
}

TEST_CASE("single step satisfies the exact discrete balance") {
    const auto sys = assemble(unit_config(), {0, 1, 1, 0, 0}, build_mesh(M_PI, 8));
    std::mt19937_64 rng(2);
    const StateVector u = random_state(sys, rng);
    const MidpointStepper stepper(sys, 0.02);
    const auto r = stepper.step_with_dissipation(u);
    const double lhs = energy(sys, r.next) - energy(sys, u);
    const double rhs = -0.02 * r.midpoint_dissipation;
    CHECK(std::abs(lhs - rhs) <= 1e-10 * energy(sys, u));
}

TEST_CASE("a closed-form mode under its theorem's damping is invisible to the dampers") {
    // Equal speeds, dampers on y1_t and omega_t, initial data on the u-blocks:
    // the energy balance holds with zero dissipation.
    const auto sys = assemble(unit_config(), {0, 1, 1, 0, 0}, build_mesh(M_PI, 16));
    const auto mode = closed_form_mode(ModeFamily::T24, 1, sys.config);
    StateVector u = StateVector::zero(sys.layout);
    u.q = interpolate_mode_positions(sys, mode);
    const MidpointStepper stepper(sys, 0.01);
    const auto r = stepper.step_with_dissipation(u);
    CHECK(r.midpoint_dissipation <= 1e-24 * energy(sys, u));
    CHECK(std::abs(energy(sys, r.next) - energy(sys, u)) <= 1e-10 * energy(sys, u));
}

TEST_CASE("simulate: conservation, monotonicity and balance") {
    std::mt19937_64 rng(3);

    SUBCASE("undamped trace is flat") {
        const auto sys = assemble(unit_config(), {}, build_mesh(M_PI, 8));
        const StateVector u0 = random_initial(sys, 7, 3);
        const EnergyTrace tr = simulate(sys, u0, 1e-3, 2.0);
        REQUIRE(tr.energies.size() == 2001);
        for (double en : tr.energies) {
            CHECK(std::abs(en / tr.energies.front() - 1.0) < 1e-11);
        }
        CHECK(tr.cumulative_dissipation.back() == 0.0);
    }
    SUBCASE("damped trace is non-increasing and balanced") {
        const auto sys = assemble(unit_config(), {1, 1, 0, 0, 0}, build_mesh(M_PI, 8));
        const StateVector u0 = random_initial(sys, 8, 3);
        const EnergyTrace tr = simulate(sys, u0, 1e-3, 3.0);
        const double e0 = tr.energies.front();
        for (size_t i = 1; i < tr.energies.size(); ++i) {
            CHECK(tr.energies[i] - tr.energies[i - 1] <= 1e-12 * e0);
        }
        const double drop = e0 - tr.energies.back();
        CHECK(std::abs(drop - tr.cumulative_dissipation.back()) <= 1e-8 * e0);
        CHECK(tr.energies.back() < e0);  // strict decay for nondegenerate data
    }
    SUBCASE("trace timestamps are uniform") {
        const auto sys = assemble(unit_config(), {}, build_mesh(M_PI, 4));
        const EnergyTrace tr = simulate(sys, random_state(sys, rng), 0.25, 1.0);
        REQUIRE(tr.times.size() == 5);
        CHECK(tr.times[4] == doctest::Approx(1.0));
    }
}

TEST_CASE("unstable-mode persistence over 100 periods") {
    // Theorem hypothesis configuration: equal speeds, dampers {b,c}. The
    // interpolated sine mode lives in the u-blocks, which the dampers never
    // touch; over 100 periods of the fundamental the energy loss stays
    // far below one percent.
    const auto sys = assemble(unit_config(), {0, 1, 1, 0, 0}, build_mesh(M_PI, 64));
    const auto mode = closed_form_mode(ModeFamily::T24, 1, sys.config);
    StateVector u0 = StateVector::zero(sys.layout);
    u0.q = interpolate_mode_positions(sys, mode);
    const double period = 2.0 * M_PI / mode.lambda;
    const EnergyTrace tr = simulate(sys, u0, 0.1, 100.0 * period);
    CHECK(tr.energies.back() > 0.99 * tr.energies.front());
}

TEST_CASE("fit_decay on synthetic power laws") {
    auto synth = [](double c, double alpha) {
        EnergyTrace tr;
        for (int i = 1; i <= 200; ++i) {
            const double t = 0.1 * i;
            tr.times.push_back(t);
            tr.energies.push_back(c * std::pow(t, -alpha));
            tr.cumulative_dissipation.push_back(0.0);
        }
        return tr;
    };
    const DecayFit f1 = fit_decay(synth(1.0, 2.0 / 3.0), 1.0, 15.0);
    CHECK(f1.alpha == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(f1.r2 == doctest::Approx(1.0).epsilon(1e-12));

    const DecayFit f2 = fit_decay(synth(5.0, 0.4), 0.5, 20.0);
    CHECK(f2.alpha == doctest::Approx(0.4).epsilon(1e-10));
    CHECK(f2.c == doctest::Approx(5.0).epsilon(1e-8));

    const DecayFit f3 = fit_decay(synth(2.0, 0.0), 1.0, 10.0);
    CHECK(f3.alpha == doctest::Approx(0.0));

    SUBCASE("window errors") {
        auto tr = synth(1.0, 1.0);
        CHECK_THROWS_AS(fit_decay(tr, 19.8, 20.0), ValidationError);  // too few samples
        tr.energies[50] = 0.0;
        CHECK_THROWS_AS(fit_decay(tr, 1.0, 15.0), ValidationError);  // nonpositive energy
        CHECK_THROWS_AS(fit_decay(tr, -1.0, 15.0), ValidationError);
    }
}

TEST_CASE("random_initial is deterministic and respects smoothness") {
    const auto sys = assemble(unit_config(), {}, build_mesh(M_PI, 8));
    const StateVector a = random_initial(sys, 123, 2);
    const StateVector b = random_initial(sys, 123, 2);
    CHECK((a.q - b.q).norm() == 0.0);
    CHECK((a.p - b.p).norm() == 0.0);

    const StateVector c = random_initial(sys, 124, 2);
    CHECK((a.q - c.q).norm() > 0.0);

    CHECK(energy(sys, a) > 0.0);
    CHECK(std::isfinite(energy(sys, a)));

    CHECK_THROWS_AS(random_initial(sys, 1, 0), ValidationError);

    // smoothness 1: u-field content is a pure first sine, so interpolating it
    // reproduces coefficient * sin at every quadratic node.
    const StateVector s1 = random_initial(sys, 55, 1);
    const double hstep = sys.mesh.spacing();
    const double amp = s1.q(sys.layout.off_u1) / std::sin(0.5 * hstep);
    for (int j = 1; j <= sys.layout.quad_count; ++j) {
        CHECK(s1.q(sys.layout.off_u1 + j - 1) ==
              doctest::Approx(amp * std::sin(0.5 * hstep * j)).epsilon(1e-10));
    }
}

TEST_CASE("simulate validates its inputs") {
    const auto sys = assemble(unit_config(), {}, build_mesh(M_PI, 4));
    std::mt19937_64 rng(9);
    const StateVector u = random_state(sys, rng);
    CHECK_THROWS_AS(simulate(sys, u, -0.1, 1.0), ValidationError);
    CHECK_THROWS_AS(simulate(sys, u, 0.5, 0.1), ValidationError);
}
