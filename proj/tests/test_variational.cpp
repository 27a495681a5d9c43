#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "gpwave/variational.hpp"

using namespace gpwave;
using Catch::Matchers::WithinAbs;

namespace {

PhysicsParams make_params(double mass, double hbar, double g, double omega2) {
    PhysicsParams p;
    p.mass = mass;
    p.hbar = hbar;
    p.g = g;
    p.trap = ConstantTrap{omega2};
    return p;
}

}  // namespace

TEST_CASE("initial state maps velocity to momentum and seeds the phase") {
    const auto params = make_params(1.5, 2.0, 0.0, 1.0);
    const auto s = VariationalState::initial(2.0, 3.0, 0.8, 0.1, params);
    CHECK(s.t == 0.0);
    CHECK(s.q == 2.0);
    CHECK(s.p == 4.5);               // m * v0
    CHECK(s.sigma == 0.8);
    CHECK(s.sigma_dot == 0.1);
    CHECK_THAT(s.s0, WithinAbs(4.5, 1e-15));  // m v0 x0 / hbar
}

TEST_CASE("reduced equations at a frozen reference state") {
    // m = hbar = 1, omega^2 = 1, q = p = 0, sigma = 1, sigma_dot = 0, g = 1.
    const auto params = make_params(1.0, 1.0, 1.0, 1.0);
    VariationalState s;
    const auto d = derivatives(s, params, InteractionVariant{2.0});
    // sigma_ddot = 2 - 2 - 4/sqrt(pi)
    CHECK_THAT(d.sigma_ddot, WithinAbs(-2.256758334191025, 1e-14));
    // s0_dot = -1/2 - 1/sqrt(pi)
    CHECK_THAT(d.s0_dot, WithinAbs(-1.0641895835477563, 1e-14));
    CHECK(d.q_dot == 0.0);
    CHECK(d.p_dot == 0.0);

    // Center equations for a generic state.
    VariationalState moving;
    moving.q = 0.25;
    moving.p = 0.6;
    const auto dm = derivatives(moving, make_params(2.0, 1.0, 0.0, 3.0),
                                InteractionVariant{2.0});
    CHECK_THAT(dm.q_dot, WithinAbs(0.3, 1e-15));       // p/m
    CHECK_THAT(dm.p_dot, WithinAbs(-1.5, 1e-15));      // -m omega^2 q
}

TEST_CASE("width fixed point is stationary to machine precision") {
    // g = 0, omega^2 = 4: sigma* = hbar/(m omega) = 1/2 gives sigma_ddot = 0 exactly.
    const auto params = make_params(1.0, 1.0, 0.0, 4.0);
    VariationalState s;
    s.sigma = 0.5;
    const auto d = derivatives(s, params, InteractionVariant{2.0});
    CHECK(d.sigma_ddot == 0.0);
}

TEST_CASE("free-particle closed form satisfies the width equation") {
    // sigma(t) = sigma0 (1 + (hbar t/(m sigma0))^2) has constant sigma_ddot.
    const double m = 1.3, hbar = 0.7, sigma0 = 0.9;
    const auto params = make_params(m, hbar, 0.0, 0.0);
    const double sddot_exact = 2.0 * hbar * hbar / (m * m * sigma0);
    for (const double t : {0.0, 0.5, 1.0, 2.0, 3.7}) {
        const double r = hbar * t / (m * sigma0);
        VariationalState s;
        s.t = t;
        s.sigma = sigma0 * (1.0 + r * r);
        s.sigma_dot = 2.0 * hbar * hbar * t / (m * m * sigma0);
        const auto d = derivatives(s, params, InteractionVariant{2.0});
        CHECK_THAT(d.sigma_ddot, WithinAbs(sddot_exact, 1e-12));
    }
}

TEST_CASE("center motion decouples from width and interaction") {
    const auto run = [](double g, double sigma0) {
        const auto params = make_params(1.0, 1.0, g, 2.0);
        const auto init = VariationalState::initial(0.4, -0.3, sigma0, 0.0, params);
        return propagate(init, params, InteractionVariant{2.0}, 3.0, 1e-2,
                         IntegratorMethod::rk4());
    };
    const auto a = run(0.0, 1.0);
    const auto b = run(5.0, 2.5);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].q == b[i].q);  // bit-identical: the (q, p) pair never reads sigma or g
        CHECK(a[i].p == b[i].p);
    }
}

TEST_CASE("a forward-backward step pair returns to the start") {
    const auto params = make_params(1.0, 1.0, 1.0, 1.5);
    const InteractionVariant variant{2.0};
    VariationalState s;
    s.t = 5.0;  // keep the return leg clear of the t >= 0 domain edge
    s.q = 0.8;
    s.p = -0.2;
    s.sigma = 1.4;
    s.sigma_dot = 0.3;
    const VariationalState start = s;
    const double dt = 1e-2;
    for (int i = 0; i < 100; ++i) s = detail::rk4_step(s, params, variant, dt);
    for (int i = 0; i < 100; ++i) s = detail::rk4_step(s, params, variant, -dt);
    CHECK_THAT(s.q, WithinAbs(start.q, 1e-10));
    CHECK_THAT(s.p, WithinAbs(start.p, 1e-10));
    // the width equation is nonlinear, so the forward/backward error only
    // cancels at leading order; ~1e-8 remains over 100 step pairs
    CHECK_THAT(s.sigma, WithinAbs(start.sigma, 1e-7));
}

TEST_CASE("stationary ground state holds its width and accumulates phase") {
    // omega = 1, sigma0 = hbar/(m omega) = 1: every derivative but s0 vanishes,
    // and dS0/dt = -omega/2.
    const auto params = make_params(1.0, 1.0, 0.0, 1.0);
    const auto init = VariationalState::initial(0.0, 0.0, 1.0, 0.0, params);
    const auto series = propagate(init, params, InteractionVariant{2.0}, 10.0, 1e-3,
                                  IntegratorMethod::rk4(), 100);
    const auto& last = series.back();
    CHECK_THAT(last.t, WithinAbs(10.0, 1e-12));
    CHECK(last.q == 0.0);
    CHECK(last.sigma == 1.0);    // the fixed point is exact in floating point
    CHECK(last.sigma_dot == 0.0);
    CHECK_THAT(last.s0, WithinAbs(-5.0, 1e-10));
}

TEST_CASE("free spreading matches sigma(t) = 1 + t^2") {
    const auto params = make_params(1.0, 1.0, 0.0, 0.0);
    const auto init = VariationalState::initial(0.0, 0.0, 1.0, 0.0, params);
    const auto series = propagate(init, params, InteractionVariant{2.0}, 2.0, 1e-3,
                                  IntegratorMethod::rk4(), 100);
    for (const auto& s : series)
        CHECK_THAT(s.sigma, WithinAbs(1.0 + s.t * s.t, 1e-8));
    CHECK_THAT(series.back().sigma, WithinAbs(5.0, 1e-8));
}

TEST_CASE("halving the step shrinks the width error fourth-order") {
    // Breathing mode: g = 0, omega = 1, sigma0 = 2 has the closed form
    // sigma(t) = 1.25 + 0.75 cos(2t).
    const auto params = make_params(1.0, 1.0, 0.0, 1.0);
    const auto init = VariationalState::initial(0.0, 0.0, 2.0, 0.0, params);
    const auto err = [&](double dt) {
        const auto series = propagate(init, params, InteractionVariant{2.0}, 1.0, dt,
                                      IntegratorMethod::rk4());
        const double exact = 1.25 + 0.75 * std::cos(2.0);
        return std::abs(series.back().sigma - exact);
    };
    const double e1 = err(0.05);
    const double e2 = err(0.025);
    REQUIRE(e2 > 0.0);
    const double ratio = e1 / e2;
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("adaptive integration agrees with a fine fixed-step run") {
    PhysicsParams params = make_params(1.0, 1.0, 0.5, 1.0);
    params.trap = ModulatedTrap{1.0, 0.2, 2.0};
    const auto init = VariationalState::initial(0.3, 0.1, 1.2, 0.0, params);
    const auto ref = propagate(init, params, InteractionVariant{2.0}, 5.0, 1e-4,
                               IntegratorMethod::rk4(), 50000);
    const auto adaptive = propagate(init, params, InteractionVariant{2.0}, 5.0, 1e-2,
                                    IntegratorMethod::rk45(1e-10), 1000000);
    CHECK_THAT(adaptive.back().t, WithinAbs(5.0, 1e-12));
    CHECK_THAT(adaptive.back().q, WithinAbs(ref.back().q, 1e-6));
    CHECK_THAT(adaptive.back().sigma, WithinAbs(ref.back().sigma, 1e-6));
    CHECK_THAT(adaptive.back().s0, WithinAbs(ref.back().s0, 1e-6));
}

TEST_CASE("sampling contract: first, every k-th, and final states") {
    const auto params = make_params(1.0, 1.0, 0.0, 1.0);
    const auto init = VariationalState::initial(0.0, 0.0, 1.0, 0.0, params);
    const auto series = propagate(init, params, InteractionVariant{2.0}, 0.1, 0.01,
                                  IntegratorMethod::rk4(), 3);
    // 10 steps, sampled at 0, 3, 6, 9, and the final 10th.
    REQUIRE(series.size() == 5);
    CHECK(series[0].t == 0.0);
    CHECK_THAT(series[1].t, WithinAbs(0.03, 1e-15));
    CHECK_THAT(series[2].t, WithinAbs(0.06, 1e-15));
    CHECK_THAT(series[3].t, WithinAbs(0.09, 1e-15));
    CHECK_THAT(series[4].t, WithinAbs(0.10, 1e-15));
}

TEST_CASE("velocity field is linear with slope sigma_dot/(2 sigma)") {
    const auto params = make_params(2.0, 1.0, 0.0, 1.0);
    VariationalState s;
    s.q = 0.5;
    s.p = 0.8;
    s.sigma = 2.0;
    s.sigma_dot = 0.6;
    CHECK_THAT(velocity_field(s, params, 0.5), WithinAbs(0.4, 1e-15));  // p/m at center
    CHECK_THAT(velocity_field(s, params, 1.5), WithinAbs(0.4 + 0.15, 1e-15));
    // Linearity: v(q + 2d) - qdot = 2 (v(q + d) - qdot) for any d.
    const double qdot = s.p / params.mass;
    for (const double d : {0.1, -0.7, 2.3}) {
        const double lhs = velocity_field(s, params, s.q + 2.0 * d) - qdot;
        const double rhs = 2.0 * (velocity_field(s, params, s.q + d) - qdot);
        CHECK_THAT(lhs, WithinAbs(rhs, 1e-12));
    }
}

TEST_CASE("pathlines ride the packet width") {
    const auto params = make_params(1.0, 1.0, 0.0, 0.0);
    const auto init = VariationalState::initial(0.0, 0.0, 1.0, 0.0, params);
    const auto series = propagate(init, params, InteractionVariant{2.0}, 1.0, 1e-3,
                                  IntegratorMethod::rk4(), 100);
    const auto traj = bohmian_trajectories({0.0, 1.0}, series);
    REQUIRE(traj.x.size() == 2);
    REQUIRE(traj.x[0].size() == series.size());
    // t = 0: every pathline starts at its seed.
    CHECK(traj.x[0].front() == 0.0);
    CHECK(traj.x[1].front() == 1.0);
    // The center seed rides the packet center.
    for (std::size_t i = 0; i < series.size(); ++i)
        CHECK(traj.x[0][i] == series[i].q);
    // Free spreading: sigma(1) = 2, so the unit seed sits at sqrt(2).
    CHECK_THAT(traj.x[1].back(), WithinAbs(std::numbers::sqrt2, 1e-6));
}

TEST_CASE("pathlines preserve seed ordering") {
    const auto params = make_params(1.0, 1.0, 0.0, 1.0);
    const auto init = VariationalState::initial(0.2, 0.5, 2.0, 0.0, params);
    const auto series = propagate(init, params, InteractionVariant{2.0}, 6.0, 1e-2,
                                  IntegratorMethod::rk4(), 10);
    std::mt19937 rng(20240817u);
    std::uniform_real_distribution<double> seed_dist(-3.0, 3.0);
    std::vector<double> seeds(9);
    for (auto& s : seeds) s = seed_dist(rng);
    std::sort(seeds.begin(), seeds.end());
    const auto traj = bohmian_trajectories(seeds, series);
    for (std::size_t k = 0; k + 1 < seeds.size(); ++k)
        for (std::size_t i = 0; i < series.size(); ++i)
            CHECK(traj.x[k][i] < traj.x[k + 1][i]);
}

TEST_CASE("expansion coefficients at the packet center") {
    SECTION("quantum potential, frozen values at sigma = 1") {
        const auto params = make_params(1.0, 1.0, 0.0, 1.0);
        VariationalState s;
        const auto c = taylor_coefficients(s, params);
        CHECK_THAT(c.v_qu_0, WithinAbs(0.5, 1e-15));
        CHECK(c.v_qu_1 == 0.0);
        CHECK_THAT(c.v_qu_2, WithinAbs(-1.0, 1e-15));
    }
    SECTION("trap potential matches centered finite differences") {
        const double m = 1.0, w2 = 4.0, q = 0.5;
        const auto params = make_params(m, 1.0, 0.0, w2);
        VariationalState s;
        s.q = q;
        const auto c = taylor_coefficients(s, params);
        CHECK_THAT(c.v_0, WithinAbs(0.5, 1e-14));
        CHECK_THAT(c.v_1, WithinAbs(2.0, 1e-14));
        CHECK_THAT(c.v_2, WithinAbs(4.0, 1e-14));
        const auto V = [&](double x) { return 0.5 * m * w2 * x * x; };
        const double h = 1e-3;
        CHECK_THAT(c.v_0, WithinAbs(V(q), 1e-12));
        CHECK_THAT(c.v_1, WithinAbs((V(q + h) - V(q - h)) / (2.0 * h), 1e-6 * c.v_1));
        CHECK_THAT(c.v_2,
                   WithinAbs((V(q + h) - 2.0 * V(q) + V(q - h)) / (h * h), 1e-6 * c.v_2));
    }
    SECTION("mean-field coefficients use the on-center density") {
        const auto params = make_params(1.0, 1.0, 2.0, 1.0);
        VariationalState s;
        const auto c = taylor_coefficients(s, params);
        CHECK_THAT(c.vgp_0, WithinAbs(1.1283791670955126, 1e-14));  // 2/sqrt(pi)
        CHECK(c.vgp_1 == 0.0);
        CHECK_THAT(c.vgp_2, WithinAbs(2.2567583341910251, 1e-14));
    }
    SECTION("phase slope and curvature") {
        const auto params = make_params(1.0, 0.5, 0.0, 1.0);
        VariationalState s;
        s.p = 0.8;
        s.sigma = 2.0;
        s.sigma_dot = 0.4;
        const auto c = taylor_coefficients(s, params);
        CHECK_THAT(c.s_1, WithinAbs(1.6, 1e-15));  // p/hbar
        CHECK_THAT(c.s_2, WithinAbs(0.2, 1e-15));  // (m/hbar) sigma_dot/(2 sigma)
    }
}

TEST_CASE("synthesized packet is normalized, centered, and phase-consistent") {
    const auto params = make_params(1.0, 1.0, 0.0, 1.0);
    VariationalState s;
    s.q = 0.3;
    s.p = 0.7;
    s.sigma = 1.3;
    s.sigma_dot = 0.4;
    s.s0 = 0.2;
    const Grid grid(-16.0, 16.0, 512);
    const auto field = synthesize(s, params, grid);
    REQUIRE(field.psi.size() == 512);
    CHECK(field.t == s.t);

    double norm = 0.0;
    std::size_t argmax = 0;
    for (std::size_t j = 0; j < field.psi.size(); ++j) {
        norm += std::norm(field.psi[j]) * grid.dx();
        if (std::abs(field.psi[j]) > std::abs(field.psi[argmax])) argmax = j;
    }
    CHECK_THAT(norm, WithinAbs(1.0, 1e-12));
    CHECK(std::abs(grid.x(int(argmax)) - s.q) < grid.dx());

    // The local phase slope at the center must reproduce the flow field
    // (quadratic phase, so the centered difference is exact to roundoff).
    const int j = int(argmax);
    const double dphi =
        std::arg(field.psi[std::size_t(j + 1)] * std::conj(field.psi[std::size_t(j - 1)]));
    const double v_from_phase = params.hbar / params.mass * dphi / (2.0 * grid.dx());
    CHECK_THAT(v_from_phase, WithinAbs(velocity_field(s, params, grid.x(j)), 1e-10));
}

TEST_CASE("synthesis rejects a grid that cannot hold the packet") {
    const auto params = make_params(1.0, 1.0, 0.0, 1.0);
    VariationalState s;
    s.sigma = 4.0;  // std dev sqrt(2); needs about +/- 5.7
    CHECK_THROWS_AS(synthesize(s, params, Grid(-4.0, 4.0, 64)), std::invalid_argument);
    CHECK_NOTHROW(synthesize(s, params, Grid(-8.0, 8.0, 64)));
}

TEST_CASE("invalid step and propagate arguments are rejected") {
    const auto params = make_params(1.0, 1.0, 0.0, 1.0);
    const InteractionVariant variant{2.0};
    VariationalState s;
    CHECK_THROWS_AS(step(s, params, variant, 0.0, IntegratorMethod::rk4()),
                    std::invalid_argument);
    CHECK_THROWS_AS(step(s, params, variant, -1e-3, IntegratorMethod::rk4()),
                    std::invalid_argument);
    CHECK_THROWS_AS(step(s, params, variant, 1e-3, IntegratorMethod::rk45(0.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(propagate(s, params, variant, -1.0, 1e-3, IntegratorMethod::rk4()),
                    std::invalid_argument);
    CHECK_THROWS_AS(propagate(s, params, variant, 1.0, 1e-3, IntegratorMethod::rk4(), 0),
                    std::invalid_argument);
    VariationalState bad = s;
    bad.sigma = -1.0;
    CHECK_THROWS_AS(step(bad, params, variant, 1e-3, IntegratorMethod::rk4()),
                    std::invalid_argument);
}

TEST_CASE("width collapse aborts with the last good state in the message") {
    // With hbar tiny the kinetic floor is gone and repulsive g (printed sign)
    // drives sigma through zero in finite time.
    const auto params = make_params(1.0, 1e-8, 10.0, 0.0);
    const auto init = VariationalState::initial(0.0, 0.0, 1.0, 0.0, params);
    try {
        propagate(init, params, InteractionVariant{2.0}, 1.0, 1e-2,
                  IntegratorMethod::rk4());
        FAIL("expected a width-collapse failure");
    } catch (const NumericalFailure& e) {
        CHECK(std::string(e.what()).find("last good state") != std::string::npos);
        CHECK(e.t >= 0.0);
    }
}
