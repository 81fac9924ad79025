#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "su11/classical.hpp"
#include "support/random.hpp"

using namespace su11;
using Catch::Approx;

namespace {

const Constants kUnit{1.0, 1.0, 0.25};

ClassicalTrajectory simple_oscillator(const InitialData& init, double t1 = 10.0,
                                      double max_step = 0.05) {
    const auto p = CoefficientProfile::constant(2.0, 0.0, 0.0);
    return solve_classical(p, kUnit, init, 0.0, t1, 1e-12, max_step);
}

} // namespace

TEST_CASE("tau unwrapping") {
    CHECK(tau_unwrap(1.0, 0.0, 0.0) == 0.0);
    CHECK(tau_unwrap(-1.0, 1e-9, 3.0) == Approx(M_PI).epsilon(1e-9));
    CHECK(tau_unwrap(0.0, -1.0, -1.0) == Approx(-M_PI / 2).epsilon(1e-15));
    // continuity pick across many turns
    CHECK(tau_unwrap(1.0, 0.1, 4 * M_PI) == Approx(4 * M_PI + std::atan2(0.1, 1.0)).epsilon(1e-13));
}

TEST_CASE("default initial data") {
    SECTION("unit mass") {
        const auto p = CoefficientProfile::constant(2.0, 0.0, 0.0);
        const auto init = default_init(p, kUnit, 0.0);
        CHECK(init.u0 == 1.0);
        CHECK(init.du0 == 0.0);
        CHECK(init.v0 == 0.0);
        CHECK(init.dv0 == Approx(1.0).epsilon(1e-15));
    }
    SECTION("negative mass still gives positive Omega") {
        const auto p = CoefficientProfile::constant(-2.0, 0.0, 0.0);
        const auto init = default_init(p, kUnit, 0.0);
        CHECK(init.dv0 == Approx(-1.0).epsilon(1e-15));
        const auto traj = solve_classical(p, kUnit, init, 0.0, 5.0, 1e-12);
        CHECK(traj.Omega == Approx(1.0).epsilon(1e-12));
        // u = cos t, v = -sin t, so tau decreases
        CHECK(traj.tau.back() < -4.0);
    }
}

TEST_CASE("closed-form simple oscillator") {
    SECTION("circular solution: rho == 1, tau == t") {
        const auto traj = simple_oscillator({1.0, 0.0, 0.0, 1.0});
        CHECK(traj.Omega == Approx(1.0).epsilon(1e-14));
        double werr = 0, rerr = 0, terr = 0;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            werr = std::max(werr, std::abs(traj.u[i] - std::cos(traj.t[i])));
            rerr = std::max(rerr, std::abs(traj.rho[i] - 1.0));
            terr = std::max(terr, std::abs(traj.tau[i] - traj.t[i]));
        }
        CHECK(werr < 1e-10);
        CHECK(rerr < 1e-10);
        CHECK(terr < 1e-10);
        CHECK(omega_drift(traj) < 1e-9);
    }
    SECTION("elliptical solution: Omega = 2, rho = sqrt(4cos^2 + sin^2)") {
        const auto traj = simple_oscillator({2.0, 0.0, 0.0, 1.0});
        CHECK(traj.Omega == Approx(2.0).epsilon(1e-14));
        for (std::size_t i = 0; i < traj.size(); i += 7) {
            const double c = std::cos(traj.t[i]), s = std::sin(traj.t[i]);
            CHECK(traj.rho[i] == Approx(std::sqrt(4 * c * c + s * s)).epsilon(1e-10));
        }
        const std::size_t ih = traj.index_of_time(0.0);
        CHECK(traj.rho[ih] == Approx(2.0).epsilon(1e-14));
    }
}

TEST_CASE("Wronskian invariant drift stays below 1e-9") {
    SECTION("tanh quench over a long window") {
        const auto p = CoefficientProfile::tanh_quench(1.0, 0.5, 1.0, 1.0);
        const auto traj =
            solve_classical(p, kUnit, default_init(p, kUnit, 0.0), 0.0, 20.0, 1e-12);
        CHECK(omega_drift(traj) < 1e-9);
        SECTION("matches a half-tolerance reference run") {
            const auto ref =
                solve_classical(p, kUnit, default_init(p, kUnit, 0.0), 0.0, 20.0, 1e-13);
            const std::size_t i = traj.size() - 1;
            const std::size_t j = ref.size() - 1;
            CHECK(traj.u[i] == Approx(ref.u[j]).epsilon(1e-9).margin(1e-10));
            CHECK(traj.tau[i] == Approx(ref.tau[j]).epsilon(1e-10));
        }
    }
    SECTION("frequency jump splits cleanly") {
        const auto p = CoefficientProfile::frequency_jump(1.0, 2.0, 1.0, 1.0);
        const auto traj =
            solve_classical(p, kUnit, default_init(p, kUnit, 0.0), 0.0, 20.0, 1e-12);
        CHECK(omega_drift(traj) < 1e-9);
        // the jump time must be a grid point
        CHECK_NOTHROW(traj.index_of_time(1.0));
    }
    SECTION("generic cross-term profile") {
        const auto p = CoefficientProfile::constant(2.2, 0.1, 0.3);
        const auto traj =
            solve_classical(p, kUnit, default_init(p, kUnit, 0.0), 0.0, 20.0, 1e-12);
        CHECK(omega_drift(traj) < 1e-9);
    }
}

TEST_CASE("trajectory linearity in the initial data") {
    const auto a = simple_oscillator({1.3, 0.2, -0.4, 0.9}, 6.0);
    const auto b = simple_oscillator({2.6, 0.4, -0.4, 0.9}, 6.0);
    // same profile, u-part doubled: u_b(t) = 2 u_a(t) on the shared mandatory time
    const auto pa = CoefficientProfile::constant(2.0, 0.0, 0.0);
    const std::vector<double> probe{1.0, 2.5, 5.5};
    const auto ta = solve_classical(pa, kUnit, {1.3, 0.2, -0.4, 0.9}, 0.0, 6.0, 1e-12,
                                    std::numeric_limits<double>::infinity(), probe);
    const auto tb = solve_classical(pa, kUnit, {2.6, 0.4, -0.4, 0.9}, 0.0, 6.0, 1e-12,
                                    std::numeric_limits<double>::infinity(), probe);
    for (double tp : probe) {
        const auto ia = ta.index_of_time(tp);
        const auto ib = tb.index_of_time(tp);
        CHECK(tb.u[ib] == Approx(2.0 * ta.u[ia]).epsilon(1e-12));
        CHECK(tb.v[ib] == Approx(ta.v[ia]).epsilon(1e-12));
    }
    (void)a;
    (void)b;
}

TEST_CASE("mandatory times land on the grid") {
    const auto p = CoefficientProfile::tanh_quench(1.0, 0.5, 1.0, 1.0);
    const std::vector<double> want{0.37, 1.11, 2.0 - 1e-3, 2.0, 2.0 + 1e-3};
    const auto traj = solve_classical(p, kUnit, default_init(p, kUnit, 0.0), 0.0, 3.0, 1e-12,
                                      std::numeric_limits<double>::infinity(), want);
    for (double tw : want)
        CHECK(traj.t[traj.index_of_time(tw)] == Approx(tw).margin(1e-12));
    CHECK_THROWS_AS(traj.index_of_time(0.123456), GridError);
}

TEST_CASE("amplitude equation residual") {
    SECTION("circular solution is residual-free up to differencing noise") {
        const auto traj = simple_oscillator({1.0, 0.0, 0.0, 1.0}, 10.0, 1e-3);
        const auto p = CoefficientProfile::constant(2.0, 0.0, 0.0);
        CHECK(ermakov_residual(traj, p) < 1e-7);
    }
    SECTION("elliptical solution converges at second order") {
        const auto p = CoefficientProfile::constant(2.0, 0.0, 0.0);
        double prev = 0;
        std::vector<double> res;
        for (double dt : {4e-3, 2e-3, 1e-3}) {
            const auto traj = simple_oscillator({2.0, 0.0, 0.0, 1.0}, 10.0, dt);
            res.push_back(ermakov_residual(traj, p));
        }
        const double order1 = std::log2(res[0] / res[1]);
        const double order2 = std::log2(res[1] / res[2]);
        CHECK(order1 > 1.8);
        CHECK(order1 < 2.2);
        CHECK(order2 > 1.8);
        CHECK(order2 < 2.2);
        // fine-grid residual small in absolute terms
        const auto fine = simple_oscillator({2.0, 0.0, 0.0, 1.0}, 10.0, 2.5e-4);
        CHECK(ermakov_residual(fine, p) < 1e-6);
        (void)prev;
    }
    SECTION("a corrupted amplitude is detected") {
        auto traj = simple_oscillator({2.0, 0.0, 0.0, 1.0}, 10.0, 1e-3);
        const auto p = CoefficientProfile::constant(2.0, 0.0, 0.0);
        for (auto& r : traj.rho)
            r *= 1.01;
        for (auto& dr : traj.drho)
            dr *= 1.01;
        CHECK(ermakov_residual(traj, p) > 1e-2);
    }
}

TEST_CASE("rejects degenerate initial data") {
    const auto p = CoefficientProfile::constant(2.0, 0.0, 0.0);
    CHECK_THROWS_AS(solve_classical(p, kUnit, {1.0, 0.0, 2.0, 0.0}, 0.0, 1.0, 1e-10),
                    InvariantError);
    // Omega < 0 rejected
    CHECK_THROWS_AS(solve_classical(p, kUnit, {0.0, 1.0, 1.0, 0.0}, 0.0, 1.0, 1e-10),
                    InvariantError);
}

TEST_CASE("rho stays positive along every grid") {
    testsupport::Rng rng(5150);
    const auto p = CoefficientProfile::tanh_quench(1.2, 0.3, 0.7, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        InitialData init{rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                         rng.uniform(0.5, 2.0)};
        if (init.u0 * init.dv0 - init.du0 * init.v0 <= 0.0)
            continue;
        const auto traj = solve_classical(p, kUnit, init, 0.0, 8.0, 1e-11);
        for (double r : traj.rho)
            CHECK(r > 0.0);
        CHECK(omega_drift(traj) < 1e-9);
    }
}
