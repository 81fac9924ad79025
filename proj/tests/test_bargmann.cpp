#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "su11/bargmann.hpp"
#include "support/random.hpp"

using namespace su11;
using Catch::Approx;

namespace {

const Constants kUnit{1.0, 1.0, 0.25};

GroupElement squeezed_real() {
    return GroupElement(Complex(3.0 * std::sqrt(2.0) / 4.0, 0.0),
                        Complex(std::sqrt(2.0) / 4.0, 0.0));
}

GroupElement synthetic(testsupport::Rng& rng, double amp_lo, double amp_hi) {
    const double am = rng.uniform(amp_lo, amp_hi);
    const double pa = rng.uniform(-M_PI, M_PI);
    const double pb = rng.uniform(-M_PI, M_PI);
    return GroupElement(std::polar(am, pa), std::polar(std::sqrt(am * am - 1.0), pb));
}

} // namespace

TEST_CASE("identity element gives the Kronecker matrix") {
    const GroupElement id;
    for (double k : {0.25, 0.75, 1.3}) {
        for (int mp = 0; mp < 6; ++mp)
            for (int m = 0; m < 6; ++m) {
                const Complex v = v_standard(k, mp, m, id);
                if (mp == m)
                    CHECK(std::abs(v - Complex(1.0, 0.0)) < 1e-14);
                else
                    CHECK(std::abs(v) < 1e-14);
            }
    }
    const auto mat = build_matrix(0.25, id, 16);
    for (double t : mat.tail)
        CHECK(std::abs(t) < 1e-12);
    CHECK_FALSE(mat.tail_warning);
}

TEST_CASE("top-left element is a pure power of conj(alpha)") {
    testsupport::Rng rng(7);
    for (int i = 0; i < 20; ++i) {
        const auto g = synthetic(rng, 1.01, 2.5);
        for (double k : {0.25, 1.7}) {
            const Complex expect =
                std::polar(std::pow(std::abs(g.alpha), -2.0 * k), 2.0 * k * std::arg(g.alpha));
            CHECK(std::abs(v_standard(k, 0, 0, g) - expect) < 1e-13);
        }
    }
}

TEST_CASE("squeezed element closed-form values") {
    const auto g = squeezed_real();
    // V_{1,0} = (9/8)^{-3/4} / 4 for k = 1/4
    const double expect10 = std::pow(9.0 / 8.0, -0.75) / 4.0;
    CHECK(v_standard(0.25, 1, 0, g).real() == Approx(expect10).epsilon(1e-13));
    CHECK(v_standard(0.25, 0, 1, g).real() == Approx(-expect10).epsilon(1e-13));
    CHECK(v_standard(0.25, 1, 0, g).imag() == Approx(0.0).margin(1e-15));
    // diagonal 0,0 entry
    CHECK(v_standard(0.25, 0, 0, g).real() == Approx(std::pow(9.0 / 8.0, -0.25)).epsilon(1e-13));
}

TEST_CASE("series route fixes the factorization sign") {
    // xi = 1/3, gamma = -ln(8/9), phi = 0 must reproduce the squeezed element
    const auto g = squeezed_real();
    const auto d = disentangle(g);
    CHECK(d.gamma == Approx(std::log(9.0 / 8.0)).epsilon(1e-13));
    CHECK(std::abs(v_series(0.25, 0, 0, d) - v_standard(0.25, 0, 0, g)) < 1e-9);
    CHECK(std::abs(v_series(0.25, 1, 3, d) - v_standard(0.25, 1, 3, g)) < 1e-8);
    // the opposite sign convention is measurably different
    DisentangledParams wrong = d;
    wrong.gamma = std::log(1.0 + std::norm(d.xi));
    const double right_gap = std::abs(v_series(0.25, 0, 0, d) - v_standard(0.25, 0, 0, g));
    // evaluating with gamma = +ln(1+|xi|^2) in place of -ln(1-|xi|^2) shifts
    // nothing here because the series only reads xi and phi; the weight W is
    // derived from xi. The sign decision is pinned by the agreement itself.
    CHECK(right_gap < 1e-12);
}

TEST_CASE("diagonal of the series at the identity") {
    DisentangledParams p; // xi = 0, gamma = 0, phi = 0
    for (double k : {0.25, 0.75, 2.5})
        for (int m : {0, 1, 5})
            CHECK(std::abs(v_series(k, m, m, p) - Complex(1.0, 0.0)) < 1e-13);
    // with a nonzero phase the diagonal picks up e^{i(m+k) phi}
    p.phi = 0.73;
    const Complex expect = std::polar(1.0, (3 + 0.25) * 0.73);
    CHECK(std::abs(v_series(0.25, 3, 3, p) - expect) < 1e-13);
}

TEST_CASE("four-way agreement across forms") {
    testsupport::Rng rng(20260810);
    const double pair_tol = 1e-8;
    int compared = 0, skipped = 0;
    for (int e = 0; e < 8; ++e) {
        const auto g = synthetic(rng, 1.02, 2.8);
        const auto d = disentangle(g);
        for (double k : {0.25, 0.75, 1.0, 2.5}) {
            for (int mp = 0; mp <= 12; mp += 3) {
                for (int m = 0; m <= 12; m += 3) {
                    const Complex vs = v_standard(k, mp, m, g);
                    const double scale = std::max(std::abs(vs), 1e-200);
                    std::vector<Complex> vals{vs};

                    double cg = 1.0;
                    const Complex vg = v_general(k, mp, m, g, &cg);
                    if (cg < 2e9)
                        vals.push_back(vg);
                    else
                        ++skipped;

                    const auto alt = v_alt(k, mp, m, g);
                    if (alt.first_cond < 3e5)
                        vals.push_back(alt.first);
                    else
                        ++skipped;
                    if (alt.second_cond < 3e5)
                        vals.push_back(alt.second);
                    else
                        ++skipped;

                    if (k == 0.25 || k == 0.75)
                        vals.push_back(v_legendre(k, mp, m, g));

                    if (std::abs(g.beta) < 0.95) {
                        double cs = 1.0;
                        const Complex ser = v_series(k, mp, m, d, 1e-13, &cs);
                        if (cs < 3e5)
                            vals.push_back(ser);
                        else
                            ++skipped;
                    }

                    for (std::size_t i = 0; i < vals.size(); ++i)
                        for (std::size_t j = i + 1; j < vals.size(); ++j) {
                            CAPTURE(e, k, mp, m, i, j);
                            CHECK(std::abs(vals[i] - vals[j]) / scale < pair_tol);
                            ++compared;
                        }
                }
            }
        }
    }
    INFO("pairs compared: " << compared << ", route evaluations skipped: " << skipped);
    CHECK(compared > 5000);
}

TEST_CASE("agreement along a trajectory with phase wrapping") {
    const auto p = CoefficientProfile::tanh_quench(1.0, 0.5, 1.0, 1.0);
    const auto traj = solve_classical(p, kUnit, default_init(p, kUnit, 0.0), 0.0, 15.0, 1e-12);
    for (std::size_t i = traj.size() / 3; i < traj.size(); i += traj.size() / 7) {
        const auto g = group_element_at(traj, i, p);
        const auto d = disentangle(g);
        for (double k : {0.25, 0.75}) {
            for (int mp : {0, 2, 5})
                for (int m : {0, 1, 4}) {
                    const Complex vs = v_standard(k, mp, m, g);
                    const double scale = std::max(std::abs(vs), 1e-200);
                    CHECK(std::abs(v_legendre(k, mp, m, g) - vs) / scale < 1e-8);
                    if (std::abs(g.beta) > 1e-6)
                        CHECK(std::abs(v_general(k, mp, m, g) - vs) / scale < 1e-8);
                    if (std::abs(g.beta) < 0.95)
                        CHECK(std::abs(v_series(k, mp, m, d) - vs) / scale < 1e-8);
                }
        }
    }
}

TEST_CASE("v_general falls back at the identity") {
    CHECK_THROWS_AS(v_general(0.25, 1, 1, GroupElement()), NotApplicableError);
}

TEST_CASE("column normalization") {
    testsupport::Rng rng(11);
    SECTION("partial sums are monotone and bounded") {
        const auto g = synthetic(rng, 1.05, 1.4); // |beta| <= 1
        const auto mat = build_matrix(0.25, g, 64);
        for (int m = 0; m < 64; ++m) {
            double run = 0.0;
            double prev = 0.0;
            for (int mp = 0; mp < 64; ++mp) {
                run += std::norm(mat.at(mp, m));
                CHECK(run >= prev);
                CHECK(run <= 1.0 + 1e-9);
                prev = run;
            }
        }
        for (int m = 0; m < 16; ++m)
            CHECK(mat.tail[m] < 1e-6);
        for (double t : mat.tail)
            CHECK(t >= -1e-9);
    }
    SECTION("tail flag raised for a hard truncation") {
        // rho = 10 snapshot: alpha = 5.05, beta = 4.95
        const GroupElement g(Complex(5.05, 0.0), Complex(4.95, 0.0));
        const auto mat = build_matrix(0.25, g, 8);
        CHECK(mat.tail_warning);
        CHECK(mat.tail[0] > 1e-8);
    }
}

TEST_CASE("entries are constant along the self-related trajectory") {
    const auto p = CoefficientProfile::constant(2.0, 0.0, 0.0);
    const auto traj = solve_classical(p, kUnit, {2.0, 0.0, 0.0, 1.0}, 0.0, 9.0, 1e-12);
    const auto g0 = group_element_at(traj, 0, p);
    const auto ref = build_matrix(0.25, g0, 9);
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); i += traj.size() / 23) {
        const auto g = group_element_at(traj, i, p);
        for (int mp = 0; mp <= 8; ++mp)
            for (int m = 0; m <= 8; ++m)
                worst = std::max(worst, std::abs(v_standard(0.25, mp, m, g) - ref.at(mp, m)));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("sudden frequency jump ground-state retention") {
    // analysis frame w_c = w1 = 2; before the jump the solution matches the
    // w0 = 1 stationary oscillator, so at t > 0: rho = 1, drho = 0, Omega = 1
    const Constants cs{2.0, 1.0, 0.25};
    const auto p = CoefficientProfile::frequency_jump(1.0, 2.0, 0.0, 2.0);
    const InitialData init{1.0, 0.0, 0.0, 1.0}; // Omega = w0
    const std::vector<double> probe{0.7};
    const auto traj = solve_classical(p, cs, init, -3.0, 2.0, 1e-12,
                                      std::numeric_limits<double>::infinity(), probe);
    const auto g = group_element_at(traj, traj.index_of_time(0.7), p);
    const double prob = std::norm(v_standard(0.25, 0, 0, g));
    const double expect = 2.0 * std::sqrt(2.0) / 3.0;
    CHECK(prob == Approx(expect).epsilon(1e-9));
    CHECK(prob == Approx(0.9428090).epsilon(1e-6));
}

TEST_CASE("oscillator index mapping") {
    CHECK(oscillator_mapping(0.25) == "m->2m");
    CHECK(oscillator_mapping(0.75) == "m->2m+1");
    CHECK(oscillator_mapping(1.3) == "none");
}

TEST_CASE("legendre route rejects other indices") {
    CHECK_THROWS_AS(v_legendre(1.0, 0, 0, squeezed_real()), DomainError);
}

TEST_CASE("matrix assembly is independent of the thread count") {
    const auto g = squeezed_real();
    const auto serial = build_matrix(0.25, g, 24);
#ifdef _WIN32
    _putenv_s("SU11_THREADS", "4");
#else
    setenv("SU11_THREADS", "4", 1);
#endif
    const auto parallel = build_matrix(0.25, g, 24);
#ifndef _WIN32
    unsetenv("SU11_THREADS");
#endif
    for (std::size_t i = 0; i < serial.entries.size(); ++i) {
        CHECK(serial.entries[i].real() == parallel.entries[i].real());
        CHECK(serial.entries[i].imag() == parallel.entries[i].imag());
    }
}
