#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "su11/coeffs.hpp"
#include "su11/errors.hpp"

namespace su11 {

/// Values and time-derivatives of the two classical solutions at t0.
struct InitialData {
    double u0 = 1.0, du0 = 0.0, v0 = 0.0, dv0 = 1.0;
};

/// Sampled classical solutions with the derived Ermakov data. The grid is the
/// sequence of accepted solver steps (plus any requested mandatory times), so
/// every stored sample carries full integrator accuracy.
struct ClassicalTrajectory {
    std::vector<double> t, u, du, v, dv;
    std::vector<double> rho, drho, tau, M;
    double Omega = 0.0;
    Constants constants;

    std::size_t size() const { return t.size(); }

    /// Index of the grid point at time ti (within rounding); GridError if the
    /// time is not on the grid.
    std::size_t index_of_time(double ti) const {
        const auto it = std::lower_bound(t.begin(), t.end(), ti);
        const double tol = 1e-9 * std::max(1.0, std::abs(ti));
        if (it != t.end() && std::abs(*it - ti) <= tol)
            return std::size_t(it - t.begin());
        if (it != t.begin() && std::abs(*(it - 1) - ti) <= tol)
            return std::size_t(it - t.begin()) - 1;
        throw GridError("time " + std::to_string(ti) + " is not a trajectory grid point");
    }
};

/// Representative of atan2(v,u) + 2 pi Z closest to tau_prev.
inline double tau_unwrap(double u, double v, double tau_prev) {
    const double raw = std::atan2(v, u);
    const double two_pi = 2.0 * M_PI;
    return raw + two_pi * std::round((tau_prev - raw) / two_pi);
}

/// Canonical initial data: u0=1, du0=0, v0=0, dv0 = w_c / M(t0). This puts
/// rho(t0)=1, drho(t0)=0 and Omega = w_c regardless of the sign of M(t0).
inline InitialData default_init(const CoefficientProfile& profile, const Constants& constants,
                                double t0) {
    const OdeCoeffs oc = profile.ode_coeffs(t0, constants.w_c);
    return InitialData{1.0, 0.0, 0.0, constants.w_c / oc.M};
}

namespace detail {

/// Dormand-Prince 8(5,3) explicit Runge-Kutta step on a 4-component state
/// (the joint (u, u', v, v') system). Standard Hairer-Wanner coefficients.
struct Dop853 {
    static constexpr double c2 = 0.05260015195876773187856,
                            c3 = 0.07890022793815159781784,
                            c4 = 0.11835034190722739672676,
                            c5 = 0.28164965809277260327324,
                            c6 = 0.33333333333333333333333,
                            c7 = 0.25000000000000000000000,
                            c8 = 0.30769230769230769230769,
                            c9 = 0.65128205128205128205128,
                            c10 = 0.60000000000000000000000,
                            c11 = 0.85714285714285714285714;
    static constexpr double b1 = 0.05429373411656876223805,
                            b6 = 4.45031289275240888144114,
                            b7 = 1.89151789931450038304282,
                            b8 = -5.80120396001058478146721,
                            b9 = 0.31116436695781989440892,
                            b10 = -0.15216094966251607855618,
                            b11 = 0.20136540080403034837478,
                            b12 = 0.04471061572777259051769;
    static constexpr double bhh1 = 0.24409448818897637795276,
                            bhh2 = 0.73384668828161185734136,
                            bhh3 = 0.02205882352941176470588;
    static constexpr double er1 = 0.01312004499419488073250,
                            er6 = -1.22515644637620444072057,
                            er7 = -0.49575894965725019152141,
                            er8 = 1.66437718245498653696153,
                            er9 = -0.35032884874997368168865,
                            er10 = 0.33417911871301747902973,
                            er11 = 0.08192320648511571246571,
                            er12 = -0.02235530786388629525884;
    static constexpr double a21 = 0.05260015195876773187856,
                            a31 = 0.01972505698453789945446,
                            a32 = 0.05917517095361369836338,
                            a41 = 0.02958758547680684918169,
                            a43 = 0.08876275643042054754507,
                            a51 = 0.24136513415926668550237,
                            a53 = -0.88454947932828608534486,
                            a54 = 0.92483400326179200311574,
                            a61 = 0.03703703703703703703704,
                            a64 = 0.17082860872947387127960,
                            a65 = 0.12546768756682242501669,
                            a71 = 0.03710937500000000000000,
                            a74 = 0.17025221101954403931498,
                            a75 = 0.06021653898045596068502,
                            a76 = -0.01757812500000000000000,
                            a81 = 0.03709200011850479271088,
                            a84 = 0.17038392571223999381021,
                            a85 = 0.10726203044637328465181,
                            a86 = -0.01531943774862440175279,
                            a87 = 0.00827378916381402288758,
                            a91 = 0.62411095871607571711443,
                            a94 = -3.36089262944694129406857,
                            a95 = -0.86821934684172600681819,
                            a96 = 27.5920996994467083049416,
                            a97 = 20.1540675504778934086187,
                            a98 = -43.4898841810699588477366,
                            a101 = 0.47766253643826436589043,
                            a104 = -2.48811461997166764192642,
                            a105 = -0.59029082683684299637145,
                            a106 = 21.2300514481811942347289,
                            a107 = 15.2792336328824235832597,
                            a108 = -33.2882109689848629194453,
                            a109 = -0.02033120170850862613582,
                            a111 = -0.93714243008598732571704,
                            a114 = 5.18637242884406370830024,
                            a115 = 1.09143734899672957818500,
                            a116 = -8.14978701074692612513997,
                            a117 = -18.5200656599969598641566,
                            a118 = 22.7394870993505042818970,
                            a119 = 2.49360555267965238987089,
                            a1110 = -3.04676447189821950038237,
                            a121 = 2.27331014751653820792360,
                            a124 = -10.5344954667372501984067,
                            a125 = -2.00087205822486249909676,
                            a126 = -17.9589318631187989172766,
                            a127 = 27.9488845294199600508500,
                            a128 = -2.85899827713502369474066,
                            a129 = -8.87285693353062954433549,
                            a1210 = 12.3605671757943030647266,
                            a1211 = 0.64339274601576353035597;

    using State = std::array<double, 4>;

    /// One trial step from (t, y) with step h. Fills ynew and the scaled
    /// error estimate; rhs(t, y, dydt).
    template <typename Rhs>
    static double trial(Rhs&& rhs, double t, const State& y, const State& k1, double h,
                        double atol, double rtol, State& ynew, State& k_last) {
        State k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12, yt;
        for (int i = 0; i < 4; ++i)
            yt[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, yt, k2);
        for (int i = 0; i < 4; ++i)
            yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, yt, k3);
        for (int i = 0; i < 4; ++i)
            yt[i] = y[i] + h * (a41 * k1[i] + a43 * k3[i]);
        rhs(t + c4 * h, yt, k4);
        for (int i = 0; i < 4; ++i)
            yt[i] = y[i] + h * (a51 * k1[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, yt, k5);
        for (int i = 0; i < 4; ++i)
            yt[i] = y[i] + h * (a61 * k1[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(t + c6 * h, yt, k6);
        for (int i = 0; i < 4; ++i)
            yt[i] = y[i] + h * (a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        rhs(t + c7 * h, yt, k7);
        for (int i = 0; i < 4; ++i)
            yt[i] = y[i] +
                    h * (a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] + a87 * k7[i]);
        rhs(t + c8 * h, yt, k8);
        for (int i = 0; i < 4; ++i)
            yt[i] = y[i] + h * (a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] +
                                a97 * k7[i] + a98 * k8[i]);
        rhs(t + c9 * h, yt, k9);
        for (int i = 0; i < 4; ++i)
            yt[i] = y[i] + h * (a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] +
                                a107 * k7[i] + a108 * k8[i] + a109 * k9[i]);
        rhs(t + c10 * h, yt, k10);
        for (int i = 0; i < 4; ++i)
            yt[i] = y[i] + h * (a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] +
                                a117 * k7[i] + a118 * k8[i] + a119 * k9[i] + a1110 * k10[i]);
        rhs(t + c11 * h, yt, k11);
        for (int i = 0; i < 4; ++i)
            yt[i] = y[i] + h * (a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] +
                                a127 * k7[i] + a128 * k8[i] + a129 * k9[i] + a1210 * k10[i] +
                                a1211 * k11[i]);
        rhs(t + h, yt, k12);

        State incr;
        for (int i = 0; i < 4; ++i) {
            incr[i] = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] +
                      b10 * k10[i] + b11 * k11[i] + b12 * k12[i];
            ynew[i] = y[i] + h * incr[i];
        }
        // embedded 5th/3rd-order error estimate (Hairer dop853)
        double err5 = 0.0, err3 = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double sk = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double e3 = incr[i] - bhh1 * k1[i] - bhh2 * k9[i] - bhh3 * k12[i];
            const double e5 = er1 * k1[i] + er6 * k6[i] + er7 * k7[i] + er8 * k8[i] +
                              er9 * k9[i] + er10 * k10[i] + er11 * k11[i] + er12 * k12[i];
            err3 += (e3 / sk) * (e3 / sk);
            err5 += (e5 / sk) * (e5 / sk);
        }
        double den = err5 + 0.01 * err3;
        if (den <= 0.0)
            den = 1.0;
        const double err = std::abs(h) * err5 / std::sqrt(den * 4.0);
        k_last = k12;
        return err;
    }
};

} // namespace detail

/// Integrates the joint (u, u', v, v') system of the classical equation over
/// [t0, t1] with embedded 8th-order error control. Integration is split at
/// profile jump times, step endpoints land exactly on any mandatory output
/// times, and the phase advance per step is capped below pi/2 so that the
/// stored tau is unambiguously unwrapped.
inline ClassicalTrajectory solve_classical(const CoefficientProfile& profile,
                                           const Constants& constants, const InitialData& init,
                                           double t0, double t1, double rel_tol = 1e-10,
                                           double max_step = std::numeric_limits<double>::infinity(),
                                           std::span<const double> mandatory_times = {}) {
    constants.validate();
    if (!(t1 > t0))
        throw UsageError("solve_classical requires t1 > t0");
    if (profile.has_domain() && (t0 < profile.domain_lo() || t1 > profile.domain_hi()))
        throw DomainError("integration window outside the tabulated profile domain");
    if (!(rel_tol > 0.0))
        throw ConfigError("rel_tol must be positive");

    const double w_c = constants.w_c;
    const double wronskian = init.u0 * init.dv0 - init.du0 * init.v0;
    if (wronskian == 0.0)
        throw InvariantError("initial data must be linearly independent (nonzero Wronskian)");
    const double M0 = profile.ode_coeffs(t0, w_c).M;
    const double omega = M0 * wronskian;
    if (!(omega > 0.0))
        throw InvariantError("initial data must give Omega = M (u v' - u' v) > 0");

    // segment boundaries: jumps strictly inside plus mandatory sample times
    std::vector<double> cuts;
    for (double tj : profile.jump_times())
        if (tj > t0 && tj < t1)
            cuts.push_back(tj);
    for (double tm : mandatory_times)
        if (tm > t0 && tm < t1)
            cuts.push_back(tm);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-14; }),
               cuts.end());
    cuts.push_back(t1);
    const auto jumps = profile.jump_times();
    auto is_jump = [&](double tb) {
        for (double tj : jumps)
            if (std::abs(tj - tb) < 1e-14)
                return true;
        return false;
    };

    ClassicalTrajectory traj;
    traj.constants = constants;
    traj.Omega = omega;

    detail::Dop853::State y{init.u0, init.du0, init.v0, init.dv0};
    double t = t0;

    auto push_sample = [&](double ts, const detail::Dop853::State& ys,
                           CoefficientProfile::Side side) {
        const OdeCoeffs oc = profile.ode_coeffs(ts, w_c, side);
        const double r = std::hypot(ys[0], ys[2]);
        traj.t.push_back(ts);
        traj.u.push_back(ys[0]);
        traj.du.push_back(ys[1]);
        traj.v.push_back(ys[2]);
        traj.dv.push_back(ys[3]);
        traj.rho.push_back(r);
        traj.drho.push_back((ys[0] * ys[1] + ys[2] * ys[3]) / r);
        traj.M.push_back(oc.M);
        const double tau_prev = traj.tau.empty() ? std::atan2(ys[2], ys[0]) : traj.tau.back();
        traj.tau.push_back(tau_unwrap(ys[0], ys[2], tau_prev));
    };

    push_sample(t0, y, CoefficientProfile::Side::right);

    const double atol = rel_tol; // same absolute floor as the relative target
    long step_budget = 20'000'000;

    for (double seg_end : cuts) {
        const bool end_is_jump = is_jump(seg_end) && seg_end < t1;
        auto rhs = [&](double tt, const detail::Dop853::State& ys, detail::Dop853::State& dy) {
            const auto side = (end_is_jump && tt >= seg_end) ? CoefficientProfile::Side::left
                                                             : CoefficientProfile::Side::right;
            const OdeCoeffs oc = profile.ode_coeffs(std::min(tt, seg_end), w_c, side);
            dy[0] = ys[1];
            dy[1] = -oc.dlogM * ys[1] - oc.Q * ys[0];
            dy[2] = ys[3];
            dy[3] = -oc.dlogM * ys[3] - oc.Q * ys[2];
        };

        detail::Dop853::State k1;
        rhs(t, y, k1);

        // initial step heuristic
        double ynorm = 0, fnorm = 0;
        for (int i = 0; i < 4; ++i) {
            ynorm = std::max(ynorm, std::abs(y[i]));
            fnorm = std::max(fnorm, std::abs(k1[i]));
        }
        double h = std::min({seg_end - t, max_step, 0.1 * (1.0 + ynorm) / (1.0 + fnorm)});

        while (t < seg_end - 1e-14 * std::max(1.0, std::abs(seg_end))) {
            // cap the per-step phase advance d tau = Omega / (M rho^2) dt
            const OdeCoeffs oc_here = profile.ode_coeffs(t, w_c);
            const double rho2 = y[0] * y[0] + y[2] * y[2];
            const double phase_rate = std::abs(omega / (oc_here.M * rho2));
            const double h_cap = std::min(max_step, 0.45 * M_PI / std::max(phase_rate, 1e-300));
            h = std::min(h, h_cap);
            // land exactly on the segment end, balancing the last two steps so
            // the stored grid never carries a pathologically short interval
            const double remaining = seg_end - t;
            if (remaining <= 1.01 * h)
                h = remaining;
            else if (remaining <= 2.0 * h)
                h = 0.5 * remaining;

            detail::Dop853::State ynew, klast;
            const double err =
                detail::Dop853::trial(rhs, t, y, k1, h, atol, rel_tol, ynew, klast);

            if (--step_budget < 0)
                throw IntegrationError("step budget exhausted");
            if (!(h > std::abs(t) * 1e-15 + 1e-300) || !std::isfinite(err))
                throw IntegrationError("step size underflow at t = " + std::to_string(t));

            const double fac = std::pow(std::max(err, 1e-32), 1.0 / 8.0);
            if (err <= 1.0) {
                t = (h == remaining) ? seg_end : t + h;
                y = ynew;
                push_sample(t, y,
                            (end_is_jump && t >= seg_end) ? CoefficientProfile::Side::left
                                                          : CoefficientProfile::Side::right);
                rhs(t, y, k1);
                h = h * std::min(6.0, std::max(1.0 / 3.0, 0.9 / fac));
            } else {
                h = h * std::max(1.0 / 3.0, 0.9 / fac);
            }
        }
        t = seg_end;
    }

    // stored M at interior jump points follows the right-continuous convention
    for (double tj : jumps) {
        if (tj > t0 && tj < t1) {
            const std::size_t i = traj.index_of_time(tj);
            traj.M[i] = profile.ode_coeffs(tj, w_c, CoefficientProfile::Side::right).M;
        }
    }
    return traj;
}

/// Maximum absolute residual of the nonlinear amplitude equation
///   d/dt(M rho') - Omega^2/(M rho^3) + M Q rho = 0
/// over interior grid points, with d/dt(M rho') by non-uniform centered
/// differences on the stored grid. Stencils straddling a jump are skipped.
inline double ermakov_residual(const ClassicalTrajectory& traj,
                               const CoefficientProfile& profile) {
    const std::size_t n = traj.size();
    if (n < 3)
        throw GridError("ermakov_residual needs at least three grid points");
    const auto jumps = profile.jump_times();
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        bool skip = false;
        for (double tj : jumps)
            if (tj > traj.t[i - 1] - 1e-14 && tj < traj.t[i + 1] + 1e-14)
                skip = true;
        if (skip)
            continue;
        const double hm = traj.t[i] - traj.t[i - 1];
        const double hp = traj.t[i + 1] - traj.t[i];
        const double gm = traj.M[i - 1] * traj.drho[i - 1];
        const double g0 = traj.M[i] * traj.drho[i];
        const double gp = traj.M[i + 1] * traj.drho[i + 1];
        const double dg = -hp / (hm * (hm + hp)) * gm + (hp - hm) / (hm * hp) * g0 +
                          hm / (hp * (hm + hp)) * gp;
        const OdeCoeffs oc = profile.ode_coeffs(traj.t[i], traj.constants.w_c);
        const double res = dg - traj.Omega * traj.Omega / (oc.M * std::pow(traj.rho[i], 3)) +
                           oc.M * oc.Q * traj.rho[i];
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

/// Maximum relative drift of the Wronskian invariant M (u v' - u' v) along
/// the stored grid.
inline double omega_drift(const ClassicalTrajectory& traj) {
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double w = traj.M[i] * (traj.u[i] * traj.dv[i] - traj.du[i] * traj.v[i]);
        worst = std::max(worst, std::abs(w - traj.Omega) / std::abs(traj.Omega));
    }
    return worst;
}

} // namespace su11
