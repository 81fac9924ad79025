#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "su11/bargmann.hpp"
#include "su11/classical.hpp"
#include "su11/coeffs.hpp"
#include "su11/errors.hpp"
#include "su11/quadrature.hpp"
#include "su11/specfun.hpp"

namespace su11 {

/// Inverse-square coupling strength realized by the index k.
inline double inverse_square_coupling(double k) {
    return 2.0 * (k - 0.25) * (k - 0.75);
}

/// Stationary half-line eigenfunction
///   (4 w_c/hbar)^{1/4} sqrt(n!/Gamma(n+2k)) e^{-2i(n+k) w_c t}
///   (w_c x^2/hbar)^{k-1/4} e^{-w_c x^2/(2 hbar)} L_n^{2k-1}(w_c x^2/hbar).
/// With canonical_sign the ladder-basis sign (-1)^n is applied.
inline Complex phi_stationary(double k, int n, const Constants& c, double x, double t,
                              bool canonical_sign = false) {
    if (!(x > 0.0))
        throw DomainError("phi_stationary requires x > 0");
    if (!(k > 0.0) || n < 0)
        throw DomainError("phi_stationary: invalid index");
    const double u = c.w_c * x * x / c.hbar;
    const double amp = std::pow(4.0 * c.w_c / c.hbar, 0.25) *
                       std::exp(0.5 * (specfun::log_gamma(n + 1.0) -
                                       specfun::log_gamma(n + 2.0 * k))) *
                       std::pow(u, k - 0.25) * std::exp(-0.5 * u) *
                       specfun::laguerre(n, 2.0 * k - 1.0, u);
    const double sign = (canonical_sign && (n & 1)) ? -1.0 : 1.0;
    return sign * amp * std::polar(1.0, -2.0 * (n + k) * c.w_c * t);
}

/// Evolved wavefunction at trajectory grid point i:
///   (4 Omega/(hbar rho^2))^{1/4} sqrt(n!/Gamma(n+2k)) e^{-2i(n+k) tau}
///   (Omega x^2/(hbar rho^2))^{k-1/4}
///   exp[-(x^2/2hbar)(Omega/rho^2 - i M rho'/rho - 2 i M a)]
///   L_n^{2k-1}(Omega x^2/(hbar rho^2)).
inline Complex phi_evolved(double k, const ClassicalTrajectory& traj,
                           const CoefficientProfile& profile, int n, double x, std::size_t i) {
    if (!(x > 0.0))
        throw DomainError("phi_evolved requires x > 0");
    if (i >= traj.size())
        throw GridError("phi_evolved: grid index out of range");
    if (!(k > 0.0) || n < 0)
        throw DomainError("phi_evolved: invalid index");
    const Constants& c = traj.constants;
    const double rho = traj.rho[i];
    const double a = profile.eval(traj.t[i]).a;
    const double u = traj.Omega * x * x / (c.hbar * rho * rho);
    const double amp = std::pow(4.0 * traj.Omega / (c.hbar * rho * rho), 0.25) *
                       std::exp(0.5 * (specfun::log_gamma(n + 1.0) -
                                       specfun::log_gamma(n + 2.0 * k))) *
                       std::pow(u, k - 0.25) *
                       specfun::laguerre(n, 2.0 * k - 1.0, u);
    const double x2h = x * x / (2.0 * c.hbar);
    const Complex gauss =
        std::exp(Complex(-x2h * traj.Omega / (rho * rho),
                         x2h * (traj.M[i] * traj.drho[i] / rho + 2.0 * traj.M[i] * a)));
    return amp * gauss * std::polar(1.0, -2.0 * (n + k) * traj.tau[i]);
}

namespace detail {

inline double overlap_cutoff(double k, int deg, double w_c, double omega_over_rho2,
                             double hbar) {
    const double c_env = 0.5 * (w_c + omega_over_rho2) / hbar;
    const double power = std::max(4.0 * k - 1.0, 0.0) + 2.0 * deg;
    return quadrature::gaussian_cutoff(c_env, power);
}

} // namespace detail

/// Quadrature of the cross overlap of a stationary bra with an evolved ket at
/// grid point i. The closed-form counterpart is (-)^{n+m} V_{m,n}.
inline Complex overlap_quadrature(double k, int m, int n, const ClassicalTrajectory& traj,
                                  const CoefficientProfile& profile, std::size_t i,
                                  double rel_tol = 1e-11) {
    if (i >= traj.size())
        throw GridError("overlap_quadrature: grid index out of range");
    const Constants& c = traj.constants;
    const double rho = traj.rho[i];
    const double x_max =
        detail::overlap_cutoff(k, m + n, c.w_c, traj.Omega / (rho * rho), c.hbar);
    const double t = traj.t[i];
    auto integrand = [&](double x) {
        return std::conj(phi_stationary(k, m, c, x, t)) * phi_evolved(k, traj, profile, n, x, i);
    };
    return quadrature::integrate(integrand, 0.0, x_max, rel_tol);
}

/// Closed form of int_0^inf e^{-b x} x^alpha L_n^alpha(lambda x) L_m^alpha(mu x) dx
/// for Re b > 0, alpha > -1, evaluated through the expanded terminating sum
///   Gamma(m+n+alpha+1)/(m! n!) b^{-(m+n+alpha+1)}
///   sum_s (-m,s)(-n,s)/((-m-n-alpha,s) s!) [b(b-lambda-mu)]^s (b-lambda)^{n-s} (b-mu)^{m-s},
/// which stays finite in the confluent limits b = lambda and/or b = mu.
inline Complex laguerre_integral_closed(Complex b, Complex lambda, Complex mu, double alpha,
                                        int n, int m) {
    if (!(b.real() > 0.0))
        throw DomainError("laguerre_integral_closed requires Re b > 0");
    if (!(alpha > -1.0))
        throw DomainError("laguerre_integral_closed requires alpha > -1");
    if (n < 0 || m < 0)
        throw DomainError("laguerre_integral_closed: negative degree");
    const int smax = std::min(m, n);
    for (int j = 0; j < smax; ++j)
        if (std::abs(-m - n - alpha + j) < 1e-12)
            throw PoleError("laguerre_integral_closed: pole in the terminating parameter");
    const Complex bl = b - lambda;
    const Complex bm = b - mu;
    const Complex core = b * (b - lambda - mu);
    Complex sum(0.0, 0.0);
    for (int s = 0; s <= smax; ++s) {
        const double coef = specfun::appell(double(-m), s) * specfun::appell(double(-n), s) /
                            (specfun::appell(-m - n - alpha, s) *
                             std::exp(specfun::log_gamma(s + 1.0)));
        sum += coef * detail::pow_int(core, s) * detail::pow_int(bl, n - s) *
               detail::pow_int(bm, m - s);
    }
    const double pre = std::exp(specfun::log_gamma(m + n + alpha + 1.0) -
                                specfun::log_gamma(m + 1.0) - specfun::log_gamma(n + 1.0));
    const Complex bpow = std::exp(-(m + n + alpha + 1.0) * std::log(b));
    return pre * bpow * sum;
}

/// Norm of the evolved state by quadrature; equals 1 under unitary evolution.
inline double evolved_norm(double k, const ClassicalTrajectory& traj,
                           const CoefficientProfile& profile, int n, std::size_t i) {
    const Constants& c = traj.constants;
    const double rho = traj.rho[i];
    const double c_env = traj.Omega / (rho * rho) / c.hbar;
    const double x_max =
        quadrature::gaussian_cutoff(c_env, std::max(4.0 * k - 1.0, 0.0) + 4.0 * n);
    auto integrand = [&](double x) { return std::norm(phi_evolved(k, traj, profile, n, x, i)); };
    return quadrature::integrate(integrand, 0.0, x_max, 1e-12);
}

/// Expansion of the evolved state over the stationary family through the
/// matrix column, with the ladder-basis sign carried explicitly:
///   phi_n^-(x, t) = sum_m (-)^{n+m} V_{m,n} phi_m^{s-}(x, t).
inline Complex evolved_from_expansion(double k, const ClassicalTrajectory& traj,
                                      const CoefficientProfile& profile, int n, double x,
                                      std::size_t i, int terms) {
    const auto g = group_element_at(traj, i, profile);
    Complex acc(0.0, 0.0);
    for (int m = 0; m < terms; ++m) {
        const double sign = ((n + m) & 1) ? -1.0 : 1.0;
        acc += sign * v_standard(k, m, n, g) * phi_stationary(k, m, traj.constants, x, traj.t[i]);
    }
    return acc;
}

/// Options of the dynamical-equation residual probe. a_term_sign exists for
/// mutation testing: flipping it must break second-order convergence.
struct SchrodingerOptions {
    int expansion_order = 48;
    double a_term_sign = 1.0;
};

/// Finite-difference residual of the evolution equation satisfied by
/// phi_n(x,t) = sum_m V_{m,n}(t) phi_m^{s-}(x,t):
///   i hbar d_t phi = [M/(8 w_c^2)](A0^2-A1^2)(-hbar^2 d_x^2 + 2 g/x^2) phi
///                  + [w_c^2 x^2/(2M) - i hbar a (2 x d_x + 1)] phi,
/// with g = 2(k-1/4)(k-3/4). Derivatives are centered differences with the
/// stated steps; all of (t_c, t_c +- dt) must be trajectory grid points.
/// Returns max |LHS-RHS| normalized by the largest side magnitude.
inline double schrodinger_residual(double k, const ClassicalTrajectory& traj,
                                   const CoefficientProfile& profile, int n,
                                   std::span<const double> x_samples, double dx,
                                   std::span<const double> center_times, double dt,
                                   const SchrodingerOptions& opt = {}) {
    if (x_samples.empty() || center_times.empty())
        throw UsageError("schrodinger_residual: empty sample set");
    const Constants& c = traj.constants;
    const double g_coupling = inverse_square_coupling(k);
    const int N = opt.expansion_order;

    auto column_at = [&](std::size_t idx) {
        const auto g = group_element_at(traj, idx, profile);
        std::vector<Complex> col(N);
        double mass = 0.0;
        for (int m = 0; m < N; ++m) {
            col[m] = v_standard(k, m, n, g);
            mass += std::norm(col[m]);
        }
        if (mass < 1.0 - 1e-10)
            throw NumericsError("schrodinger_residual: expansion order too small for this state");
        return col;
    };
    auto psi = [&](const std::vector<Complex>& col, double x, double t) {
        Complex acc(0.0, 0.0);
        for (int m = 0; m < N; ++m)
            acc += col[m] * phi_stationary(k, m, c, x, t);
        return acc;
    };

    double worst = 0.0;
    double scale = 0.0;
    for (double tc : center_times) {
        const std::size_t i0 = traj.index_of_time(tc);
        const std::size_t im = traj.index_of_time(tc - dt);
        const std::size_t ip = traj.index_of_time(tc + dt);
        const auto col0 = column_at(i0);
        const auto colm = column_at(im);
        const auto colp = column_at(ip);
        const auto cv = profile.eval(tc);
        const double M = profile.ode_coeffs(tc, c.w_c).M;
        const double kin = M / (8.0 * c.w_c * c.w_c) * (cv.A0 * cv.A0 - cv.A1 * cv.A1);
        for (double x : x_samples) {
            const Complex f0 = psi(col0, x, tc);
            const Complex fxp = psi(col0, x + dx, tc);
            const Complex fxm = psi(col0, x - dx, tc);
            const Complex ftp = psi(colp, x, tc + dt);
            const Complex ftm = psi(colm, x, tc - dt);
            const Complex lhs = Complex(0.0, c.hbar) * (ftp - ftm) / (2.0 * dt);
            const Complex d2 = (fxp - 2.0 * f0 + fxm) / (dx * dx);
            const Complex d1 = (fxp - fxm) / (2.0 * dx);
            const Complex rhs =
                kin * (-c.hbar * c.hbar * d2 + (2.0 * g_coupling / (x * x)) * f0) +
                (c.w_c * c.w_c * x * x / (2.0 * M)) * f0 +
                opt.a_term_sign * Complex(0.0, -c.hbar * cv.a) * (2.0 * x * d1 + f0);
            worst = std::max(worst, std::abs(lhs - rhs));
            scale = std::max({scale, std::abs(lhs), std::abs(rhs)});
        }
    }
    if (!(scale > 0.0))
        throw NumericsError("schrodinger_residual: degenerate sample window");
    return worst / scale;
}

} // namespace su11
