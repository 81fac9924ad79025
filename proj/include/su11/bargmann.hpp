#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "su11/errors.hpp"
#include "su11/group.hpp"
#include "su11/specfun.hpp"

namespace su11 {

namespace detail {

inline Complex pow_int(Complex z, int n) {
    if (n < 0)
        return 1.0 / pow_int(z, -n);
    Complex r(1.0, 0.0);
    while (n-- > 0)
        r *= z;
    return r;
}

/// conj(alpha)^s for real s, with the phase taken from the continuously
/// tracked branch rather than the principal argument.
inline Complex abar_pow(const GroupElement& g, double s) {
    return std::polar(std::exp(s * std::log(std::abs(g.alpha))), -s * g.phase_branch);
}

} // namespace detail

/// Matrix element of a finite transformation between discrete-basis states,
/// production route (always pole-free: the hypergeometric c = 1+|m'-m| is a
/// positive integer). For row >= col,
///   V = A ᾱ^{-(m+m'+2k)} β^{m'-m} F(-m, 1-m-2k; 1+m'-m; -|β|²),
/// and the mirror case carries (-β̄)^{m-m'} with the index roles swapped.
inline Complex v_standard(double k, int mp, int m, const GroupElement& g) {
    if (!(k > 0.0))
        throw DomainError("v_standard requires k > 0");
    if (mp < 0 || m < 0)
        throw DomainError("v_standard requires non-negative indices");
    const int lo = std::min(mp, m), hi = std::max(mp, m), mu = hi - lo;
    const double bb = std::norm(g.beta);
    const double logA = -specfun::log_gamma(mu + 1.0) +
                        0.5 * (specfun::log_gamma(hi + 1.0) + specfun::log_gamma(hi + 2.0 * k) -
                               specfun::log_gamma(lo + 1.0) - specfun::log_gamma(lo + 2.0 * k));
    const double F = specfun::hypergeom_terminating(lo, 1.0 - lo - 2.0 * k, 1.0 + mu, -bb);
    const Complex base =
        (mp >= m) ? detail::pow_int(g.beta, mu) : detail::pow_int(-std::conj(g.beta), mu);
    return std::exp(logA) * detail::abar_pow(g, -(m + mp + 2.0 * k)) * base * F;
}

/// The two-index closed form with argument |α|²/|β|²; verification route.
/// Requires β != 0 (NotApplicableError otherwise; callers fall back to
/// v_standard). The terminating sum is accumulated in extended precision and
/// folded into the log-space prefactor, since its value grows like
/// (|α|/|β|)^{2 min(m,m')}.
inline Complex v_general(double k, int mp, int m, const GroupElement& g,
                         double* cond_out = nullptr) {
    if (!(k > 0.0) || mp < 0 || m < 0)
        throw DomainError("v_general: invalid parameters");
    const double bb = std::norm(g.beta);
    const double aa = std::norm(g.alpha);
    if (!(bb > 1e-280 * aa))
        throw NotApplicableError("v_general is undefined at beta = 0");
    // form the argument in extended precision straight from the components:
    // the sum sits on deep cancellation, so z must not carry double rounding
    const long double ar = g.alpha.real(), ai = g.alpha.imag();
    const long double br = g.beta.real(), bi = g.beta.imag();
    const long double z = (ar * ar + ai * ai) / (br * br + bi * bi);
    // the series is symmetric in (-m, -m'); driving it by the smaller index
    // keeps the term count minimal. Extended precision plus the reported
    // cancellation factor keep the route honest deep in the alternating tail.
    double cond = 1.0;
    const long double F = specfun::hypergeom_terminating_cond(
        std::min(m, mp), double(-std::max(m, mp)), 1.0 - m - mp - 2.0 * k, z, cond);
    if (cond_out)
        *cond_out = cond;
    if (F == 0.0L)
        return Complex(0.0, 0.0);
    const double logpre =
        specfun::log_gamma(m + mp + 2.0 * k) -
        0.5 * (specfun::log_gamma(m + 1.0) + specfun::log_gamma(m + 2.0 * k) +
               specfun::log_gamma(mp + 1.0) + specfun::log_gamma(mp + 2.0 * k));
    const double logmag = logpre - (m + mp + 2.0 * k) * 0.5 * std::log(aa) +
                          (m + mp) * 0.5 * std::log(bb) + double(std::log(std::abs(F)));
    double phase = (m + mp + 2.0 * k) * g.phase_branch + (mp - m) * std::arg(g.beta);
    if (m & 1)
        phase += M_PI; // the (-β̄)^m factor
    if (F < 0.0L)
        phase += M_PI;
    return std::polar(std::exp(logmag), phase);
}

/// The two single-Gamma-row alternatives. `first` has argument |α|² and
/// `second` argument 1/|α|²; in the second form the row index enters the
/// hypergeometric (F[-m, m'+2k; 2k; .]), which the four-way agreement test
/// pins down. Both sit on deep zeros in the row < col sector at small |β|,
/// so each carries a cancellation factor that sweeps use to skip points
/// where the route cannot be evaluated honestly in double precision.
struct AltForms {
    Complex first;
    double first_cond = 1.0;
    Complex second;
    double second_cond = 1.0;
};

inline AltForms v_alt(double k, int mp, int m, const GroupElement& g) {
    if (!(k > 0.0) || mp < 0 || m < 0)
        throw DomainError("v_alt: invalid parameters");
    const double aa = std::norm(g.alpha);
    AltForms out;

    if (std::abs(g.beta) == 0.0) {
        if (mp == m) {
            const double F1 =
                specfun::hypergeom_terminating(m, 1.0 - m - 2.0 * k, 1.0 - 2 * m - 2.0 * k, aa);
            const double logA = specfun::log_gamma(2.0 * m + 2.0 * k) -
                                specfun::log_gamma(m + 1.0) - specfun::log_gamma(m + 2.0 * k);
            out.first = std::exp(logA) * detail::abar_pow(g, -(2.0 * m + 2.0 * k)) * F1;
            out.second = v_standard(k, m, m, g);
        }
        return out; // off-diagonal entries vanish in the beta -> 0 limit
    }

    // first printed form
    {
        const double logpre =
            specfun::log_gamma(m + mp + 2.0 * k) -
            0.5 * (specfun::log_gamma(m + 1.0) + specfun::log_gamma(m + 2.0 * k) +
                   specfun::log_gamma(mp + 1.0) + specfun::log_gamma(mp + 2.0 * k));
        double cond = 1.0;
        const double F1 = specfun::hypergeom_terminating_cond(
            m, 1.0 - m - 2.0 * k, 1.0 - m - mp - 2.0 * k, aa, cond);
        out.first_cond = cond;
        out.first = std::exp(logpre) * detail::abar_pow(g, -(m + mp + 2.0 * k)) *
                    detail::pow_int(g.beta, mp - m) * F1;
    }

    // second form
    {
        const double logpre =
            0.5 * (specfun::log_gamma(m + 2.0 * k) + specfun::log_gamma(mp + 2.0 * k) -
                   specfun::log_gamma(m + 1.0) - specfun::log_gamma(mp + 1.0)) -
            specfun::log_gamma(2.0 * k);
        double cond = 1.0;
        const double F2 =
            specfun::hypergeom_terminating_cond(m, mp + 2.0 * k, 2.0 * k, 1.0 / aa, cond);
        out.second_cond = cond;
        out.second = ((m & 1) ? -1.0 : 1.0) * std::exp(logpre) *
                     detail::abar_pow(g, -(mp + 2.0 * k)) * detail::pow_int(g.alpha, m) *
                     detail::pow_int(g.beta, mp - m) * F2;
    }
    return out;
}

/// Half-integer-index reduction to associated Legendre functions, for
/// k = 1/4 and k = 3/4 only. The fixed branch rules are
///   (α/ᾱ)^{s} = e^{2 i s arg α},  (β̄/β)^{s} = e^{-2 i s arg β},
/// with arg α read from the tracked phase branch.
inline Complex v_legendre(double k, int mp, int m, const GroupElement& g) {
    const bool quarter = std::abs(k - 0.25) < 1e-14;
    const bool three_quarter = std::abs(k - 0.75) < 1e-14;
    if (!quarter && !three_quarter)
        throw DomainError("v_legendre is defined for k = 1/4 and k = 3/4 only");
    if (mp < 0 || m < 0)
        throw DomainError("v_legendre requires non-negative indices");
    if (std::abs(g.beta) == 0.0)
        return (mp == m) ? detail::abar_pow(g, -(2.0 * m + 2.0 * k)) : Complex(0.0, 0.0);

    const double x = 1.0 / std::abs(g.alpha);
    const double sign = ((m + mp) & 1) ? -1.0 : 1.0;
    const Complex root = detail::abar_pow(g, -0.5);
    const Complex beta_ratio = std::polar(1.0, -(m - mp) * std::arg(g.beta));
    double fac, P;
    Complex alpha_ratio;
    if (quarter) {
        fac = std::exp(0.5 * (specfun::log_gamma(2.0 * m + 1.0) -
                              specfun::log_gamma(2.0 * mp + 1.0)));
        alpha_ratio = std::polar(1.0, (m + mp) * g.phase_branch);
        P = specfun::legendre_assoc(mp + m, mp - m, x);
    } else {
        fac = std::exp(0.5 * (specfun::log_gamma(2.0 * m + 2.0) -
                              specfun::log_gamma(2.0 * mp + 2.0)));
        alpha_ratio = std::polar(1.0, (m + mp + 1) * g.phase_branch);
        P = specfun::legendre_assoc(mp + m + 1, mp - m, x);
    }
    return sign * root * fac * alpha_ratio * beta_ratio * P;
}

/// Ladder-expansion series: with p = q + m - m' forced by weight matching,
///   V = e^{i(m+k)φ} Γ(2k)/sqrt(m! Γ(m+2k) m'! Γ(m'+2k))
///       Σ_q (-ξ̄)^p ξ^q / (p! q!) (q+m)! Γ(q+m+2k)/Γ(2k) e^{γ(q+m+k)},
/// where γ = -ln(1-|ξ|²) as stored in DisentangledParams. The term ratio
/// approaches |ξ|²/(1-|ξ|²), so the series converges precisely for
/// |ξ|² < 1/2, i.e. |β| < 1.
inline Complex v_series(double k, int mp, int m, const DisentangledParams& p,
                        double tol = 1e-13, double* cond_out = nullptr) {
    if (!(k > 0.0) || mp < 0 || m < 0)
        throw DomainError("v_series: invalid parameters");
    const double nxi = std::norm(p.xi);
    if (!(nxi < 0.5))
        throw ConvergenceError("series route requires |xi|^2 < 1/2 (equivalently |beta| < 1)");
    const double W = 1.0 / (1.0 - nxi); // e^{gamma}
    const int q0 = std::max(0, mp - m);
    const int p0 = q0 + m - mp;

    const Complex mxibar = -std::conj(p.xi);
    const double logt0 = specfun::log_gamma(q0 + m + 1.0) + specfun::log_gamma(q0 + m + 2.0 * k) -
                         specfun::log_gamma(2.0 * k) - specfun::log_gamma(p0 + 1.0) -
                         specfun::log_gamma(q0 + 1.0) + (q0 + m + k) * std::log(W);
    Complex term = std::exp(logt0) * detail::pow_int(mxibar, p0) * detail::pow_int(p.xi, q0);
    Complex sum = term;
    double peak = std::abs(term);
    int q = q0;
    const int max_terms = 100000;
    while (true) {
        const int pq = q + m - mp;
        const Complex ratio = mxibar * p.xi *
                              ((q + m + 1.0) * (q + m + 2.0 * k) /
                               ((pq + 1.0) * (q + 1.0))) *
                              W;
        term *= ratio;
        sum += term;
        peak = std::max(peak, std::abs(term));
        ++q;
        if (q - q0 > 4 && std::abs(term) <= tol * std::abs(sum))
            break;
        if (q - q0 > max_terms)
            throw ConvergenceError("series route did not converge within its term budget");
    }
    if (cond_out)
        *cond_out = (std::abs(sum) > 0.0) ? peak / std::abs(sum)
                                          : std::numeric_limits<double>::infinity();
    const double logpre =
        specfun::log_gamma(2.0 * k) -
        0.5 * (specfun::log_gamma(m + 1.0) + specfun::log_gamma(m + 2.0 * k) +
               specfun::log_gamma(mp + 1.0) + specfun::log_gamma(mp + 2.0 * k));
    return std::polar(std::exp(logpre), (m + k) * p.phi) * sum;
}

/// Truncated matrix of elements with per-column completeness diagnostics.
struct BargmannMatrix {
    double k = 0.25;
    GroupElement g;
    int N = 0;
    std::vector<Complex> entries; // row-major, entries[mp * N + m]
    std::vector<double> tail;     // per column: 1 - sum of |V|^2 over stored rows
    double tail_tol = 1e-8;
    bool tail_warning = false;

    const Complex& at(int mp, int m) const { return entries[std::size_t(mp) * N + m]; }
};

namespace detail {
inline int env_thread_cap() {
    if (const char* s = std::getenv("SU11_THREADS")) {
        const int n = std::atoi(s);
        if (n >= 1)
            return std::min(n, 64);
    }
    return 1;
}
} // namespace detail

/// Assemble the N x N truncation via the production route. Entries are
/// independent, so columns may be evaluated concurrently (capped by the
/// SU11_THREADS environment variable); results do not depend on the
/// evaluation order.
inline BargmannMatrix build_matrix(double k, const GroupElement& g, int N,
                                   double tail_tol = 1e-8) {
    if (N < 1)
        throw DomainError("build_matrix requires N >= 1");
    BargmannMatrix mat;
    mat.k = k;
    mat.g = g;
    mat.N = N;
    mat.tail_tol = tail_tol;
    mat.entries.assign(std::size_t(N) * N, Complex(0.0, 0.0));

    const int threads = std::min(detail::env_thread_cap(), N);
    auto fill_columns = [&](int first) {
        for (int m = first; m < N; m += threads)
            for (int mp = 0; mp < N; ++mp)
                mat.entries[std::size_t(mp) * N + m] = v_standard(k, mp, m, g);
    };
    if (threads <= 1) {
        fill_columns(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int w = 0; w < threads; ++w)
            pool.emplace_back(fill_columns, w);
        for (auto& th : pool)
            th.join();
    }

    mat.tail.assign(N, 0.0);
    for (int m = 0; m < N; ++m) {
        double s = 0.0;
        for (int mp = 0; mp < N; ++mp)
            s += std::norm(mat.at(mp, m));
        mat.tail[m] = 1.0 - s;
        if (mat.tail[m] > tail_tol)
            mat.tail_warning = true;
    }
    return mat;
}

/// Index map from ladder label to oscillator quantum number, where one exists.
inline std::string oscillator_mapping(double k) {
    if (std::abs(k - 0.25) < 1e-14)
        return "m->2m";
    if (std::abs(k - 0.75) < 1e-14)
        return "m->2m+1";
    return "none";
}

} // namespace su11
