#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>

#include "su11/errors.hpp"

namespace su11::specfun {

/// ln Gamma(x) for x > 0. Thin wrapper that avoids the signgam global so it
/// stays reentrant under concurrent matrix assembly.
inline double log_gamma(double x) {
    if (!(x > 0.0))
        throw DomainError("log_gamma: argument must be positive, got " + std::to_string(x));
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

/// Appell symbol (a,s): 1 for s=0, a(a+1)...(a+s-1) for s>0.
inline double appell(double a, int s) {
    if (s < 0)
        throw DomainError("appell: s must be non-negative");
    double p = 1.0;
    for (int j = 0; j < s; ++j)
        p *= a + j;
    return p;
}

/// (2p)!! = 2^p p!.  Exact product for moderate p, log-gamma route otherwise.
inline double even_double_factorial(int p) {
    if (p < 0)
        throw DomainError("even_double_factorial: p must be non-negative");
    if (p <= 85) {
        double r = 1.0;
        for (int j = 1; j <= p; ++j)
            r *= 2.0 * j;
        return r;
    }
    return std::exp(p * std::log(2.0) + log_gamma(p + 1.0));
}

/// (2q-1)!! with the empty-product convention (-1)!! = 1.
inline double odd_double_factorial(int q) {
    if (q < 0)
        throw DomainError("odd_double_factorial: q must be non-negative");
    if (q <= 85) {
        double r = 1.0;
        for (int j = 1; j <= q; ++j)
            r *= 2.0 * j - 1.0;
        return r;
    }
    // (2q-1)!! = (2q)! / (2^q q!)
    return std::exp(log_gamma(2.0 * q + 1.0) - q * std::log(2.0) - log_gamma(q + 1.0));
}

namespace detail {
inline double abs_val(double x) { return std::abs(x); }
inline double abs_val(long double x) { return double(std::abs(x)); }
inline double abs_val(const std::complex<double>& z) { return std::abs(z); }
} // namespace detail

/// Terminating Gauss hypergeometric series F[-m, b; c; z], summed exactly by
/// the term recurrence term_{s+1} = term_s (-m+s)(b+s) / ((c+s)(1+s)) z.
/// The series self-truncates early when b is a non-positive integer > -m.
/// Throws PoleError if c+s vanishes while the running term is still nonzero.
template <typename T>
T hypergeom_terminating(int m, double b, double c, T z) {
    if (m < 0)
        throw DomainError("hypergeom_terminating: order must be non-negative");
    T sum(1.0);
    T term(1.0);
    for (int s = 0; s < m; ++s) {
        if (term == T(0.0))
            break; // an earlier (b+s) factor terminated the series
        const double den = c + s;
        if (std::abs(den) <= 1e-12 * std::max(1.0, std::abs(c)))
            throw PoleError("hypergeom_terminating: c+s ~ 0 inside the terminating range");
        // keep the coefficient in T's precision; extended-precision callers
        // rely on it when the sum cancels deeply
        term *= z * (T(-m + s) * T(b + s)) / (T(den) * T(1.0 + s));
        sum += term;
    }
    return sum;
}

/// Same sum, but also reports the largest intermediate magnitude so callers
/// can judge cancellation: the relative error is roughly eps * cond.
template <typename T>
T hypergeom_terminating_cond(int m, double b, double c, T z, double& cond) {
    T sum(1.0);
    T term(1.0);
    double peak = 1.0;
    for (int s = 0; s < m; ++s) {
        if (term == T(0.0))
            break;
        const double den = c + s;
        if (std::abs(den) <= 1e-12 * std::max(1.0, std::abs(c)))
            throw PoleError("hypergeom_terminating: c+s ~ 0 inside the terminating range");
        term *= z * (T(-m + s) * T(b + s)) / (T(den) * T(1.0 + s));
        sum += term;
        peak = std::max(peak, detail::abs_val(sum));
        peak = std::max(peak, detail::abs_val(term));
    }
    const double mag = detail::abs_val(sum);
    cond = (mag > 0.0) ? peak / mag : std::numeric_limits<double>::infinity();
    return sum;
}

/// Associated Laguerre polynomial L_n^alpha(x) by the three-term recurrence
/// (n+1) L_{n+1} = (2n+1+alpha-x) L_n - (n+alpha) L_{n-1}.
template <typename T>
T laguerre(int n, double alpha, T x) {
    if (n < 0)
        throw DomainError("laguerre: degree must be non-negative");
    if (!(alpha > -1.0))
        throw DomainError("laguerre: requires alpha > -1");
    T lm(1.0); // L_0
    if (n == 0)
        return lm;
    T lk = T(1.0 + alpha) - x; // L_1
    for (int j = 1; j < n; ++j) {
        T lp = ((T(2.0 * j + 1.0 + alpha) - x) * lk - T(j + alpha) * lm) / T(j + 1.0);
        lm = lk;
        lk = lp;
    }
    return lk;
}

/// Associated Legendre function P_n^m(x) with the Condon-Shortley phase,
/// seeded by P_m^m = (-1)^m (2m-1)!! (1-x^2)^{m/2} and raised in degree.
/// Negative orders use P_n^{-m} = (-1)^m (n-m)!/(n+m)! P_n^m.
inline double legendre_assoc(int n, int m, double x) {
    if (n < 0 || std::abs(m) > n)
        throw DomainError("legendre_assoc: requires |m| <= n");
    if (!(x > -1.0 && x <= 1.0))
        throw DomainError("legendre_assoc: requires x in (-1, 1]");
    if (m < 0) {
        const int mm = -m;
        const double ratio = std::exp(log_gamma(n - mm + 1.0) - log_gamma(n + mm + 1.0));
        return ((mm & 1) ? -1.0 : 1.0) * ratio * legendre_assoc(n, mm, x);
    }
    const double s = std::sqrt((1.0 - x) * (1.0 + x));
    double pmm = 1.0;
    for (int i = 1; i <= m; ++i)
        pmm *= -(2.0 * i - 1.0) * s;
    if (n == m)
        return pmm;
    double pm1 = x * (2.0 * m + 1.0) * pmm; // P_{m+1}^m
    for (int l = m + 2; l <= n; ++l) {
        const double pl = (x * (2.0 * l - 1.0) * pm1 - (l + m - 1.0) * pmm) / (l - m);
        pmm = pm1;
        pm1 = pl;
    }
    return pm1;
}

namespace detail {
inline double rel_residual(double lhs, double rhs) {
    return std::abs(lhs - rhs) / std::max(std::abs(lhs), 1.0);
}
} // namespace detail

/// Residual of the transformation F[-m,b;c;z] = (1-z)^m F[-m,c-b;c;z/(z-1)].
inline double check_gauss_transformation(int m, double b, double c, double z) {
    const double lhs = hypergeom_terminating(m, b, c, z);
    const double rhs =
        std::pow(1.0 - z, double(m)) * hypergeom_terminating(m, c - b, c, z / (z - 1.0));
    return detail::rel_residual(lhs, rhs);
}

/// Residual of F[-p,q+1/2;1/2;x^2] = (-)^q (2p)!!/(2q-1)!! (1-x^2)^{(p-q)/2} P_{q+p}^{q-p}(x).
inline double check_legendre_identity_even(int p, int q, double x) {
    const double lhs = hypergeom_terminating(p, q + 0.5, 0.5, x * x);
    const double sign = (q & 1) ? -1.0 : 1.0;
    const double rhs = sign * even_double_factorial(p) / odd_double_factorial(q) *
                       std::pow(1.0 - x * x, 0.5 * (p - q)) * legendre_assoc(q + p, q - p, x);
    return detail::rel_residual(lhs, rhs);
}

/// Residual of F[-p,q+3/2;3/2;x^2] = (-)^q (2p)!!/(2q+1)!! (1-x^2)^{(p-q)/2} P_{q+p+1}^{q-p}(x)/x.
inline double check_legendre_identity_odd(int p, int q, double x) {
    const double lhs = hypergeom_terminating(p, q + 1.5, 1.5, x * x);
    const double sign = (q & 1) ? -1.0 : 1.0;
    const double dfac = (2.0 * q + 1.0) * odd_double_factorial(q); // (2q+1)!!
    const double rhs = sign * even_double_factorial(p) / dfac / x *
                       std::pow(1.0 - x * x, 0.5 * (p - q)) * legendre_assoc(q + p + 1, q - p, x);
    return detail::rel_residual(lhs, rhs);
}

/// Residual of the argument inversion for non-negative integer l, (b,l) != 0:
/// F[-l,b;c;-y] = (b,l)/(c,l) y^l F[-l,1-l-c;1-l-b;-1/y].
inline double check_gauss_argument_inversion(int l, double b, double c, double y) {
    const double bl = appell(b, l);
    if (bl == 0.0)
        throw UsageError("argument inversion requires (b,l) != 0");
    const double lhs = hypergeom_terminating(l, b, c, -y);
    const double rhs = bl / appell(c, l) * std::pow(y, double(l)) *
                       hypergeom_terminating(l, 1.0 - l - c, 1.0 - l - b, -1.0 / y);
    return detail::rel_residual(lhs, rhs);
}

/// Residual of the Gauss evaluation that moves the argument 1 + 1/y to -1/y:
/// F[-m,-m';1-m-m'-2k;1+1/y] = G(m+2k)G(m'+2k)/(G(2k)G(m+m'+2k)) F[-m,-m';2k;-1/y].
inline double check_gauss_shift_evaluation(int m, int mp, double k, double y) {
    const double lhs = hypergeom_terminating(m, double(-mp), 1.0 - m - mp - 2.0 * k, 1.0 + 1.0 / y);
    const double pre = std::exp(log_gamma(mp + 2.0 * k) + log_gamma(m + 2.0 * k) -
                                log_gamma(2.0 * k) - log_gamma(m + mp + 2.0 * k));
    const double rhs = pre * hypergeom_terminating(m, double(-mp), 2.0 * k, -1.0 / y);
    return detail::rel_residual(lhs, rhs);
}

/// Residual of the m >= m' reduction of the two-index terminating series:
/// F[-m,-m';1-m-m'-2k;(1+y)/y] =
///   m! G(m+2k) / ((m-m')! G(m+m'+2k)) (-y)^{-m'} F[-m',1-m'-2k;1-m'+m;-y].
inline double check_index_reduction_high(int m, int mp, double k, double y) {
    if (m < mp)
        throw UsageError("check_index_reduction_high requires m >= m'");
    const double lhs = hypergeom_terminating(m, double(-mp), 1.0 - m - mp - 2.0 * k, (1.0 + y) / y);
    const double pre = std::exp(log_gamma(m + 1.0) + log_gamma(m + 2.0 * k) -
                                log_gamma(m - mp + 1.0) - log_gamma(m + mp + 2.0 * k));
    const double sign = (mp & 1) ? -1.0 : 1.0;
    const double rhs = pre * sign * std::pow(y, double(-mp)) *
                       hypergeom_terminating(mp, 1.0 - mp - 2.0 * k, 1.0 - mp + m, -y);
    return detail::rel_residual(lhs, rhs);
}

/// Mirror reduction for m' >= m.
inline double check_index_reduction_low(int m, int mp, double k, double y) {
    if (mp < m)
        throw UsageError("check_index_reduction_low requires m' >= m");
    const double lhs = hypergeom_terminating(m, double(-mp), 1.0 - m - mp - 2.0 * k, (1.0 + y) / y);
    const double pre = std::exp(log_gamma(mp + 1.0) + log_gamma(mp + 2.0 * k) -
                                log_gamma(mp - m + 1.0) - log_gamma(m + mp + 2.0 * k));
    const double sign = (m & 1) ? -1.0 : 1.0;
    const double rhs = pre * sign * std::pow(y, double(-m)) *
                       hypergeom_terminating(m, 1.0 - m - 2.0 * k, 1.0 - m + mp, -y);
    return detail::rel_residual(lhs, rhs);
}

} // namespace su11::specfun
