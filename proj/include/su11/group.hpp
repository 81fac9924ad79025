#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "su11/classical.hpp"
#include "su11/coeffs.hpp"
#include "su11/errors.hpp"

namespace su11 {

using Complex = std::complex<double>;

/// A pseudo-unitary group element (alpha, beta) with |alpha|^2 - |beta|^2 = 1.
/// phase_branch carries arg(alpha) tracked continuously along a trajectory;
/// every non-integer power of conj(alpha) downstream is defined through it, so
/// matrix elements stay continuous in time even when arg(alpha) wraps.
struct GroupElement {
    Complex alpha{1.0, 0.0};
    Complex beta{0.0, 0.0};
    double phase_branch = 0.0;

    GroupElement() = default;

    GroupElement(Complex a, Complex b) : alpha(a), beta(b), phase_branch(std::arg(a)) {
        validate();
    }

    GroupElement(Complex a, Complex b, double branch) : alpha(a), beta(b), phase_branch(branch) {
        validate();
    }

    void validate() const {
        const double defect = std::norm(alpha) - std::norm(beta) - 1.0;
        if (!(std::abs(defect) <= 1e-10))
            throw InvariantError("group element violates |alpha|^2 - |beta|^2 = 1 by " +
                                 std::to_string(defect));
        if (!(std::abs(beta) < std::abs(alpha)))
            throw InvariantError("group element requires |beta| < |alpha|");
    }
};

/// Parameters of the normally-ordered factorization of a group element.
/// gamma = -ln(1 - |xi|^2) >= 0; phi is twice the (unwrapped) arg(alpha).
struct DisentangledParams {
    Complex xi{0.0, 0.0};
    double gamma = 0.0;
    double phi = 0.0;
};

/// Group element at trajectory grid point i, built from the classical data:
///   alpha = e^{i(w_c t - tau)}/2 [ P + Q + i R ],
///   beta  = e^{i(w_c t + tau)}/2 [ -P + Q + i R ],
/// with P = sqrt(Omega/w_c)/rho, Q = rho sqrt(w_c/Omega),
///      R = M (rho' + 2 a rho)/sqrt(w_c Omega).
/// Since P + Q > 0 the bracket never crosses the negative real axis and
/// phase_branch = (w_c t - tau) + arg(P + Q + iR) is continuous in t.
inline GroupElement group_element_at(const ClassicalTrajectory& traj, std::size_t i,
                                     const CoefficientProfile& profile) {
    if (i >= traj.size())
        throw GridError("group_element_at: grid index out of range");
    if (!(traj.Omega > 0.0))
        throw InvariantError("group_element_at requires Omega > 0");
    const double w_c = traj.constants.w_c;
    const double t = traj.t[i];
    const double rho = traj.rho[i];
    const double a = profile.eval(t).a;
    const double P = std::sqrt(traj.Omega / w_c) / rho;
    const double Q = rho * std::sqrt(w_c / traj.Omega);
    const double R = traj.M[i] * (traj.drho[i] + 2.0 * a * rho) / std::sqrt(w_c * traj.Omega);
    const double base = w_c * t - traj.tau[i];
    const Complex alpha = 0.5 * std::polar(1.0, base) * Complex(P + Q, R);
    const Complex beta = 0.5 * std::polar(1.0, w_c * t + traj.tau[i]) * Complex(Q - P, R);
    return GroupElement(alpha, beta, base + std::atan2(R, P + Q));
}

/// xi = beta / conj(alpha), gamma = -ln(1 - |xi|^2), phi = 2 phase_branch.
inline DisentangledParams disentangle(const GroupElement& g) {
    const Complex xi = g.beta / std::conj(g.alpha);
    const double n = std::norm(xi);
    if (!(n < 1.0))
        throw InvariantError("disentangle requires |xi| < 1");
    return DisentangledParams{xi, -std::log1p(-n), 2.0 * g.phase_branch};
}

/// Inverse of disentangle: alpha = e^{i phi/2}/sqrt(1-|xi|^2),
/// beta = xi e^{-i phi/2}/sqrt(1-|xi|^2).
inline GroupElement reconstruct(const DisentangledParams& p) {
    const double n = std::norm(p.xi);
    if (!(n < 1.0))
        throw InvariantError("reconstruct requires |xi| < 1");
    const double s = 1.0 / std::sqrt(1.0 - n);
    const Complex half = std::polar(1.0, 0.5 * p.phi);
    return GroupElement(s * half, s * p.xi / half, 0.5 * p.phi);
}

/// The ratio form of xi evaluated literally from trajectory data:
///   xi = (-Omega/rho + w_c rho + i M (rho' + 2 a rho))
///      / ( Omega/rho + w_c rho - i M (rho' + 2 a rho)) e^{2 i w_c t}.
inline Complex xi_direct(const ClassicalTrajectory& traj, std::size_t i,
                         const CoefficientProfile& profile) {
    if (i >= traj.size())
        throw GridError("xi_direct: grid index out of range");
    if (!(traj.Omega > 0.0))
        throw InvariantError("xi_direct requires Omega > 0");
    const double w_c = traj.constants.w_c;
    const double t = traj.t[i];
    const double rho = traj.rho[i];
    const double a = profile.eval(t).a;
    const double im = traj.M[i] * (traj.drho[i] + 2.0 * a * rho);
    const Complex num(-traj.Omega / rho + w_c * rho, im);
    const Complex den(traj.Omega / rho + w_c * rho, -im);
    return num / den * std::polar(1.0, 2.0 * w_c * t);
}

/// The phase factor e^{i phi / 2} evaluated from its own closed form,
/// e^{i(w_c t - tau)} z/|z| with z = Omega/rho + w_c rho + i M (rho'+2 a rho).
inline Complex phase_factor_direct(const ClassicalTrajectory& traj, std::size_t i,
                                   const CoefficientProfile& profile) {
    const double w_c = traj.constants.w_c;
    const double t = traj.t[i];
    const double rho = traj.rho[i];
    const double a = profile.eval(t).a;
    const Complex z(traj.Omega / rho + w_c * rho,
                    traj.M[i] * (traj.drho[i] + 2.0 * a * rho));
    return std::polar(1.0, w_c * t - traj.tau[i]) * z / std::abs(z);
}

struct ConstancyReport {
    double max_xi_drift = 0.0;
    double max_phase_drift = 0.0;
};

/// For the self-related family A0 = 2 w_c, A1 = a = 0 the disentangled
/// parameters are constants of the motion; returns their maximum drift along
/// the grid. UsageError if the profile is not of that family.
inline ConstancyReport constancy_check(const ClassicalTrajectory& traj,
                                       const CoefficientProfile& profile) {
    const double w_c = traj.constants.w_c;
    const auto v0 = profile.eval(traj.t.front());
    const auto v1 = profile.eval(traj.t.back());
    const bool self_related = std::abs(v0.A0 - 2.0 * w_c) < 1e-12 && v0.A1 == 0.0 &&
                              v0.a == 0.0 && std::abs(v1.A0 - 2.0 * w_c) < 1e-12 &&
                              v1.A1 == 0.0 && v1.a == 0.0 && v0.dA0 == 0.0;
    if (!self_related)
        throw UsageError("constancy_check requires the constant profile A0 = 2 w_c, A1 = a = 0");

    ConstancyReport rep;
    const auto g0 = group_element_at(traj, 0, profile);
    const Complex xi0 = disentangle(g0).xi;
    const Complex u0 = g0.alpha / std::abs(g0.alpha);
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const auto g = group_element_at(traj, i, profile);
        rep.max_xi_drift = std::max(rep.max_xi_drift, std::abs(disentangle(g).xi - xi0));
        rep.max_phase_drift =
            std::max(rep.max_phase_drift, std::abs(g.alpha / std::abs(g.alpha) - u0));
    }
    return rep;
}

/// Largest pseudo-unitarity defect | |alpha|^2 - |beta|^2 - 1 | on the grid.
inline double pseudo_unitarity_defect(const ClassicalTrajectory& traj,
                                      const CoefficientProfile& profile) {
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto g = group_element_at(traj, i, profile);
        worst = std::max(worst, std::abs(std::norm(g.alpha) - std::norm(g.beta) - 1.0));
    }
    return worst;
}

} // namespace su11
