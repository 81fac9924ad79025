#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "su11/errors.hpp"

namespace su11 {

/// Global constants of a run: reference frequency, action quantum and the
/// lowest-weight index of the representation.
struct Constants {
    double w_c = 1.0;
    double hbar = 1.0;
    double k = 0.25;

    void validate() const {
        if (!(w_c > 0.0))
            throw ConfigError("system.w_c must be positive");
        if (!(hbar > 0.0))
            throw ConfigError("system.hbar must be positive");
        if (!(k > 0.0))
            throw ConfigError("system.k must be positive");
    }
};

/// Values and first time-derivatives of the Hamiltonian coefficients at one
/// instant.
struct CoeffValues {
    double A0 = 0, A1 = 0, a = 0;
    double dA0 = 0, dA1 = 0, da = 0;
};

/// Data needed by the second-order classical equation at one instant:
///   y'' + (Mdot/M) y' + Q y = 0,
/// with M = 2 w_c / (A0 - A1) and
///   Q = (A0^2 - A1^2)/4 - 4 a^2 + (2/M) d(M a)/dt.
struct OdeCoeffs {
    double M = 0;
    double dlogM = 0; // Mdot / M
    double Q = 0;
};

namespace detail {

/// Natural cubic spline with analytic first derivative.
class CubicSpline {
  public:
    CubicSpline() = default;

    CubicSpline(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        y2_.assign(n, 0.0);
        if (n < 3)
            return; // degenerates to a straight line
        std::vector<double> u(n - 1, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double sig = (x_[i] - x_[i - 1]) / (x_[i + 1] - x_[i - 1]);
            const double p = sig * y2_[i - 1] + 2.0;
            y2_[i] = (sig - 1.0) / p;
            u[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]) -
                   (y_[i] - y_[i - 1]) / (x_[i] - x_[i - 1]);
            u[i] = (6.0 * u[i] / (x_[i + 1] - x_[i - 1]) - sig * u[i - 1]) / p;
        }
        for (std::size_t i = n - 1; i-- > 1;)
            y2_[i] = y2_[i] * y2_[i + 1] + u[i];
        y2_.front() = y2_.back() = 0.0;
    }

    void eval(double t, double& value, double& deriv) const {
        const std::size_t n = x_.size();
        std::size_t lo = 0, hi = n - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if (x_[mid] > t)
                hi = mid;
            else
                lo = mid;
        }
        const double h = x_[hi] - x_[lo];
        const double A = (x_[hi] - t) / h;
        const double B = (t - x_[lo]) / h;
        value = A * y_[lo] + B * y_[hi] +
                ((A * A * A - A) * y2_[lo] + (B * B * B - B) * y2_[hi]) * (h * h) / 6.0;
        deriv = (y_[hi] - y_[lo]) / h +
                ((3.0 * B * B - 1.0) * y2_[hi] - (3.0 * A * A - 1.0) * y2_[lo]) * h / 6.0;
    }

  private:
    std::vector<double> x_, y_;
    std::vector<double> y2_;
};

} // namespace detail

/// Time-dependent coefficient profile (A0, A1, a) with first derivatives.
/// Immutable after construction; shared freely across threads.
///
/// Discontinuous kinds are right-continuous at their jump times; the solver
/// splits integration there and can request the left limit for the closing
/// stage of a segment.
class CoefficientProfile {
  public:
    enum class Kind { constant, frequency_jump, tanh_quench, tabulated };
    enum class Side { right, left };

    struct TableRow {
        double t, A0, A1, a;
    };

    static CoefficientProfile constant(double A0, double A1, double a) {
        if (A0 == A1)
            throw ConfigError("constant profile requires A0 != A1");
        CoefficientProfile p;
        p.kind_ = Kind::constant;
        p.c_ = {A0, A1, a};
        return p;
    }

    /// Piecewise-constant frequency w0 -> w1 at t_jump, mapped onto the
    /// unit-mass family A0 - A1 = 2 w_c, (A0^2 - A1^2)/4 = w(t)^2, a = 0.
    static CoefficientProfile frequency_jump(double w0, double w1, double t_jump, double w_c) {
        if (!(w0 > 0.0) || !(w1 > 0.0))
            throw ConfigError("frequency_jump requires positive frequencies");
        if (!(w_c > 0.0))
            throw ConfigError("frequency_jump requires positive w_c");
        CoefficientProfile p;
        p.kind_ = Kind::frequency_jump;
        p.j_ = {w0, w1, t_jump, w_c};
        return p;
    }

    /// Smooth quench w(t)^2 = w0_sq + delta * tanh(rate * t) on the same
    /// unit-mass family.
    static CoefficientProfile tanh_quench(double w0_sq, double delta, double rate, double w_c) {
        if (!(w_c > 0.0))
            throw ConfigError("tanh_quench requires positive w_c");
        if (!(w0_sq - std::abs(delta) > 0.0))
            throw ConfigError("tanh_quench requires w0_sq > |delta| (positive frequency-squared)");
        CoefficientProfile p;
        p.kind_ = Kind::tanh_quench;
        p.q_ = {w0_sq, delta, rate, w_c};
        return p;
    }

    static CoefficientProfile tabulated(std::vector<TableRow> rows) {
        if (rows.size() < 2)
            throw ConfigError("tabulated profile requires at least two rows");
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (!(rows[i].t > rows[i - 1].t))
                throw ConfigError("tabulated rows must be strictly increasing in t (row " +
                                  std::to_string(i) + ")");
        double sign0 = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double d = rows[i].A0 - rows[i].A1;
            if (d == 0.0)
                throw ConfigError("tabulated profile has A0 == A1 at row " + std::to_string(i));
            if (i == 0)
                sign0 = d > 0 ? 1.0 : -1.0;
            else if (d * sign0 < 0.0)
                throw ConfigError("tabulated profile: A0 - A1 changes sign across rows");
        }
        CoefficientProfile p;
        p.kind_ = Kind::tabulated;
        std::vector<double> t, A0, A1, a;
        t.reserve(rows.size());
        for (const auto& r : rows) {
            t.push_back(r.t);
            A0.push_back(r.A0);
            A1.push_back(r.A1);
            a.push_back(r.a);
        }
        p.t_lo_ = t.front();
        p.t_hi_ = t.back();
        p.sp_A0_ = detail::CubicSpline(t, A0);
        p.sp_A1_ = detail::CubicSpline(t, A1);
        p.sp_a_ = detail::CubicSpline(t, a);
        return p;
    }

    Kind kind() const { return kind_; }

    /// Times where the coefficients are discontinuous; the classical solver
    /// splits integration intervals there.
    std::vector<double> jump_times() const {
        if (kind_ == Kind::frequency_jump)
            return {j_.t_jump};
        return {};
    }

    bool has_domain() const { return kind_ == Kind::tabulated; }
    double domain_lo() const { return t_lo_; }
    double domain_hi() const { return t_hi_; }

    /// Coefficient values and first derivatives at time t. Discontinuous
    /// kinds return the right-continuous value; pass Side::left to request
    /// the limit from below at a jump time.
    CoeffValues eval(double t, Side side = Side::right) const {
        switch (kind_) {
        case Kind::constant: {
            CoeffValues v;
            v.A0 = c_.A0;
            v.A1 = c_.A1;
            v.a = c_.a;
            return v;
        }
        case Kind::frequency_jump: {
            const bool post = (side == Side::left) ? (t > j_.t_jump) : (t >= j_.t_jump);
            const double w = post ? j_.w1 : j_.w0;
            CoeffValues v;
            v.A0 = j_.w_c + w * w / j_.w_c;
            v.A1 = w * w / j_.w_c - j_.w_c;
            return v;
        }
        case Kind::tanh_quench: {
            const double th = std::tanh(q_.rate * t);
            const double wsq = q_.w0_sq + q_.delta * th;
            const double dwsq = q_.delta * q_.rate * (1.0 - th * th);
            CoeffValues v;
            v.A0 = q_.w_c + wsq / q_.w_c;
            v.A1 = wsq / q_.w_c - q_.w_c;
            v.dA0 = dwsq / q_.w_c;
            v.dA1 = dwsq / q_.w_c;
            return v;
        }
        case Kind::tabulated: {
            const double eps = 1e-12 * std::max(1.0, std::max(std::abs(t_lo_), std::abs(t_hi_)));
            if (t < t_lo_ - eps || t > t_hi_ + eps)
                throw DomainError("tabulated profile evaluated outside its table range");
            const double tc = std::min(std::max(t, t_lo_), t_hi_);
            CoeffValues v;
            sp_A0_.eval(tc, v.A0, v.dA0);
            sp_A1_.eval(tc, v.A1, v.dA1);
            sp_a_.eval(tc, v.a, v.da);
            if (v.A0 == v.A1)
                throw SingularMError("A0(t) == A1(t) at t = " + std::to_string(t));
            return v;
        }
        }
        throw Error("unreachable profile kind");
    }

    /// Effective mass M(t) = 2 w_c / (A0 - A1) and the terms of the classical
    /// equation at time t.
    OdeCoeffs ode_coeffs(double t, double w_c, Side side = Side::right) const {
        const CoeffValues v = eval(t, side);
        const double d = v.A0 - v.A1;
        if (d == 0.0)
            throw SingularMError("A0(t) == A1(t) at t = " + std::to_string(t));
        OdeCoeffs oc;
        oc.M = 2.0 * w_c / d;
        oc.dlogM = -(v.dA0 - v.dA1) / d;
        oc.Q = 0.25 * (v.A0 * v.A0 - v.A1 * v.A1) - 4.0 * v.a * v.a +
               2.0 * v.a * oc.dlogM + 2.0 * v.da;
        return oc;
    }

  private:
    CoefficientProfile() = default;

    struct ConstantParams {
        double A0 = 0, A1 = 0, a = 0;
    };
    struct JumpParams {
        double w0 = 0, w1 = 0, t_jump = 0, w_c = 0;
    };
    struct QuenchParams {
        double w0_sq = 0, delta = 0, rate = 0, w_c = 0;
    };

    Kind kind_ = Kind::constant;
    ConstantParams c_;
    JumpParams j_;
    QuenchParams q_;
    double t_lo_ = 0, t_hi_ = 0;
    detail::CubicSpline sp_A0_, sp_A1_, sp_a_;
};

} // namespace su11
