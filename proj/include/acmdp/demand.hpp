#pragma once

#include "acmdp/errors.hpp"
#include "acmdp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace acmdp {

namespace quad {

namespace detail {
template <class F>
double simpson(F&& f, double a, double m, double b, double fa, double fm, double fb, double whole, double tol,
               int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, lm, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson(f, m, rm, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}
} // namespace detail

/// Adaptive Simpson quadrature with absolute tolerance.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-10) {
    if (!(b > a)) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson(f, a, m, b, fa, fm, fb, whole, tol, 48);
}

} // namespace quad

/// A parametric family of demand distributions F_a indexed by the action.
/// Parameters vary affinely with the effective action, which saturates at
/// saturation_level when that is set (beyond it the distribution no longer
/// depends on a). All members have closed-form CDFs, quantiles, and partial
/// expectations. An optional point mass at zero is supported so that the
/// known failure mode of the density-based majorization construction can be
/// exhibited; it is rejected by the density checks.
struct DemandFamily {
    enum class Kind { Uniform, Triangular, TruncatedExponential };

    Kind kind = Kind::Uniform;
    // Affine parameter pairs (value = first + second * effective_action):
    //   Uniform: p = lo, q = hi
    //   Triangular: p = lo, q = mode, r = hi
    //   TruncatedExponential: p = rate, q = cap (support [0, cap])
    std::pair<double, double> p{1.0, 0.0};
    std::pair<double, double> q{2.0, 0.0};
    std::pair<double, double> r{0.0, 0.0};
    std::optional<double> saturation_level;
    double atom_at_zero = 0.0; ///< point mass at xi = 0

    static DemandFamily uniform(double lo, double hi) {
        DemandFamily d;
        d.kind = Kind::Uniform;
        d.p = {lo, 0.0};
        d.q = {hi, 0.0};
        return d;
    }

    /// Point mass at a fixed demand level (a degenerate uniform). Useful for
    /// exact-path tests; has no density, so the density-based checks reject it.
    static DemandFamily deterministic(double level) { return uniform(level, level); }

    static DemandFamily triangular(double lo, double mode, double hi) {
        DemandFamily d;
        d.kind = Kind::Triangular;
        d.p = {lo, 0.0};
        d.q = {mode, 0.0};
        d.r = {hi, 0.0};
        return d;
    }

    static DemandFamily truncated_exponential(double rate, double cap) {
        DemandFamily d;
        d.kind = Kind::TruncatedExponential;
        d.p = {rate, 0.0};
        d.q = {cap, 0.0};
        return d;
    }

    double effective(double a) const { return saturation_level ? std::min(a, *saturation_level) : a; }

    std::pair<double, double> support(double a) const {
        double ae = effective(a);
        switch (kind) {
        case Kind::Uniform:
        case Kind::Triangular: return {p.first + p.second * ae, last_param(ae)};
        case Kind::TruncatedExponential: return {0.0, q.first + q.second * ae};
        }
        return {0.0, 0.0};
    }

    /// Density of the continuous part, scaled by (1 - atom mass).
    double density(double a, double y) const {
        double scale = 1.0 - atom_at_zero;
        double ae = effective(a);
        switch (kind) {
        case Kind::Uniform: {
            double lo = p.first + p.second * ae, hi = q.first + q.second * ae;
            if (hi <= lo) return 0.0; // point mass: no density exists
            return (y >= lo && y <= hi) ? scale / (hi - lo) : 0.0;
        }
        case Kind::Triangular: {
            double lo = p.first + p.second * ae, mode = q.first + q.second * ae, hi = r.first + r.second * ae;
            if (y < lo || y > hi) return 0.0;
            if (y <= mode) return scale * 2.0 * (y - lo) / ((hi - lo) * (mode - lo));
            return scale * 2.0 * (hi - y) / ((hi - lo) * (hi - mode));
        }
        case Kind::TruncatedExponential: {
            double rate = p.first + p.second * ae, cap = q.first + q.second * ae;
            if (y < 0.0 || y > cap) return 0.0;
            return scale * rate * std::exp(-rate * y) / (1.0 - std::exp(-rate * cap));
        }
        }
        return 0.0;
    }

    double density_sup(double a) const {
        double scale = 1.0 - atom_at_zero;
        double ae = effective(a);
        switch (kind) {
        case Kind::Uniform: {
            double width = q.first + q.second * ae - (p.first + p.second * ae);
            return width > 0.0 ? scale / width : std::numeric_limits<double>::infinity();
        }
        case Kind::Triangular:
            return scale * 2.0 / (r.first + r.second * ae - (p.first + p.second * ae));
        case Kind::TruncatedExponential: {
            double rate = p.first + p.second * ae, cap = q.first + q.second * ae;
            return scale * rate / (1.0 - std::exp(-rate * cap));
        }
        }
        return 0.0;
    }

    double cdf(double a, double y) const {
        if (y < 0.0) return 0.0;
        return atom_at_zero + (1.0 - atom_at_zero) * continuous_cdf(a, y);
    }

    double quantile(double a, double u) const {
        if (u < atom_at_zero) return 0.0;
        double uc = (u - atom_at_zero) / (1.0 - atom_at_zero);
        return continuous_quantile(a, std::min(std::max(uc, 0.0), 1.0));
    }

    double mean(double a) const { return (1.0 - atom_at_zero) * continuous_mean(a); }

    /// E[ xi(a) 1(xi(a) > z) ].
    double tail_mean(double a, double z) const { return (1.0 - atom_at_zero) * continuous_tail_mean(a, z); }

    /// E[ min(a', xi(a)) ] for an arbitrary level a' (usually the action).
    double sales_expectation(double a, double level) const {
        if (level <= 0.0) return level; // xi >= 0, so the minimum is the level itself
        return mean(a) - tail_mean(a, level) + level * (1.0 - cdf(a, level));
    }
    double sales_expectation(double a) const { return sales_expectation(a, a); }

    double sample(double a, CounterRng& rng) const { return quantile(a, rng.next_uniform()); }

private:
    double last_param(double ae) const {
        return kind == Kind::Triangular ? r.first + r.second * ae : q.first + q.second * ae;
    }

    double continuous_cdf(double a, double y) const {
        double ae = effective(a);
        switch (kind) {
        case Kind::Uniform: {
            double lo = p.first + p.second * ae, hi = q.first + q.second * ae;
            if (hi <= lo) return y >= lo ? 1.0 : 0.0; // point mass
            return std::min(std::max((y - lo) / (hi - lo), 0.0), 1.0);
        }
        case Kind::Triangular: {
            double lo = p.first + p.second * ae, mode = q.first + q.second * ae, hi = r.first + r.second * ae;
            if (y <= lo) return 0.0;
            if (y >= hi) return 1.0;
            if (y <= mode) return (y - lo) * (y - lo) / ((hi - lo) * (mode - lo));
            return 1.0 - (hi - y) * (hi - y) / ((hi - lo) * (hi - mode));
        }
        case Kind::TruncatedExponential: {
            double rate = p.first + p.second * ae, cap = q.first + q.second * ae;
            if (y <= 0.0) return 0.0;
            if (y >= cap) return 1.0;
            return (1.0 - std::exp(-rate * y)) / (1.0 - std::exp(-rate * cap));
        }
        }
        return 0.0;
    }

    double continuous_quantile(double a, double u) const {
        double ae = effective(a);
        switch (kind) {
        case Kind::Uniform: {
            double lo = p.first + p.second * ae, hi = q.first + q.second * ae;
            return hi <= lo ? lo : lo + u * (hi - lo);
        }
        case Kind::Triangular: {
            double lo = p.first + p.second * ae, mode = q.first + q.second * ae, hi = r.first + r.second * ae;
            double split = (mode - lo) / (hi - lo);
            if (u <= split) return lo + std::sqrt(u * (hi - lo) * (mode - lo));
            return hi - std::sqrt((1.0 - u) * (hi - lo) * (hi - mode));
        }
        case Kind::TruncatedExponential: {
            double rate = p.first + p.second * ae, cap = q.first + q.second * ae;
            return -std::log1p(-u * (1.0 - std::exp(-rate * cap))) / rate;
        }
        }
        return 0.0;
    }

    double continuous_mean(double a) const {
        double ae = effective(a);
        switch (kind) {
        case Kind::Uniform: return 0.5 * (p.first + p.second * ae + q.first + q.second * ae);
        case Kind::Triangular:
            return (p.first + p.second * ae + q.first + q.second * ae + r.first + r.second * ae) / 3.0;
        case Kind::TruncatedExponential: {
            double rate = p.first + p.second * ae, cap = q.first + q.second * ae;
            double z = 1.0 - std::exp(-rate * cap);
            return (1.0 / rate - (cap + 1.0 / rate) * std::exp(-rate * cap)) / z;
        }
        }
        return 0.0;
    }

    double continuous_tail_mean(double a, double z) const {
        double ae = effective(a);
        switch (kind) {
        case Kind::Uniform: {
            double lo = p.first + p.second * ae, hi = q.first + q.second * ae;
            if (hi <= lo) return z < lo ? lo : 0.0; // point mass: E[xi 1(xi > z)]
            if (z <= lo) return continuous_mean(a);
            if (z >= hi) return 0.0;
            return (hi * hi - z * z) / (2.0 * (hi - lo));
        }
        case Kind::Triangular: {
            double lo = p.first + p.second * ae, mode = q.first + q.second * ae, hi = r.first + r.second * ae;
            if (z <= lo) return continuous_mean(a);
            if (z >= hi) return 0.0;
            // E[y 1(y <= z)] integrated piecewise on the rising/falling branches
            double below;
            double c1 = 2.0 / ((hi - lo) * (mode - lo));
            auto rising = [&](double t) { return c1 * (t * t * t / 3.0 - lo * t * t / 2.0); };
            if (z <= mode) {
                below = rising(z) - rising(lo);
            } else {
                double c2 = 2.0 / ((hi - lo) * (hi - mode));
                auto falling = [&](double t) { return c2 * (hi * t * t / 2.0 - t * t * t / 3.0); };
                below = rising(mode) - rising(lo) + falling(z) - falling(mode);
            }
            return continuous_mean(a) - below;
        }
        case Kind::TruncatedExponential: {
            double rate = p.first + p.second * ae, cap = q.first + q.second * ae;
            if (z <= 0.0) return continuous_mean(a);
            if (z >= cap) return 0.0;
            double zc = 1.0 - std::exp(-rate * cap);
            return ((z + 1.0 / rate) * std::exp(-rate * z) - (cap + 1.0 / rate) * std::exp(-rate * cap)) / zc;
        }
        }
        return 0.0;
    }
};

/// Checks the family's structural requirements on a grid of actions:
/// support ordering, nonnegative demand, and unit total mass (numerically,
/// to 1e-8, continuous part integrated by quadrature).
inline void validate(const DemandFamily& d, const std::vector<double>& action_samples) {
    if (d.atom_at_zero < 0.0 || d.atom_at_zero >= 1.0) throw ModelError("demand atom mass must lie in [0,1)");
    for (double a : action_samples) {
        auto [lo, hi] = d.support(a);
        if (!(lo >= 0.0)) throw ModelError("demand support must be nonnegative at a=" + std::to_string(a));
        if (hi == lo && d.kind == DemandFamily::Kind::Uniform) continue; // point mass: nothing to integrate
        if (!(hi > lo)) throw ModelError("demand support empty at a=" + std::to_string(a));
        if (d.kind == DemandFamily::Kind::Triangular) {
            double ae = d.effective(a);
            double mode = d.q.first + d.q.second * ae;
            if (!(mode >= lo && mode <= hi)) throw ModelError("triangular mode outside support");
        }
        double mass = quad::adaptive_simpson([&](double y) { return d.density(a, y); }, lo, hi, 1e-12);
        if (std::abs(mass + d.atom_at_zero - 1.0) > 1e-8)
            throw ModelError("demand density mass " + std::to_string(mass + d.atom_at_zero) + " differs from 1");
    }
}

} // namespace acmdp
