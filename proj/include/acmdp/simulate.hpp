#pragma once

#include "acmdp/models.hpp"
#include "acmdp/rng.hpp"
#include "acmdp/vanishing.hpp"

#include <functional>
#include <string>
#include <vector>

namespace acmdp {

namespace detail {

/// Compensated accumulator; keeps replicate reductions order-insensitive at
/// the double-precision level.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

/// Grid scan with a golden-section polish around the winning cell. The
/// objective need not be unimodal; the result is the documented approximate
/// extreme over an interval.
template <class F>
double interval_extreme(F&& f, double lo, double hi, bool maximize, double grid_step = 1e-3) {
    if (!(hi > lo)) return f(lo);
    const int n = int(std::min(std::ceil((hi - lo) / grid_step), 20000.0)) + 1;
    double best_x = lo, best = maximize ? -std::numeric_limits<double>::infinity()
                                        : std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; i++) {
        double x = lo + (hi - lo) * double(i) / double(n);
        double v = f(x);
        if (maximize ? v > best : v < best) {
            best = v;
            best_x = x;
        }
    }
    // golden-section refinement in the bracketing neighborhood
    double a = std::max(lo, best_x - (hi - lo) / double(n));
    double b = std::min(hi, best_x + (hi - lo) / double(n));
    const double phi = 0.6180339887498949;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    for (int it = 0; it < 60 && (b - a) > 1e-12; it++) {
        double fc = f(c), fd = f(d);
        bool keep_left = maximize ? fc > fd : fc < fd;
        if (keep_left) {
            b = d;
            d = c;
            c = b - phi * (b - a);
        } else {
            a = c;
            c = d;
            d = a + phi * (b - a);
        }
        double mid = f(0.5 * (a + b));
        if (maximize ? mid > best : mid < best) best = mid;
    }
    return best;
}

} // namespace detail

/// State-feedback rule for the continuous systems: maps the current stock
/// level to the stock-after-ordering (or after-production) level.
using PolicyRule = std::function<double(double)>;

inline PolicyRule hold_policy() {
    return [](double x) { return x; };
}

/// Keep the stock at or above the threshold untouched; otherwise move it to
/// the target level.
inline PolicyRule order_up_to_policy(double threshold, double target) {
    return [threshold, target](double x) { return x >= threshold ? x : target; };
}

struct TrajectoryPoint {
    double x = 0.0;
    double a = 0.0;
    double c = 0.0;
};

/// Inventory dynamics x' = a - xi(a). Deterministic given the seed.
inline std::vector<TrajectoryPoint> simulate_trajectory(const PcInventorySpec& spec, const PolicyRule& rule, double x0,
                                                        unsigned long horizon, std::uint64_t seed,
                                                        std::uint64_t replicate = 0) {
    std::vector<TrajectoryPoint> path;
    path.reserve(horizon);
    CounterRng rng(seed, replicate);
    double x = x0;
    for (unsigned long k = 0; k < horizon; k++) {
        double a = rule(x);
        if (a < x - 1e-12 * (1.0 + std::abs(x))) throw PolicyError("inadmissible order target below current stock", k);
        double z = std::max(a - x, 0.0);
        double c = spec.kappa(z) + spec.psi(a);
        path.push_back({x, a, c});
        x = a - spec.demand.sample(a, rng);
    }
    return path;
}

/// Production dynamics x' = (x + z - xi)^+ with regime-capped production.
inline std::vector<TrajectoryPoint> simulate_trajectory(const UcProductionSpec& raw, const PolicyRule& rule, double x0,
                                                        unsigned long horizon, std::uint64_t seed,
                                                        std::uint64_t replicate = 0) {
    UcProductionSpec spec = finalize(raw);
    std::vector<TrajectoryPoint> path;
    path.reserve(horizon);
    CounterRng rng(seed, replicate);
    double x = x0;
    for (unsigned long k = 0; k < horizon; k++) {
        double a = rule(x);
        double z = a - x;
        if (z < -1e-12 || z > uc_production_cap(spec, x) + 1e-12)
            throw PolicyError("production outside the regime cap", k);
        z = std::max(z, 0.0);
        double c = spec.kappa(z) + spec.psi(a) - spec.sale_price * spec.demand.sales_expectation(a);
        path.push_back({x, a, c});
        x = std::max(a - spec.demand.sample(a, rng), 0.0);
    }
    return path;
}

/// Stopping rule for hitting-time estimation.
struct StopRule {
    enum class Kind { BelowThreshold, AtZero };
    Kind kind = Kind::BelowThreshold;
    double threshold = 0.0;

    bool operator()(double x) const {
        return kind == Kind::BelowThreshold ? x < threshold : x <= 1e-12;
    }
};

struct StoppingTimeReport {
    double start_state = 0.0;
    unsigned long n_reps = 0;
    double mean_tau = 0.0;
    double ci_halfwidth = 0.0; ///< normal CI at the requested level
    double mean_cost_to_tau = 0.0;
    double mean_kappa_term = 0.0; ///< mean terminal ordering-cost term kappa(a_tau - x_tau)
    double bound_rhs = std::numeric_limits<double>::quiet_NaN();
    bool bound_satisfied = false;
    unsigned long n_censored = 0;
};

/// The comparison-theorem constants for the inventory drift over the action
/// window [L, x v M]: the infimum mean demand and the smallest tail level
/// with sup_y E[xi 1(xi > D)] <= Delta / 2.
struct DriftConstants {
    double Delta = 0.0;
    double D = 0.0;
};

inline DriftConstants drift_constants(const DemandFamily& demand, double win_lo, double win_hi) {
    DriftConstants dc;
    dc.Delta = detail::interval_extreme([&](double y) { return demand.mean(y); }, win_lo, win_hi, false);
    if (!(dc.Delta > 1e-12)) throw ModelError("demand mean not bounded away from zero on the action window");

    double sup_support = 0.0;
    for (int i = 0; i <= 100; i++)
        sup_support = std::max(sup_support, demand.support(win_lo + (win_hi - win_lo) * double(i) / 100.0).second);
    auto sup_tail = [&](double z) {
        return detail::interval_extreme([&](double y) { return demand.tail_mean(y, z); }, win_lo, win_hi, true);
    };
    // smallest level with tail <= Delta/2; the tail is right-continuous and
    // nonincreasing, so bisection lands on the boundary from above
    double lo = 0.0, hi = sup_support;
    if (sup_tail(0.0) <= dc.Delta / 2.0) {
        dc.D = 0.0;
        return dc;
    }
    for (int it = 0; it < 80 && hi - lo > 1e-9; it++) {
        double mid = 0.5 * (lo + hi);
        if (sup_tail(mid) <= dc.Delta / 2.0)
            hi = mid;
        else
            lo = mid;
    }
    dc.D = hi;
    return dc;
}

namespace detail {

template <class Step>
StoppingTimeReport run_hitting(Step&& step_cost, const StopRule& stop, double x0, unsigned long n_reps,
                               unsigned long cap, std::uint64_t seed, double ci_level) {
    StoppingTimeReport rep;
    rep.start_state = x0;
    rep.n_reps = n_reps;

    KahanSum tau_sum, tau_sq_sum, cost_sum, kappa_sum;
    unsigned long used = 0;
    for (unsigned long repi = 0; repi < n_reps; repi++) {
        CounterRng rng(seed, repi);
        double x = x0;
        unsigned long tau = 0;
        double cost = 0.0;
        bool stopped = stop(x);
        while (!stopped && tau < cap) {
            double c, xnext;
            step_cost(x, rng, c, xnext);
            cost += c;
            x = xnext;
            tau++;
            stopped = stop(x);
        }
        if (!stopped) {
            rep.n_censored++;
            continue;
        }
        used++;
        tau_sum.add(double(tau));
        tau_sq_sum.add(double(tau) * double(tau));
        cost_sum.add(cost);
        kappa_sum.add(step_cost.terminal_kappa(x));
    }
    if (double(rep.n_censored) > 0.01 * double(n_reps))
        throw CensoringError("hitting_time: more than 1% of paths hit the step cap",
                             double(rep.n_censored) / double(n_reps));
    if (used == 0) throw CensoringError("hitting_time: no usable paths", 1.0);

    rep.mean_tau = tau_sum.sum / double(used);
    double var = std::max(0.0, tau_sq_sum.sum / double(used) - rep.mean_tau * rep.mean_tau);
    if (used > 1) var *= double(used) / double(used - 1);
    rep.ci_halfwidth = normal_quantile(1.0 - (1.0 - ci_level) / 2.0) * std::sqrt(var / double(used));
    rep.mean_cost_to_tau = cost_sum.sum / double(used);
    rep.mean_kappa_term = kappa_sum.sum / double(used);
    return rep;
}

} // namespace detail

/// Monte Carlo estimate of the hitting time of the stop set under the given
/// policy, with the pathwise cost accumulations used by the relative-value
/// bound. Censored paths (no stop within the cap) are excluded and must stay
/// below 1% of the replications.
inline StoppingTimeReport hitting_time(const PcInventorySpec& spec, const PolicyRule& rule, double x0,
                                       const StopRule& stop, unsigned long n_reps, unsigned long cap,
                                       std::uint64_t seed, double ci_level = 0.99) {
    struct Stepper {
        const PcInventorySpec& spec;
        const PolicyRule& rule;
        void operator()(double x, CounterRng& rng, double& c, double& xnext) const {
            double a = rule(x);
            if (a < x - 1e-12 * (1.0 + std::abs(x))) throw PolicyError("inadmissible order target", 0);
            double z = std::max(a - x, 0.0);
            c = spec.kappa(z) + spec.psi(a);
            xnext = a - spec.demand.sample(a, rng);
        }
        double terminal_kappa(double x_tau) const { return spec.kappa(std::max(rule(x_tau) - x_tau, 0.0)); }
    };
    StoppingTimeReport rep = detail::run_hitting(Stepper{spec, rule}, stop, x0, n_reps, cap, seed, ci_level);
    if (stop.kind == StopRule::Kind::BelowThreshold) {
        DriftConstants dc = drift_constants(spec.demand, stop.threshold, std::max(x0, spec.M));
        rep.bound_rhs = 2.0 * (x0 - stop.threshold + dc.D) / dc.Delta;
        rep.bound_satisfied = rep.mean_tau + rep.ci_halfwidth <= rep.bound_rhs;
    }
    return rep;
}

inline StoppingTimeReport hitting_time(const UcProductionSpec& raw, const PolicyRule& rule, double x0,
                                       const StopRule& stop, unsigned long n_reps, unsigned long cap,
                                       std::uint64_t seed, double ci_level = 0.99) {
    UcProductionSpec spec = finalize(raw);
    struct Stepper {
        const UcProductionSpec& spec;
        const PolicyRule& rule;
        void operator()(double x, CounterRng& rng, double& c, double& xnext) const {
            double a = rule(x);
            double z = a - x;
            if (z < -1e-12 || z > uc_production_cap(spec, x) + 1e-12) throw PolicyError("production outside cap", 0);
            c = spec.kappa(std::max(z, 0.0)) + spec.psi(a) - spec.sale_price * spec.demand.sales_expectation(a);
            xnext = std::max(a - spec.demand.sample(a, rng), 0.0);
        }
        double terminal_kappa(double x_tau) const { return spec.kappa(std::max(rule(x_tau) - x_tau, 0.0)); }
    };
    StoppingTimeReport rep = detail::run_hitting(Stepper{spec, rule}, stop, x0, n_reps, cap, seed, ci_level);
    if (stop.kind == StopRule::Kind::AtZero && x0 <= spec.L_tilde) {
        DriftConstants dc = drift_constants(spec.demand, 0.0, spec.L_tilde);
        rep.bound_rhs = 2.0 * (x0 + dc.D) / dc.Delta;
        rep.bound_satisfied = rep.mean_tau + rep.ci_halfwidth <= rep.bound_rhs;
    }
    return rep;
}

/// The alpha-free upper bound H on the relative value functions of the
/// inventory model: ordering up to [L, M] from below costs at most the
/// kappa/psi terms there; from above, the expected excursion length times
/// the worst per-step cost.
struct HBound {
    double x = 0.0;
    double Delta_x = 0.0;
    double D_x = 0.0;
    double H_value = 0.0;
    double psi_sup = 0.0;       ///< sup of psi over the action window
    double kappa_term = 0.0;    ///< kappa(M - x) below L, sup E[kappa(M - L + xi(y))] above
    double hitting_factor = 1.0; ///< 2 (x - L + D_x) / Delta_x above L
};

inline HBound compute_H(const PcInventorySpec& spec, double x) {
    HBound hb;
    hb.x = x;
    const double win_hi = std::max(x, spec.M);
    DriftConstants dc = drift_constants(spec.demand, spec.L, win_hi);
    hb.Delta_x = dc.Delta;
    hb.D_x = dc.D;

    if (x < spec.L) {
        hb.psi_sup = detail::interval_extreme([&](double y) { return spec.psi(y); }, spec.L, spec.M, true);
        hb.kappa_term = spec.kappa(spec.M - x);
        hb.hitting_factor = 1.0;
        hb.H_value = hb.kappa_term + hb.psi_sup;
    } else {
        hb.psi_sup = detail::interval_extreme([&](double y) { return spec.psi(y); }, spec.L, win_hi, true);
        const double z = spec.M - spec.L;
        hb.kappa_term = detail::interval_extreme(
            [&](double y) {
                double p_pos = z > 0.0 ? 1.0 : 1.0 - spec.demand.atom_at_zero;
                return spec.kappa.fixed * p_pos + spec.kappa.per_unit * (z + spec.demand.mean(y));
            },
            spec.L, win_hi, true);
        hb.hitting_factor = 2.0 * (x - spec.L + hb.D_x) / hb.Delta_x;
        hb.H_value = hb.hitting_factor * (hb.psi_sup + hb.kappa_term);
    }
    return hb;
}

/// Per-probe verdicts of the relative-value bound h_alpha(x) <= eps_bar + H(x)
/// over the tail of a vanishing-discount run.
struct HBoundReport {
    struct Row {
        long state = 0;
        double coord = 0.0;
        double H = 0.0;
        double h_tail_max = 0.0;
        double margin = 0.0; ///< eps_bar + H + slack - h_tail_max
    };
    std::vector<Row> rows;
    bool all_hold = true;
};

inline HBoundReport verify_h_bound(const VanishingDiscountRun& run, const FiniteMdp& mdp, const PcInventorySpec& spec,
                                   double eps_bar, const std::vector<long>& probe_states, double slack = 0.0) {
    if (run.mode != ModelClass::PC) throw std::invalid_argument("verify_h_bound: PC runs only");
    HBoundReport rep;
    for (long s : probe_states) {
        if (s < 0 || std::size_t(s) >= mdp.num_states()) throw std::invalid_argument("verify_h_bound: bad probe");
        HBoundReport::Row row;
        row.state = s;
        row.coord = mdp.states[std::size_t(s)];
        row.H = compute_H(spec, row.coord).H_value;
        row.h_tail_max = 0.0;
        for (std::size_t n = run.tail_start; n < run.h_per_alpha.size(); n++)
            row.h_tail_max = std::max(row.h_tail_max, run.h_per_alpha[n][std::size_t(s)]);
        row.margin = eps_bar + row.H + slack - row.h_tail_max;
        rep.all_hold = rep.all_hold && row.margin >= 0.0;
        rep.rows.push_back(row);
    }
    return rep;
}

/// One-step drift checks behind the hitting-time and boundedness arguments,
/// evaluated by quadrature at sampled states.
struct DriftReport {
    struct Entry {
        std::string name;
        double worst_margin = std::numeric_limits<double>::infinity(); ///< >= 0 means the inequality holds
        long samples = 0;
    };
    std::vector<Entry> entries;

    bool all_nonnegative(double tol = 0.0) const {
        for (const auto& e : entries)
            if (e.worst_margin < -tol) return false;
        return true;
    }
};

/// Inventory drift: at or above L the hold policy shrinks the Lyapunov
/// excursion by Delta/2 per step; below L an order up to [L, M] raises it by
/// at most the re-entry offset.
inline DriftReport verify_comparison_drift(const PcInventorySpec& spec, double x_lo, double x_hi, int n_samples) {
    DriftReport rep;
    DriftConstants dc = drift_constants(spec.demand, spec.L, std::max(x_hi, spec.M));

    auto expected_z_plus = [&](double level, double a) {
        // E[(level - xi(a))^+]
        auto [lo, hi] = spec.demand.support(a);
        double val = std::max(level, 0.0) * spec.demand.atom_at_zero;
        double up = std::min(level, hi);
        if (up > lo)
            val += quad::adaptive_simpson([&](double y) { return (level - y) * spec.demand.density(a, y); }, lo, up,
                                          1e-10);
        return val;
    };

    DriftReport::Entry above{"hold-above-L-decreases", std::numeric_limits<double>::infinity(), 0};
    for (int i = 0; i < n_samples; i++) {
        double x = std::max(spec.L, x_lo) + (x_hi - std::max(spec.L, x_lo)) * double(i) / double(n_samples - 1);
        double Z = x - spec.L + dc.D;
        double lhs = expected_z_plus(Z, x);
        above.worst_margin = std::min(above.worst_margin, (Z - dc.Delta / 2.0) - lhs);
        above.samples++;
    }
    rep.entries.push_back(above);

    DriftReport::Entry refill{"order-up-to-below-L-bounded", std::numeric_limits<double>::infinity(), 0};
    for (int i = 0; i < n_samples; i++) {
        double x = x_lo + (std::min(spec.L, x_hi) - x_lo) * double(i) / double(n_samples - 1);
        if (x >= spec.L) continue;
        double Z = std::max(x - spec.L + dc.D, 0.0);
        double lhs = expected_z_plus(spec.M - spec.L + dc.D, spec.M); // worst re-order target
        refill.worst_margin = std::min(refill.worst_margin, Z + (spec.M - spec.L + dc.D) - lhs);
        refill.samples++;
    }
    rep.entries.push_back(refill);
    return rep;
}

/// Production drift: the weighted kernel expectation stays below
/// lambda w(x) + 1 at and above L, and below lambda' w(x) at and above
/// L-tilde.
inline DriftReport verify_comparison_drift(const UcProductionSpec& raw, double x_lo, double x_hi, int n_samples) {
    UcProductionSpec spec = finalize(raw);
    DriftReport rep;

    auto weighted_next = [&](double x, double z) {
        double a = x + z;
        auto [lo, hi] = spec.demand.support(a);
        // E[e^{r (a - xi)^+}] = P(xi >= a) + integral over xi < a
        double val = 1.0 - spec.demand.cdf(a, a);
        double up = std::min(a, hi);
        if (up > lo)
            val += quad::adaptive_simpson(
                [&](double y) { return std::exp(spec.r * (a - y)) * spec.demand.density(a, y); }, lo, up, 1e-10);
        val += spec.demand.atom_at_zero * std::exp(spec.r * a);
        return val;
    };

    DriftReport::Entry at_l{"weighted-drift-above-L", std::numeric_limits<double>::infinity(), 0};
    DriftReport::Entry at_lt{"weighted-drift-above-L-tilde", std::numeric_limits<double>::infinity(), 0};
    for (int i = 0; i < n_samples; i++) {
        double x = std::max(spec.L, x_lo) + (x_hi - std::max(spec.L, x_lo)) * double(i) / double(n_samples - 1);
        for (int zi = 0; zi <= 10; zi++) {
            double z = spec.theta * double(zi) / 10.0;
            double ew = weighted_next(x, z);
            at_l.worst_margin = std::min(at_l.worst_margin, spec.lambda * std::exp(spec.r * x) + 1.0 - ew);
            if (x >= spec.L_tilde)
                at_lt.worst_margin = std::min(at_lt.worst_margin, spec.lambda_prime * std::exp(spec.r * x) - ew);
        }
        at_l.samples++;
        if (x >= spec.L_tilde) at_lt.samples++;
    }
    rep.entries.push_back(at_l);
    rep.entries.push_back(at_lt);
    return rep;
}

} // namespace acmdp
