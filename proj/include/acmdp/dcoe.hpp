#pragma once

#include "acmdp/mdp.hpp"
#include "acmdp/rng.hpp"

#include <functional>

namespace acmdp {

enum class Norm { Sup, Weighted };

inline const char* to_string(Norm n) { return n == Norm::Sup ? "sup" : "weighted"; }

/// A certified solution of the discounted optimality equation v = T_alpha v.
struct DcoeSolution {
    double alpha = 0.0;
    ValueFn v;
    unsigned long iterations = 0;
    double residual = 0.0; ///< ||v - T_alpha v|| in norm_used
    Norm norm_used = Norm::Sup;
    double sup_residual = 0.0;
    double weighted_residual = 0.0;
};

struct SolveOptions {
    double tol = 1e-10;
    unsigned long max_iter = 1000000;
    long ref_state = 0;
    /// Called with each raw iterate; used by tests to watch monotonicity.
    std::function<void(const numvec&, unsigned long)> observer;
};

namespace detail {

struct FixedPointResult {
    numvec v;
    unsigned long iterations = 0;
    bool converged = false;
};

/// Certifies a candidate fixed point by one operator application: the
/// bracket v* - cand in (alpha/(1-alpha)) [min r, max r] (r = T cand - cand)
/// recenters the candidate by the bracket midpoint and bounds the remaining
/// error by the bracket half-width.
template <class Sweep>
bool certify_candidate(Sweep&& sweep, numvec& cand, numvec& scratch, double ratio, double threshold) {
    sweep(cand, scratch);
    double maxr = -std::numeric_limits<double>::infinity();
    double minr = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < cand.size(); s++) {
        double r = scratch[s] - cand[s];
        maxr = std::max(maxr, r);
        minr = std::min(minr, r);
    }
    if (ratio * (maxr - minr) / 2.0 > threshold) return false;
    double shift = ratio * (maxr + minr) / 2.0;
    for (double& x : cand) x += shift;
    return true;
}

/// Value iteration from zero with three a-posteriori stopping rules:
///   - successive-difference rule: ||v_{k+1} - v_k|| <= tol (1-alpha)/(2 alpha);
///   - span rule: the MacQueen bracket v* in v_{k+1} + (alpha/(1-alpha)) [min d, max d]
///     pins v* within tol/2 after recentering by the bracket midpoint;
///   - periodically, a geometric tail extrapolation of the last iterates is
///     tried as a candidate and accepted only if one extra sweep certifies it
///     through the same bracket.
/// The span rule fires after O(1) sweeps on mixing kernels independently of
/// alpha; the extrapolation covers periodic kernels (deterministic cycles)
/// where the span stalls. Thresholds are floored at the roundoff level of
/// the iterate, so a request below double precision stops at the achievable
/// accuracy instead of spinning; the reported residual stays honest.
template <class Sweep>
FixedPointResult iterate_to_fixed_point(Sweep&& sweep, std::size_t num_states, double alpha, double tol,
                                        unsigned long max_iter, bool monotone_from_zero,
                                        const std::function<void(const numvec&, unsigned long)>& observer) {
    FixedPointResult res;
    res.v.assign(num_states, 0.0);
    numvec next(num_states, 0.0);
    numvec snap0, snap2, snap4; // iterates four, two, and zero sweeps ago
    numvec cand, scratch(num_states, 0.0);

    const double ratio = alpha / (1.0 - alpha);
    for (unsigned long k = 1; k <= max_iter; k++) {
        sweep(res.v, next);

        double maxd = -std::numeric_limits<double>::infinity();
        double mind = std::numeric_limits<double>::infinity();
        double vmax = 0.0;
        for (std::size_t s = 0; s < num_states; s++) {
            double d = next[s] - res.v[s];
            maxd = std::max(maxd, d);
            mind = std::min(mind, d);
            vmax = std::max(vmax, std::abs(next[s]));
        }
        res.v.swap(next);
        res.iterations = k;
        if (observer) observer(res.v, k);

        const double noise = 16.0 * std::numeric_limits<double>::epsilon() * (1.0 + vmax);
        if (monotone_from_zero && mind < -noise - 1e-12 * (1.0 + vmax))
            throw std::logic_error("monotone iteration decreased; this is a bug");

        const double threshold = std::max(tol / 2.0, ratio * noise);
        const double err_extrapolated = ratio * (maxd - mind) / 2.0;
        const double err_plain = ratio * std::max(std::abs(maxd), std::abs(mind));
        if (std::min(err_extrapolated, err_plain) <= threshold) {
            double shift = ratio * (maxd + mind) / 2.0;
            for (double& x : res.v) x += shift;
            res.converged = true;
            return res;
        }

        if (k % 2 == 0) {
            snap0.swap(snap2);
            snap2.swap(snap4);
            snap4 = res.v;
        }
        // geometric tail candidate from the two-step differences; handles
        // period-two oscillation where the ratio v(k)-v(k-2) over
        // v(k-2)-v(k-4) is a clean alpha^2 per coordinate
        if (k % 16 == 0 && snap0.size() == num_states) {
            cand = snap4;
            for (std::size_t s = 0; s < num_states; s++) {
                double d_new = snap4[s] - snap2[s];
                double d_old = snap2[s] - snap0[s];
                double theta = std::abs(d_old) > 0.0 ? d_new / d_old : 0.0;
                theta = std::min(std::max(theta, 0.0), alpha * alpha);
                cand[s] += d_new * theta / (1.0 - theta);
            }
            if (certify_candidate(sweep, cand, scratch, ratio, threshold)) {
                res.v = std::move(cand);
                res.converged = true;
                return res;
            }
        }
    }
    return res;
}

} // namespace detail

/// Solves the discounted optimality equation by value iteration from the
/// zero function. PC models converge monotonically to the smallest
/// nonnegative solution; UC models converge to the unique fixed point, with
/// the residual measured in the model's weighted norm.
inline DcoeSolution solve_dcoe(const FiniteMdp& mdp, double alpha, const SolveOptions& opts) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("solve_dcoe: alpha must be in (0,1)");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("solve_dcoe: tol must be positive");

    const bool uc = mdp.model_class == ModelClass::UC;
    auto sweep = [&](const numvec& v, numvec& out) { bellman_apply_into(mdp, v, alpha, out); };
    detail::FixedPointResult fp =
        detail::iterate_to_fixed_point(sweep, mdp.num_states(), alpha, opts.tol, opts.max_iter, !uc, opts.observer);

    numvec tv;
    bellman_apply_into(mdp, fp.v, alpha, tv);
    numvec diff(fp.v.size());
    for (std::size_t s = 0; s < diff.size(); s++) diff[s] = fp.v[s] - tv[s];

    DcoeSolution sol;
    sol.alpha = alpha;
    sol.v.values = std::move(fp.v);
    sol.v.ref_state = opts.ref_state;
    sol.iterations = fp.iterations;
    sol.sup_residual = sup_norm(diff);
    sol.weighted_residual = weighted_norm(diff, mdp.weight);
    sol.norm_used = uc ? Norm::Weighted : Norm::Sup;
    sol.residual = uc ? sol.weighted_residual : sol.sup_residual;

    if (!fp.converged)
        throw ConvergenceError("solve_dcoe: iteration cap reached", std::move(sol.v.values), sol.residual,
                               sol.iterations);
    return sol;
}

inline DcoeSolution solve_dcoe(const FiniteMdp& mdp, double alpha, double tol = 1e-10,
                               unsigned long max_iter = 1000000) {
    SolveOptions opts;
    opts.tol = tol;
    opts.max_iter = max_iter;
    return solve_dcoe(mdp, alpha, opts);
}

/// Discounted value of a fixed stationary policy, by the same certified
/// iteration as solve_dcoe.
inline numvec policy_value(const FiniteMdp& mdp, const StationaryPolicy& policy, double alpha, double tol = 1e-10,
                           unsigned long max_iter = 1000000) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("policy_value: alpha must be in (0,1)");
    validate(policy, mdp);
    std::vector<long> slot(mdp.num_states());
    for (std::size_t s = 0; s < mdp.num_states(); s++) slot[s] = mdp.action_slot(s, policy.choice[s]);

    auto sweep = [&](const numvec& v, numvec& out) {
        for (std::size_t s = 0; s < mdp.num_states(); s++)
            out[s] = mdp.cost[s][std::size_t(slot[s])] + alpha * mdp.kernel[s][std::size_t(slot[s])].dot(v);
    };
    detail::FixedPointResult fp =
        detail::iterate_to_fixed_point(sweep, mdp.num_states(), alpha, tol, max_iter, false, nullptr);
    if (!fp.converged) {
        numvec tv(fp.v.size());
        sweep(fp.v, tv);
        for (std::size_t s = 0; s < tv.size(); s++) tv[s] = fp.v[s] - tv[s];
        throw ConvergenceError("policy_value: iteration cap reached", std::move(fp.v), sup_norm(tv), fp.iterations);
    }
    return fp.v;
}

/// Samples random function pairs, uniform in [-w(s), w(s)] per coordinate,
/// and returns the largest observed ratio ||T u - T v||_w / ||u - v||_w.
/// A lower-bound witness for the contraction modulus of T_alpha.
inline double estimate_contraction_modulus(const FiniteMdp& mdp, double alpha, unsigned long trials,
                                           std::uint64_t rng_seed) {
    if (trials < 1) throw std::invalid_argument("estimate_contraction_modulus: trials must be >= 1");
    const std::size_t S = mdp.num_states();
    numvec u(S), v(S), tu(S), tv(S), diff(S);
    double best = 0.0;
    for (unsigned long t = 0; t < trials; t++) {
        CounterRng ru(rng_seed, 2 * t);
        CounterRng rv(rng_seed, 2 * t + 1);
        for (std::size_t s = 0; s < S; s++) {
            u[s] = ru.next_uniform(-mdp.weight[s], mdp.weight[s]);
            v[s] = rv.next_uniform(-mdp.weight[s], mdp.weight[s]);
        }
        for (std::size_t s = 0; s < S; s++) diff[s] = u[s] - v[s];
        double denom = weighted_norm(diff, mdp.weight);
        if (denom <= 0.0) continue; // degenerate pair, 0/0 guarded
        bellman_apply_into(mdp, u, alpha, tu);
        bellman_apply_into(mdp, v, alpha, tv);
        for (std::size_t s = 0; s < S; s++) diff[s] = tu[s] - tv[s];
        best = std::max(best, weighted_norm(diff, mdp.weight) / denom);
    }
    return best;
}

/// Extracts a stationary policy whose discounted value is within eps of the
/// solved optimal value in sup norm, verifying that claim by policy
/// evaluation before returning.
inline StationaryPolicy eps_optimal_policy(const FiniteMdp& mdp, const DcoeSolution& solution, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps_optimal_policy: eps must be positive");
    const double alpha = solution.alpha;
    // Being eps'-greedy against v_alpha inflates the policy value by at most
    // eps'/(1-alpha), so this slack keeps half of eps in reserve for solver
    // and evaluation error.
    const double greedy_slack = eps * (1.0 - alpha) / 2.0;
    StationaryPolicy pol = greedy_policy(mdp, solution.v, alpha, greedy_slack);

    numvec val = policy_value(mdp, pol, alpha, std::min(eps / 8.0, 1e-10));
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < val.size(); s++) worst = std::max(worst, val[s] - solution.v.values[s]);
    if (worst > eps)
        throw CertificationError("eps_optimal_policy: greedy policy exceeds v_alpha + eps by " +
                                 std::to_string(worst - eps));
    return pol;
}

} // namespace acmdp
