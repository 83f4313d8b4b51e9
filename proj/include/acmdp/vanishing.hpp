#pragma once

#include "acmdp/dcoe.hpp"
#include "acmdp/mdp.hpp"

#include <cmath>
#include <optional>

namespace acmdp {

/// A strictly increasing sequence of discount factors approaching 1,
/// together with the reference state used to recenter the value functions
/// in UC mode.
struct DiscountSchedule {
    numvec alphas;
    long ref_state = 0;

    /// alpha_n = 1 - 2^{-n}, n = 1..n_points. Geometric approach to 1
    /// balances solve cost against resolution of the limit.
    static DiscountSchedule geometric(int n_points = 20, long ref_state = 0) {
        DiscountSchedule sched;
        sched.ref_state = ref_state;
        sched.alphas.reserve(std::size_t(n_points));
        for (int n = 1; n <= n_points; n++) sched.alphas.push_back(1.0 - std::ldexp(1.0, -n));
        return sched;
    }
};

inline void validate(const DiscountSchedule& sched) {
    if (sched.alphas.size() < 3) throw std::invalid_argument("schedule needs at least 3 points");
    for (std::size_t i = 0; i < sched.alphas.size(); i++) {
        if (!(sched.alphas[i] > 0.0 && sched.alphas[i] < 1.0))
            throw std::invalid_argument("schedule entries must lie in (0,1)");
        if (i > 0 && sched.alphas[i] <= sched.alphas[i - 1])
            throw std::invalid_argument("schedule must be strictly increasing");
    }
}

/// Relative values in UC mode: v_alpha - v_alpha(ref) (zero at the
/// reference state by construction).
inline numvec relative_values_uc(const DcoeSolution& solution, long ref_state) {
    if (ref_state < 0 || std::size_t(ref_state) >= solution.v.values.size())
        throw std::invalid_argument("relative_values_uc: ref_state out of range");
    const double base = solution.v.values[std::size_t(ref_state)];
    numvec h(solution.v.values.size());
    for (std::size_t s = 0; s < h.size(); s++) h[s] = solution.v.values[s] - base;
    h[std::size_t(ref_state)] = 0.0;
    return h;
}

/// Relative values in PC mode: (v_alpha - m_alpha, m_alpha) with
/// m_alpha = min_x v_alpha(x); the vector is nonnegative with minimum 0.
inline std::pair<numvec, double> relative_values_pc(const DcoeSolution& solution) {
    double m = std::numeric_limits<double>::infinity();
    for (double x : solution.v.values) m = std::min(m, x);
    numvec h(solution.v.values.size());
    for (std::size_t s = 0; s < h.size(); s++) h[s] = solution.v.values[s] - m;
    return {std::move(h), m};
}

/// The full vanishing-discount record: one DCOE solution per schedule point,
/// relative value functions, their tail envelopes, and the limit estimates.
struct VanishingDiscountRun {
    DiscountSchedule schedule;
    ModelClass mode = ModelClass::PC;
    std::vector<DcoeSolution> v_per_alpha;
    std::vector<numvec> h_per_alpha;
    numvec m_per_alpha; ///< PC mode only, empty otherwise
    std::vector<numvec> lower_env; ///< lower_env[n][s] = min over m >= n of h_m(s)
    std::vector<numvec> upper_env; ///< upper_env[n][s] = max over m >= n of h_m(s)
    numvec h_lower;     ///< limit proxy: the tail infimum over the final window
    numvec h_upper;
    double rho_star = 0.0;   ///< last entry of rho_sequence
    numvec rho_sequence;     ///< (1-alpha_n) v_{alpha_n}(ref) in UC mode, (1-alpha_n) m_{alpha_n} in PC mode
    std::size_t tail_start = 0; ///< index of the first schedule point in the final window
};

struct RunOptions {
    double solver_tol = 1e-10;
    unsigned long max_iter = 1000000;
    /// Number of trailing schedule points forming the final window for the
    /// limit estimates h_lower/h_upper. 0 means the last half.
    std::size_t tail_window = 0;
};

/// Solves the DCOE at every schedule point and assembles relative values,
/// tail envelopes, and the limit estimates. The per-point solver tolerance
/// tightens with alpha so that (1 - alpha) v_alpha stays resolved to 1e-6;
/// it is floored at 1e-12, roughly the double-precision limit for these
/// iterates.
inline VanishingDiscountRun run_schedule(const FiniteMdp& mdp, const DiscountSchedule& schedule, ModelClass mode,
                                         double solver_tol = 1e-10, const RunOptions& opts = {}) {
    validate(schedule);
    if (mode != mdp.model_class) throw std::invalid_argument("run_schedule: mode differs from mdp.model_class");
    if (schedule.ref_state < 0 || std::size_t(schedule.ref_state) >= mdp.num_states())
        throw std::invalid_argument("run_schedule: ref_state out of range");

    VanishingDiscountRun run;
    run.schedule = schedule;
    run.mode = mode;
    const std::size_t N = schedule.alphas.size();
    const std::size_t S = mdp.num_states();

    for (std::size_t n = 0; n < N; n++) {
        const double alpha = schedule.alphas[n];
        SolveOptions sopts;
        sopts.tol = std::max(std::min(solver_tol, (1.0 - alpha) * 1e-6), 1e-12);
        sopts.max_iter = opts.max_iter;
        sopts.ref_state = schedule.ref_state;
        DcoeSolution sol = solve_dcoe(mdp, alpha, sopts); // non-convergence propagates with the failing alpha
        if (mode == ModelClass::UC) {
            run.h_per_alpha.push_back(relative_values_uc(sol, schedule.ref_state));
            run.rho_sequence.push_back((1.0 - alpha) * sol.v.values[std::size_t(schedule.ref_state)]);
        } else {
            auto [h, m] = relative_values_pc(sol);
            run.h_per_alpha.push_back(std::move(h));
            run.m_per_alpha.push_back(m);
            run.rho_sequence.push_back((1.0 - alpha) * m);
        }
        run.v_per_alpha.push_back(std::move(sol));
    }
    run.rho_star = run.rho_sequence.back();

    // Tail envelopes, built backward so each is a running entrywise extreme.
    run.lower_env.assign(N, numvec());
    run.upper_env.assign(N, numvec());
    run.lower_env[N - 1] = run.h_per_alpha[N - 1];
    run.upper_env[N - 1] = run.h_per_alpha[N - 1];
    for (std::size_t n = N - 1; n-- > 0;) {
        run.lower_env[n] = run.lower_env[n + 1];
        run.upper_env[n] = run.upper_env[n + 1];
        for (std::size_t s = 0; s < S; s++) {
            run.lower_env[n][s] = std::min(run.lower_env[n][s], run.h_per_alpha[n][s]);
            run.upper_env[n][s] = std::max(run.upper_env[n][s], run.h_per_alpha[n][s]);
        }
    }

    std::size_t window = opts.tail_window == 0 ? (N + 1) / 2 : opts.tail_window;
    window = std::min(window, N);
    run.tail_start = N - window;
    run.h_lower = run.lower_env[run.tail_start];
    run.h_upper = run.upper_env[run.tail_start];
    return run;
}

/// Largest weighted norm of the relative value functions across the
/// schedule; finite and stable tails witness the UC boundedness assumption.
inline double check_assumption_uc_bounded(const VanishingDiscountRun& run, const numvec& w) {
    if (run.mode != ModelClass::UC) throw std::invalid_argument("check_assumption_uc_bounded: UC runs only");
    double worst = 0.0;
    for (const numvec& h : run.h_per_alpha) worst = std::max(worst, weighted_norm(h, w));
    return worst;
}

/// Per-state supremum of h_alpha over the schedule plus a nonexplosiveness
/// flag: the max over the last third of the schedule must not exceed the max
/// over the middle third by more than 1%.
inline std::pair<numvec, bool> check_condition_B(const VanishingDiscountRun& run) {
    if (run.mode != ModelClass::PC) throw std::invalid_argument("check_condition_B: PC runs only");
    const std::size_t N = run.h_per_alpha.size();
    const std::size_t S = run.h_per_alpha.front().size();
    numvec per_state_sup(S, 0.0);
    for (const numvec& h : run.h_per_alpha)
        for (std::size_t s = 0; s < S; s++) per_state_sup[s] = std::max(per_state_sup[s], h[s]);

    auto window_max = [&](std::size_t lo, std::size_t hi) {
        double m = 0.0;
        for (std::size_t n = lo; n < hi; n++)
            for (double x : run.h_per_alpha[n]) m = std::max(m, x);
        return m;
    };
    const double mid = window_max(N / 3, 2 * N / 3);
    const double last = window_max(2 * N / 3, N);
    return {std::move(per_state_sup), last <= 1.01 * mid};
}

/// An average-cost optimality inequality certificate for a pair (rho, h):
/// per-state residuals rho + h - (T h), the verdict, and the policy greedy
/// for the right-hand side.
struct AcoiCertificate {
    double rho = 0.0;
    numvec h;
    numvec residuals;
    double min_residual = 0.0;
    double tol = 0.0;
    bool verdict = false;
    StationaryPolicy policy;
};

inline AcoiCertificate acoi_residual(const FiniteMdp& mdp, double rho, const numvec& h, double tol) {
    if (h.size() != mdp.num_states()) throw std::invalid_argument("acoi_residual: h length mismatch");
    for (double x : h)
        if (!std::isfinite(x)) throw std::invalid_argument("acoi_residual: h must be finite");

    AcoiCertificate cert;
    cert.rho = rho;
    cert.h = h;
    cert.tol = tol;
    cert.residuals.resize(mdp.num_states());
    cert.policy.choice.resize(mdp.num_states());
    cert.min_residual = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < mdp.num_states(); s++) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t pick = 0;
        for (std::size_t j = 0; j < mdp.num_actions(s); j++) {
            double q = mdp.cost[s][j] + mdp.kernel[s][j].dot(h);
            if (q < best) {
                best = q;
                pick = j;
            }
        }
        cert.policy.choice[s] = mdp.admissible[s][pick];
        cert.residuals[s] = rho + h[s] - best;
        cert.min_residual = std::min(cert.min_residual, cert.residuals[s]);
    }
    cert.verdict = cert.min_residual >= -tol;
    return cert;
}

/// Extracts the stationary policy choosing, per state, an action within eps
/// of the certificate's right-hand-side infimum. On a finite grid the
/// infimum is attained, so eps = 0 yields a stationary optimal policy.
inline StationaryPolicy acoi_to_policy(const FiniteMdp& mdp, const AcoiCertificate& cert, double eps = 0.0) {
    if (!cert.verdict) throw CertificationError("acoi_to_policy: certificate verdict is false");
    if (eps < 0.0) throw std::invalid_argument("acoi_to_policy: eps must be nonnegative");
    ValueFn h{cert.h, 0};
    return greedy_policy(mdp, h, 1.0, eps);
}

/// Long-run average cost of a stationary policy by exact matrix recursion
/// J_{k+1} = c + P J_k, Cesaro-averaging J_k / k over the last tenth of the
/// horizon to damp periodic oscillation. No sampling involved.
inline numvec average_cost_eval(const FiniteMdp& mdp, const StationaryPolicy& policy, unsigned long horizon = 100000) {
    if (horizon < 1) throw std::invalid_argument("average_cost_eval: horizon must be >= 1");
    validate(policy, mdp);
    const std::size_t S = mdp.num_states();
    std::vector<long> slot(S);
    for (std::size_t s = 0; s < S; s++) slot[s] = mdp.action_slot(s, policy.choice[s]);

    numvec j(S, 0.0), next(S);
    numvec acc(S, 0.0);
    const unsigned long tail_begin = horizon - horizon / 10;
    unsigned long samples = 0;
    for (unsigned long k = 1; k <= horizon; k++) {
        for (std::size_t s = 0; s < S; s++)
            next[s] = mdp.cost[s][std::size_t(slot[s])] + mdp.kernel[s][std::size_t(slot[s])].dot(j);
        j.swap(next);
        if (k > tail_begin) {
            for (std::size_t s = 0; s < S; s++) acc[s] += j[s] / double(k);
            samples++;
        }
    }
    if (samples == 0) { // horizon too short for a tail window; use the endpoint
        for (std::size_t s = 0; s < S; s++) acc[s] = j[s] / double(horizon);
        samples = 1;
    }
    for (double& x : acc) x /= double(samples);
    return acc;
}

} // namespace acmdp
