#pragma once

#include "acmdp/dcoe.hpp"
#include "acmdp/mdp.hpp"

#include <utility>

namespace acmdp {

/// Per-state majorization witness: the action subset K_eps(x), the minimal
/// finite measure dominating q(.|x,a) over that subset setwise, and a
/// uniform-integrability tail profile for the relevant nonnegative function.
struct MajorizationWitness {
    long state = 0;
    double eps = 0.0;
    std::vector<int> K_eps;  ///< global action ids, ascending
    numvec nu_atoms;         ///< nu_atoms[y] = max over a in K_eps of q(y|x,a)
    double nu_total = 0.0;
    std::vector<std::pair<double, double>> ui_tail; ///< (level, tail mass), nonincreasing
};

/// Selects the smallest prefix (by Q-value rank at the largest supplied
/// alpha) of the admissible actions at `state` such that the near-optimality
/// inequality min_{a in K} { c + alpha Int v_alpha dq } <= v_alpha(x) + eps
/// holds for every supplied solution. Falls back to the full action set.
inline std::vector<int> select_K_eps(const FiniteMdp& mdp, long state, double eps,
                                     const std::vector<DcoeSolution>& solutions) {
    if (solutions.empty()) throw std::invalid_argument("select_K_eps: need at least one solution");
    if (state < 0 || std::size_t(state) >= mdp.num_states())
        throw std::invalid_argument("select_K_eps: state out of range");
    if (!(eps > 0.0)) throw std::invalid_argument("select_K_eps: eps must be positive");

    const std::size_t s = std::size_t(state);
    const std::size_t A = mdp.num_actions(s);

    // Q tables per solution; ranking comes from the largest alpha.
    std::size_t largest = 0;
    for (std::size_t i = 1; i < solutions.size(); i++)
        if (solutions[i].alpha > solutions[largest].alpha) largest = i;
    std::vector<numvec> q(solutions.size(), numvec(A));
    for (std::size_t i = 0; i < solutions.size(); i++)
        for (std::size_t j = 0; j < A; j++)
            q[i][j] = mdp.cost[s][j] + solutions[i].alpha * mdp.kernel[s][j].dot(solutions[i].v.values);

    std::vector<std::size_t> rank(A);
    for (std::size_t j = 0; j < A; j++) rank[j] = j;
    std::stable_sort(rank.begin(), rank.end(),
                     [&](std::size_t a, std::size_t b) { return q[largest][a] < q[largest][b]; });

    numvec best(solutions.size(), std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < A; k++) {
        for (std::size_t i = 0; i < solutions.size(); i++) best[i] = std::min(best[i], q[i][rank[k]]);
        bool all_ok = true;
        for (std::size_t i = 0; i < solutions.size(); i++)
            if (best[i] > solutions[i].v.values[s] + eps) {
                all_ok = false;
                break;
            }
        if (all_ok) {
            std::vector<int> k_set;
            for (std::size_t j = 0; j <= k; j++) k_set.push_back(mdp.admissible[s][rank[j]]);
            std::sort(k_set.begin(), k_set.end());
            return k_set;
        }
    }
    return mdp.admissible[s];
}

/// The entrywise maximum of the kernel rows over K: the minimal measure on
/// the grid that majorizes q(.|x,a) setwise for every a in K.
inline MajorizationWitness minimal_majorizer(const FiniteMdp& mdp, long state, const std::vector<int>& K) {
    if (state < 0 || std::size_t(state) >= mdp.num_states())
        throw std::invalid_argument("minimal_majorizer: state out of range");
    if (K.empty()) throw std::invalid_argument("minimal_majorizer: K must be nonempty");

    MajorizationWitness w;
    w.state = state;
    w.K_eps = K;
    std::sort(w.K_eps.begin(), w.K_eps.end());
    w.nu_atoms.assign(mdp.num_states(), 0.0);
    for (int a : w.K_eps) {
        long j = mdp.action_slot(std::size_t(state), a);
        if (j < 0) throw std::invalid_argument("minimal_majorizer: K contains an inadmissible action");
        const SparseRow& row = mdp.kernel[std::size_t(state)][std::size_t(j)];
        for (std::size_t i = 0; i < row.size(); i++) {
            std::size_t y = std::size_t(row.index[i]);
            w.nu_atoms[y] = std::max(w.nu_atoms[y], row.prob[i]);
        }
    }
    w.nu_total = 0.0;
    for (double m : w.nu_atoms) w.nu_total += m;
    return w;
}

/// The Gubenko-Shtatland global test: one measure must majorize every
/// kernel row of the whole model and have total mass strictly below 2.
/// Strictness is judged with a 1e-9 guard so that a mass sitting exactly at
/// the boundary cannot slip through on summation roundoff.
inline std::pair<double, bool> gus_test(const FiniteMdp& mdp) {
    numvec atoms(mdp.num_states(), 0.0);
    for (std::size_t s = 0; s < mdp.num_states(); s++)
        for (std::size_t j = 0; j < mdp.num_actions(s); j++) {
            const SparseRow& row = mdp.kernel[s][j];
            for (std::size_t i = 0; i < row.size(); i++) {
                std::size_t y = std::size_t(row.index[i]);
                atoms[y] = std::max(atoms[y], row.prob[i]);
            }
        }
    double total = 0.0;
    for (double m : atoms) total += m;
    return {total, total < 2.0 - 1e-9};
}

/// Tail profile sup_{a in K} sum_{y: g(y) >= level} g(y) q(y|x,a) for each
/// requested level. Vanishing tails witness uniform integrability of g with
/// respect to the kernel family.
inline std::vector<std::pair<double, double>> uniform_integrability_tail(const FiniteMdp& mdp, long state,
                                                                         const std::vector<int>& K, const numvec& g,
                                                                         const numvec& levels) {
    if (state < 0 || std::size_t(state) >= mdp.num_states())
        throw std::invalid_argument("uniform_integrability_tail: state out of range");
    if (g.size() != mdp.num_states()) throw std::invalid_argument("uniform_integrability_tail: g length mismatch");
    for (double x : g)
        if (x < 0.0) throw std::domain_error("uniform_integrability_tail: g must be nonnegative");
    for (std::size_t i = 1; i < levels.size(); i++)
        if (levels[i] <= levels[i - 1]) throw std::invalid_argument("uniform_integrability_tail: levels must increase");

    std::vector<std::pair<double, double>> profile;
    profile.reserve(levels.size());
    for (double level : levels) {
        double worst = 0.0;
        for (int a : K) {
            long j = mdp.action_slot(std::size_t(state), a);
            if (j < 0) throw std::invalid_argument("uniform_integrability_tail: K contains an inadmissible action");
            const SparseRow& row = mdp.kernel[std::size_t(state)][std::size_t(j)];
            double tail = 0.0;
            for (std::size_t i = 0; i < row.size(); i++) {
                std::size_t y = std::size_t(row.index[i]);
                if (g[y] >= level) tail += g[y] * row.prob[i];
            }
            worst = std::max(worst, tail);
        }
        profile.emplace_back(level, worst);
    }
    return profile;
}

/// Convenience composition: K_eps selection, minimal majorizer, and the UI
/// tail profile for g in one witness.
inline MajorizationWitness build_majorization_witness(const FiniteMdp& mdp, long state, double eps,
                                                      const std::vector<DcoeSolution>& solutions, const numvec& g,
                                                      const numvec& levels) {
    std::vector<int> k_set = select_K_eps(mdp, state, eps, solutions);
    MajorizationWitness w = minimal_majorizer(mdp, state, k_set);
    w.eps = eps;
    w.ui_tail = uniform_integrability_tail(mdp, state, k_set, g, levels);
    return w;
}

/// Almost-uniform-convergence certificate: off a set of nu-mass below delta,
/// the tail of the sequence stays within eta of the limit from index n_star on.
struct EgoroffResult {
    std::vector<long> D;        ///< states kept (ascending)
    double complement_mass = 0.0; ///< nu mass of the removed states
    std::size_t n_star = 0;
    double uniform_gap = 0.0;   ///< max over D, m >= n_star of |f_m - f|
};

/// Scans n_star upward; for each, removes exactly the states whose tail
/// deviation sup_{m >= n_star} |f_m - f_limit| exceeds eta (the smallest
/// removal that can work) and accepts once the removed nu-mass drops below
/// delta. Failure on the finite sequence is inconclusive, not a disproof.
inline EgoroffResult egoroff_extract(const std::vector<numvec>& f_seq, const numvec& f_limit,
                                     const MajorizationWitness& nu, double delta, double eta) {
    if (f_seq.empty()) throw std::invalid_argument("egoroff_extract: empty sequence");
    if (!(delta > 0.0) || !(eta > 0.0)) throw std::invalid_argument("egoroff_extract: delta and eta must be positive");
    const std::size_t S = f_limit.size();
    const std::size_t N = f_seq.size();
    if (nu.nu_atoms.size() != S) throw std::invalid_argument("egoroff_extract: nu dimension mismatch");
    for (const numvec& f : f_seq)
        if (f.size() != S) throw std::invalid_argument("egoroff_extract: sequence dimension mismatch");

    // suffix_dev[n][s] = max over m >= n of |f_m(s) - f_limit(s)|
    std::vector<numvec> suffix_dev(N + 1, numvec(S, 0.0));
    for (std::size_t n = N; n-- > 0;)
        for (std::size_t s = 0; s < S; s++)
            suffix_dev[n][s] = std::max(suffix_dev[n + 1][s], std::abs(f_seq[n][s] - f_limit[s]));

    for (std::size_t n_star = 0; n_star < N; n_star++) {
        double removed = 0.0;
        for (std::size_t s = 0; s < S; s++)
            if (suffix_dev[n_star][s] > eta) removed += nu.nu_atoms[s];
        if (removed < delta) {
            EgoroffResult res;
            res.n_star = n_star;
            res.complement_mass = removed;
            for (std::size_t s = 0; s < S; s++)
                if (suffix_dev[n_star][s] <= eta) {
                    res.D.push_back(long(s));
                    res.uniform_gap = std::max(res.uniform_gap, suffix_dev[n_star][s]);
                }
            return res;
        }
    }
    throw InsufficientDataError("egoroff_extract: sequence too short to certify the requested (delta, eta)");
}

/// Diagnostics for the epigraphical limit of a function sequence on a
/// one-dimensional grid, with the two infimum inequalities that relate the
/// liminf of the infima, the infimum of the epi-limit, and the infimum of
/// the pointwise liminf.
struct EpiDiagnostics {
    numvec lower_epilimit;
    double inf_sequence_liminf = 0.0;
    double inf_of_epilimit = 0.0;
    double inf_of_pointwise_liminf = 0.0;
    bool chain_ok = false;
};

/// Finite-grid realization of the lower epi-limit: neighborhoods are grid
/// balls of radius k cells (k >= 1, so approach along the grid is visible),
/// liminf over the finite sequence is the running minimum. The continuum
/// definition is recovered in the grid refinement limit.
inline EpiDiagnostics lower_epilimit(const std::vector<numvec>& f_seq, const numvec& grid) {
    if (f_seq.empty()) throw std::invalid_argument("lower_epilimit: empty sequence");
    const std::size_t G = grid.size();
    for (std::size_t i = 1; i < G; i++)
        if (grid[i] <= grid[i - 1]) throw std::invalid_argument("lower_epilimit: grid must be sorted ascending");
    for (const numvec& f : f_seq)
        if (f.size() != G) throw std::invalid_argument("lower_epilimit: dimension mismatch");

    EpiDiagnostics diag;
    diag.lower_epilimit.assign(G, std::numeric_limits<double>::infinity());
    numvec pointwise_liminf(G, std::numeric_limits<double>::infinity());
    diag.inf_sequence_liminf = std::numeric_limits<double>::infinity();

    // min over the ball of radius one cell is enough: larger radii only
    // decrease the value, so the sup over shrinking radii is attained there.
    for (const numvec& f : f_seq) {
        double inf_f = std::numeric_limits<double>::infinity();
        for (std::size_t y = 0; y < G; y++) {
            inf_f = std::min(inf_f, f[y]);
            pointwise_liminf[y] = std::min(pointwise_liminf[y], f[y]);
            double ball = f[y];
            if (y > 0) ball = std::min(ball, f[y - 1]);
            if (y + 1 < G) ball = std::min(ball, f[y + 1]);
            diag.lower_epilimit[y] = std::min(diag.lower_epilimit[y], ball);
        }
        diag.inf_sequence_liminf = std::min(diag.inf_sequence_liminf, inf_f);
    }

    diag.inf_of_epilimit = *std::min_element(diag.lower_epilimit.begin(), diag.lower_epilimit.end());
    diag.inf_of_pointwise_liminf = *std::min_element(pointwise_liminf.begin(), pointwise_liminf.end());
    diag.chain_ok = diag.inf_sequence_liminf <= diag.inf_of_epilimit + 1e-9 &&
                    diag.inf_of_epilimit <= diag.inf_of_pointwise_liminf + 1e-9;
    return diag;
}

/// Searches for a bounded sub-interval of interior grid points whose infima
/// track the global infima within eps along (a finite-data proxy of) a
/// subsequence: at least half of the last-half indices must comply. Grid
/// endpoints are excluded so that minimizers escaping the truncation window
/// are not mistaken for a compact witness.
inline bool epi_compactness_condition(const std::vector<numvec>& f_seq, const numvec& grid, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("epi_compactness_condition: eps must be positive");
    if (f_seq.empty()) throw std::invalid_argument("epi_compactness_condition: empty sequence");
    const std::size_t G = grid.size();
    if (G < 3) throw std::invalid_argument("epi_compactness_condition: grid needs at least 3 points");
    const std::size_t N = f_seq.size();
    const std::size_t tail_begin = N / 2;
    const std::size_t tail_len = N - tail_begin;
    const std::size_t needed = std::max<std::size_t>(1, tail_len / 2);

    // hit counts per interior interval [i, j], accumulated over the tail
    const std::size_t interior = G - 2;
    std::vector<unsigned> hits(interior * interior, 0);
    for (std::size_t n = tail_begin; n < N; n++) {
        const numvec& f = f_seq[n];
        const double target = *std::min_element(f.begin(), f.end()) + eps;
        for (std::size_t i = 1; i + 1 < G; i++) {
            double running = std::numeric_limits<double>::infinity();
            for (std::size_t j = i; j + 1 < G; j++) {
                running = std::min(running, f[j]);
                if (running <= target) hits[(i - 1) * interior + (j - 1)]++;
            }
        }
    }
    for (unsigned h : hits)
        if (h >= needed) return true;
    return false;
}

} // namespace acmdp
