#pragma once

#include "acmdp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace acmdp {

using numvec = std::vector<double>;
using indvec = std::vector<long>;

enum class ModelClass { PC, UC };

inline const char* to_string(ModelClass m) { return m == ModelClass::PC ? "PC" : "UC"; }

/// A probability row over states, stored sparsely as parallel index/mass
/// arrays. Indices are strictly increasing.
struct SparseRow {
    std::vector<int> index;
    numvec prob;

    void push(int state, double p) {
        index.push_back(state);
        prob.push_back(p);
    }

    std::size_t size() const { return index.size(); }

    double mass() const {
        double s = 0.0;
        for (double p : prob) s += p;
        return s;
    }

    /// Probability of a single state.
    double at(int state) const {
        auto it = std::lower_bound(index.begin(), index.end(), state);
        if (it == index.end() || *it != state) return 0.0;
        return prob[std::size_t(it - index.begin())];
    }

    double dot(const numvec& v) const {
        double s = 0.0;
        for (std::size_t i = 0; i < index.size(); i++) s += prob[i] * v[std::size_t(index[i])];
        return s;
    }
};

/// A discretized Borel-space MDP: a state grid with per-state admissible
/// action sets, one-stage costs, a row-stochastic transition kernel, and a
/// weight function. Immutable by convention after construction; all
/// operations on it are pure functions.
struct FiniteMdp {
    numvec states;                            ///< grid coordinate per state
    std::vector<std::string> labels;          ///< optional opaque labels (may be empty)
    numvec actions;                           ///< coordinates of the global action list
    std::vector<std::vector<int>> admissible; ///< per state, strictly increasing global action ids
    std::vector<numvec> cost;                 ///< cost[s][j], j indexing admissible[s]
    std::vector<std::vector<SparseRow>> kernel; ///< kernel[s][j]
    numvec weight;                            ///< w(s) >= 1
    ModelClass model_class = ModelClass::PC;

    std::size_t num_states() const { return states.size(); }
    std::size_t num_actions(std::size_t s) const { return admissible[s].size(); }

    /// Position of global action id a within admissible[s], or -1.
    long action_slot(std::size_t s, int a) const {
        const auto& adm = admissible[s];
        auto it = std::lower_bound(adm.begin(), adm.end(), a);
        if (it == adm.end() || *it != a) return -1;
        return it - adm.begin();
    }
};

/// Checks every structural invariant of a FiniteMdp; throws ModelError on the
/// first violation. row_sum_tol is 1e-12 for freshly built models; the JSON
/// loader admits 1e-9 and renormalizes.
inline void validate(const FiniteMdp& mdp, double row_sum_tol = 1e-12) {
    const std::size_t S = mdp.num_states();
    if (S == 0) throw ModelError("model has no states");
    if (!mdp.labels.empty() && mdp.labels.size() != S) throw ModelError("label count differs from state count");
    if (mdp.admissible.size() != S || mdp.cost.size() != S || mdp.kernel.size() != S || mdp.weight.size() != S)
        throw ModelError("per-state table sizes differ from state count");

    for (std::size_t s = 0; s < S; s++) {
        if (!(mdp.weight[s] >= 1.0)) throw ModelError("weight below 1", long(s));
        const auto& adm = mdp.admissible[s];
        if (adm.empty()) throw ModelError("empty admissible action set", long(s));
        for (std::size_t j = 0; j < adm.size(); j++) {
            if (adm[j] < 0 || std::size_t(adm[j]) >= mdp.actions.size())
                throw ModelError("admissible action id out of range", long(s), adm[j]);
            if (j > 0 && adm[j] <= adm[j - 1])
                throw ModelError("admissible action ids not strictly increasing", long(s));
        }
        if (mdp.cost[s].size() != adm.size() || mdp.kernel[s].size() != adm.size())
            throw ModelError("cost/kernel row count differs from admissible count", long(s));
        for (std::size_t j = 0; j < adm.size(); j++) {
            if (!std::isfinite(mdp.cost[s][j])) throw ModelError("non-finite cost", long(s), adm[j]);
            if (mdp.model_class == ModelClass::PC && mdp.cost[s][j] < 0.0)
                throw ModelError("negative cost in PC model", long(s), adm[j]);
            const SparseRow& row = mdp.kernel[s][j];
            if (row.index.size() != row.prob.size()) throw ModelError("ragged kernel row", long(s), adm[j]);
            double sum = 0.0;
            for (std::size_t i = 0; i < row.size(); i++) {
                if (row.index[i] < 0 || std::size_t(row.index[i]) >= S)
                    throw ModelError("kernel index out of range", long(s), adm[j]);
                if (i > 0 && row.index[i] <= row.index[i - 1])
                    throw ModelError("kernel row indices not strictly increasing", long(s), adm[j]);
                if (row.prob[i] < 0.0) throw ModelError("negative kernel entry", long(s), adm[j]);
                sum += row.prob[i];
            }
            if (std::abs(sum - 1.0) > row_sum_tol)
                throw ModelError("kernel row sum " + std::to_string(sum) + " differs from 1", long(s), adm[j]);
        }
    }
}

/// A real function on the state grid together with a designated reference
/// state used by relative-value constructions.
struct ValueFn {
    numvec values;
    long ref_state = 0;
};

inline void validate(const ValueFn& v, std::size_t num_states) {
    if (v.values.size() != num_states) throw ModelError("value function length differs from state count");
    if (v.ref_state < 0 || std::size_t(v.ref_state) >= num_states) throw ModelError("reference state out of range");
    for (double x : v.values)
        if (!std::isfinite(x)) throw ModelError("non-finite value function entry");
}

/// Nonrandomized stationary policy: one admissible action id per state.
struct StationaryPolicy {
    std::vector<int> choice;
};

inline void validate(const StationaryPolicy& pol, const FiniteMdp& mdp) {
    if (pol.choice.size() != mdp.num_states()) throw ModelError("policy length differs from state count");
    for (std::size_t s = 0; s < pol.choice.size(); s++)
        if (mdp.action_slot(s, pol.choice[s]) < 0) throw ModelError("policy action not admissible", long(s), pol.choice[s]);
}

/// Weighted sup norm: max over states of |f(s)| / w(s).
inline double weighted_norm(const numvec& f, const numvec& w) {
    if (f.size() != w.size()) throw std::invalid_argument("weighted_norm: length mismatch");
    double m = 0.0;
    for (std::size_t s = 0; s < f.size(); s++) m = std::max(m, std::abs(f[s]) / w[s]);
    return m;
}

inline double sup_norm(const numvec& f) {
    double m = 0.0;
    for (double x : f) m = std::max(m, std::abs(x));
    return m;
}

/// One dynamic programming sweep written into a caller-provided buffer:
/// out[s] = min over admissible a of c(s,a) + alpha * sum_y v(y) q(y|s,a).
/// alpha = 1 gives the undiscounted operator.
inline void bellman_apply_into(const FiniteMdp& mdp, const numvec& v, double alpha, numvec& out) {
    if (v.size() != mdp.num_states()) throw std::invalid_argument("bellman_apply: value length mismatch");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("bellman_apply: alpha must be in (0,1]");
    out.resize(mdp.num_states());
    for (std::size_t s = 0; s < mdp.num_states(); s++) {
        double best = std::numeric_limits<double>::infinity();
        const auto& krow = mdp.kernel[s];
        const auto& crow = mdp.cost[s];
        for (std::size_t j = 0; j < krow.size(); j++)
            best = std::min(best, crow[j] + alpha * krow[j].dot(v));
        out[s] = best;
    }
}

inline ValueFn bellman_apply(const FiniteMdp& mdp, const ValueFn& v, double alpha) {
    ValueFn out;
    out.ref_state = v.ref_state;
    bellman_apply_into(mdp, v.values, alpha, out.values);
    return out;
}

/// Greedy policy for the Q-values c + alpha * sum v q: per state, the
/// lowest-id action whose Q-value lies within eps of the per-state minimum.
/// eps = 0 is the exact argmin with lowest-id tie-break.
inline StationaryPolicy greedy_policy(const FiniteMdp& mdp, const ValueFn& v, double alpha, double eps = 0.0) {
    if (eps < 0.0) throw std::invalid_argument("greedy_policy: eps must be nonnegative");
    if (v.values.size() != mdp.num_states()) throw std::invalid_argument("greedy_policy: value length mismatch");
    StationaryPolicy pol;
    pol.choice.resize(mdp.num_states());
    numvec q;
    for (std::size_t s = 0; s < mdp.num_states(); s++) {
        const auto& krow = mdp.kernel[s];
        q.resize(krow.size());
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < krow.size(); j++) {
            q[j] = mdp.cost[s][j] + alpha * krow[j].dot(v.values);
            best = std::min(best, q[j]);
        }
        std::size_t pick = 0;
        while (q[pick] > best + eps) pick++;
        pol.choice[s] = mdp.admissible[s][pick];
    }
    return pol;
}

/// Verification report for the unbounded-cost model conditions: the cost
/// growth bound |c| <= c_hat * w and the drift bound
/// sum_y w(y) q(y|x,a) <= lambda * w(x) + b.
struct UcModelReport {
    double c_hat = 0.0;  ///< minimal feasible cost-growth constant
    double lambda = 0.0; ///< the candidate contraction factor that was tested
    double b = 0.0;      ///< minimal feasible drift offset for that lambda
    bool holds = false;  ///< both inequalities verify at every state with the candidates
    indvec violating_states;
};

/// Tests the candidate constants (c_hat, lambda, b) at every state-action
/// pair and reports the minimal feasible c_hat and, for the given lambda,
/// the minimal feasible b. Comparisons carry an absolute 1e-9 guard, the
/// same granularity the serialization contract allows for kernel rows.
inline UcModelReport check_uc_model(const FiniteMdp& mdp, double candidate_lambda, double candidate_b,
                                    double candidate_chat) {
    if (!(candidate_lambda >= 0.0 && candidate_lambda < 1.0))
        throw std::invalid_argument("check_uc_model: lambda must be in [0,1)");

    const double guard = 1e-9;
    UcModelReport rep;
    rep.lambda = candidate_lambda;
    rep.holds = true;
    for (std::size_t s = 0; s < mdp.num_states(); s++) {
        bool ok = true;
        for (std::size_t j = 0; j < mdp.num_actions(s); j++) {
            double cost_ratio = std::abs(mdp.cost[s][j]) / mdp.weight[s];
            rep.c_hat = std::max(rep.c_hat, cost_ratio);
            double drift = mdp.kernel[s][j].dot(mdp.weight) - candidate_lambda * mdp.weight[s];
            rep.b = std::max(rep.b, drift);
            if (cost_ratio > candidate_chat + guard || drift > candidate_b + guard) ok = false;
        }
        if (!ok) {
            rep.holds = false;
            rep.violating_states.push_back(long(s));
        }
    }
    rep.b = std::max(rep.b, 0.0);
    return rep;
}

} // namespace acmdp
