#pragma once

#include "acmdp/conditions.hpp"
#include "acmdp/dcoe.hpp"
#include "acmdp/simulate.hpp"
#include "acmdp/vanishing.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace acmdp {

inline nlohmann::json to_json(const DcoeSolution& sol, const std::vector<long>& probes = {}) {
    nlohmann::json j;
    j["alpha"] = sol.alpha;
    j["iterations"] = sol.iterations;
    j["residual"] = sol.residual;
    j["norm"] = to_string(sol.norm_used);
    j["sup_residual"] = sol.sup_residual;
    j["weighted_residual"] = sol.weighted_residual;
    j["ref_state"] = sol.v.ref_state;
    if (probes.empty()) {
        j["v"] = sol.v.values;
    } else {
        nlohmann::json pv = nlohmann::json::object();
        for (long s : probes) pv[std::to_string(s)] = sol.v.values[std::size_t(s)];
        j["v_at_probes"] = pv;
        j["v"] = sol.v.values;
    }
    return j;
}

inline nlohmann::json to_json(const AcoiCertificate& cert) {
    nlohmann::json j;
    j["rho"] = cert.rho;
    j["h"] = cert.h;
    j["residuals"] = cert.residuals;
    j["min_residual"] = cert.min_residual;
    j["tol"] = cert.tol;
    j["verdict"] = cert.verdict;
    j["policy"] = cert.policy.choice;
    return j;
}

inline nlohmann::json to_json(const VanishingDiscountRun& run) {
    nlohmann::json j;
    j["alphas"] = run.schedule.alphas;
    j["ref_state"] = run.schedule.ref_state;
    j["mode"] = to_string(run.mode);
    j["rho_star"] = run.rho_star;
    j["rho_sequence"] = run.rho_sequence;
    j["h_lower"] = run.h_lower;
    j["h_upper"] = run.h_upper;
    j["tail_start"] = run.tail_start;
    if (!run.m_per_alpha.empty()) j["m_per_alpha"] = run.m_per_alpha;
    nlohmann::json residuals = nlohmann::json::array();
    for (const auto& sol : run.v_per_alpha) residuals.push_back(sol.residual);
    j["solver_residuals"] = residuals;
    return j;
}

inline nlohmann::json to_json(const MajorizationWitness& w) {
    nlohmann::json j;
    j["state"] = w.state;
    j["eps"] = w.eps;
    j["K_eps"] = w.K_eps;
    nlohmann::json atoms = nlohmann::json::array();
    for (std::size_t y = 0; y < w.nu_atoms.size(); y++)
        if (w.nu_atoms[y] > 0.0) atoms.push_back({{"state", y}, {"mass", w.nu_atoms[y]}});
    j["nu_atoms"] = atoms;
    j["nu_total"] = w.nu_total;
    nlohmann::json tail = nlohmann::json::array();
    for (auto [level, mass] : w.ui_tail) tail.push_back({{"level", level}, {"tail", mass}});
    j["ui_tail"] = tail;
    return j;
}

inline nlohmann::json to_json(const EgoroffResult& e) {
    nlohmann::json j;
    j["D"] = e.D;
    j["complement_mass"] = e.complement_mass;
    j["n_star"] = e.n_star;
    j["uniform_gap"] = e.uniform_gap;
    return j;
}

inline nlohmann::json to_json(const EpiDiagnostics& d) {
    nlohmann::json j;
    j["lower_epilimit"] = d.lower_epilimit;
    j["inf_sequence_liminf"] = d.inf_sequence_liminf;
    j["inf_of_epilimit"] = d.inf_of_epilimit;
    j["inf_of_pointwise_liminf"] = d.inf_of_pointwise_liminf;
    j["chain_ok"] = d.chain_ok;
    return j;
}

inline nlohmann::json to_json(const UcModelReport& r) {
    nlohmann::json j;
    j["c_hat"] = r.c_hat;
    j["lambda"] = r.lambda;
    j["b"] = r.b;
    j["holds"] = r.holds;
    j["violating_states"] = r.violating_states;
    return j;
}

inline nlohmann::json to_json(const StoppingTimeReport& r) {
    nlohmann::json j;
    j["start_state"] = r.start_state;
    j["n_reps"] = r.n_reps;
    j["mean_tau"] = r.mean_tau;
    j["ci_halfwidth"] = r.ci_halfwidth;
    j["mean_cost_to_tau"] = r.mean_cost_to_tau;
    j["mean_kappa_term"] = r.mean_kappa_term;
    if (std::isfinite(r.bound_rhs)) j["bound_rhs"] = r.bound_rhs;
    j["bound_satisfied"] = r.bound_satisfied;
    j["n_censored"] = r.n_censored;
    return j;
}

inline nlohmann::json to_json(const HBound& h) {
    nlohmann::json j;
    j["x"] = h.x;
    j["Delta_x"] = h.Delta_x;
    j["D_x"] = h.D_x;
    j["H"] = h.H_value;
    j["psi_sup"] = h.psi_sup;
    j["kappa_term"] = h.kappa_term;
    j["hitting_factor"] = h.hitting_factor;
    return j;
}

inline nlohmann::json to_json(const DriftReport& r) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : r.entries)
        j.push_back({{"name", e.name}, {"worst_margin", e.worst_margin}, {"samples", e.samples}});
    return j;
}

inline nlohmann::json to_json(const AssumptionReport& r) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& c : r.checks)
        j.push_back({{"name", c.name}, {"pass", c.pass}, {"witness", c.witness}, {"detail", c.detail}});
    return j;
}

/// Plot-data CSV for a vanishing-discount run: one row per schedule point
/// with the scaled value at the reference and the relative values at probes.
inline std::string vanish_trace_csv(const VanishingDiscountRun& run, const std::vector<long>& probes) {
    std::ostringstream out;
    out.precision(17);
    out << "alpha,one_minus_alpha_times_value";
    for (long s : probes) out << ",h_at_" << s;
    out << "\n";
    for (std::size_t n = 0; n < run.schedule.alphas.size(); n++) {
        out << run.schedule.alphas[n] << "," << run.rho_sequence[n];
        for (long s : probes) out << "," << run.h_per_alpha[n][std::size_t(s)];
        out << "\n";
    }
    return out.str();
}

inline std::string solve_summary_csv(const std::vector<DcoeSolution>& sols, const std::vector<long>& probes) {
    std::ostringstream out;
    out.precision(17);
    out << "alpha,residual,iterations,one_minus_alpha_times_min_v";
    for (long s : probes) out << ",v_at_" << s;
    out << "\n";
    for (const auto& sol : sols) {
        double min_v = *std::min_element(sol.v.values.begin(), sol.v.values.end());
        out << sol.alpha << "," << sol.residual << "," << sol.iterations << "," << (1.0 - sol.alpha) * min_v;
        for (long s : probes) out << "," << sol.v.values[std::size_t(s)];
        out << "\n";
    }
    return out.str();
}

} // namespace acmdp
