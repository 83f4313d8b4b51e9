// Command-line front end: loads a JSON run configuration, orchestrates the
// solve -> vanish -> check -> simulate pipeline, and writes machine-readable
// reports. Exit codes are a stable contract:
//   0 success (including negative findings), 2 configuration error,
//   3 solver non-convergence, 4 missing prerequisite outputs, 5 censoring.

#include "acmdp/conditions.hpp"
#include "acmdp/io.hpp"
#include "acmdp/models.hpp"
#include "acmdp/reports.hpp"
#include "acmdp/simulate.hpp"
#include "acmdp/vanishing.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace acmdp;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    json raw;
    std::string model_kind;  // builtin name, "path", or "inline"
    json model_params;
    std::string model_path;

    DiscountSchedule schedule = DiscountSchedule::geometric(20);
    std::size_t tail_window = 0;
    double solver_tol = 1e-10;
    double acoi_tol = 1e-6;
    double ci_level = 0.99;
    std::vector<long> probes;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    std::optional<std::string> from_dir; // prior run outputs for `check`
    json sim;

    std::string hash_hex;
};

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    RunConfig cfg;
    cfg.raw = j;
    try {
        const json& model = j.at("model");
        int sources = int(model.contains("builtin")) + int(model.contains("path")) + int(model.contains("inline"));
        if (sources != 1) throw ConfigError("model must name exactly one of builtin | path | inline");
        if (model.contains("builtin")) {
            cfg.model_kind = model.at("builtin").get<std::string>();
            cfg.model_params = model.value("params", json::object());
        } else if (model.contains("path")) {
            cfg.model_kind = "path";
            cfg.model_path = model.at("path").get<std::string>();
        } else {
            cfg.model_kind = "inline";
            cfg.model_params = model.at("inline");
        }

        if (j.contains("schedule")) {
            const json& sc = j.at("schedule");
            std::string rule = sc.value("rule", "geometric");
            if (rule == "geometric") {
                int n = sc.value("n_points", 20);
                if (n < 3) throw ConfigError("schedule n_points must be >= 3");
                cfg.schedule = DiscountSchedule::geometric(n);
            } else if (rule == "custom") {
                cfg.schedule.alphas = sc.at("alphas").get<numvec>();
            } else {
                throw ConfigError("schedule rule must be geometric or custom");
            }
        }
        cfg.schedule.ref_state = j.value("ref_state", 0L);
        cfg.tail_window = j.value("tail_window", std::size_t(0));

        if (j.contains("tolerances")) {
            const json& t = j.at("tolerances");
            cfg.solver_tol = t.value("solver", 1e-10);
            cfg.acoi_tol = t.value("acoi", 1e-6);
            cfg.ci_level = t.value("ci_level", 0.99);
        }
        if (j.contains("probes")) cfg.probes = j.at("probes").get<std::vector<long>>();
        cfg.seed = j.value("seed", std::uint64_t(0));
        cfg.output_dir = j.value("output_dir", std::string("out"));
        if (j.contains("from")) cfg.from_dir = j.at("from").get<std::string>();
        cfg.sim = j.value("sim", json::object());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config field: ") + e.what());
    }
    cfg.hash_hex = fnv1a_hex(j.dump());
    return cfg;
}

DemandFamily demand_from_json(const json& j) {
    if (j.is_null() || j.empty()) return DemandFamily::uniform(1.0, 2.0);
    DemandFamily d;
    std::string kind = j.value("kind", "uniform");
    auto pair_of = [&](const char* name, std::pair<double, double> fallback) -> std::pair<double, double> {
        if (!j.contains(name)) return fallback;
        const json& p = j.at(name);
        if (p.is_number()) return {p.get<double>(), 0.0};
        return {p.at(0).get<double>(), p.at(1).get<double>()};
    };
    if (kind == "uniform") {
        d.kind = DemandFamily::Kind::Uniform;
        d.p = pair_of("lo", {1.0, 0.0});
        d.q = pair_of("hi", {2.0, 0.0});
    } else if (kind == "triangular") {
        d.kind = DemandFamily::Kind::Triangular;
        d.p = pair_of("lo", {1.0, 0.0});
        d.q = pair_of("mode", {1.5, 0.0});
        d.r = pair_of("hi", {2.0, 0.0});
    } else if (kind == "truncated_exponential") {
        d.kind = DemandFamily::Kind::TruncatedExponential;
        d.p = pair_of("rate", {1.0, 0.0});
        d.q = pair_of("cap", {3.0, 0.0});
    } else {
        throw ConfigError("unknown demand kind " + kind);
    }
    if (j.contains("saturation_level")) d.saturation_level = j.at("saturation_level").get<double>();
    d.atom_at_zero = j.value("atom_at_zero", 0.0);
    return d;
}

GridSpec grid_from_json(const json& j, GridSpec fallback) {
    GridSpec g = fallback;
    if (j.contains("grid")) {
        const json& gj = j.at("grid");
        g.x_min = gj.value("x_min", g.x_min);
        g.x_max = gj.value("x_max", g.x_max);
        g.n_states = gj.value("n_states", g.n_states);
        g.n_actions = gj.value("n_actions", g.n_actions);
    }
    return g;
}

PcInventorySpec pc_spec_from_json(const json& p) {
    PcInventorySpec spec;
    spec.kappa.fixed = p.value("kappa_fixed", 1.0);
    spec.kappa.per_unit = p.value("kappa_per_unit", 1.0);
    spec.psi.holding = p.value("psi_holding", 1.0);
    spec.psi.backlog = p.value("psi_backlog", 1.0);
    if (p.contains("demand")) spec.demand = demand_from_json(p.at("demand"));
    spec.order_cap = p.value("order_cap", 6.0);
    spec.L = p.value("L", 0.0);
    spec.M = p.value("M", 4.0);
    return spec;
}

UcProductionSpec uc_spec_from_json(const json& p) {
    UcProductionSpec spec;
    spec.kappa.fixed = p.value("kappa_fixed", 0.0);
    spec.kappa.per_unit = p.value("kappa_per_unit", 1.0);
    spec.psi.c0 = p.value("psi_c0", 0.0);
    spec.psi.c1 = p.value("psi_c1", 0.1);
    spec.psi.c2 = p.value("psi_c2", 0.0);
    spec.sale_price = p.value("sale_price", 2.0);
    if (p.contains("demand")) spec.demand = demand_from_json(p.at("demand"));
    spec.L = p.value("L", 2.0);
    spec.theta = p.value("theta", 1.0);
    spec.theta_mid = p.value("theta_mid", 2.0);
    spec.r = p.value("r", 0.5);
    spec.lambda_prime = p.value("lambda_prime", 0.95);
    spec.a_bar = p.value("a_bar", 0.0);
    return spec;
}

/// Deterministic random instance for the invariant builtins.
InvariantModelSpec invariant_spec_from_json(const json& p, std::uint64_t seed, bool partial) {
    InvariantModelSpec spec;
    const int S = p.value("n_states", 6);
    const int A = p.value("n_actions", 4);
    const double cost_scale = p.value("cost_scale", 1.0);
    CounterRng rng(seed, 0xA11CE);
    spec.action_kernel.resize(std::size_t(A));
    for (int a = 0; a < A; a++) {
        numvec row(std::size_t(S), 0.0);
        double tot = 0.0;
        for (int y = 0; y < S; y++) {
            row[std::size_t(y)] = 0.05 + rng.next_uniform();
            tot += row[std::size_t(y)];
        }
        for (double& v : row) v /= tot;
        spec.action_kernel[std::size_t(a)] = std::move(row);
    }
    spec.cost.resize(std::size_t(S));
    for (int s = 0; s < S; s++) {
        spec.cost[std::size_t(s)].resize(std::size_t(A));
        for (int a = 0; a < A; a++)
            spec.cost[std::size_t(s)][std::size_t(a)] = cost_scale * rng.next_uniform(-1.0, 1.0);
    }
    spec.model_class = ModelClass::UC;
    if (partial) {
        InvariantModelSpec::Partial pt;
        pt.lambda = p.value("lambda", 0.5);
        pt.lambda_prime = p.value("lambda_prime", 0.8);
        pt.b = p.value("b", 1.0);
        spec.weight.resize(std::size_t(S));
        for (int s = 0; s < S; s++) spec.weight[std::size_t(s)] = 1.0 + 0.8 * double(s);
        pt.kernel_by_state.assign(std::size_t(S), {});
        for (int s = 0; s < S; s++) {
            pt.kernel_by_state[std::size_t(s)].resize(std::size_t(A));
            for (int a = 0; a < A; a++) {
                numvec row(std::size_t(S), 0.0);
                double tot = 0.0;
                for (int y = 0; y < S; y++) {
                    // outside rows push toward low-weight states
                    row[std::size_t(y)] = (0.05 + rng.next_uniform()) / double(1 + y);
                    tot += row[std::size_t(y)];
                }
                for (double& v : row) v /= tot;
                pt.kernel_by_state[std::size_t(s)][std::size_t(a)] = std::move(row);
            }
        }
        spec.partial = std::move(pt);
    }
    return spec;
}

struct LoadedModel {
    FiniteMdp mdp;
    std::optional<PcInventorySpec> pc_spec;
    std::optional<UcProductionSpec> uc_spec;
};

LoadedModel load_model(const RunConfig& cfg) {
    LoadedModel lm;
    if (cfg.model_kind == "path") {
        lm.mdp = read_mdp_file(cfg.model_path);
    } else if (cfg.model_kind == "inline") {
        lm.mdp = mdp_from_json(cfg.model_params);
    } else if (cfg.model_kind == "pc_inventory") {
        lm.pc_spec = pc_spec_from_json(cfg.model_params);
        lm.mdp = build_pc_inventory(*lm.pc_spec, grid_from_json(cfg.model_params, GridSpec{-10, 10, 401, 401}));
    } else if (cfg.model_kind == "uc_production") {
        lm.uc_spec = uc_spec_from_json(cfg.model_params);
        lm.mdp = build_uc_production(*lm.uc_spec, grid_from_json(cfg.model_params, GridSpec{0, 12, 241, 241}));
    } else if (cfg.model_kind == "invariant" || cfg.model_kind == "partial_invariant") {
        lm.mdp = build_invariant(invariant_spec_from_json(cfg.model_params, cfg.seed,
                                                          cfg.model_kind == "partial_invariant"),
                                 cfg.schedule.ref_state)
                     .mdp;
    } else if (cfg.model_kind == "circle") {
        lm.mdp = build_circle_mdp(cfg.model_params.value("n_states", 60));
    } else {
        throw ConfigError("unknown builtin model " + cfg.model_kind);
    }
    return lm;
}

std::vector<long> effective_probes(const RunConfig& cfg, const FiniteMdp& mdp) {
    if (!cfg.probes.empty()) {
        for (long s : cfg.probes)
            if (s < 0 || std::size_t(s) >= mdp.num_states()) throw ConfigError("probe state out of range");
        return cfg.probes;
    }
    std::vector<long> probes;
    const long S = long(mdp.num_states());
    const int count = std::min<long>(11, S);
    for (int i = 0; i < count; i++) probes.push_back((S - 1) * i / std::max(1, count - 1));
    std::sort(probes.begin(), probes.end());
    probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
    return probes;
}

void atomic_write(const fs::path& path, const std::string& text) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << text;
    }
    fs::rename(tmp, path);
}

void write_json(const fs::path& path, json j, const RunConfig& cfg) {
    j["config_hash"] = cfg.hash_hex;
    j["seed"] = cfg.seed;
    atomic_write(path, j.dump(1) + "\n");
}

std::string alpha_tag(double alpha) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", alpha);
    return buf;
}

// ---------------------------------------------------------------------------

int cmd_solve(const RunConfig& cfg) {
    LoadedModel lm = load_model(cfg);
    std::vector<long> probes = effective_probes(cfg, lm.mdp);
    fs::create_directories(cfg.output_dir);

    std::vector<DcoeSolution> sols;
    for (double alpha : cfg.schedule.alphas) {
        SolveOptions opts;
        opts.tol = std::max(std::min(cfg.solver_tol, (1.0 - alpha) * 1e-6), 1e-12);
        opts.ref_state = cfg.schedule.ref_state;
        try {
            sols.push_back(solve_dcoe(lm.mdp, alpha, opts));
        } catch (const ConvergenceError& e) {
            json diag;
            diag["alpha"] = alpha;
            diag["residual"] = e.residual();
            diag["iterations"] = e.iterations();
            write_json(fs::path(cfg.output_dir) / "solver_failure.json", diag, cfg);
            std::cerr << "solver failed at alpha=" << alpha << ": " << e.what() << "\n";
            return 3;
        }
        write_json(fs::path(cfg.output_dir) / ("dcoe_" + alpha_tag(alpha) + ".json"),
                   to_json(sols.back(), probes), cfg);
    }
    atomic_write(fs::path(cfg.output_dir) / "solve_summary.csv", solve_summary_csv(sols, probes));
    std::cout << "wrote " << sols.size() << " solutions to " << cfg.output_dir << "\n";
    return 0;
}

VanishingDiscountRun run_pipeline(const RunConfig& cfg, const LoadedModel& lm) {
    RunOptions opts;
    opts.tail_window = cfg.tail_window;
    return run_schedule(lm.mdp, cfg.schedule, lm.mdp.model_class, cfg.solver_tol, opts);
}

int cmd_vanish(const RunConfig& cfg) {
    LoadedModel lm = load_model(cfg);
    std::vector<long> probes = effective_probes(cfg, lm.mdp);
    fs::create_directories(cfg.output_dir);

    VanishingDiscountRun run;
    try {
        run = run_pipeline(cfg, lm);
    } catch (const ConvergenceError& e) {
        json diag;
        diag["residual"] = e.residual();
        diag["iterations"] = e.iterations();
        write_json(fs::path(cfg.output_dir) / "solver_failure.json", diag, cfg);
        std::cerr << "solver failed: " << e.what() << "\n";
        return 3;
    }
    AcoiCertificate cert = acoi_residual(lm.mdp, run.rho_star, run.h_lower, cfg.acoi_tol);

    json j = to_json(cert);
    j["run"] = to_json(run);
    write_json(fs::path(cfg.output_dir) / "acoi_certificate.json", j, cfg);
    atomic_write(fs::path(cfg.output_dir) / "vanish_trace.csv", vanish_trace_csv(run, probes));
    std::cout << "rho_star=" << run.rho_star << " verdict=" << (cert.verdict ? "true" : "false")
              << " min_residual=" << cert.min_residual << "\n";
    return 0; // a false verdict is a finding, not a failure
}

int cmd_check(const RunConfig& cfg) {
    LoadedModel lm = load_model(cfg);
    std::vector<long> probes = effective_probes(cfg, lm.mdp);

    VanishingDiscountRun run;
    if (cfg.from_dir) {
        // prerequisite outputs must exist; we recompute from the same config
        // only after confirming them
        fs::path cert_path = fs::path(*cfg.from_dir) / "acoi_certificate.json";
        if (!fs::exists(cert_path)) {
            std::cerr << "missing prerequisite output " << cert_path.string() << "\n";
            return 4;
        }
    }
    try {
        run = run_pipeline(cfg, lm);
    } catch (const ConvergenceError& e) {
        std::cerr << "solver failed: " << e.what() << "\n";
        return 3;
    }
    fs::create_directories(cfg.output_dir);

    json conditions;
    auto [gus_mass, gus_pass] = gus_test(lm.mdp);
    conditions["gus_test"] = {{"nu_total", gus_mass}, {"passes", gus_pass}};

    if (run.mode == ModelClass::UC) {
        conditions["uc_h_norm_sup"] = check_assumption_uc_bounded(run, lm.mdp.weight);
    } else {
        auto [sup_vec, stable] = check_condition_B(run);
        conditions["condition_B"] = {{"stable", stable},
                                     {"max_per_state_sup", *std::max_element(sup_vec.begin(), sup_vec.end())}};
    }

    // tail solutions feed the K_eps selection
    std::vector<DcoeSolution> tail(run.v_per_alpha.begin() + long(run.tail_start), run.v_per_alpha.end());
    const double eps = 0.1;
    numvec levels;
    {
        double gmax = run.mode == ModelClass::UC ? *std::max_element(lm.mdp.weight.begin(), lm.mdp.weight.end())
                                                 : *std::max_element(run.h_lower.begin(), run.h_lower.end());
        gmax = std::max(gmax, 1.0); // degenerate (identically zero) relative values
        for (int i = 1; i <= 8; i++) levels.push_back(gmax * double(i) / 8.0);
    }
    const numvec& g = run.mode == ModelClass::UC ? lm.mdp.weight : run.h_lower;
    numvec g_clipped = g;
    for (double& v : g_clipped) v = std::max(v, 0.0);

    json witnesses = json::array();
    std::vector<numvec> env_seq(run.lower_env.begin(), run.lower_env.end());
    for (long s : probes) {
        MajorizationWitness w = build_majorization_witness(lm.mdp, s, eps, tail, g_clipped, levels);
        json wj = to_json(w);
        try {
            EgoroffResult eg = egoroff_extract(env_seq, run.h_lower, w, 0.05, 0.1);
            wj["egoroff"] = to_json(eg);
        } catch (const InsufficientDataError& e) {
            wj["egoroff"] = {{"inconclusive", true}, {"reason", e.what()}};
        }
        witnesses.push_back(std::move(wj));
    }
    conditions["witnesses"] = std::move(witnesses);
    conditions["rho_star"] = run.rho_star;
    if (lm.pc_spec) conditions["model_assumptions"] = to_json(verify_example_assumptions(*lm.pc_spec, run.rho_star));
    if (lm.uc_spec) conditions["model_assumptions"] = to_json(verify_example_assumptions(*lm.uc_spec));

    json doc;
    doc["conditions"] = std::move(conditions);
    write_json(fs::path(cfg.output_dir) / "conditions.json", doc, cfg);
    std::cout << "gus mass=" << gus_mass << " passes=" << (gus_pass ? "true" : "false") << "\n";
    return 0;
}

int cmd_simulate(const RunConfig& cfg) {
    LoadedModel lm = load_model(cfg);
    if (!lm.pc_spec && !lm.uc_spec) throw ConfigError("simulate requires a builtin continuous model");
    std::vector<long> probes = effective_probes(cfg, lm.mdp);

    const json& sim = cfg.sim;
    double x0 = sim.value("x0", lm.pc_spec ? lm.pc_spec->L + 5.0 : 5.0);
    unsigned long n_reps = sim.value("n_reps", 100000UL);
    unsigned long cap = sim.value("cap", 1000000UL);
    double eps_bar = sim.value("eps_bar", 0.5);

    PolicyRule rule;
    std::string pol_kind = sim.contains("policy") ? sim.at("policy").value("kind", "order_up_to")
                                                  : std::string("order_up_to");
    if (lm.pc_spec) {
        double threshold = sim.contains("policy") ? sim.at("policy").value("threshold", lm.pc_spec->L)
                                                  : lm.pc_spec->L;
        double target = sim.contains("policy")
                            ? sim.at("policy").value("target", 0.5 * (lm.pc_spec->L + lm.pc_spec->M))
                            : 0.5 * (lm.pc_spec->L + lm.pc_spec->M);
        rule = pol_kind == "hold" ? hold_policy() : order_up_to_policy(threshold, target);
    } else {
        rule = hold_policy(); // zero production
    }

    StopRule stop;
    if (lm.pc_spec) {
        stop = StopRule{StopRule::Kind::BelowThreshold, lm.pc_spec->L};
    } else {
        stop = StopRule{StopRule::Kind::AtZero, 0.0};
    }
    if (sim.contains("stop")) {
        std::string kind = sim.at("stop").value("kind", "below_threshold");
        stop.kind = kind == "at_zero" ? StopRule::Kind::AtZero : StopRule::Kind::BelowThreshold;
        stop.threshold = sim.at("stop").value("threshold", stop.threshold);
    }

    fs::create_directories(cfg.output_dir);
    json bounds;
    std::ostringstream csv;
    csv.precision(17);
    csv << "kind,x,mean_tau,ci_halfwidth,mean_cost_to_tau,mean_kappa_term,bound_rhs,bound_satisfied,n_censored\n";

    StoppingTimeReport rep;
    try {
        rep = lm.pc_spec ? hitting_time(*lm.pc_spec, rule, x0, stop, n_reps, cap, cfg.seed, cfg.ci_level)
                         : hitting_time(*lm.uc_spec, rule, x0, stop, n_reps, cap, cfg.seed, cfg.ci_level);
    } catch (const CensoringError& e) {
        std::cerr << "censoring: " << e.what() << "\n";
        return 5;
    }
    bounds["hitting"] = to_json(rep);
    csv << "hitting," << x0 << "," << rep.mean_tau << "," << rep.ci_halfwidth << "," << rep.mean_cost_to_tau << ","
        << rep.mean_kappa_term << "," << rep.bound_rhs << "," << rep.bound_satisfied << "," << rep.n_censored << "\n";

    if (lm.pc_spec) {
        json hj = json::array();
        for (long s : probes) {
            HBound hb = compute_H(*lm.pc_spec, lm.mdp.states[std::size_t(s)]);
            json r = to_json(hb);
            r["state"] = s;
            hj.push_back(r);
            csv << "H," << hb.x << ",,,,,," << hb.H_value << ",\n";
        }
        bounds["H"] = std::move(hj);
        bounds["drift"] = to_json(verify_comparison_drift(*lm.pc_spec, lm.mdp.states.front(), lm.mdp.states.back(), 41));

        VanishingDiscountRun run = run_pipeline(cfg, lm);
        HBoundReport hb = verify_h_bound(run, lm.mdp, *lm.pc_spec, eps_bar, probes);
        json hbj = json::array();
        for (const auto& row : hb.rows)
            hbj.push_back({{"state", row.state},
                           {"x", row.coord},
                           {"H", row.H},
                           {"h_tail_max", row.h_tail_max},
                           {"margin", row.margin}});
        bounds["h_bound"] = {{"eps_bar", eps_bar}, {"rows", hbj}, {"all_hold", hb.all_hold}};
    } else {
        bounds["drift"] = to_json(verify_comparison_drift(*lm.uc_spec, 0.0, lm.mdp.states.back(), 41));
    }

    write_json(fs::path(cfg.output_dir) / "bounds.json", bounds, cfg);
    atomic_write(fs::path(cfg.output_dir) / "sim_report.csv", csv.str());
    std::cout << "mean_tau=" << rep.mean_tau << " bound_rhs=" << rep.bound_rhs << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"average-cost MDP pipeline: discounted solves, vanishing-discount limits, "
                 "optimality-inequality certificates, condition checks, and simulation bounds"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed_flag;
    std::optional<std::string> out_flag;
    std::optional<double> tol_flag;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "run configuration (JSON)")->required();
        sub->add_option("--seed", seed_flag, "override config seed");
        sub->add_option("--out", out_flag, "override output directory");
        sub->add_option("--tol", tol_flag, "override solver tolerance");
    };
    CLI::App* solve = app.add_subcommand("solve", "solve the discounted optimality equation per schedule point");
    CLI::App* vanish = app.add_subcommand("vanish", "vanishing-discount limits and the optimality-inequality certificate");
    CLI::App* check = app.add_subcommand("check", "majorization, integrability, and convergence condition checks");
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo hitting times and pathwise bounds");
    for (CLI::App* sub : {solve, vanish, check, simulate}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    RunConfig cfg;
    try {
        cfg = parse_config(config_path);
        if (seed_flag) cfg.seed = *seed_flag;
        if (out_flag) cfg.output_dir = *out_flag;
        if (tol_flag) cfg.solver_tol = *tol_flag;
        validate(cfg.schedule);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (solve->parsed()) return cmd_solve(cfg);
        if (vanish->parsed()) return cmd_vanish(cfg);
        if (check->parsed()) return cmd_check(cfg);
        if (simulate->parsed()) return cmd_simulate(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ModelError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const CensoringError& e) {
        std::cerr << "censoring: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
