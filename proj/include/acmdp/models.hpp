#pragma once

#include "acmdp/demand.hpp"
#include "acmdp/mdp.hpp"

#include <functional>
#include <optional>
#include <string>

namespace acmdp {

/// Ordering / production cost: a fixed charge for any positive order plus a
/// per-unit rate. Nondecreasing with kappa(0) = 0 by construction.
struct OrderCost {
    double fixed = 1.0;
    double per_unit = 1.0;
    double operator()(double z) const { return z > 0.0 ? fixed + per_unit * z : 0.0; }
};

/// Holding / shortage cost for stock level a: holding * a+ + backlog * a-.
struct StockCost {
    double holding = 1.0;
    double backlog = 1.0;
    double operator()(double a) const { return a >= 0.0 ? holding * a : -backlog * a; }
};

/// Polynomial cost c0 + c1 a + c2 a^2 on a >= 0.
struct PolyCost {
    double c0 = 0.0;
    double c1 = 0.1;
    double c2 = 0.0;
    double operator()(double a) const { return c0 + c1 * a + c2 * a * a; }
};

struct GridSpec {
    double x_min = -10.0;
    double x_max = 10.0;
    int n_states = 401;
    int n_actions = 401;
};

inline numvec uniform_grid(double lo, double hi, int n) {
    if (n < 2 || !(hi > lo)) throw std::invalid_argument("uniform_grid: need n >= 2 and hi > lo");
    numvec g(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; i++) g[std::size_t(i)] = lo + (hi - lo) * double(i) / double(n - 1);
    return g;
}

// ---------------------------------------------------------------------------
// Nonnegative-cost single-product inventory system: stock after ordering is
// the action, the next state is a - xi(a), costs are kappa(a - x) + psi(a).
// ---------------------------------------------------------------------------

struct PcInventorySpec {
    OrderCost kappa;                 // kappa(z) = z + 1(z > 0) by default
    StockCost psi;                   // psi(a) = |a| by default
    DemandFamily demand = DemandFamily::uniform(1.0, 2.0);
    double order_cap = 6.0;          // per-state action truncation: a in [x, max(x, order_cap)]
    double L = 0.0;                  // reorder region boundary
    double M = 4.0;                  // upper end of the interval bracketing the reorder target
};

/// Discretizes the inventory system on a uniform grid. Kernel rows are built
/// by analytic CDF differencing over cell boundaries (cell-centered
/// projection); mass beyond the grid range accumulates on the boundary
/// states, preserving row-stochasticity.
inline FiniteMdp build_pc_inventory(const PcInventorySpec& spec, const GridSpec& grid) {
    if (!(grid.x_min < spec.L && spec.L <= spec.M && spec.M < grid.x_max))
        throw std::invalid_argument("build_pc_inventory: grid must contain [L, M]");

    FiniteMdp mdp;
    mdp.model_class = ModelClass::PC;
    mdp.states = uniform_grid(grid.x_min, grid.x_max, grid.n_states);
    mdp.actions = uniform_grid(grid.x_min, grid.x_max, grid.n_actions);
    validate(spec.demand, mdp.actions);

    const double d = (grid.x_max - grid.x_min) / double(grid.n_states - 1);
    const std::size_t S = mdp.states.size();
    const double coord_tol = 1e-9 * (1.0 + std::abs(grid.x_max));

    for (double a : mdp.actions) {
        auto [lo, hi] = spec.demand.support(a);
        // point masses project exactly; only a continuous support needs cells
        if (hi > lo && (hi - lo) / d < 4.0)
            throw ModelError("grid too coarse to resolve the demand support at a=" + std::to_string(a));
    }

    mdp.admissible.resize(S);
    mdp.cost.resize(S);
    mdp.kernel.resize(S);
    mdp.weight.assign(S, 1.0);

    for (std::size_t s = 0; s < S; s++) {
        const double x = mdp.states[s];
        const double cap = std::max(x, spec.order_cap);
        for (std::size_t ai = 0; ai < mdp.actions.size(); ai++) {
            const double a = mdp.actions[ai];
            if (a < x - coord_tol || a > cap + coord_tol) continue;
            mdp.admissible[s].push_back(int(ai));
            double z = std::max(a - x, 0.0);
            if (z < coord_tol) z = 0.0;
            mdp.cost[s].push_back(spec.kappa(z) + spec.psi(a));

            // next state: a - xi(a); cell of grid point i is [x_i - d/2, x_i + d/2)
            SparseRow row;
            for (std::size_t i = 0; i < S; i++) {
                double cell_lo = (i == 0) ? -std::numeric_limits<double>::infinity() : mdp.states[i] - d / 2.0;
                double cell_hi =
                    (i + 1 == S) ? std::numeric_limits<double>::infinity() : mdp.states[i] + d / 2.0;
                // P(cell_lo <= a - xi < cell_hi) = F(a - cell_lo) - F(a - cell_hi)
                double p = spec.demand.cdf(a, a - cell_lo) - spec.demand.cdf(a, a - cell_hi);
                if (p > 1e-15) row.push(int(i), p);
            }
            double mass = row.mass();
            for (double& p : row.prob) p /= mass;
            mdp.kernel[s].push_back(std::move(row));
        }
        if (mdp.admissible[s].empty()) throw ModelError("no admissible action", long(s));
    }
    validate(mdp);
    return mdp;
}

/// The hold-above-L / order-up-to policy used by the inventory analysis:
/// keep the stock where it is at or above L, otherwise order up to the
/// target (which must lie in [L, M]).
inline StationaryPolicy pc_reference_policy(const FiniteMdp& mdp, double L, double target_coord) {
    StationaryPolicy pol;
    pol.choice.resize(mdp.num_states());
    for (std::size_t s = 0; s < mdp.num_states(); s++) {
        const auto& adm = mdp.admissible[s];
        if (mdp.states[s] >= L) {
            pol.choice[s] = adm.front(); // lowest admissible coordinate: hold
        } else {
            int best = adm.front();
            double best_gap = std::abs(mdp.actions[std::size_t(best)] - target_coord);
            for (int a : adm) {
                double gap = std::abs(mdp.actions[std::size_t(a)] - target_coord);
                if (gap < best_gap) {
                    best = a;
                    best_gap = gap;
                }
            }
            pol.choice[s] = best;
        }
    }
    return pol;
}

/// Reorder target on the grid: the action with coordinate in [L, M]
/// minimizing the expected next-stage value sum_y v(y) q(y | ., a). Kernel
/// rows of this model depend on the action only, so the row is taken from
/// the lowest state (whose admissible set spans [L, M]).
inline std::pair<int, double> pc_reorder_target(const FiniteMdp& mdp, const numvec& v, double L, double M) {
    const auto& adm = mdp.admissible[0];
    int best = -1;
    double best_q = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < adm.size(); j++) {
        double a = mdp.actions[std::size_t(adm[j])];
        if (a < L || a > M) continue;
        double q = mdp.kernel[0][j].dot(v);
        if (q < best_q) {
            best_q = q;
            best = adm[j];
        }
    }
    if (best < 0) throw std::invalid_argument("pc_reorder_target: no grid action inside [L, M]");
    return {best, mdp.actions[std::size_t(best)]};
}

// ---------------------------------------------------------------------------
// Unbounded-cost inventory-production system: states fold at zero,
// x' = (x + z - xi)^+, with production capped by regime and an exponential
// weight w(x) = e^{r x}.
// ---------------------------------------------------------------------------

struct UcProductionSpec {
    OrderCost kappa{0.0, 1.0}; // production cost kappa(z) = z
    PolyCost psi{0.0, 0.1, 0.0};
    double sale_price = 2.0;
    DemandFamily demand = DemandFamily::uniform(1.0, 2.0);
    double L = 2.0;         // saturation boundary for the demand
    double theta = 1.0;     // production cap at states x >= L; must stay below the mean demand
    double theta_mid = 2.0; // production cap on 0 < x < L
    double r = 0.5;         // weight exponent
    double lambda_prime = 0.95;
    double a_bar = 0.0;     // upper end of A(0); 0 resolves to the minimal valid choice
    // derived by finalize():
    double lambda = 0.0;    // E[e^{r (theta - xi)}] at saturation
    double L_tilde = 0.0;   // max(L, -ln(lambda' - lambda)/r)
};

/// Computes the derived constants and checks every structural inequality of
/// the production model, throwing a ModelError naming the first failure.
inline UcProductionSpec finalize(UcProductionSpec spec) {
    if (!(spec.L > 0.0)) throw ModelError("uc spec: L must be positive");
    if (!(spec.r > 0.0)) throw ModelError("uc spec: r must be positive");
    bool constant_family = spec.demand.p.second == 0.0 && spec.demand.q.second == 0.0 && spec.demand.r.second == 0.0;
    if (!constant_family && (!spec.demand.saturation_level || *spec.demand.saturation_level > spec.L))
        throw ModelError("uc spec: demand must saturate at or below L");

    const double mean_sat = spec.demand.mean(spec.L);
    if (!(spec.theta > 0.0 && spec.theta < mean_sat))
        throw ModelError("uc spec: theta must lie in (0, mean demand) but theta=" + std::to_string(spec.theta) +
                         ", mean=" + std::to_string(mean_sat));

    auto [lo, hi] = spec.demand.support(spec.L);
    double exp_neg_moment = // E[e^{-r xi}] at saturation
        hi > lo ? quad::adaptive_simpson(
                      [&](double y) { return std::exp(-spec.r * y) * spec.demand.density(spec.L, y); }, lo, hi, 1e-12)
                : (1.0 - spec.demand.atom_at_zero) * std::exp(-spec.r * lo);
    spec.lambda = std::exp(spec.r * spec.theta) * (exp_neg_moment + spec.demand.atom_at_zero);
    if (!(spec.lambda < 1.0))
        throw ModelError("uc spec: lambda = " + std::to_string(spec.lambda) + " is not below 1; reduce theta or r");
    if (!(spec.lambda_prime > spec.lambda && spec.lambda_prime < 1.0))
        throw ModelError("uc spec: lambda_prime must lie in (lambda, 1)");

    spec.L_tilde = std::max(spec.L, -std::log(spec.lambda_prime - spec.lambda) / spec.r);
    const double a_bar_min = std::max(spec.L_tilde + spec.theta, spec.L + spec.theta_mid);
    if (spec.a_bar <= 0.0)
        spec.a_bar = a_bar_min;
    else if (spec.a_bar < a_bar_min)
        throw ModelError("uc spec: a_bar below (L_tilde + theta) v sup(x + theta_x) = " + std::to_string(a_bar_min));
    return spec;
}

/// Production cap by state regime.
inline double uc_production_cap(const UcProductionSpec& spec, double x) {
    if (x <= 0.0) return spec.a_bar;
    if (x < spec.L) return spec.theta_mid;
    return spec.theta;
}

/// One-stage cost of the production model; the sales-revenue expectation is
/// integrated by adaptive quadrature on the demand density.
inline double uc_stage_cost(const UcProductionSpec& spec, double x, double a) {
    const double z = a - x;
    auto [lo, hi] = spec.demand.support(a);
    double sales = a * (1.0 - spec.demand.cdf(a, a));
    if (a > lo)
        sales += quad::adaptive_simpson([&](double y) { return y * spec.demand.density(a, y); }, lo, std::min(a, hi),
                                        1e-10);
    return spec.kappa(z) + spec.psi(a) - spec.sale_price * sales;
}

/// Discretizes the production model. Kernel mass for the folded next state
/// (x + z - xi)^+ is assigned to the nearest grid point from below, so the
/// discrete weighted drift never exceeds its continuous bound.
inline FiniteMdp build_uc_production(const UcProductionSpec& raw_spec, const GridSpec& grid) {
    UcProductionSpec spec = finalize(raw_spec);
    if (grid.x_min != 0.0) throw std::invalid_argument("build_uc_production: grid must start at 0");
    if (!(grid.x_max > spec.a_bar))
        throw std::invalid_argument("build_uc_production: grid must extend beyond a_bar = " +
                                    std::to_string(spec.a_bar));

    FiniteMdp mdp;
    mdp.model_class = ModelClass::UC;
    mdp.states = uniform_grid(0.0, grid.x_max, grid.n_states);
    mdp.actions = mdp.states; // stock-after-production levels on the same grid
    validate(spec.demand, mdp.actions);

    const std::size_t S = mdp.states.size();
    const double coord_tol = 1e-9 * (1.0 + grid.x_max);
    mdp.admissible.resize(S);
    mdp.cost.resize(S);
    mdp.kernel.resize(S);
    mdp.weight.resize(S);

    for (std::size_t s = 0; s < S; s++) {
        const double x = mdp.states[s];
        mdp.weight[s] = std::exp(spec.r * x);
        const double cap = uc_production_cap(spec, x);
        for (std::size_t ai = 0; ai < mdp.actions.size(); ai++) {
            const double a = mdp.actions[ai];
            if (a < x - coord_tol || a > x + cap + coord_tol) continue;
            mdp.admissible[s].push_back(int(ai));
            mdp.cost[s].push_back(uc_stage_cost(spec, x, a));

            SparseRow row;
            // state 0 receives the fold: x' < x_1, i.e. xi > a - x_1
            double p0 = 1.0 - spec.demand.cdf(a, a - mdp.states[1]);
            if (p0 > 1e-15) row.push(0, p0);
            for (std::size_t i = 1; i < S; i++) {
                double upper = (i + 1 == S) ? -std::numeric_limits<double>::infinity() : a - mdp.states[i + 1];
                // P(x_i <= x' < x_{i+1}) = F(a - x_i) - F(a - x_{i+1})
                double p = spec.demand.cdf(a, a - mdp.states[i]) - (std::isfinite(upper) ? spec.demand.cdf(a, upper) : 0.0);
                if (p > 1e-15) row.push(int(i), p);
            }
            double mass = row.mass();
            for (double& p : row.prob) p /= mass;
            mdp.kernel[s].push_back(std::move(row));
        }
        if (mdp.admissible[s].empty()) throw ModelError("no admissible action", long(s));
    }
    validate(mdp);
    return mdp;
}

// ---------------------------------------------------------------------------
// Invariant and partially invariant models: the transition law depends on
// the action only (everywhere, or on a sublevel set of the weight).
// ---------------------------------------------------------------------------

struct InvariantModelSpec {
    std::vector<numvec> action_kernel; ///< action_kernel[a][y], state-independent rows
    std::vector<numvec> cost;          ///< cost[x][a]
    numvec weight;                     ///< optional; all-ones when empty
    ModelClass model_class = ModelClass::UC;

    struct Partial {
        double b = 0.0;
        double lambda = 0.0;
        double lambda_prime = 0.0;
        /// Kernel rows for states outside the invariant region.
        std::vector<std::vector<numvec>> kernel_by_state;
    };
    std::optional<Partial> partial;
};

struct InvariantBuild {
    FiniteMdp mdp;
    numvec h_alpha_bound;              ///< c_hat (w(x) + w(ref)) per state
    std::vector<long> invariant_region; ///< states x with w(x) <= b/(lambda' - lambda); all states if not partial
};

inline InvariantBuild build_invariant(const InvariantModelSpec& spec, long ref_state = 0) {
    const std::size_t S = spec.cost.size();
    const std::size_t A = spec.action_kernel.size();
    if (S == 0 || A == 0) throw std::invalid_argument("build_invariant: empty spec");
    if (ref_state < 0 || std::size_t(ref_state) >= S) throw std::invalid_argument("build_invariant: bad ref_state");

    InvariantBuild out;
    FiniteMdp& mdp = out.mdp;
    mdp.model_class = spec.model_class;
    mdp.states.resize(S);
    for (std::size_t s = 0; s < S; s++) mdp.states[s] = double(s);
    mdp.actions.resize(A);
    for (std::size_t a = 0; a < A; a++) mdp.actions[a] = double(a);
    mdp.weight = spec.weight.empty() ? numvec(S, 1.0) : spec.weight;

    double region_cap = std::numeric_limits<double>::infinity();
    if (spec.partial) {
        if (!(spec.partial->lambda_prime > spec.partial->lambda))
            throw std::invalid_argument("build_invariant: lambda_prime must exceed lambda");
        region_cap = spec.partial->b / (spec.partial->lambda_prime - spec.partial->lambda);
        if (spec.partial->kernel_by_state.size() != S)
            throw std::invalid_argument("build_invariant: kernel_by_state must cover all states");
    }

    mdp.admissible.resize(S);
    mdp.cost.resize(S);
    mdp.kernel.resize(S);
    for (std::size_t s = 0; s < S; s++) {
        if (spec.cost[s].size() != A) throw std::invalid_argument("build_invariant: ragged cost table");
        const bool inside = mdp.weight[s] <= region_cap;
        if (inside) out.invariant_region.push_back(long(s));
        for (std::size_t a = 0; a < A; a++) {
            mdp.admissible[s].push_back(int(a));
            mdp.cost[s].push_back(spec.cost[s][a]);
            const numvec& dense = inside ? spec.action_kernel[a] : spec.partial->kernel_by_state[s][a];
            if (dense.size() != S) throw std::invalid_argument("build_invariant: kernel row length mismatch");
            SparseRow row;
            double mass = 0.0;
            for (std::size_t y = 0; y < S; y++) {
                if (dense[y] < 0.0) throw ModelError("negative kernel entry", long(s), long(a));
                mass += dense[y];
                if (dense[y] > 0.0) row.push(int(y), dense[y]);
            }
            if (std::abs(mass - 1.0) > 1e-9) throw ModelError("kernel row sum differs from 1", long(s), long(a));
            for (double& p : row.prob) p /= mass;
            mdp.kernel[s].push_back(std::move(row));
        }
    }
    validate(mdp);

    double c_hat = 0.0;
    for (std::size_t s = 0; s < S; s++)
        for (std::size_t a = 0; a < A; a++) c_hat = std::max(c_hat, std::abs(spec.cost[s][a]) / mdp.weight[s]);
    out.h_alpha_bound.resize(S);
    for (std::size_t s = 0; s < S; s++)
        out.h_alpha_bound[s] = c_hat * (mdp.weight[s] + mdp.weight[std::size_t(ref_state)]);
    return out;
}

// ---------------------------------------------------------------------------
// Unit-circle model: three actions, each moving to the uniform distribution
// on a half circle offset by 2 pi / 3. No two actions share an irreducibility
// structure over the whole circle; the global majorizer has mass exactly 2.
// ---------------------------------------------------------------------------

inline FiniteMdp build_circle_mdp(int n_states, const std::vector<numvec>& cost_table = {}) {
    if (n_states <= 0 || n_states % 6 != 0)
        throw std::invalid_argument("build_circle_mdp: n_states must be a positive multiple of 6");
    const std::size_t S = std::size_t(n_states);

    FiniteMdp mdp;
    mdp.model_class = ModelClass::PC;
    mdp.states.resize(S);
    const double two_pi = 2.0 * 3.14159265358979323846;
    for (std::size_t i = 0; i < S; i++) mdp.states[i] = two_pi * double(i) / double(S);
    mdp.actions = {0.0, 1.0, 2.0};

    if (!cost_table.empty() && cost_table.size() != S)
        throw std::invalid_argument("build_circle_mdp: cost table size mismatch");

    // action a: uniform mass on the half circle starting at angle 2 a pi / 3,
    // i.e. the n/2 grid points from index a n / 3 (half-open arc, wrapping)
    std::vector<SparseRow> rows(3);
    for (int a = 0; a < 3; a++) {
        std::vector<int> supp;
        for (std::size_t k = 0; k < S / 2; k++) supp.push_back(int((std::size_t(a) * S / 3 + k) % S));
        std::sort(supp.begin(), supp.end());
        for (int i : supp) rows[std::size_t(a)].push(i, 2.0 / double(S));
    }

    mdp.admissible.assign(S, {0, 1, 2});
    mdp.cost.resize(S);
    mdp.kernel.resize(S);
    mdp.weight.assign(S, 1.0);
    for (std::size_t s = 0; s < S; s++) {
        if (cost_table.empty())
            mdp.cost[s].assign(3, 0.0);
        else {
            if (cost_table[s].size() != 3) throw std::invalid_argument("build_circle_mdp: cost row size mismatch");
            mdp.cost[s] = cost_table[s];
        }
        mdp.kernel[s] = rows;
    }
    validate(mdp);
    return mdp;
}

// ---------------------------------------------------------------------------
// Assumption verifiers for the example specs. These report, never throw.
// ---------------------------------------------------------------------------

struct AssumptionCheck {
    std::string name;
    bool pass = false;
    double witness = 0.0;
    std::string detail;
};

struct AssumptionReport {
    std::vector<AssumptionCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// Numeric checks of the inventory-model conditions: cost shape, cost tails
/// beating the average-cost estimate, uniformly integrable demand tails,
/// demand means bounded away from zero, coercivity, and density bounds.
inline AssumptionReport verify_example_assumptions(const PcInventorySpec& spec, double gstar_estimate) {
    AssumptionReport rep;
    auto add = [&](std::string name, bool pass, double witness, std::string detail = "") {
        rep.checks.push_back({std::move(name), pass, witness, std::move(detail)});
    };

    add("kappa-nondecreasing-zero-at-zero", spec.kappa.fixed >= 0.0 && spec.kappa.per_unit >= 0.0,
        std::min(spec.kappa.fixed, spec.kappa.per_unit));

    const double big = 1e6;
    double kappa_tail = spec.kappa(big);
    double psi_tail = std::min(spec.psi(big), spec.psi(-big));
    add("kappa-tail-exceeds-gstar", kappa_tail > gstar_estimate, kappa_tail,
        "kappa(1e6) vs gstar estimate " + std::to_string(gstar_estimate));
    add("psi-tail-exceeds-gstar", psi_tail > gstar_estimate, psi_tail);

    // uniform integrability of the demand tails over an action range
    numvec a_grid = uniform_grid(spec.L - 10.0, spec.M + 10.0, 201);
    double support_hi = 0.0;
    for (double a : a_grid) support_hi = std::max(support_hi, spec.demand.support(a).second);
    double worst_tail = 0.0;
    for (double a : a_grid) worst_tail = std::max(worst_tail, spec.demand.tail_mean(a, support_hi));
    add("demand-uniformly-integrable", worst_tail <= 1e-12, support_hi,
        "tail mass at the common support bound");

    double inf_mean = std::numeric_limits<double>::infinity();
    double sup_kappa_expect = 0.0;
    for (double a : a_grid) {
        inf_mean = std::min(inf_mean, spec.demand.mean(a));
        // E[kappa(z + xi(a))] at z = M - L, affine closed form
        double z = spec.M - spec.L;
        sup_kappa_expect = std::max(sup_kappa_expect, spec.kappa.fixed + spec.kappa.per_unit * (z + spec.demand.mean(a)));
    }
    add("demand-mean-positive", inf_mean > 0.0, inf_mean);
    add("kappa-expectation-finite", std::isfinite(sup_kappa_expect), sup_kappa_expect);

    add("cost-coercive-in-action", spec.kappa.per_unit + spec.psi.holding > 0.0,
        spec.kappa.per_unit + spec.psi.holding, "growth rate of c(x, a) as a -> +inf");

    double sup_density = 0.0;
    for (double a : a_grid) sup_density = std::max(sup_density, spec.demand.density_sup(a));
    add("demand-densities-bounded", std::isfinite(sup_density) && spec.demand.atom_at_zero == 0.0, sup_density,
        spec.demand.atom_at_zero > 0.0 ? "atom present: no finite majorizing density exists" : "");
    add("demand-support-union-bounded", std::isfinite(support_hi), support_hi);
    return rep;
}

/// Numeric checks of the production-model conditions, including the derived
/// constants of the weighted drift.
inline AssumptionReport verify_example_assumptions(const UcProductionSpec& raw) {
    AssumptionReport rep;
    auto add = [&](std::string name, bool pass, double witness, std::string detail = "") {
        rep.checks.push_back({std::move(name), pass, witness, std::move(detail)});
    };

    bool constant_family =
        raw.demand.p.second == 0.0 && raw.demand.q.second == 0.0 && raw.demand.r.second == 0.0;
    add("demand-saturates", constant_family || (raw.demand.saturation_level && *raw.demand.saturation_level <= raw.L),
        raw.demand.saturation_level ? *raw.demand.saturation_level : 0.0);

    numvec a_grid = uniform_grid(1e-3, std::max(raw.L, 1.0) * 3.0, 201);
    double inf_mean = std::numeric_limits<double>::infinity();
    double support_hi = 0.0, sup_density = 0.0;
    for (double a : a_grid) {
        inf_mean = std::min(inf_mean, raw.demand.mean(a));
        support_hi = std::max(support_hi, raw.demand.support(a).second);
        sup_density = std::max(sup_density, raw.demand.density_sup(a));
    }
    add("demand-mean-positive", inf_mean > 0.0, inf_mean);
    double worst_tail = 0.0;
    for (double a : a_grid) worst_tail = std::max(worst_tail, raw.demand.tail_mean(a, support_hi));
    add("demand-uniformly-integrable", worst_tail <= 1e-12, support_hi);
    add("demand-densities-bounded", std::isfinite(sup_density) && raw.demand.atom_at_zero == 0.0, sup_density,
        raw.demand.atom_at_zero > 0.0 ? "atom present: no finite majorizing density exists" : "");

    add("theta-below-mean-demand", raw.theta > 0.0 && raw.theta < raw.demand.mean(raw.L), raw.theta);
    try {
        UcProductionSpec spec = finalize(raw);
        add("lambda-below-one", spec.lambda < 1.0, spec.lambda);
        add("lambda-prime-in-range", spec.lambda_prime > spec.lambda && spec.lambda_prime < 1.0, spec.lambda_prime);
        add("a-bar-covers-mid-regimes", spec.a_bar >= std::max(spec.L_tilde + spec.theta, spec.L + spec.theta_mid),
            spec.a_bar);
    } catch (const ModelError& e) {
        add("derived-constants", false, 0.0, e.what());
    }
    return rep;
}

} // namespace acmdp
