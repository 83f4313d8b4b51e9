#include "acmdp/models.hpp"
#include "acmdp/vanishing.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace acmdp;

TEST_CASE("relative values recenter at the reference state") {
    DcoeSolution sol;
    sol.v.values = {3.0, 7.0, 5.0};
    auto h = relative_values_uc(sol, 1);
    CHECK(h[1] == 0.0);
    CHECK(h[0] == -4.0);
    CHECK(h[2] == -2.0);

    sol.v.values = {4.0, 4.0, 4.0};
    h = relative_values_uc(sol, 2);
    for (double x : h) CHECK(x == 0.0);
}

TEST_CASE("PC relative values subtract the minimum") {
    DcoeSolution sol;
    sol.v.values = {5.0, 5.0};
    auto [h0, m0] = relative_values_pc(sol);
    CHECK(m0 == 5.0);
    CHECK(h0 == numvec{0.0, 0.0});

    sol.v.values = {1.0, 3.0};
    auto [h1, m1] = relative_values_pc(sol);
    CHECK(m1 == 1.0);
    CHECK(h1 == numvec{0.0, 2.0});
}

TEST_CASE("PC relative values have an exact zero minimum on a solved instance") {
    PcInventorySpec spec;
    auto mdp = build_pc_inventory(spec, GridSpec{-6, 6, 61, 61});
    auto sol = solve_dcoe(mdp, 0.9, 1e-10);
    auto [h, m] = relative_values_pc(sol);
    CHECK(*std::min_element(h.begin(), h.end()) == 0.0);
    CHECK(m == *std::min_element(sol.v.values.begin(), sol.v.values.end()));
}

TEST_CASE("schedule validation") {
    DiscountSchedule s;
    s.alphas = {0.5, 0.9};
    CHECK_THROWS_AS(validate(s), std::invalid_argument); // too short
    s.alphas = {0.5, 0.9, 0.8};
    CHECK_THROWS_AS(validate(s), std::invalid_argument); // not increasing
    s.alphas = {0.5, 0.9, 1.0};
    CHECK_THROWS_AS(validate(s), std::invalid_argument); // reaches 1
    CHECK_NOTHROW(validate(DiscountSchedule::geometric(20)));
}

TEST_CASE("run_schedule on the unit self-loop") {
    auto m = oracle::self_loop();
    auto run = run_schedule(m, DiscountSchedule::geometric(10), ModelClass::PC, 1e-11);
    CHECK(run.rho_star == Catch::Approx(1.0).margin(1e-8));
    for (const auto& h : run.h_per_alpha) CHECK(h[0] == 0.0);
    CHECK(run.h_lower[0] == 0.0);
    CHECK(run.h_upper[0] == 0.0);
}

TEST_CASE("run_schedule reproduces the two-cycle closed form") {
    auto m = oracle::two_cycle();
    auto run = run_schedule(m, DiscountSchedule::geometric(20), ModelClass::PC, 1e-10);
    CHECK(run.rho_star == Catch::Approx(1.0).margin(1e-6));
    for (std::size_t n = 0; n < run.schedule.alphas.size(); n++) {
        double a = run.schedule.alphas[n];
        const auto& v = run.v_per_alpha[n].v.values;
        CHECK(v[0] == Catch::Approx(2.0 * a / (1.0 - a * a)).margin(1e-6 * (1.0 + v[0])));
        CHECK(v[1] == Catch::Approx(2.0 / (1.0 - a * a)).margin(1e-6 * (1.0 + v[1])));
    }
    // the relative-value gap approaches 1 = 2/(1 + alpha) in the limit
    double gap = std::abs(run.h_lower[0] - run.h_lower[1]);
    CHECK(gap == Catch::Approx(1.0).margin(1e-5));
}

TEST_CASE("mode must match the model class") {
    auto m = oracle::self_loop();
    CHECK_THROWS_AS(run_schedule(m, DiscountSchedule::geometric(5), ModelClass::UC, 1e-9), std::invalid_argument);
}

TEST_CASE("envelope sandwich and monotonicity invariants") {
    auto m = oracle::random_mdp(60, 4, 3);
    auto run = run_schedule(m, DiscountSchedule::geometric(12), ModelClass::PC, 1e-10);
    const std::size_t N = run.h_per_alpha.size();
    for (std::size_t n = 0; n + 1 < N; n++) {
        for (std::size_t s = 0; s < 4; s++) {
            CHECK(run.lower_env[n][s] <= run.lower_env[n + 1][s] + 1e-15);
            CHECK(run.upper_env[n][s] >= run.upper_env[n + 1][s] - 1e-15);
        }
    }
    for (std::size_t n = 0; n < N; n++)
        for (std::size_t m2 = n; m2 < N; m2++)
            for (std::size_t s = 0; s < 4; s++) {
                CHECK(run.lower_env[n][s] <= run.h_per_alpha[m2][s] + 1e-15);
                CHECK(run.upper_env[n][s] >= run.h_per_alpha[m2][s] - 1e-15);
            }
    for (std::size_t s = 0; s < 4; s++) CHECK(run.h_lower[s] <= run.h_upper[s]);

    // PC-specific: h >= 0 with zero minimum, m_alpha nondecreasing
    for (const auto& h : run.h_per_alpha) {
        CHECK(*std::min_element(h.begin(), h.end()) == 0.0);
    }
    for (std::size_t n = 0; n + 1 < N; n++) CHECK(run.m_per_alpha[n] <= run.m_per_alpha[n + 1] + 1e-9);
}

TEST_CASE("invariant model: relative values stay within the analytic bound") {
    InvariantModelSpec spec;
    CounterRng rng(77, 0);
    const int S = 5, A = 3;
    spec.action_kernel.resize(A);
    for (int a = 0; a < A; a++) {
        numvec row(S);
        double tot = 0;
        for (int y = 0; y < S; y++) {
            row[y] = 0.1 + rng.next_uniform();
            tot += row[y];
        }
        for (double& p : row) p /= tot;
        spec.action_kernel[a] = row;
    }
    spec.cost.assign(S, numvec(A));
    for (auto& r : spec.cost)
        for (double& c : r) c = rng.next_uniform(-2.0, 2.0);
    spec.model_class = ModelClass::UC;

    auto built = build_invariant(spec, 0);
    auto run = run_schedule(built.mdp, DiscountSchedule::geometric(12), ModelClass::UC, 1e-11);
    for (const auto& h : run.h_per_alpha)
        for (int s = 0; s < S; s++) CHECK(std::abs(h[s]) <= built.h_alpha_bound[s] + 1e-8);
    double sup_norm_w = check_assumption_uc_bounded(run, built.mdp.weight);
    double bound = 0.0;
    for (int s = 0; s < S; s++) bound = std::max(bound, built.h_alpha_bound[s] / built.mdp.weight[s]);
    CHECK(sup_norm_w <= bound + 1e-8);
}

TEST_CASE("x-independent costs give identically zero relative values") {
    InvariantModelSpec spec;
    spec.action_kernel = {{0.3, 0.7}, {0.6, 0.4}};
    spec.cost = {{1.0, 2.0}, {1.0, 2.0}}; // no x dependence
    spec.model_class = ModelClass::UC;
    auto built = build_invariant(spec, 0);
    auto run = run_schedule(built.mdp, DiscountSchedule::geometric(8), ModelClass::UC, 1e-11);
    CHECK(check_assumption_uc_bounded(run, built.mdp.weight) <= 1e-8);
}

TEST_CASE("condition B: constant-cost model passes, transient trap fails") {
    // constant costs: v_alpha constant in x, so h_alpha = 0
    InvariantModelSpec spec;
    spec.action_kernel = {{0.5, 0.5}};
    spec.cost = {{1.0}, {1.0}};
    spec.model_class = ModelClass::PC;
    auto built = build_invariant(spec, 0);
    auto run = run_schedule(built.mdp, DiscountSchedule::geometric(9), ModelClass::PC, 1e-11);
    auto [sup_vec, stable] = check_condition_B(run);
    CHECK(stable);
    CHECK(sup_norm(sup_vec) <= 1e-8);

    // trap: state 0 pays forever, state 1 is free and absorbing, so
    // h_alpha(0) = 1/(1-alpha) explodes along the schedule
    FiniteMdp trap;
    trap.model_class = ModelClass::PC;
    trap.states = {0.0, 1.0};
    trap.actions = {0.0};
    trap.admissible = {{0}, {0}};
    trap.cost = {{1.0}, {0.0}};
    SparseRow stay0, stay1;
    stay0.push(0, 1.0);
    stay1.push(1, 1.0);
    trap.kernel = {{stay0}, {stay1}};
    trap.weight = {1.0, 1.0};
    validate(trap);
    auto bad = run_schedule(trap, DiscountSchedule::geometric(12), ModelClass::PC, 1e-10);
    auto [sup_bad, stable_bad] = check_condition_B(bad);
    CHECK_FALSE(stable_bad);
    CHECK(sup_bad[0] > 1000.0);
}

TEST_CASE("acoi_residual is exact on the hand-solved two-cycle optimality equation") {
    auto m = oracle::two_cycle();
    auto cert = acoi_residual(m, 1.0, {0.0, 1.0}, 1e-9);
    CHECK(cert.verdict);
    CHECK(std::abs(cert.residuals[0]) <= 1e-12);
    CHECK(std::abs(cert.residuals[1]) <= 1e-12);
    CHECK(cert.min_residual >= -1e-12);
}

TEST_CASE("acoi_residual shift invariance and rho linearity") {
    auto m = oracle::random_mdp(61, 4, 3);
    CounterRng rng(62, 0);
    numvec h(4);
    for (double& x : h) x = rng.next_uniform(-3.0, 3.0);
    auto base = acoi_residual(m, 0.7, h, 1e-9);

    numvec shifted = h;
    for (double& x : shifted) x += 11.25;
    auto shift = acoi_residual(m, 0.7, shifted, 1e-9);
    for (std::size_t s = 0; s < 4; s++)
        CHECK(shift.residuals[s] == Catch::Approx(base.residuals[s]).margin(1e-12));

    auto bumped = acoi_residual(m, 0.8, h, 1e-9);
    for (std::size_t s = 0; s < 4; s++)
        CHECK(bumped.residuals[s] == Catch::Approx(base.residuals[s] + 0.1).margin(1e-12));
}

TEST_CASE("acoi_to_policy extracts the optimal stationary policy") {
    auto m = oracle::two_cycle();
    auto cert = acoi_residual(m, 1.0, {0.0, 1.0}, 1e-9);
    auto pol = acoi_to_policy(m, cert, 0.0);
    CHECK(oracle::average_cost(m, pol) == Catch::Approx(1.0).margin(1e-12));

    auto m2 = oracle::random_mdp(63, 2, 2);
    auto run = run_schedule(m2, DiscountSchedule::geometric(22), ModelClass::PC, 1e-11);
    auto cert2 = acoi_residual(m2, run.rho_star, run.h_lower, 1e-4);
    REQUIRE(cert2.verdict);
    auto pol2 = acoi_to_policy(m2, cert2, 0.0);
    double avg = oracle::average_cost(m2, pol2);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& other : oracle::enumerate_policies(m2))
        best = std::min(best, oracle::average_cost(m2, other));
    CHECK(avg <= run.rho_star + 1e-4);
    CHECK(avg == Catch::Approx(best).margin(1e-6));
}

TEST_CASE("acoi_to_policy refuses a failed certificate") {
    auto m = oracle::two_cycle();
    auto cert = acoi_residual(m, 0.5, {0.0, 1.0}, 1e-9); // rho too small: residuals negative
    CHECK_FALSE(cert.verdict);
    CHECK_THROWS_AS(acoi_to_policy(m, cert, 0.0), CertificationError);
}

TEST_CASE("average_cost_eval on deterministic chains") {
    auto loop = oracle::self_loop();
    StationaryPolicy pol;
    pol.choice = {0};
    auto avg = average_cost_eval(loop, pol, 500);
    CHECK(avg[0] == Catch::Approx(1.0).margin(1e-12));

    auto cyc = oracle::two_cycle();
    StationaryPolicy pol2;
    pol2.choice = {0, 0};
    auto avg2 = average_cost_eval(cyc, pol2, 10000);
    CHECK(avg2[0] == Catch::Approx(1.0).margin(2.0 / 10000.0 + 1e-9));
    CHECK(avg2[1] == Catch::Approx(1.0).margin(2.0 / 10000.0 + 1e-9));
}

TEST_CASE("average_cost_eval matches the stationary-distribution oracle") {
    auto m = oracle::random_mdp(64, 3, 2);
    for (const auto& pol : oracle::enumerate_policies(m)) {
        auto avg = average_cost_eval(m, pol, 40000);
        double exact = oracle::average_cost(m, pol);
        for (std::size_t s = 0; s < 3; s++) CHECK(avg[s] == Catch::Approx(exact).margin(1e-3));
    }
}

TEST_CASE("vanishing-discount limit agrees with enumerated average costs") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        auto m = oracle::random_mdp(seed, 3, 3);
        auto run = run_schedule(m, DiscountSchedule::geometric(20), ModelClass::PC, 1e-10);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& pol : oracle::enumerate_policies(m))
            best = std::min(best, oracle::average_cost(m, pol));
        CHECK(run.rho_star == Catch::Approx(best).margin(1e-4));
    }
}

TEST_CASE("UC counterpart inequality holds for the upper envelope") {
    // on a well-behaved instance the pair (rho, h_upper) satisfies the
    // reverse inequality: rho + h_upper <= min_a ( c + sum h_upper q ) + tol
    auto m = oracle::random_mdp(65, 3, 2, ModelClass::UC);
    RunOptions opts;
    opts.tail_window = 2;
    auto run = run_schedule(m, DiscountSchedule::geometric(24), ModelClass::UC, 1e-11, opts);
    for (std::size_t s = 0; s < 3; s++) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m.num_actions(s); j++)
            best = std::min(best, m.cost[s][j] + m.kernel[s][j].dot(run.h_upper));
        CHECK(run.rho_star + run.h_upper[s] <= best + 1e-5);
    }
}
