#include "acmdp/io.hpp"
#include "acmdp/vanishing.hpp"
#include "oracles.hpp"

#include <json.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

#ifndef ACMDP_CLI_PATH
#error "ACMDP_CLI_PATH must point at the command-line binary"
#endif

int run_cli(const std::string& args) {
    std::string cmd = std::string(ACMDP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("acmdp_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("malformed configs exit with code 2 and write nothing") {
    auto dir = fresh_dir("badcfg");
    write_text(dir / "bad.json", "{ not json");
    CHECK(run_cli("solve " + (dir / "bad.json").string()) == 2);

    write_text(dir / "nomodel.json", R"({"schedule": {"n_points": 5}})");
    CHECK(run_cli("solve " + (dir / "nomodel.json").string()) == 2);

    write_text(dir / "twomodels.json",
               R"({"model": {"builtin": "circle", "path": "x.json"}, "output_dir": ")" + (dir / "out").string() +
                   R"("})");
    CHECK(run_cli("solve " + (dir / "twomodels.json").string()) == 2);

    write_text(dir / "shortsched.json",
               R"({"model": {"builtin": "circle"}, "schedule": {"n_points": 2}})");
    CHECK(run_cli("solve " + (dir / "shortsched.json").string()) == 2);
    CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("solve on the circle model writes one file per schedule point") {
    auto dir = fresh_dir("solve_circle");
    json cfg;
    cfg["model"] = {{"builtin", "circle"}, {"params", {{"n_states", 12}}}};
    cfg["schedule"] = {{"rule", "custom"}, {"alphas", {0.5, 0.7, 0.9}}};
    cfg["output_dir"] = (dir / "out").string();
    write_text(dir / "cfg.json", cfg.dump());

    REQUIRE(run_cli("solve " + (dir / "cfg.json").string()) == 0);
    int count = 0;
    for (auto& e : fs::directory_iterator(dir / "out"))
        if (e.path().filename().string().rfind("dcoe_", 0) == 0) count++;
    CHECK(count == 3);
    CHECK(fs::exists(dir / "out" / "solve_summary.csv"));

    // zero-cost model: every solution is identically zero
    json sol = json::parse(read_text(dir / "out" / "dcoe_0.9.json"));
    for (double v : sol.at("v").get<std::vector<double>>()) CHECK(v == 0.0);
}

TEST_CASE("vanish on a serialized two-cycle recovers the unit average cost") {
    auto dir = fresh_dir("vanish_cycle");
    acmdp::write_mdp_file(oracle::two_cycle(), (dir / "cycle.json").string());

    json cfg;
    cfg["model"] = {{"path", (dir / "cycle.json").string()}};
    cfg["schedule"] = {{"rule", "geometric"}, {"n_points", 20}};
    cfg["tolerances"] = {{"solver", 1e-10}, {"acoi", 1e-5}};
    cfg["output_dir"] = (dir / "out").string();
    write_text(dir / "cfg.json", cfg.dump());

    REQUIRE(run_cli("vanish " + (dir / "cfg.json").string()) == 0);
    json cert = json::parse(read_text(dir / "out" / "acoi_certificate.json"));
    CHECK(cert.at("verdict").get<bool>());
    CHECK(std::abs(cert.at("rho").get<double>() - 1.0) < 1e-6);
    for (double r : cert.at("residuals").get<std::vector<double>>()) CHECK(std::abs(r) <= 1e-5);
    CHECK(fs::exists(dir / "out" / "vanish_trace.csv"));

    // re-parse and re-validate the certificate against the model
    auto mdp = acmdp::read_mdp_file((dir / "cycle.json").string());
    auto h = cert.at("h").get<acmdp::numvec>();
    auto again = acmdp::acoi_residual(mdp, cert.at("rho").get<double>(), h, cert.at("tol").get<double>());
    CHECK(again.verdict == cert.at("verdict").get<bool>());
    CHECK(again.min_residual == Catch::Approx(cert.at("min_residual").get<double>()).margin(1e-15));
}

TEST_CASE("reruns with identical configs are bit-identical and embed the hash") {
    auto dir = fresh_dir("determinism");
    json cfg;
    cfg["model"] = {{"builtin", "circle"}, {"params", {{"n_states", 12}}}};
    cfg["schedule"] = {{"rule", "custom"}, {"alphas", {0.5, 0.7, 0.9}}};
    cfg["seed"] = 77;
    cfg["output_dir"] = (dir / "out1").string();
    write_text(dir / "cfg1.json", cfg.dump());
    cfg["output_dir"] = (dir / "out2").string();
    write_text(dir / "cfg2.json", cfg.dump());

    REQUIRE(run_cli("vanish " + (dir / "cfg1.json").string()) == 0);
    REQUIRE(run_cli("vanish " + (dir / "cfg2.json").string()) == 0);
    json c1 = json::parse(read_text(dir / "out1" / "acoi_certificate.json"));
    json c2 = json::parse(read_text(dir / "out2" / "acoi_certificate.json"));
    c1.erase("config_hash");
    c2.erase("config_hash");
    CHECK(c1 == c2);

    json full = json::parse(read_text(dir / "out1" / "acoi_certificate.json"));
    CHECK(full.contains("config_hash"));
    CHECK(full.at("seed").get<std::uint64_t>() == 77);
}

TEST_CASE("check on the circle reports the boundary majorization mass") {
    auto dir = fresh_dir("check_circle");
    json cfg;
    cfg["model"] = {{"builtin", "circle"}, {"params", {{"n_states", 60}}}};
    cfg["schedule"] = {{"rule", "custom"}, {"alphas", {0.5, 0.75, 0.875, 0.9375}}};
    cfg["output_dir"] = (dir / "out").string();
    write_text(dir / "cfg.json", cfg.dump());

    REQUIRE(run_cli("check " + (dir / "cfg.json").string()) == 0);
    json cond = json::parse(read_text(dir / "out" / "conditions.json")).at("conditions");
    CHECK(std::abs(cond.at("gus_test").at("nu_total").get<double>() - 2.0) <= 2.0 / 60.0);
    CHECK_FALSE(cond.at("gus_test").at("passes").get<bool>());
    CHECK(cond.contains("witnesses"));
    for (const auto& w : cond.at("witnesses")) {
        CHECK(w.contains("K_eps"));
        CHECK(w.contains("nu_total"));
    }
}

TEST_CASE("solve on the default inventory model yields a monotone scaled-value column") {
    auto dir = fresh_dir("solve_pc");
    json cfg;
    cfg["model"] = {{"builtin", "pc_inventory"},
                    {"params", {{"grid", {{"x_min", -8.0}, {"x_max", 8.0}, {"n_states", 161}, {"n_actions", 161}}}}}};
    cfg["schedule"] = {{"rule", "geometric"}, {"n_points", 20}};
    cfg["output_dir"] = (dir / "out").string();
    write_text(dir / "cfg.json", cfg.dump());

    REQUIRE(run_cli("solve " + (dir / "cfg.json").string()) == 0);
    int files = 0;
    for (auto& e : fs::directory_iterator(dir / "out"))
        if (e.path().filename().string().rfind("dcoe_", 0) == 0) files++;
    CHECK(files == 20);

    std::istringstream csv(read_text(dir / "out" / "solve_summary.csv"));
    std::string line;
    std::getline(csv, line); // header
    double prev = -1e300;
    int rows = 0;
    while (std::getline(csv, line)) {
        std::stringstream row(line);
        std::string cell;
        for (int i = 0; i < 4; i++) std::getline(row, cell, ',');
        double scaled = std::stod(cell);
        CHECK(scaled >= prev - 1e-9);
        prev = scaled;
        rows++;
    }
    CHECK(rows == 20);
}

TEST_CASE("vanish on the default production model certifies at default tolerances") {
    auto dir = fresh_dir("vanish_uc");
    json cfg;
    cfg["model"] = {{"builtin", "uc_production"}};
    cfg["output_dir"] = (dir / "out").string();
    write_text(dir / "cfg.json", cfg.dump());

    REQUIRE(run_cli("vanish " + (dir / "cfg.json").string()) == 0);
    json cert = json::parse(read_text(dir / "out" / "acoi_certificate.json"));
    CHECK(cert.at("verdict").get<bool>());
    CHECK(cert.at("min_residual").get<double>() >= -1e-6);
}

TEST_CASE("check with a missing prerequisite directory exits 4") {
    auto dir = fresh_dir("check_missing");
    json cfg;
    cfg["model"] = {{"builtin", "circle"}, {"params", {{"n_states", 12}}}};
    cfg["schedule"] = {{"rule", "custom"}, {"alphas", {0.5, 0.7, 0.9}}};
    cfg["from"] = (dir / "nonexistent").string();
    cfg["output_dir"] = (dir / "out").string();
    write_text(dir / "cfg.json", cfg.dump());
    CHECK(run_cli("check " + (dir / "cfg.json").string()) == 4);
}

TEST_CASE("simulate with a tiny step cap exits 5 on censoring") {
    auto dir = fresh_dir("sim_censor");
    json cfg;
    cfg["model"] = {{"builtin", "pc_inventory"},
                    {"params", {{"grid", {{"x_min", -6.0}, {"x_max", 6.0}, {"n_states", 121}, {"n_actions", 121}}}}}};
    cfg["sim"] = {{"x0", 5.0}, {"n_reps", 500}, {"cap", 2}};
    cfg["output_dir"] = (dir / "out").string();
    write_text(dir / "cfg.json", cfg.dump());
    CHECK(run_cli("simulate " + (dir / "cfg.json").string()) == 5);
}

TEST_CASE("simulate writes the bound reports on the default inventory model") {
    auto dir = fresh_dir("sim_ok");
    json cfg;
    cfg["model"] = {{"builtin", "pc_inventory"},
                    {"params", {{"grid", {{"x_min", -6.0}, {"x_max", 6.0}, {"n_states", 121}, {"n_actions", 121}}}}}};
    cfg["schedule"] = {{"rule", "geometric"}, {"n_points", 12}};
    cfg["sim"] = {{"x0", 5.0}, {"n_reps", 4000}, {"cap", 100000}, {"eps_bar", 0.5}};
    cfg["seed"] = 3;
    cfg["output_dir"] = (dir / "out").string();
    write_text(dir / "cfg.json", cfg.dump());

    REQUIRE(run_cli("simulate " + (dir / "cfg.json").string()) == 0);
    json bounds = json::parse(read_text(dir / "out" / "bounds.json"));
    CHECK(bounds.at("hitting").at("bound_satisfied").get<bool>());
    CHECK(bounds.at("h_bound").at("all_hold").get<bool>());
    for (const auto& e : bounds.at("drift")) CHECK(e.at("worst_margin").get<double>() >= 0.0);
    CHECK(fs::exists(dir / "out" / "sim_report.csv"));
}

TEST_CASE("flag overrides take precedence over the config") {
    auto dir = fresh_dir("flags");
    json cfg;
    cfg["model"] = {{"builtin", "circle"}, {"params", {{"n_states", 12}}}};
    cfg["schedule"] = {{"rule", "custom"}, {"alphas", {0.5, 0.7, 0.9}}};
    cfg["output_dir"] = (dir / "ignored").string();
    write_text(dir / "cfg.json", cfg.dump());

    REQUIRE(run_cli("solve " + (dir / "cfg.json").string() + " --out " + (dir / "flagged").string()) == 0);
    CHECK(fs::exists(dir / "flagged" / "solve_summary.csv"));
    CHECK_FALSE(fs::exists(dir / "ignored"));
}
