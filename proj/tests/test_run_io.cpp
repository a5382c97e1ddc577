#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fracfilm/run_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace fracfilm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& leaf) {
    fs::path p = fs::temp_directory_path() / ("fracfilm_test_" + std::to_string(::getpid())) / leaf;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

RunConfig small_config(const fs::path& out) {
    RunConfig cfg;
    cfg.alpha = 1.0;
    cfg.n = 3.0;
    cfg.epsilon = 1e-2;
    cfg.t_final = 0.005;
    cfg.n_steps = 5;
    cfg.n_modes = 16;
    cfg.ic = "cosine_mix";
    cfg.ic_coeffs = {0.5};
    cfg.output_dir = out.string();
    return cfg;
}

int count_data_rows(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#' && line.find_first_of("0123456789-") == 0)
            ++rows;
    return rows;
}

}  // namespace

TEST_CASE("config validation: ranges and presets") {
    RunConfig cfg = small_config("unused");
    CHECK_NOTHROW(cfg.validate());

    RunConfig bad = cfg;
    bad.alpha = 2.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.alpha = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.n = 0.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.epsilon = -1e-9;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.n_steps = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.n_modes = 3;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.ic = "wavelet";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.ic = "custom";
    bad.ic_coeffs = std::vector<double>(17, 0.1);
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("config JSON echo round-trips exactly") {
    RunConfig cfg = small_config("somewhere/out");
    cfg.alpha = 1.2345678901234567;
    cfg.newton_tol = 3.3e-11;
    cfg.seed = 987654321;
    cfg.ic_coeffs = {0.5, -0.125, 1e-17};
    const auto j = config_to_json(cfg);
    const RunConfig back = config_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.alpha == cfg.alpha);
    CHECK(back.n == cfg.n);
    CHECK(back.epsilon == cfg.epsilon);
    CHECK(back.t_final == cfg.t_final);
    CHECK(back.n_steps == cfg.n_steps);
    CHECK(back.n_modes == cfg.n_modes);
    CHECK(back.ic == cfg.ic);
    CHECK(back.ic_value == cfg.ic_value);
    CHECK(back.ic_offset == cfg.ic_offset);
    CHECK(back.ic_amplitude == cfg.ic_amplitude);
    CHECK(back.ic_coeffs == cfg.ic_coeffs);
    CHECK(back.seed == cfg.seed);
    CHECK(back.output_dir == cfg.output_dir);
    CHECK(back.newton_tol == cfg.newton_tol);
    CHECK(back.newton_max_iter == cfg.newton_max_iter);
    CHECK(back.damping_min == cfg.damping_min);
    CHECK(back.audit_tol == cfg.audit_tol);
    CHECK(back.holder_x_samples == cfg.holder_x_samples);
    CHECK(back.positivity_floor_factor == cfg.positivity_floor_factor);
}

TEST_CASE("apply_config_file: flat key = value with strict keys") {
    const fs::path dir = scratch_dir("cfgfile");
    const fs::path file = dir / "run.cfg";
    {
        std::ofstream f(file);
        f << "# comment line\n"
          << "alpha = 1.3\n"
          << "n-steps = 9\n"
          << "ic = cosine_mix\n"
          << "ic-coeffs = 0.5, -0.25\n"
          << "output-dir = somewhere\n"
          << "\n";
    }
    RunConfig cfg;
    apply_config_file(cfg, file.string());
    CHECK(cfg.alpha == 1.3);
    CHECK(cfg.n_steps == 9);
    CHECK(cfg.ic == "cosine_mix");
    CHECK(cfg.ic_coeffs == std::vector<double>{0.5, -0.25});
    CHECK(cfg.output_dir == "somewhere");
    CHECK(cfg.n_modes == 64);  // untouched default

    {
        std::ofstream f(file);
        f << "banana = 3\n";
    }
    RunConfig cfg2;
    CHECK_THROWS_AS(apply_config_file(cfg2, file.string()), ConfigError);
    {
        std::ofstream f(file);
        f << "alpha 1.3\n";
    }
    CHECK_THROWS_AS(apply_config_file(cfg2, file.string()), ConfigError);
    {
        std::ofstream f(file);
        f << "alpha = fast\n";
    }
    CHECK_THROWS_AS(apply_config_file(cfg2, file.string()), ConfigError);
    CHECK_THROWS_AS(apply_config_file(cfg2, (dir / "missing.cfg").string()), ConfigError);
}

TEST_CASE("format17 and list parsing") {
    CHECK(format17(1.0) == "1");
    const double x = 0.1234567890123456789;
    CHECK(std::stod(format17(x)) == x);  // 17 significant digits round-trip
    CHECK(parse_double_list("1e-3,5e-4, 2.5e-4") == std::vector<double>{1e-3, 5e-4, 2.5e-4});
    CHECK_THROWS_AS(parse_double_list("1.0,zebra"), ConfigError);
}

TEST_CASE("cmd_run: artifacts, schema and determinism") {
    const fs::path out1 = scratch_dir("run_a");
    const fs::path out2 = scratch_dir("run_b");
    RunConfig cfg = small_config(out1);
    std::ostringstream log;
    REQUIRE(cmd_run(cfg, log) == kOk);

    const std::string diag = slurp(out1 / "diagnostics.csv");
    CHECK(diag.rfind(kCsvSchemaTag, 0) == 0);
    CHECK(count_data_rows(diag) == cfg.n_steps + 1);
    const std::string snaps = slurp(out1 / "snapshots.csv");
    CHECK(count_data_rows(snaps) == cfg.n_steps + 1);

    const auto rep = nlohmann::json::parse(slurp(out1 / "report.json"));
    CHECK(rep.at("status") == "ok");
    CHECK(rep.at("audits").at("energy").at("passed").get<bool>());
    CHECK(rep.at("audits").at("mass").at("passed").get<bool>());
    const RunConfig echo = config_from_json(rep.at("config"));
    CHECK(echo.alpha == cfg.alpha);
    CHECK(echo.n_steps == cfg.n_steps);

    // byte-identical on repetition (modulo the differing output_dir echo)
    RunConfig cfg2 = cfg;
    cfg2.output_dir = out2.string();
    std::ostringstream log2;
    REQUIRE(cmd_run(cfg2, log2) == kOk);
    CHECK(slurp(out1 / "diagnostics.csv") == slurp(out2 / "diagnostics.csv"));
    CHECK(slurp(out1 / "snapshots.csv") == slurp(out2 / "snapshots.csv"));
}

TEST_CASE("cmd_run: invalid config exits 2 without writing") {
    RunConfig cfg = small_config(scratch_dir("run_bad"));
    cfg.alpha = 2.5;
    std::ostringstream log;
    CHECK(cmd_run(cfg, log) == kConfigError);
    CHECK(log.str().find("alpha") != std::string::npos);
}

TEST_CASE("cmd_run: solver failure flushes partial outputs with a marker") {
    const fs::path out = scratch_dir("run_fail");
    RunConfig cfg = small_config(out);
    cfg.n = 3.0;
    cfg.ic_coeffs = {0.9};
    cfg.t_final = 20.0;
    cfg.n_steps = 2;
    cfg.newton_tol = 1e-15;
    cfg.newton_max_iter = 1;
    std::ostringstream log;
    CHECK(cmd_run(cfg, log) == kSolverFailure);
    const std::string diag = slurp(out / "diagnostics.csv");
    CHECK(diag.find("# SOLVER_FAILURE step=") != std::string::npos);
    const auto rep = nlohmann::json::parse(slurp(out / "report.json"));
    CHECK(rep.at("status") == "solver_failure");
    CHECK(rep.at("failure").at("step").get<int>() >= 1);
}

TEST_CASE("cmd_verify_operator: passes at sane resolution, exits 4 when starved") {
    VerifyConfig vc;
    vc.alpha = 1.0;
    vc.n_modes = 32;
    vc.k_max = 2000;
    vc.quad_points = 2000;
    vc.n_fields = 5;
    std::ostringstream log;
    CHECK(cmd_verify_operator(vc, log) == kOk);
    CHECK(log.str().find("identity_energy_pairing") != std::string::npos);
    CHECK(log.str().find("self_adjointness") != std::string::npos);
    CHECK(log.str().find(kCsvSchemaTag) != std::string::npos);

    VerifyConfig starved = vc;
    starved.alpha = 0.5;
    starved.k_max = 50;
    starved.quad_points = 64;
    std::ostringstream log2;
    CHECK(cmd_verify_operator(starved, log2) == kToleranceBreach);
    CHECK(log2.str().find("fail") != std::string::npos);

    VerifyConfig bad = vc;
    bad.alpha = 2.0;
    std::ostringstream log3;
    CHECK(cmd_verify_operator(bad, log3) == kConfigError);
}

TEST_CASE("cmd_sweep: tau axis emits distances and an observed order") {
    const fs::path out = scratch_dir("sweep_tau");
    RunConfig base = small_config(out);
    base.t_final = 0.01;
    std::ostringstream log;
    REQUIRE(cmd_sweep(base, "tau", {1e-3, 5e-4, 2.5e-4}, log) == kOk);
    const std::string conv = slurp(out / "convergence.csv");
    CHECK(conv.rfind(kCsvSchemaTag, 0) == 0);
    CHECK(count_data_rows(conv) == 0);  // rows start with "tau,…", not a digit
    std::istringstream in(conv);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line == "axis,index,value_coarse,value_fine,distance_l2,observed_order");
    int rows = 0;
    double order = 0.0;
    while (std::getline(in, line)) {
        if (line.rfind("tau,", 0) != 0)
            continue;
        ++rows;
        const auto last = line.rfind(',');
        order = std::strtod(line.c_str() + last + 1, nullptr);
    }
    CHECK(rows == 2);
    CHECK(order >= 0.9);  // first-order scheme
    CHECK(fs::exists(out / "run_000" / "report.json"));
    CHECK(fs::exists(out / "run_002" / "diagnostics.csv"));
}

TEST_CASE("cmd_sweep: epsilon axis needs decreasing values; single value exits 2") {
    RunConfig base = small_config(scratch_dir("sweep_eps"));
    std::ostringstream log;
    CHECK(cmd_sweep(base, "epsilon", {1e-2}, log) == kConfigError);
    std::ostringstream log2;
    CHECK(cmd_sweep(base, "epsilon", {1e-3, 1e-2}, log2) == kConfigError);
    std::ostringstream log3;
    CHECK(cmd_sweep(base, "modes", {8.5, 16.0}, log3) == kConfigError);
    std::ostringstream log4;
    CHECK(cmd_sweep(base, "volume", {1.0, 2.0}, log4) == kConfigError);

    std::ostringstream log5;
    REQUIRE(cmd_sweep(base, "epsilon", {1e-1, 1e-2, 1e-3}, log5) == kOk);
    const std::string conv = slurp(fs::path(base.output_dir) / "convergence.csv");
    std::istringstream in(conv);
    std::string line;
    std::vector<double> dist;
    while (std::getline(in, line)) {
        if (line.rfind("epsilon,", 0) != 0)
            continue;
        // distance is the 5th field
        std::istringstream ls(line);
        std::string tok;
        for (int i = 0; i < 5; ++i)
            std::getline(ls, tok, ',');
        dist.push_back(std::strtod(tok.c_str(), nullptr));
    }
    REQUIRE(dist.size() == 2);
    CHECK(dist[1] < dist[0]);
}

TEST_CASE("initial condition presets") {
    RunConfig cfg = small_config("unused");
    cfg.ic = "constant";
    cfg.ic_value = 2.5;
    ProjectionResult pr = build_initial_condition(cfg);
    CHECK(pr.field.coeffs[0] == 2.5);
    CHECK(pr.min_before == doctest::Approx(2.5).epsilon(1e-14));

    cfg.ic = "bump";
    cfg.ic_offset = 0.05;
    cfg.ic_amplitude = 1.0;
    pr = build_initial_condition(cfg);
    CHECK(pr.field.coeffs[0] == doctest::Approx(0.55).epsilon(1e-12));  // offset + amp/2
    // the profile is band-limited, so projection is exact; grid minimum sits
    // just above the analytic endpoint value offset = 0.05
    CHECK(pr.min_after == doctest::Approx(pr.min_before).epsilon(1e-12));
    CHECK(pr.min_after >= 0.05);
    CHECK(pr.min_after <= 0.06);

    cfg.ic = "custom";
    cfg.ic_coeffs = {1.0, 0.25, -0.125};
    pr = build_initial_condition(cfg);
    CHECK(pr.field.coeffs[0] == 1.0);
    CHECK(pr.field.coeffs[1] == 0.25);
    CHECK(pr.field.coeffs[2] == -0.125);
    CHECK(pr.field.n_modes() == cfg.n_modes);
}
