#include "fracfilm/run_io.hpp"

#include "fracfilm/integral_kernel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace fracfilm {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string format17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::string token;
    std::istringstream in(csv);
    while (std::getline(in, token, ',')) {
        if (token.empty())
            continue;
        size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &pos);
        } catch (const std::exception&) {
            throw ConfigError("could not parse number list entry '" + token + "'");
        }
        while (pos < token.size() && std::isspace(static_cast<unsigned char>(token[pos])))
            ++pos;
        if (pos != token.size())
            throw ConfigError("could not parse number list entry '" + token + "'");
        out.push_back(v);
    }
    return out;
}

double uniform(std::mt19937_64& gen, double lo, double hi) {
    const double u = (gen() >> 11) * 0x1.0p-53;  // [0,1), platform independent
    return lo + (hi - lo) * u;
}

SpectralField random_band_limited(std::mt19937_64& gen, int n_modes, int max_mode) {
    std::vector<double> c(n_modes, 0.0);
    const int top = std::min(max_mode, n_modes - 1);
    for (int k = 0; k <= top; ++k)
        c[k] = uniform(gen, -1.0, 1.0);
    return SpectralField(std::move(c));
}

ModelParams RunConfig::model_params() const {
    ModelParams p;
    p.alpha = alpha;
    p.mobility = MobilitySpec{n, epsilon};
    p.n_modes = n_modes;
    p.grid_points = 2 * n_modes;
    p.newton_tol = newton_tol;
    p.newton_max_iter = newton_max_iter;
    p.damping_min = damping_min;
    return p;
}

void RunConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw ConfigError("alpha must lie strictly in (0,2)");
    if (!(n >= 1.0))
        throw ConfigError("mobility exponent n must be >= 1");
    if (!(epsilon >= 0.0))
        throw ConfigError("epsilon must be >= 0");
    if (!(t_final > 0.0))
        throw ConfigError("t-final must be positive");
    if (n_steps < 1)
        throw ConfigError("n-steps must be >= 1");
    if (n_modes < 4)
        throw ConfigError("n-modes must be >= 4");
    if (!(newton_tol > 0.0))
        throw ConfigError("newton-tol must be positive");
    if (newton_max_iter < 1)
        throw ConfigError("newton-max-iter must be >= 1");
    if (!(damping_min > 0.0 && damping_min <= 1.0))
        throw ConfigError("damping-min must lie in (0,1]");
    if (holder_x_samples < 1)
        throw ConfigError("holder-x-samples must be >= 1");
    if (!(positivity_floor_factor >= 0.0))
        throw ConfigError("positivity-floor-factor must be >= 0");
    if (ic == "constant" || ic == "bump") {
        // no coefficient list needed
    } else if (ic == "cosine_mix") {
        if (ic_coeffs.empty())
            throw ConfigError("cosine_mix initial condition needs ic-coeffs (a_1, a_2, ...)");
        if (static_cast<int>(ic_coeffs.size()) > n_modes - 1)
            throw ConfigError("cosine_mix coefficient list longer than n-modes - 1");
    } else if (ic == "custom") {
        if (ic_coeffs.empty())
            throw ConfigError("custom initial condition needs ic-coeffs (c_0, c_1, ...)");
        if (static_cast<int>(ic_coeffs.size()) > n_modes)
            throw ConfigError("custom coefficient list longer than n-modes");
    } else {
        throw ConfigError("unknown initial condition preset '" + ic + "'");
    }
    for (double c : ic_coeffs)
        if (!std::isfinite(c))
            throw ConfigError("non-finite entry in ic-coeffs");
}

ordered_json config_to_json(const RunConfig& cfg) {
    ordered_json j;
    j["alpha"] = cfg.alpha;
    j["n"] = cfg.n;
    j["epsilon"] = cfg.epsilon;
    j["t_final"] = cfg.t_final;
    j["n_steps"] = cfg.n_steps;
    j["n_modes"] = cfg.n_modes;
    j["ic"] = cfg.ic;
    j["ic_value"] = cfg.ic_value;
    j["ic_offset"] = cfg.ic_offset;
    j["ic_amplitude"] = cfg.ic_amplitude;
    j["ic_coeffs"] = cfg.ic_coeffs;
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir;
    j["newton_tol"] = cfg.newton_tol;
    j["newton_max_iter"] = cfg.newton_max_iter;
    j["damping_min"] = cfg.damping_min;
    j["audit_tol"] = cfg.audit_tol;
    j["holder_x_samples"] = cfg.holder_x_samples;
    j["positivity_floor_factor"] = cfg.positivity_floor_factor;
    return j;
}

RunConfig config_from_json(const json& j) {
    RunConfig cfg;
    cfg.alpha = j.at("alpha").get<double>();
    cfg.n = j.at("n").get<double>();
    cfg.epsilon = j.at("epsilon").get<double>();
    cfg.t_final = j.at("t_final").get<double>();
    cfg.n_steps = j.at("n_steps").get<int>();
    cfg.n_modes = j.at("n_modes").get<int>();
    cfg.ic = j.at("ic").get<std::string>();
    cfg.ic_value = j.at("ic_value").get<double>();
    cfg.ic_offset = j.at("ic_offset").get<double>();
    cfg.ic_amplitude = j.at("ic_amplitude").get<double>();
    cfg.ic_coeffs = j.at("ic_coeffs").get<std::vector<double>>();
    cfg.seed = j.at("seed").get<long>();
    cfg.output_dir = j.at("output_dir").get<std::string>();
    cfg.newton_tol = j.at("newton_tol").get<double>();
    cfg.newton_max_iter = j.at("newton_max_iter").get<int>();
    cfg.damping_min = j.at("damping_min").get<double>();
    cfg.audit_tol = j.at("audit_tol").get<double>();
    cfg.holder_x_samples = j.at("holder_x_samples").get<int>();
    cfg.positivity_floor_factor = j.at("positivity_floor_factor").get<double>();
    return cfg;
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (trim(v.substr(pos)).empty())
            return x;
    } catch (const std::exception&) {
    }
    throw ConfigError("bad numeric value for '" + key + "': " + v);
}

long to_long(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (trim(v.substr(pos)).empty())
            return x;
    } catch (const std::exception&) {
    }
    throw ConfigError("bad integer value for '" + key + "': " + v);
}

}  // namespace

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#')
            continue;
        const size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + " is not 'key = value': " + line);
        const std::string key = trim(stripped.substr(0, eq));
        const std::string val = trim(stripped.substr(eq + 1));
        if (key == "alpha")
            cfg.alpha = to_double(key, val);
        else if (key == "n")
            cfg.n = to_double(key, val);
        else if (key == "epsilon")
            cfg.epsilon = to_double(key, val);
        else if (key == "t-final")
            cfg.t_final = to_double(key, val);
        else if (key == "n-steps")
            cfg.n_steps = static_cast<int>(to_long(key, val));
        else if (key == "n-modes")
            cfg.n_modes = static_cast<int>(to_long(key, val));
        else if (key == "ic")
            cfg.ic = val;
        else if (key == "ic-value")
            cfg.ic_value = to_double(key, val);
        else if (key == "ic-offset")
            cfg.ic_offset = to_double(key, val);
        else if (key == "ic-amplitude")
            cfg.ic_amplitude = to_double(key, val);
        else if (key == "ic-coeffs")
            cfg.ic_coeffs = parse_double_list(val);
        else if (key == "seed")
            cfg.seed = to_long(key, val);
        else if (key == "output-dir")
            cfg.output_dir = val;
        else if (key == "newton-tol")
            cfg.newton_tol = to_double(key, val);
        else if (key == "newton-max-iter")
            cfg.newton_max_iter = static_cast<int>(to_long(key, val));
        else if (key == "damping-min")
            cfg.damping_min = to_double(key, val);
        else if (key == "audit-tol")
            cfg.audit_tol = to_double(key, val);
        else if (key == "holder-x-samples")
            cfg.holder_x_samples = static_cast<int>(to_long(key, val));
        else if (key == "positivity-floor-factor")
            cfg.positivity_floor_factor = to_double(key, val);
        else
            throw ConfigError("unknown configuration key '" + key + "'");
    }
}

ProjectionResult build_initial_condition(const RunConfig& cfg) {
    const ModelParams p = cfg.model_params();
    if (cfg.ic == "bump") {
        std::vector<double> v(p.grid_points);
        for (int j = 0; j < p.grid_points; ++j) {
            const double x = collocation_node(j, p.grid_points);
            v[j] = std::max(0.0, cfg.ic_offset + cfg.ic_amplitude * (1.0 - std::cos(2.0 * kPi * x)) / 2.0);
        }
        return project_initial(GridField(std::move(v)), p);
    }

    std::vector<double> c(p.n_modes, 0.0);
    if (cfg.ic == "constant") {
        c[0] = cfg.ic_value;
    } else if (cfg.ic == "cosine_mix") {
        c[0] = 1.0;
        for (size_t i = 0; i < cfg.ic_coeffs.size(); ++i)
            c[i + 1] = cfg.ic_coeffs[i];
    } else {  // custom
        std::copy(cfg.ic_coeffs.begin(), cfg.ic_coeffs.end(), c.begin());
    }
    ProjectionResult out;
    out.field = SpectralField(std::move(c));
    out.min_before = synthesize(out.field, p.grid_points).min_value();
    out.min_after = out.min_before;
    out.undershoot_created = false;
    return out;
}

namespace {

struct RunOutcome {
    Trajectory traj;  // full, or partial on failure
    ProjectionResult init;
    bool solver_failed = false;
    int failed_step = 0;
    std::string failure_message;
};

RunOutcome execute_run(const RunConfig& cfg, const Trajectory* warm = nullptr) {
    RunOutcome out;
    out.init = build_initial_condition(cfg);
    Trajectory partial;
    try {
        out.traj = implicit_euler_run(out.init.field, cfg.t_final, cfg.n_steps, cfg.model_params(), warm,
                                      &partial);
    } catch (const SolverError& e) {
        out.traj = std::move(partial);
        out.solver_failed = true;
        out.failed_step = e.step();
        out.failure_message = e.what();
    }
    return out;
}

void write_diagnostics_csv(const fs::path& path, const std::vector<StepDiagnostics>& rows,
                           const RunOutcome& outcome) {
    std::ofstream f(path);
    f << kCsvSchemaTag << "\n";
    f << "t,mass,energy,entropy,energy_dissip,entropy_dissip,min_value,flux_l1\n";
    for (const StepDiagnostics& d : rows) {
        f << format17(d.t) << ',' << format17(d.mass) << ',' << format17(d.energy) << ','
          << format17(d.entropy) << ',' << format17(d.energy_dissip) << ',' << format17(d.entropy_dissip)
          << ',' << format17(d.min_value) << ',' << format17(d.flux_l1) << "\n";
    }
    if (outcome.solver_failed)
        f << "# SOLVER_FAILURE step=" << outcome.failed_step << "\n";
}

void write_snapshots_csv(const fs::path& path, const Trajectory& traj, const RunOutcome& outcome) {
    std::ofstream f(path);
    f << kCsvSchemaTag << "\n";
    f << "t";
    const int N = traj.states.empty() ? 0 : traj.states.front().n_modes();
    for (int k = 0; k < N; ++k)
        f << ",c" << k;
    f << "\n";
    for (size_t i = 0; i < traj.states.size(); ++i) {
        f << format17(traj.times[i]);
        for (int k = 0; k < N; ++k)
            f << ',' << format17(traj.states[i].coeffs[k]);
        f << "\n";
    }
    if (outcome.solver_failed)
        f << "# SOLVER_FAILURE step=" << outcome.failed_step << "\n";
}

ordered_json audit_to_json(const InequalityAudit& a) {
    ordered_json j;
    j["checked"] = a.checked;
    j["passed"] = a.passed;
    j["worst_slack"] = a.worst_slack;
    j["worst_step"] = a.worst_step;
    return j;
}

ordered_json holder_to_json(const HolderFit& h) {
    ordered_json j;
    j["valid"] = h.valid;
    j["exponent_est"] = h.exponent_est;
    j["constant_est"] = h.constant_est;
    j["pairs_used"] = h.pairs_used;
    j["exponent_theory"] = h.exponent_theory;
    return j;
}

// Writes the three per-run artifacts; returns the trajectory audit so callers
// can summarize.
TrajectoryAudit write_run_artifacts(const fs::path& dir, const RunConfig& cfg, const RunOutcome& outcome) {
    fs::create_directories(dir);
    const ModelParams p = cfg.model_params();
    const EntropyFn fn = EntropyFn::for_mobility(p.mobility);
    const TrajectoryAudit audit = audit_trajectory(outcome.traj, fn, cfg.effective_audit_tol());

    write_diagnostics_csv(dir / "diagnostics.csv", audit.steps, outcome);
    write_snapshots_csv(dir / "snapshots.csv", outcome.traj, outcome);

    ordered_json rep;
    rep["schema"] = "fracfilm-v1";
    rep["status"] = outcome.solver_failed ? "solver_failure" : "ok";
    rep["config"] = config_to_json(cfg);
    {
        ordered_json init;
        init["min_before"] = outcome.init.min_before;
        init["min_after"] = outcome.init.min_after;
        init["undershoot_created"] = outcome.init.undershoot_created;
        rep["initial_projection"] = init;
    }
    {
        long total = 0;
        int worst = 0;
        for (const StepStats& s : outcome.traj.step_stats) {
            total += s.iterations;
            worst = std::max(worst, s.iterations);
        }
        ordered_json solver;
        solver["steps_completed"] = outcome.traj.n_steps();
        solver["newton_iterations_total"] = total;
        solver["newton_iterations_max"] = worst;
        rep["solver"] = solver;
    }
    {
        ordered_json audits;
        audits["mass"] = audit_to_json(audit.mass);
        audits["energy"] = audit_to_json(audit.energy);
        audits["entropy"] = audit_to_json(audit.entropy);
        rep["audits"] = audits;
    }
    {
        const PositivityVerdict v = positivity_check(outcome.traj, p, cfg.positivity_floor_factor);
        ordered_json pos;
        pos["threshold"] = v.threshold;
        pos["hypothesis_holds"] = v.hypothesis_holds;
        pos["min_over_run"] = v.min_over_run;
        pos["floor"] = v.floor;
        pos["above_floor"] = v.above_floor;
        pos["suspected_defect"] = v.suspected_defect;
        rep["positivity"] = pos;
    }
    rep["holder_space"] = holder_to_json(holder_fit_space(outcome.traj.states.back(), cfg.alpha));
    {
        HolderFit ht;
        ht.direction = FitDirection::time;
        const double gamma = (cfg.alpha - 1.0) / 2.0;
        ht.exponent_theory = gamma / (2.0 * gamma + 3.0);
        if (static_cast<int>(outcome.traj.states.size()) >= 9)
            ht = holder_fit_time(outcome.traj, cfg.holder_x_samples);
        rep["holder_time"] = holder_to_json(ht);
    }
    if (outcome.solver_failed) {
        ordered_json fail;
        fail["step"] = outcome.failed_step;
        fail["message"] = outcome.failure_message;
        rep["failure"] = fail;
    }

    std::ofstream f(dir / "report.json");
    f << rep.dump(2) << "\n";
    return audit;
}

std::string verdict_word(const InequalityAudit& a) {
    if (!a.checked)
        return "SKIPPED";
    return a.passed ? "PASS" : "FAIL";
}

}  // namespace

int cmd_run(const RunConfig& cfg, std::ostream& log) {
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kConfigError;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const RunOutcome outcome = execute_run(cfg);
    const TrajectoryAudit audit = write_run_artifacts(cfg.output_dir, cfg, outcome);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    log << "run: alpha=" << cfg.alpha << " n=" << cfg.n << " epsilon=" << cfg.epsilon
        << " N=" << cfg.n_modes << " steps=" << cfg.n_steps << " tau=" << cfg.t_final / cfg.n_steps << "\n";
    log << "completed " << outcome.traj.n_steps() << "/" << cfg.n_steps << " steps in " << secs << " s\n";
    log << "audits: mass " << verdict_word(audit.mass) << ", energy " << verdict_word(audit.energy)
        << ", entropy " << verdict_word(audit.entropy) << "\n";
    log << "outputs: " << cfg.output_dir << "/{diagnostics.csv,snapshots.csv,report.json}\n";

    if (outcome.solver_failed) {
        log << "solver failure: " << outcome.failure_message << "\n";
        return kSolverFailure;
    }
    return kOk;
}

namespace {

struct VerifyRow {
    std::string check;
    double alpha;
    int k_max;         // 0 when not applicable
    int quad_points;   // 0 when not applicable
    double error;
    double tolerance;
    bool pass;
};

double rel_err(double got, double want) {
    const double scale = std::max(std::fabs(got), std::fabs(want));
    if (scale == 0.0)
        return 0.0;
    return std::fabs(got - want) / scale;
}

GridField pointwise_product(const GridField& a, const GridField& b) {
    std::vector<double> v(a.values.size());
    for (size_t i = 0; i < v.size(); ++i)
        v[i] = a.values[i] * b.values[i];
    return GridField(std::move(v));
}

// l2-relative spectral-vs-integral error at 16 interior nodes
double kernel_cross_error(const SpectralField& u, double alpha, int k_max, int quad_points) {
    const KernelParams kp = KernelParams::make(alpha, k_max);
    const SpectralField Iu = apply_I(u, alpha);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 16; ++i) {
        const double x = (i + 0.5) / 16.0;
        double spectral = 0.0;
        for (int k = 0; k < Iu.n_modes(); ++k)
            spectral += Iu.coeffs[k] * basis_phi(k, x);
        const double integral = apply_I_integral(u, x, kp, quad_points);
        num += (integral - spectral) * (integral - spectral);
        den += spectral * spectral;
    }
    return std::sqrt(num / den);
}

}  // namespace

int cmd_verify_operator(const VerifyConfig& vc, std::ostream& log) {
    if (!(vc.alpha > 0.0 && vc.alpha < 2.0)) {
        log << "config error: verify-operator requires alpha strictly in (0,2)\n";
        return kConfigError;
    }
    if (vc.n_modes < 9 || vc.k_max < 2 || vc.quad_points < 8 || vc.n_fields < 1) {
        log << "config error: verify-operator needs n-modes >= 9, k-max >= 2, quad-points >= 8, fields >= 1\n";
        return kConfigError;
    }

    const double a = vc.alpha;
    const int N = vc.n_modes;
    const int M = 2 * N;
    const double id_tol = 1e-10;

    std::mt19937_64 gen(vc.seed);
    double e1 = 0.0, e2 = 0.0, e3 = 0.0, e4 = 0.0, esa = 0.0;
    for (int trial = 0; trial < vc.n_fields; ++trial) {
        const SpectralField u = random_band_limited(gen, N, N - 1);
        const SpectralField v = random_band_limited(gen, N, N - 1);
        const GridField ug = synthesize(u, M);
        const GridField vg = synthesize(v, M);
        const GridField Iu = synthesize(apply_I(u, a), M);
        const GridField Iv = synthesize(apply_I(v, a), M);
        const GridField dxu = apply_dx(u, M);
        const GridField dxIu = apply_dx(apply_I(u, a), M);

        e1 = std::max(e1, rel_err(-quad_mean(pointwise_product(ug, Iu)), seminorm_sq(u, a / 2.0)));
        e2 = std::max(e2, rel_err(quad_mean(pointwise_product(Iu, Iu)), seminorm_sq(u, a)));
        e3 = std::max(e3, rel_err(-quad_mean(pointwise_product(dxIu, dxu)), seminorm_sq(u, a / 2.0 + 1.0)));
        e4 = std::max(e4, rel_err(quad_mean(pointwise_product(dxIu, dxIu)), seminorm_sq(u, a + 1.0)));
        esa = std::max(esa, rel_err(quad_mean(pointwise_product(Iu, vg)), quad_mean(pointwise_product(ug, Iv))));
    }

    std::vector<VerifyRow> rows;
    rows.push_back({"identity_energy_pairing", a, 0, 0, e1, id_tol, e1 <= id_tol});
    rows.push_back({"identity_l2_of_I", a, 0, 0, e2, id_tol, e2 <= id_tol});
    rows.push_back({"identity_flux_pairing", a, 0, 0, e3, id_tol, e3 <= id_tol});
    rows.push_back({"identity_l2_of_dxI", a, 0, 0, e4, id_tol, e4 <= id_tol});
    rows.push_back({"self_adjointness", a, 0, 0, esa, id_tol, esa <= id_tol});

    // spectral vs singular-integral cross validation on low modes
    const double kernel_tol = 1e-2;
    std::mt19937_64 gen2(vc.seed + 1);
    const SpectralField w = random_band_limited(gen2, std::max(9, N), 8);
    const double base = kernel_cross_error(w, a, vc.k_max, vc.quad_points);
    const double fine = kernel_cross_error(w, a, 2 * vc.k_max, 2 * vc.quad_points);
    rows.push_back({"kernel_l2_rel_err", a, vc.k_max, vc.quad_points, base, kernel_tol, base <= kernel_tol});
    rows.push_back({"kernel_l2_rel_err_refined", a, 2 * vc.k_max, 2 * vc.quad_points, fine, kernel_tol,
                    fine <= kernel_tol});
    const double ratio = base == 0.0 ? 0.0 : fine / base;
    rows.push_back({"kernel_refinement_ratio", a, vc.k_max, vc.quad_points, ratio, 1.0, ratio < 1.0});

    std::ostringstream table;
    table << kCsvSchemaTag << "\n";
    table << "check,alpha,k_max,quad_points,error,tolerance,status\n";
    bool all_pass = true;
    for (const VerifyRow& r : rows) {
        table << r.check << ',' << format17(r.alpha) << ',' << r.k_max << ',' << r.quad_points << ','
              << format17(r.error) << ',' << format17(r.tolerance) << ',' << (r.pass ? "pass" : "fail")
              << "\n";
        all_pass = all_pass && r.pass;
    }

    if (vc.output.empty() || vc.output == "-") {
        log << table.str();
    } else {
        fs::path p(vc.output);
        if (p.has_parent_path())
            fs::create_directories(p.parent_path());
        std::ofstream f(p);
        f << table.str();
        log << "verification table written to " << vc.output << "\n";
    }
    log << (all_pass ? "verify-operator: all checks passed\n" : "verify-operator: tolerance breach\n");
    return all_pass ? kOk : kToleranceBreach;
}

int cmd_sweep(const RunConfig& base, const std::string& axis, const std::vector<double>& values,
              std::ostream& log) {
    try {
        base.validate();
        if (axis != "tau" && axis != "epsilon" && axis != "modes")
            throw ConfigError("sweep axis must be one of tau | epsilon | modes");
        if (values.size() < 2)
            throw ConfigError("sweep needs at least 2 axis values");
        for (double v : values)
            if (!(v > 0.0))
                throw ConfigError("sweep axis values must be positive");
        if (axis == "epsilon") {
            for (size_t i = 1; i < values.size(); ++i)
                if (!(values[i] < values[i - 1]))
                    throw ConfigError("epsilon sweep values must be strictly decreasing");
        }
        if (axis == "modes") {
            for (double v : values)
                if (v != std::floor(v) || v < 4)
                    throw ConfigError("modes sweep values must be integers >= 4");
        }
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kConfigError;
    }

    const fs::path root(base.output_dir);
    fs::create_directories(root);

    std::vector<RunConfig> members;
    for (size_t i = 0; i < values.size(); ++i) {
        RunConfig cfg = base;
        char sub[32];
        std::snprintf(sub, sizeof(sub), "run_%03zu", i);
        cfg.output_dir = (root / sub).string();
        if (axis == "tau") {
            cfg.n_steps = std::max<long>(1, std::lround(base.t_final / values[i]));
        } else if (axis == "epsilon") {
            cfg.epsilon = values[i];
        } else {
            cfg.n_modes = static_cast<int>(values[i]);
        }
        cfg.validate();
        members.push_back(std::move(cfg));
    }

    bool failed = false;
    int failed_index = -1;
    std::vector<const SpectralField*> finals;
    std::vector<RunOutcome> outcomes;
    outcomes.reserve(members.size());
    const Trajectory* warm = nullptr;
    for (size_t i = 0; i < members.size(); ++i) {
        log << "sweep member " << i << ": " << axis << " = " << format17(values[i]) << "\n";
        // epsilon sweeps warm start successive runs from the previous one
        outcomes.push_back(execute_run(members[i], axis == "epsilon" ? warm : nullptr));
        const RunOutcome& out = outcomes.back();
        write_run_artifacts(members[i].output_dir, members[i], out);
        if (out.solver_failed) {
            log << "member " << i << " failed: " << out.failure_message << "\n";
            failed = true;
            failed_index = static_cast<int>(i);
            break;
        }
        warm = &outcomes.back().traj;
    }

    for (const RunOutcome& out : outcomes)
        if (!out.solver_failed)
            finals.push_back(&out.traj.states.back());

    std::vector<double> distances;
    for (size_t i = 1; i < finals.size(); ++i)
        distances.push_back(l2_distance(*finals[i - 1], *finals[i]));

    std::ofstream f(root / "convergence.csv");
    f << kCsvSchemaTag << "\n";
    f << "axis,index,value_coarse,value_fine,distance_l2,observed_order\n";
    for (size_t i = 0; i < distances.size(); ++i) {
        double order = std::numeric_limits<double>::quiet_NaN();
        if (i > 0 && distances[i] > 0.0 && distances[i - 1] > 0.0)
            order = std::log(distances[i - 1] / distances[i]) / std::log(values[i - 1] / values[i]);
        f << axis << ',' << i << ',' << format17(values[i]) << ',' << format17(values[i + 1]) << ','
          << format17(distances[i]) << ',' << format17(order) << "\n";
    }
    f.close();
    log << "convergence table: " << (root / "convergence.csv").string() << "\n";

    if (failed) {
        log << "sweep aborted at member " << failed_index << "\n";
        return kSolverFailure;
    }
    return kOk;
}

}  // namespace fracfilm
