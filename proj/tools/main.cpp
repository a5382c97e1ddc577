// Command-line front end: run | verify-operator | sweep.

#include "fracfilm/run_io.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <string>

namespace {

struct RunCli {
    fracfilm::RunConfig flags;  // values bound to CLI options
    std::string config_path;
    std::string ic_coeffs_csv;
    CLI::App* sub = nullptr;

    // effective config: defaults, then the config file, then explicit flags
    fracfilm::RunConfig resolve() const {
        fracfilm::RunConfig cfg;
        if (!config_path.empty())
            fracfilm::apply_config_file(cfg, config_path);
        auto take = [this, &cfg](const char* flag, auto member) {
            if (sub->count(flag) > 0)
                cfg.*member = flags.*member;
        };
        take("--alpha", &fracfilm::RunConfig::alpha);
        take("--n", &fracfilm::RunConfig::n);
        take("--epsilon", &fracfilm::RunConfig::epsilon);
        take("--t-final", &fracfilm::RunConfig::t_final);
        take("--n-steps", &fracfilm::RunConfig::n_steps);
        take("--n-modes", &fracfilm::RunConfig::n_modes);
        take("--ic", &fracfilm::RunConfig::ic);
        take("--ic-value", &fracfilm::RunConfig::ic_value);
        take("--ic-offset", &fracfilm::RunConfig::ic_offset);
        take("--ic-amplitude", &fracfilm::RunConfig::ic_amplitude);
        take("--seed", &fracfilm::RunConfig::seed);
        take("--output-dir", &fracfilm::RunConfig::output_dir);
        take("--newton-tol", &fracfilm::RunConfig::newton_tol);
        take("--newton-max-iter", &fracfilm::RunConfig::newton_max_iter);
        take("--damping-min", &fracfilm::RunConfig::damping_min);
        take("--audit-tol", &fracfilm::RunConfig::audit_tol);
        take("--holder-x-samples", &fracfilm::RunConfig::holder_x_samples);
        take("--positivity-floor-factor", &fracfilm::RunConfig::positivity_floor_factor);
        if (sub->count("--ic-coeffs") > 0)
            cfg.ic_coeffs = fracfilm::parse_double_list(ic_coeffs_csv);
        return cfg;
    }
};

void add_run_options(CLI::App* app, RunCli& cli) {
    cli.sub = app;
    app->add_option("--config", cli.config_path,
                    "flat 'key = value' configuration file; explicit flags override it");
    app->add_option("--alpha", cli.flags.alpha, "fractional order, strictly in (0,2)");
    app->add_option("--n", cli.flags.n, "mobility exponent, >= 1");
    app->add_option("--epsilon", cli.flags.epsilon, "mobility regularization, >= 0");
    app->add_option("--t-final", cli.flags.t_final, "final time T > 0");
    app->add_option("--n-steps", cli.flags.n_steps, "number of implicit Euler steps");
    app->add_option("--n-modes", cli.flags.n_modes, "spectral truncation N >= 4");
    app->add_option("--ic", cli.flags.ic, "initial condition: constant | bump | cosine_mix | custom");
    app->add_option("--ic-value", cli.flags.ic_value, "constant preset level");
    app->add_option("--ic-offset", cli.flags.ic_offset, "bump preset offset");
    app->add_option("--ic-amplitude", cli.flags.ic_amplitude, "bump preset amplitude");
    app->add_option("--ic-coeffs", cli.ic_coeffs_csv,
                    "comma-separated coefficients (cosine_mix: a_1..; custom: c_0..)");
    app->add_option("--seed", cli.flags.seed, "seed echoed into the report");
    app->add_option("--output-dir", cli.flags.output_dir, "artifact directory");
    app->add_option("--newton-tol", cli.flags.newton_tol, "nonlinear solve tolerance");
    app->add_option("--newton-max-iter", cli.flags.newton_max_iter, "Newton iteration cap");
    app->add_option("--damping-min", cli.flags.damping_min, "smallest Newton damping factor");
    app->add_option("--audit-tol", cli.flags.audit_tol,
                    "inequality audit tolerance (< 0: 10 * newton-tol)");
    app->add_option("--holder-x-samples", cli.flags.holder_x_samples,
                    "sample points for the time-Hoelder fit");
    app->add_option("--positivity-floor-factor", cli.flags.positivity_floor_factor,
                    "positivity floor as a fraction of the initial mass");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudospectral solver and verification harness for "
                 "du/dt + d/dx(u^n d/dx I(u)) = 0 on (0,1)"};
    app.require_subcommand(1);

    RunCli run_cli;
    CLI::App* run = app.add_subcommand("run", "integrate one configuration and audit it");
    add_run_options(run, run_cli);

    fracfilm::VerifyConfig verify_cfg;
    CLI::App* verify = app.add_subcommand("verify-operator", "operator identity and kernel cross checks");
    verify->add_option("--alpha", verify_cfg.alpha, "fractional order, strictly in (0,2)");
    verify->add_option("--n-modes", verify_cfg.n_modes, "spectral truncation for the identity suite");
    verify->add_option("--k-max", verify_cfg.k_max, "kernel image-sum truncation");
    verify->add_option("--quad-points", verify_cfg.quad_points, "quadrature nodes for the singular integral");
    verify->add_option("--fields", verify_cfg.n_fields, "number of random test fields");
    verify->add_option("--seed", verify_cfg.seed, "random field seed");
    verify->add_option("--output", verify_cfg.output, "CSV destination ('-' for stdout)");

    RunCli sweep_cli;
    std::string sweep_axis;
    std::string sweep_values;
    CLI::App* sweep = app.add_subcommand("sweep", "convergence sweep along tau | epsilon | modes");
    add_run_options(sweep, sweep_cli);
    sweep->add_option("--axis", sweep_axis, "sweep axis: tau | epsilon | modes")->required();
    sweep->add_option("--values", sweep_values, "comma-separated axis values")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? fracfilm::kOk : fracfilm::kConfigError;
    }

    try {
        if (run->parsed())
            return fracfilm::cmd_run(run_cli.resolve(), std::cout);
        if (verify->parsed())
            return fracfilm::cmd_verify_operator(verify_cfg, std::cout);
        if (sweep->parsed())
            return fracfilm::cmd_sweep(sweep_cli.resolve(), sweep_axis,
                                       fracfilm::parse_double_list(sweep_values), std::cout);
    } catch (const fracfilm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return fracfilm::kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return fracfilm::kConfigError;
    }
    return fracfilm::kOk;
}
