// Experiment front end: run configuration, orchestration of single runs,
// operator verification suites and convergence sweeps, and the deterministic
// CSV/JSON artifact formats (schema tag "# fracfilm-v1"). Identical config +
// seed produces byte-identical files; wall-clock timing goes to the log
// stream only.

#ifndef FRACFILM_RUN_IO_HPP
#define FRACFILM_RUN_IO_HPP

#include "fracfilm/diagnostics.hpp"
#include "fracfilm/stepper.hpp"

#include "json.hpp"

#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracfilm {

inline constexpr const char* kCsvSchemaTag = "# fracfilm-v1";

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kSolverFailure = 3,
    kToleranceBreach = 4,
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    double alpha = 1.0;
    double n = 1.0;
    double epsilon = 1e-2;
    double t_final = 0.1;
    int n_steps = 100;
    int n_modes = 64;
    std::string ic = "constant";  // constant | bump | cosine_mix | custom
    double ic_value = 1.0;        // constant level
    double ic_offset = 0.0;       // bump offset
    double ic_amplitude = 1.0;    // bump amplitude
    std::vector<double> ic_coeffs;  // cosine_mix: a_1..a_m; custom: c_0..c_{m-1}
    long seed = 0;
    std::string output_dir = "fracfilm_out";
    double newton_tol = 1e-10;
    int newton_max_iter = 30;
    double damping_min = 1.0 / 64.0;
    double audit_tol = -1.0;  // < 0 means 10 * newton_tol
    int holder_x_samples = 8;
    double positivity_floor_factor = 1e-8;

    double effective_audit_tol() const { return audit_tol < 0.0 ? 10.0 * newton_tol : audit_tol; }
    ModelParams model_params() const;
    void validate() const;  // throws ConfigError
};

nlohmann::ordered_json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);

// Applies a flat "key = value" file (# comments, blank lines allowed) on top
// of cfg. Keys are the CLI flag names without the leading dashes; unknown
// keys are a ConfigError.
void apply_config_file(RunConfig& cfg, const std::string& path);

// fixed "%.17g" formatting; what every CSV cell uses
std::string format17(double x);

std::vector<double> parse_double_list(const std::string& csv);

ProjectionResult build_initial_condition(const RunConfig& cfg);

// run: writes diagnostics.csv, snapshots.csv, report.json into cfg.output_dir
int cmd_run(const RunConfig& cfg, std::ostream& log);

struct VerifyConfig {
    double alpha = 1.0;
    int n_modes = 64;
    int k_max = 10000;
    int quad_points = 10000;
    int n_fields = 20;
    unsigned long long seed = 1234;
    std::string output;  // empty or "-" writes the table to stdout
};

// verify-operator: identity suite + spectral-vs-integral cross validation
int cmd_verify_operator(const VerifyConfig& vc, std::ostream& log);

// sweep over tau | epsilon | modes; member artifacts per run directory plus
// convergence.csv with successive final-state distances and observed orders
int cmd_sweep(const RunConfig& base, const std::string& axis, const std::vector<double>& values,
              std::ostream& log);

// deterministic helpers shared by the verification suite and the tests
double uniform(std::mt19937_64& gen, double lo, double hi);
SpectralField random_band_limited(std::mt19937_64& gen, int n_modes, int max_mode);

}  // namespace fracfilm

#endif
