// Implicit Euler for the regularized evolution
//
//   du/dt + d/dx( f_eps(u) d/dx I(u) ) = 0
//
// on the truncated Neumann cosine basis. Each step solves the stationary
// Galerkin system
//
//   c_k(u) - tau < f_eps(u) dI(u)/dx , phi_k' >  =  c_k(g),   k < N,
//
// with inner products by midpoint quadrature on the dealiased M = 2N grid,
// by damped Newton with a finite-difference Jacobian (Picard fallback on a
// singular Jacobian). Every accepted step is audited against the discrete
// mass identity, the energy inequality
//
//   |u|^2_{a/2} + 2 tau int f_eps(u) (dI(u)/dx)^2  <=  |g|^2_{a/2}
//
// and, when int G_eps(g) is finite, the entropy inequality
//
//   int G_eps(u) + tau |u|^2_{a/2+1}  <=  int G_eps(g).
//
// Audit violations beyond audit_tol reject the step; they are assertions,
// never correction steps.

#ifndef FRACFILM_STEPPER_HPP
#define FRACFILM_STEPPER_HPP

#include "fracfilm/entropy.hpp"
#include "fracfilm/spectral_field.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace fracfilm {

struct ModelParams {
    double alpha = 1.0;  // strictly in (0,2)
    MobilitySpec mobility;
    int n_modes = 64;
    int grid_points = 128;  // dealiasing grid, M >= 2N recommended
    double newton_tol = 1e-10;
    int newton_max_iter = 30;
    double damping_min = 1.0 / 64.0;

    double audit_tol() const { return 10.0 * newton_tol; }
    void validate() const;

    static ModelParams make(double alpha, double n, double epsilon, int n_modes);
};

struct StationarySolveResult {
    SpectralField u;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    // per-step audit record
    double mass_error = 0.0;
    double energy_slack = 0.0;
    bool entropy_checked = false;
    double entropy_slack = 0.0;
    bool audits_ok = false;
};

struct StepStats {
    int iterations;
    double residual_norm;
    double mass_error;
    double energy_slack;
    bool entropy_checked;
    double entropy_slack;
};

struct Trajectory {
    std::vector<double> times;           // t_k = k tau, size n_steps + 1
    std::vector<SpectralField> states;   // u^k, size n_steps + 1
    ModelParams params;
    double tau = 0.0;
    std::vector<StepStats> step_stats;   // size n_steps

    int n_steps() const { return static_cast<int>(step_stats.size()); }
};

class SolverError : public std::runtime_error {
public:
    SolverError(std::string msg, int step, double residual)
        : std::runtime_error(std::move(msg)), step_(step), residual_(residual) {}
    int step() const { return step_; }
    double residual() const { return residual_; }

private:
    int step_;
    double residual_;
};

// Galerkin residual R_k = c_k(u) - tau <f_eps(u) dI(u)/dx, phi_k'> - c_k(g).
// R_0 is always c_0(u) - c_0(g).
SpectralField residual(const SpectralField& u, const SpectralField& g, double tau, const ModelParams& p);

StationarySolveResult stationary_solve(const SpectralField& g, double tau, const ModelParams& p,
                                       const SpectralField& u_init);

// tau = T / n_steps; warm starts each step from the previous state, or from
// warm_start->states[k+1] when a shape-matching guess trajectory is given.
// Throws SolverError (with the step index) on nonconvergence or audit failure;
// if partial is non-null it then holds the steps completed before the failure.
Trajectory implicit_euler_run(const SpectralField& u0, double T, int n_steps, const ModelParams& p,
                              const Trajectory* warm_start = nullptr, Trajectory* partial = nullptr);

struct ContinuationResult {
    std::vector<Trajectory> runs;                 // one per epsilon
    std::vector<double> final_state_distances;    // between successive runs
};

// Runs the scheme along a strictly decreasing epsilon schedule, warm-starting
// each run's step solves from the previous run.
ContinuationResult epsilon_continuation(const SpectralField& u0, double T, int n_steps,
                                        const ModelParams& base, const std::vector<double>& epsilon_schedule);

struct ProjectionResult {
    SpectralField field;
    double min_before = 0.0;  // min of the input nodal values
    double min_after = 0.0;   // min of the truncated field on the fine grid
    bool undershoot_created = false;
};

// analyze + truncate to p.n_modes; reports whether truncation pushed the
// minimum across zero.
ProjectionResult project_initial(const GridField& values, const ModelParams& p);

}  // namespace fracfilm

#endif
