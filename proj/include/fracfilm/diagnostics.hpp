// Physical functionals per state, trajectory-level inequality audits, the
// positivity-regime check (n > 2 + 2/(alpha+1)) and Hoelder exponent fits in
// space and time.

#ifndef FRACFILM_DIAGNOSTICS_HPP
#define FRACFILM_DIAGNOSTICS_HPP

#include "fracfilm/entropy.hpp"
#include "fracfilm/spectral_field.hpp"
#include "fracfilm/stepper.hpp"

#include <vector>

namespace fracfilm {

struct StepDiagnostics {
    double t = 0.0;
    double mass = 0.0;            // int u = c_0
    double energy = 0.0;          // |u|^2_{alpha/2}
    double entropy = 0.0;         // int G_eps(u), possibly +inf
    double energy_dissip = 0.0;   // int f_eps(u) (dI(u)/dx)^2
    double entropy_dissip = 0.0;  // |u|^2_{alpha/2+1}
    double min_value = 0.0;       // min over the fine grid
    double flux_l1 = 0.0;         // int |f_eps(u) dI(u)/dx|
};

StepDiagnostics step_diagnostics(const SpectralField& u, const ModelParams& p, const EntropyFn& fn,
                                 double t = 0.0);

struct InequalityAudit {
    bool checked = false;
    bool passed = false;
    double worst_slack = 0.0;
    int worst_step = 0;
};

struct TrajectoryAudit {
    InequalityAudit mass;     // |c_0(u^k) - c_0(u^0)| <= k * newton_tol
    InequalityAudit energy;   // cumulative energy inequality, slack >= -audit_tol
    InequalityAudit entropy;  // cumulative entropy inequality (when int G_eps(u0) < inf)
    std::vector<StepDiagnostics> steps;
    bool all_passed() const;
};

// Cumulative sums run over the accepted iterates u^1..u^k, i.e. the
// telescoped per-step estimates (one dissipation term per completed solve).
TrajectoryAudit audit_trajectory(const Trajectory& traj, const EntropyFn& fn, double audit_tol);

struct PositivityVerdict {
    double threshold = 0.0;         // 2 + 2/(alpha+1)
    bool hypothesis_holds = false;  // n > threshold
    double min_over_run = 0.0;
    double floor = 0.0;             // floor_factor * |initial mass|
    bool above_floor = false;
    bool suspected_defect = false;  // hypothesis + positive finite-entropy data, yet fell through the floor
};

PositivityVerdict positivity_check(const Trajectory& traj, const ModelParams& p, double floor_factor = 1e-8);

enum class FitDirection { space, time };

struct HolderFit {
    double exponent_est = 0.0;
    double constant_est = 0.0;
    int pairs_used = 0;
    FitDirection direction = FitDirection::space;
    bool valid = false;             // false = not-a-fit sentinel (constant data)
    double exponent_theory = 0.0;   // (alpha-1)/2 in space, gamma/(2 gamma + 3) in time
};

// Least-squares fit of log|du| against log|dx| over node pairs in the
// smallest resolvable separation decade of the fine grid.
HolderFit holder_fit_space(const SpectralField& u, double alpha);

// Same in time at x_samples sampled nodes; returns the fit with the largest
// constant. Requires at least 8 steps.
HolderFit holder_fit_time(const Trajectory& traj, int x_samples);

}  // namespace fracfilm

#endif
