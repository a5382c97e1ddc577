#include "fracfilm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fracfilm {

namespace {

struct LinearFit {
    double slope;
    double intercept;
    int count;
};

LinearFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
    const int n = static_cast<int>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double det = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / n;
    return {slope, intercept, n};
}

HolderFit sentinel(FitDirection dir, double theory) {
    HolderFit fit;
    fit.direction = dir;
    fit.exponent_theory = theory;
    return fit;
}

}  // namespace

StepDiagnostics step_diagnostics(const SpectralField& u, const ModelParams& p, const EntropyFn& fn, double t) {
    StepDiagnostics d;
    d.t = t;
    d.mass = u.mean();
    d.energy = seminorm_sq(u, p.alpha / 2.0);
    d.entropy_dissip = seminorm_sq(u, p.alpha / 2.0 + 1.0);

    const GridField ug = synthesize(u, p.grid_points);
    const GridField w = apply_dx(apply_I(u, p.alpha), p.grid_points);
    double dissip = 0.0, flux = 0.0;
    for (int j = 0; j < p.grid_points; ++j) {
        const double f = mobility(ug.values[j], p.mobility) * w.values[j];
        dissip += f * w.values[j];
        flux += std::fabs(f);
    }
    d.energy_dissip = dissip / p.grid_points;
    d.flux_l1 = flux / p.grid_points;
    d.min_value = ug.min_value();
    d.entropy = entropy_total(ug, fn);
    return d;
}

bool TrajectoryAudit::all_passed() const {
    auto ok = [](const InequalityAudit& a) { return !a.checked || a.passed; };
    return ok(mass) && ok(energy) && ok(entropy);
}

TrajectoryAudit audit_trajectory(const Trajectory& traj, const EntropyFn& fn, double audit_tol) {
    if (traj.states.empty())
        throw std::invalid_argument("audit_trajectory: empty trajectory");

    TrajectoryAudit audit;
    audit.steps.reserve(traj.states.size());
    for (size_t k = 0; k < traj.states.size(); ++k)
        audit.steps.push_back(step_diagnostics(traj.states[k], traj.params, fn, traj.times[k]));

    const StepDiagnostics& first = audit.steps.front();
    const double tau = traj.tau;

    audit.mass.checked = true;
    audit.mass.passed = true;
    audit.energy.checked = true;
    audit.energy.passed = true;
    audit.entropy.checked = std::isfinite(first.entropy);
    audit.entropy.passed = audit.entropy.checked;
    audit.mass.worst_slack = std::numeric_limits<double>::infinity();
    audit.energy.worst_slack = std::numeric_limits<double>::infinity();
    audit.entropy.worst_slack = std::numeric_limits<double>::infinity();

    double energy_sum = 0.0;   // 2 tau sum of energy dissipations over u^1..u^k
    double entropy_sum = 0.0;  // tau sum of |u^j|^2_{alpha/2+1}
    for (size_t k = 1; k < audit.steps.size(); ++k) {
        const StepDiagnostics& d = audit.steps[k];
        energy_sum += 2.0 * tau * d.energy_dissip;
        entropy_sum += tau * d.entropy_dissip;

        const double mass_slack = static_cast<double>(k) * traj.params.newton_tol - std::fabs(d.mass - first.mass);
        if (mass_slack < audit.mass.worst_slack) {
            audit.mass.worst_slack = mass_slack;
            audit.mass.worst_step = static_cast<int>(k);
        }
        if (mass_slack < 0.0)
            audit.mass.passed = false;

        const double energy_slack = first.energy - d.energy - energy_sum;
        if (energy_slack < audit.energy.worst_slack) {
            audit.energy.worst_slack = energy_slack;
            audit.energy.worst_step = static_cast<int>(k);
        }
        if (energy_slack < -audit_tol)
            audit.energy.passed = false;

        if (audit.entropy.checked) {
            const double entropy_slack = first.entropy - d.entropy - entropy_sum;
            if (entropy_slack < audit.entropy.worst_slack) {
                audit.entropy.worst_slack = entropy_slack;
                audit.entropy.worst_step = static_cast<int>(k);
            }
            if (entropy_slack < -audit_tol)
                audit.entropy.passed = false;
        }
    }
    if (audit.steps.size() == 1) {
        audit.mass.worst_slack = 0.0;
        audit.energy.worst_slack = 0.0;
        audit.entropy.worst_slack = 0.0;
    }
    return audit;
}

PositivityVerdict positivity_check(const Trajectory& traj, const ModelParams& p, double floor_factor) {
    if (traj.states.empty())
        throw std::invalid_argument("positivity_check: empty trajectory");

    PositivityVerdict v;
    v.threshold = 2.0 + 2.0 / (p.alpha + 1.0);
    v.hypothesis_holds = p.mobility.n > v.threshold;

    double mn = std::numeric_limits<double>::infinity();
    for (const SpectralField& u : traj.states)
        mn = std::min(mn, synthesize(u, p.grid_points).min_value());
    v.min_over_run = mn;
    v.floor = floor_factor * std::fabs(traj.states.front().mean());
    v.above_floor = mn > v.floor;

    if (v.hypothesis_holds && !v.above_floor) {
        const double min0 = synthesize(traj.states.front(), p.grid_points).min_value();
        const EntropyFn fn = EntropyFn::for_mobility(p.mobility);
        const double S0 = entropy_total(synthesize(traj.states.front(), p.grid_points), fn);
        v.suspected_defect = min0 > 0.0 && std::isfinite(S0);
    }
    return v;
}

HolderFit holder_fit_space(const SpectralField& u, double alpha) {
    const int M = 2 * std::max(u.n_modes(), 2);
    const GridField g = synthesize(u, M);
    const double h = 1.0 / M;
    const double scale = g.max_abs();
    const double tiny = 1e-14 * (1.0 + scale);

    std::vector<double> lx, ly;
    for (int sep = 1; sep <= 10; ++sep) {
        for (int j = 0; j + sep < M; ++j) {
            const double du = std::fabs(g.values[j + sep] - g.values[j]);
            if (du <= tiny)
                continue;
            lx.push_back(std::log(sep * h));
            ly.push_back(std::log(du));
        }
    }

    const double theory = (alpha - 1.0) / 2.0;
    if (lx.empty())
        return sentinel(FitDirection::space, theory);
    if (lx.size() < 8)
        throw std::runtime_error("holder_fit_space: fewer than 8 usable pairs");

    const LinearFit f = least_squares(lx, ly);
    HolderFit fit;
    fit.direction = FitDirection::space;
    fit.valid = true;
    fit.exponent_est = f.slope;
    fit.constant_est = std::exp(f.intercept);
    fit.pairs_used = f.count;
    fit.exponent_theory = theory;
    return fit;
}

HolderFit holder_fit_time(const Trajectory& traj, int x_samples) {
    const int n_states = static_cast<int>(traj.states.size());
    if (n_states < 9)
        throw std::invalid_argument("holder_fit_time: trajectory needs at least 8 steps");
    if (x_samples < 1)
        throw std::invalid_argument("holder_fit_time: x_samples must be >= 1");

    const double gamma = (traj.params.alpha - 1.0) / 2.0;
    const double theory = gamma / (2.0 * gamma + 3.0);

    const int M = traj.params.grid_points;
    std::vector<GridField> grids;
    grids.reserve(n_states);
    for (const SpectralField& u : traj.states)
        grids.push_back(synthesize(u, M));

    double scale = 0.0;
    for (const GridField& g : grids)
        scale = std::max(scale, g.max_abs());
    const double tiny = 1e-14 * (1.0 + scale);

    HolderFit best = sentinel(FitDirection::time, theory);
    for (int i = 0; i < x_samples; ++i) {
        const int j = static_cast<int>((i + 0.5) * M / x_samples);
        std::vector<double> lx, ly;
        for (int sep = 1; sep <= 10; ++sep) {
            for (int k = 0; k + sep < n_states; ++k) {
                const double du = std::fabs(grids[k + sep].values[j] - grids[k].values[j]);
                if (du <= tiny)
                    continue;
                lx.push_back(std::log(sep * traj.tau));
                ly.push_back(std::log(du));
            }
        }
        if (lx.size() < 8)
            continue;
        const LinearFit f = least_squares(lx, ly);
        const double constant = std::exp(f.intercept);
        if (!best.valid || constant > best.constant_est) {
            best.valid = true;
            best.direction = FitDirection::time;
            best.exponent_est = f.slope;
            best.constant_est = constant;
            best.pairs_used = f.count;
            best.exponent_theory = theory;
        }
    }
    return best;
}

}  // namespace fracfilm
