#include "fracfilm/stepper.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>

namespace fracfilm {

namespace {

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

// energy dissipation rate int f_eps(u) (dI(u)/dx)^2 on the dealiasing grid,
// the same quadrature the residual uses (that consistency is what makes the
// discrete energy audit hold to roundoff)
double energy_dissipation(const SpectralField& u, const ModelParams& p) {
    const GridField ug = synthesize(u, p.grid_points);
    const GridField w = apply_dx(apply_I(u, p.alpha), p.grid_points);
    double acc = 0.0;
    for (int j = 0; j < p.grid_points; ++j) {
        const double f = mobility(ug.values[j], p.mobility);
        acc += f * w.values[j] * w.values[j];
    }
    return acc / p.grid_points;
}

struct AuditOutcome {
    double mass_error;
    double energy_slack;
    bool entropy_checked;
    double entropy_slack;
    bool ok;
};

AuditOutcome audit_step(const SpectralField& u, const SpectralField& g, double tau, const ModelParams& p) {
    AuditOutcome out{};
    const double tol = p.audit_tol();
    out.mass_error = std::fabs(u.coeffs[0] - g.coeffs[0]);

    const double a2 = p.alpha / 2.0;
    out.energy_slack = seminorm_sq(g, a2) - seminorm_sq(u, a2) - 2.0 * tau * energy_dissipation(u, p);

    const EntropyFn fn = EntropyFn::for_mobility(p.mobility);
    const double Sg = entropy_total(synthesize(g, p.grid_points), fn);
    out.entropy_checked = std::isfinite(Sg);
    out.entropy_slack = std::numeric_limits<double>::quiet_NaN();
    if (out.entropy_checked) {
        const double Su = entropy_total(synthesize(u, p.grid_points), fn);
        out.entropy_slack = Sg - Su - tau * seminorm_sq(u, a2 + 1.0);
    }

    out.ok = out.mass_error <= tol && out.energy_slack >= -tol &&
             (!out.entropy_checked || out.entropy_slack >= -tol);
    return out;
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s);
}

}  // namespace

void ModelParams::validate() const {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::invalid_argument("ModelParams: alpha must lie strictly in (0,2)");
    if (mobility.n < 1.0)
        throw std::invalid_argument("ModelParams: mobility exponent n must be >= 1");
    if (mobility.epsilon < 0.0)
        throw std::invalid_argument("ModelParams: epsilon must be >= 0");
    if (n_modes < 4)
        throw std::invalid_argument("ModelParams: n_modes must be >= 4");
    if (grid_points < n_modes)
        throw std::invalid_argument("ModelParams: grid_points must be >= n_modes");
    if (!(newton_tol > 0.0))
        throw std::invalid_argument("ModelParams: newton_tol must be positive");
    if (newton_max_iter < 1)
        throw std::invalid_argument("ModelParams: newton_max_iter must be >= 1");
    if (!(damping_min > 0.0 && damping_min <= 1.0))
        throw std::invalid_argument("ModelParams: damping_min must lie in (0,1]");
}

ModelParams ModelParams::make(double alpha, double n, double epsilon, int n_modes) {
    ModelParams p;
    p.alpha = alpha;
    p.mobility = MobilitySpec{n, epsilon};
    p.n_modes = n_modes;
    p.grid_points = 2 * n_modes;
    p.validate();
    return p;
}

SpectralField residual(const SpectralField& u, const SpectralField& g, double tau, const ModelParams& p) {
    if (u.n_modes() != g.n_modes() || u.n_modes() != p.n_modes)
        throw std::invalid_argument("residual: u, g and params must share the mode count");
    const GridField ug = synthesize(u, p.grid_points);
    const GridField w = apply_dx(apply_I(u, p.alpha), p.grid_points);
    std::vector<double> flux(p.grid_points);
    for (int j = 0; j < p.grid_points; ++j)
        flux[j] = mobility(ug.values[j], p.mobility) * w.values[j];
    const std::vector<double> b = flux_projection(GridField(std::move(flux)), p.n_modes);

    std::vector<double> r(p.n_modes);
    for (int k = 0; k < p.n_modes; ++k)
        r[k] = u.coeffs[k] - tau * b[k] - g.coeffs[k];
    return SpectralField(std::move(r));
}

StationarySolveResult stationary_solve(const SpectralField& g, double tau, const ModelParams& p,
                                       const SpectralField& u_init) {
    p.validate();
    if (!(tau > 0.0))
        throw std::invalid_argument("stationary_solve: tau must be positive");
    const int N = p.n_modes;

    StationarySolveResult res;
    res.u = truncated(u_init, N);
    SpectralField r = residual(res.u, g, tau, p);
    double rnorm = norm2(r.coeffs);

    while (rnorm > p.newton_tol && res.iterations < p.newton_max_iter) {
        // finite-difference Jacobian, column by column
        Eigen::MatrixXd J(N, N);
        for (int l = 0; l < N; ++l) {
            const double h = 1e-7 * (1.0 + std::fabs(res.u.coeffs[l]));
            SpectralField up = res.u;
            up.coeffs[l] += h;
            const SpectralField rp = residual(up, g, tau, p);
            for (int k = 0; k < N; ++k)
                J(k, l) = (rp.coeffs[k] - r.coeffs[k]) / h;
        }

        const Eigen::VectorXd rhs = -to_eigen(r.coeffs);
        Eigen::VectorXd dir = J.partialPivLu().solve(rhs);
        bool usable = dir.allFinite() && (J * dir - rhs).norm() <= 1e-8 * (1.0 + rhs.norm());
        if (!usable) {
            Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
            if (lu.isInvertible()) {
                dir = lu.solve(rhs);
                usable = dir.allFinite();
            }
        }
        if (!usable) {
            // Picard fallback with relaxation 1/2: u <- u + (g + tau B(u) - u)/2,
            // where g + tau B(u) - u = -R(u)
            dir = 0.5 * rhs;
        }

        // damped line search on ||R||
        double best_lambda = 0.0;
        double best_norm = rnorm;
        SpectralField best_u = res.u;
        SpectralField best_r = r;
        for (double lambda = 1.0; lambda >= p.damping_min; lambda *= 0.5) {
            Eigen::VectorXd trial = to_eigen(res.u.coeffs) + lambda * dir;
            if (!trial.allFinite())
                continue;
            SpectralField ut{to_std(trial)};
            SpectralField rt = residual(ut, g, tau, p);
            const double nt = norm2(rt.coeffs);
            if (nt < best_norm) {
                best_lambda = lambda;
                best_norm = nt;
                best_u = std::move(ut);
                best_r = std::move(rt);
            }
            if (best_lambda == 1.0)
                break;  // full step already decreased the residual
        }

        ++res.iterations;
        if (best_lambda == 0.0)
            break;  // no descent at any damping level
        res.u = std::move(best_u);
        r = std::move(best_r);
        rnorm = best_norm;
    }

    res.residual_norm = rnorm;
    res.converged = rnorm <= p.newton_tol;
    if (res.converged) {
        const AuditOutcome audit = audit_step(res.u, g, tau, p);
        res.mass_error = audit.mass_error;
        res.energy_slack = audit.energy_slack;
        res.entropy_checked = audit.entropy_checked;
        res.entropy_slack = audit.entropy_slack;
        res.audits_ok = audit.ok;
    }
    return res;
}

Trajectory implicit_euler_run(const SpectralField& u0, double T, int n_steps, const ModelParams& p,
                              const Trajectory* warm_start, Trajectory* partial) {
    p.validate();
    if (n_steps < 1)
        throw std::invalid_argument("implicit_euler_run: n_steps must be >= 1");
    if (!(T > 0.0))
        throw std::invalid_argument("implicit_euler_run: T must be positive");

    Trajectory traj;
    traj.params = p;
    traj.tau = T / n_steps;
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);
    traj.step_stats.reserve(n_steps);
    traj.times.push_back(0.0);
    traj.states.push_back(truncated(u0, p.n_modes));

    const bool use_guess = warm_start != nullptr &&
                           static_cast<int>(warm_start->states.size()) == n_steps + 1 &&
                           warm_start->params.n_modes == p.n_modes;

    for (int k = 0; k < n_steps; ++k) {
        const SpectralField& g = traj.states.back();
        const SpectralField& guess = use_guess ? warm_start->states[k + 1] : g;
        StationarySolveResult r = stationary_solve(g, traj.tau, p, guess);
        if (!r.converged || !r.audits_ok) {
            std::ostringstream msg;
            if (!r.converged)
                msg << "stationary solve failed at step " << k + 1 << " (residual " << r.residual_norm
                    << " after " << r.iterations << " iterations)";
            else
                msg << "per-step inequality audit failed at step " << k + 1 << " (mass " << r.mass_error
                    << ", energy slack " << r.energy_slack << ", entropy slack " << r.entropy_slack << ")";
            if (partial)
                *partial = std::move(traj);
            throw SolverError(msg.str(), k + 1, r.residual_norm);
        }
        traj.times.push_back((k + 1) * traj.tau);
        traj.states.push_back(std::move(r.u));
        traj.step_stats.push_back(StepStats{r.iterations, r.residual_norm, r.mass_error, r.energy_slack,
                                            r.entropy_checked, r.entropy_slack});
    }
    return traj;
}

ContinuationResult epsilon_continuation(const SpectralField& u0, double T, int n_steps,
                                        const ModelParams& base, const std::vector<double>& epsilon_schedule) {
    if (epsilon_schedule.empty())
        throw std::invalid_argument("epsilon_continuation: empty schedule");
    for (size_t i = 0; i < epsilon_schedule.size(); ++i) {
        if (!(epsilon_schedule[i] > 0.0))
            throw std::invalid_argument("epsilon_continuation: schedule entries must be positive");
        if (i > 0 && !(epsilon_schedule[i] < epsilon_schedule[i - 1]))
            throw std::invalid_argument("epsilon_continuation: schedule must be strictly decreasing");
    }

    ContinuationResult out;
    out.runs.reserve(epsilon_schedule.size());
    for (size_t i = 0; i < epsilon_schedule.size(); ++i) {
        ModelParams p = base;
        p.mobility.epsilon = epsilon_schedule[i];
        const Trajectory* guess = out.runs.empty() ? nullptr : &out.runs.back();
        try {
            out.runs.push_back(implicit_euler_run(u0, T, n_steps, p, guess));
        } catch (const SolverError& e) {
            std::ostringstream msg;
            msg << "epsilon = " << epsilon_schedule[i] << ": " << e.what();
            throw SolverError(msg.str(), e.step(), e.residual());
        }
        if (i > 0)
            out.final_state_distances.push_back(
                l2_distance(out.runs[i - 1].states.back(), out.runs[i].states.back()));
    }
    return out;
}

ProjectionResult project_initial(const GridField& values, const ModelParams& p) {
    ProjectionResult out;
    out.min_before = values.min_value();
    out.field = truncated(analyze(values), p.n_modes);
    out.min_after = synthesize(out.field, p.grid_points).min_value();
    out.undershoot_created = out.min_before >= 0.0 && out.min_after < 0.0;
    return out;
}

}  // namespace fracfilm
