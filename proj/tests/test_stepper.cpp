#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fracfilm/run_io.hpp"
#include "fracfilm/stepper.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace fracfilm;

namespace {

SpectralField constant_field(double value, int n_modes) {
    std::vector<double> c(n_modes, 0.0);
    c[0] = value;
    return SpectralField(std::move(c));
}

SpectralField mix(double mean, int mode, double amp, int n_modes) {
    std::vector<double> c(n_modes, 0.0);
    c[0] = mean;
    c[mode] = amp;
    return SpectralField(std::move(c));
}

}  // namespace

TEST_CASE("residual: constants are exact fixed points and R_0 is the mass defect") {
    const ModelParams p = ModelParams::make(1.0, 3.0, 1e-2, 16);
    const SpectralField g = constant_field(0.7, 16);
    const SpectralField r = residual(g, g, 0.1, p);
    for (double v : r.coeffs)
        CHECK(v == 0.0);

    std::mt19937_64 gen(3);
    const SpectralField u = random_band_limited(gen, 16, 15);
    const SpectralField w = random_band_limited(gen, 16, 15);
    const SpectralField r2 = residual(u, w, 0.05, p);
    CHECK(r2.coeffs[0] == u.coeffs[0] - w.coeffs[0]);  // phi_0 kills the flux term
}

TEST_CASE("residual matches the exact linearized operator for tiny amplitudes") {
    // f_eps(u) = u_+^n + eps with |u| ~ 1e-4 and n = 3 leaves the nonlinear
    // part ~1e-12; the linear flux projects to tau * eps * (k pi)^{alpha+2} c_k
    const double eps = 1.0, tau = 0.1, alpha = 1.0;
    ModelParams p = ModelParams::make(alpha, 3.0, eps, 16);
    std::mt19937_64 gen(5);
    SpectralField u = random_band_limited(gen, 16, 15);
    for (double& c : u.coeffs)
        c *= 1e-4;
    const SpectralField g = constant_field(0.0, 16);
    const SpectralField r = residual(u, g, tau, p);
    for (int k = 1; k < 16; ++k) {
        const double want = u.coeffs[k] * (1.0 + tau * eps * std::pow(k * kPi, alpha + 2.0));
        CHECK(std::fabs(r.coeffs[k] - want) < 1e-8 * (1.0 + std::fabs(want)));
    }
}

TEST_CASE("stationary_solve: constants converge in zero iterations") {
    const ModelParams p = ModelParams::make(1.3, 2.0, 1e-3, 16);
    const SpectralField g = constant_field(1.1, 16);
    const StationarySolveResult r = stationary_solve(g, 0.25, p, g);
    CHECK(r.converged);
    CHECK(r.iterations == 0);
    CHECK(r.audits_ok);
    for (int k = 0; k < 16; ++k)
        CHECK(r.u.coeffs[k] == g.coeffs[k]);
}

TEST_CASE("stationary_solve: per-mode linear oracle in the small-amplitude regime") {
    // n = 1, eps = 1, g = a phi_1: u_k ~ g_k / (1 + tau eps (k pi)^{alpha+2})
    const double alpha = 1.0, tau = 1e-2, amp = 1e-6;
    ModelParams p = ModelParams::make(alpha, 1.0, 1.0, 8);
    p.newton_tol = 1e-14;
    const SpectralField g = mix(0.0, 1, amp, 8);
    const StationarySolveResult r = stationary_solve(g, tau, p, g);
    REQUIRE(r.converged);
    const double want = amp / (1.0 + tau * std::pow(kPi, alpha + 2.0));
    CHECK(std::fabs(r.u.coeffs[1] - want) < 1e-6 * want);
    // cross-check the modal multiplier at alpha = 1: pi^3
    CHECK(std::pow(kPi, alpha + 2.0) == doctest::Approx(kPi * kPi * kPi).epsilon(1e-15));
}

TEST_CASE("stationary_solve: positive bump with n = 3 passes all three audits") {
    ModelParams p = ModelParams::make(1.0, 3.0, 1e-4, 32);
    std::vector<double> v(p.grid_points);
    for (int j = 0; j < p.grid_points; ++j) {
        const double x = collocation_node(j, p.grid_points);
        v[j] = 0.1 + std::sin(kPi * x) * std::sin(kPi * x);
    }
    const SpectralField g = project_initial(GridField(v), p).field;
    const StationarySolveResult r = stationary_solve(g, 1e-4, p, g);
    REQUIRE(r.converged);
    CHECK(r.audits_ok);
    CHECK(r.mass_error <= p.newton_tol);
    CHECK(r.energy_slack >= -p.audit_tol());
    CHECK(r.entropy_checked);
    CHECK(r.entropy_slack >= -p.audit_tol());
}

TEST_CASE("implicit_euler_run: constant data gives a constant trajectory") {
    const ModelParams p = ModelParams::make(0.7, 2.0, 1e-3, 8);
    const SpectralField u0 = constant_field(2.0, 8);
    const Trajectory traj = implicit_euler_run(u0, 1.0, 5, p);
    REQUIRE(traj.states.size() == 6);
    for (const SpectralField& u : traj.states)
        for (int k = 0; k < 8; ++k)
            CHECK(u.coeffs[k] == u0.coeffs[k]);
    for (const StepStats& s : traj.step_stats)
        CHECK(s.iterations == 0);
}

TEST_CASE("implicit_euler_run: mass conservation and per-step audit records") {
    ModelParams p = ModelParams::make(1.0, 3.0, 1e-2, 32);
    const SpectralField u0 = mix(1.0, 1, 0.5, 32);
    const Trajectory traj = implicit_euler_run(u0, 0.02, 20, p);
    for (size_t k = 1; k < traj.states.size(); ++k)
        CHECK(std::fabs(traj.states[k].coeffs[0] - u0.coeffs[0]) <= double(k) * p.newton_tol);
    for (const StepStats& s : traj.step_stats) {
        CHECK(s.energy_slack >= -p.audit_tol());
        CHECK(s.entropy_checked);
        CHECK(s.entropy_slack >= -p.audit_tol());
    }
    // the run actually moves
    CHECK(l2_distance(traj.states.front(), traj.states.back()) > 1e-4);
}

TEST_CASE("implicit_euler_run: first-order self-convergence in tau") {
    ModelParams p = ModelParams::make(1.0, 3.0, 1e-2, 32);
    const SpectralField u0 = mix(1.0, 1, 0.5, 32);
    const double T = 0.02;
    const SpectralField a = implicit_euler_run(u0, T, 20, p).states.back();
    const SpectralField b = implicit_euler_run(u0, T, 40, p).states.back();
    const SpectralField c = implicit_euler_run(u0, T, 80, p).states.back();
    const double d1 = l2_distance(a, b);
    const double d2 = l2_distance(b, c);
    const double order = std::log2(d1 / d2);
    CHECK(order >= 0.9);
    CHECK(order <= 1.6);
}

TEST_CASE("implicit_euler_run: even symmetry about x = 1/2 is preserved") {
    ModelParams p = ModelParams::make(1.2, 2.0, 1e-3, 32);
    const SpectralField u0 = mix(1.0, 2, 0.3, 32);  // even modes only
    const Trajectory traj = implicit_euler_run(u0, 0.01, 10, p);
    for (const SpectralField& u : traj.states)
        for (int k = 1; k < u.n_modes(); k += 2)
            CHECK(std::fabs(u.coeffs[k]) < 1e-10);
}

TEST_CASE("implicit_euler_run: nonconvergence carries the step index") {
    ModelParams p = ModelParams::make(1.0, 3.0, 1e-6, 16);
    p.newton_max_iter = 1;
    p.newton_tol = 1e-15;
    const SpectralField u0 = mix(1.0, 1, 0.9, 16);
    try {
        implicit_euler_run(u0, 10.0, 2, p);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(e.step() == 1);
        CHECK(e.residual() > 1e-15);
    }
}

TEST_CASE("epsilon_continuation: single entry reproduces a plain run") {
    ModelParams base = ModelParams::make(1.0, 3.0, 1.0, 16);
    const SpectralField u0 = mix(1.0, 1, 0.4, 16);
    base.mobility.epsilon = 123.0;  // overridden by the schedule
    const ContinuationResult cont = epsilon_continuation(u0, 0.01, 5, base, {1e-2});
    ModelParams p = base;
    p.mobility.epsilon = 1e-2;
    const Trajectory plain = implicit_euler_run(u0, 0.01, 5, p);
    REQUIRE(cont.runs.size() == 1);
    CHECK(cont.final_state_distances.empty());
    for (size_t k = 0; k < plain.states.size(); ++k)
        for (int i = 0; i < 16; ++i)
            CHECK(cont.runs[0].states[k].coeffs[i] == plain.states[k].coeffs[i]);
}

TEST_CASE("epsilon_continuation: distances decrease and the minimum stays tame") {
    ModelParams base = ModelParams::make(1.0, 3.0, 1.0, 32);
    const SpectralField u0 = mix(1.0, 1, 0.5, 32);
    const std::vector<double> schedule{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    const ContinuationResult cont = epsilon_continuation(u0, 0.02, 20, base, schedule);
    REQUIRE(cont.runs.size() == 5);
    REQUIRE(cont.final_state_distances.size() == 4);
    for (size_t i = 1; i < cont.final_state_distances.size(); ++i)
        CHECK(cont.final_state_distances[i] < cont.final_state_distances[i - 1]);

    double mn = 1e300;
    for (const Trajectory& run : cont.runs)
        for (const SpectralField& u : run.states)
            mn = std::min(mn, synthesize(u, base.grid_points).min_value());
    CHECK(mn >= -1e-3);

    CHECK_THROWS_AS(epsilon_continuation(u0, 0.01, 2, base, {1e-2, 1e-2}), std::invalid_argument);
    CHECK_THROWS_AS(epsilon_continuation(u0, 0.01, 2, base, {1e-3, 1e-2}), std::invalid_argument);
}

TEST_CASE("project_initial: band-limited data is exact, clipping reports undershoot") {
    const ModelParams p = ModelParams::make(1.0, 2.0, 1e-2, 8);
    // 1 + phi_1 / 2
    std::vector<double> v(p.grid_points);
    for (int j = 0; j < p.grid_points; ++j)
        v[j] = 1.0 + 0.5 * basis_phi(1, collocation_node(j, p.grid_points));
    const ProjectionResult pr = project_initial(GridField(v), p);
    CHECK(pr.field.coeffs[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(pr.field.coeffs[1] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(!pr.undershoot_created);

    // clipped profile touching zero: truncation creates a small negative dip
    const ModelParams p2 = ModelParams::make(1.0, 2.0, 1e-2, 16);
    std::vector<double> w(p2.grid_points);
    for (int j = 0; j < p2.grid_points; ++j) {
        const double x = collocation_node(j, p2.grid_points);
        w[j] = std::max(0.0, std::cos(2.0 * kPi * x) - 0.3);
    }
    const ProjectionResult pr2 = project_initial(GridField(w), p2);
    CHECK(pr2.min_before >= 0.0);
    CHECK(pr2.min_after < pr2.min_before + 1e-12);
    CHECK(std::fabs(pr2.min_after - pr2.min_before) < 0.05);
    if (pr2.min_after < 0.0)
        CHECK(pr2.undershoot_created);
}
