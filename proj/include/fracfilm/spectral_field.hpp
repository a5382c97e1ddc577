// Functions on Omega = (0,1) expanded in the Neumann cosine eigenbasis
//
//   phi_0(x) = 1,  phi_k(x) = sqrt(2) cos(k pi x)  (k >= 1),
//   -phi_k'' = lambda_k phi_k,  lambda_k = (k pi)^2,  int phi_k^2 = 1,
//
// together with the nonlocal operator
//
//   I : sum c_k phi_k  ->  -sum c_k lambda_k^{alpha/2} phi_k,
//
// its exact inverses on mean-zero data, spectral derivatives, and the
// homogeneous seminorms  |u|^2_s = sum_{k>=1} c_k^2 lambda_k^s.
//
// Collocation grids use midpoints x_j = (2j+1)/(2M); midpoint quadrature on
// M nodes integrates cosine modes 0..2M-1 exactly, which is what makes the
// analyze/synthesize pair and the dealiased products downstream work.

#ifndef FRACFILM_SPECTRAL_FIELD_HPP
#define FRACFILM_SPECTRAL_FIELD_HPP

#include <vector>

namespace fracfilm {

inline constexpr double kPi = 3.14159265358979323846;

// lambda_k = (k pi)^2
double eigenvalue(int k);
// phi_k(x)
double basis_phi(int k, double x);
// phi_k'(x) = -sqrt(2) k pi sin(k pi x)
double basis_dphi(int k, double x);
// midpoint collocation node x_j = (2j+1)/(2M)
double collocation_node(int j, int n_points);

/// Coefficients c_0..c_{N-1} in the Neumann cosine basis. The mean of the
/// represented function is c_0. Construction rejects non-finite entries.
struct SpectralField {
    std::vector<double> coeffs;

    SpectralField() = default;
    explicit SpectralField(std::vector<double> c);

    int n_modes() const { return static_cast<int>(coeffs.size()); }
    double mean() const { return coeffs.empty() ? 0.0 : coeffs[0]; }
};

/// Nodal values at the M midpoint collocation nodes.
struct GridField {
    std::vector<double> values;

    GridField() = default;
    explicit GridField(std::vector<double> v);

    int n_points() const { return static_cast<int>(values.size()); }
    double min_value() const;
    double max_abs() const;
};

// Forward transform: c_k = (1/M) sum_j g_j phi_k(x_j), k = 0..M-1.
// Exact inverse of synthesize when M equals the mode count.
SpectralField analyze(const GridField& g);

// values_j = sum_k c_k phi_k(x_j); requires n_points >= n_modes.
GridField synthesize(const SpectralField& u, int n_points);

// I(u): d_0 = 0, d_k = -(k pi)^alpha c_k. Requires alpha in [0,2]. The k = 0
// multiplier is defined as 0 for every alpha (lambda_0 = 0; at alpha = 0 the
// 0^0 ambiguity is resolved to "mean removed").
SpectralField apply_I(const SpectralField& u, double alpha);

// u'(x_j) as a sine series on the grid; requires n_points >= n_modes.
GridField apply_dx(const SpectralField& u, int n_points);

// |u|^2_{H^s_N} = sum_{k>=1} c_k^2 (k pi)^{2s}, s >= 0.
double seminorm_sq(const SpectralField& u, double s);

// Solve -I(u) = g with mean(u) = 0. g must have (numerically) zero mean:
// |c_0(g)| <= mean_tol, defaulting to 1e-12 * (1 + max_k |c_k(g)|).
SpectralField invert_I(const SpectralField& g, double alpha, double mean_tol = -1.0);

// Solve -I(v) + int(v) = g; a bijection on the truncated coefficient space.
SpectralField shifted_invert_I(const SpectralField& g, double alpha);

// Midpoint quadrature of int_0^1 f dx, i.e. the mean of the nodal values.
double quad_mean(const GridField& f);

// Galerkin flux projections b_k = (1/M) sum_j h_j phi_k'(x_j), k = 0..N-1.
std::vector<double> flux_projection(const GridField& h, int n_modes);

// First n_modes coefficients, zero-padded if u is shorter.
SpectralField truncated(const SpectralField& u, int n_modes);

// l2 distance of coefficient vectors, shorter one zero-padded.
double l2_distance(const SpectralField& a, const SpectralField& b);

}  // namespace fracfilm

#endif
