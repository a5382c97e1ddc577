#include "fracfilm/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

namespace fracfilm {

double eigenvalue(int k) {
    const double kpi = k * kPi;
    return kpi * kpi;
}

double basis_phi(int k, double x) {
    if (k == 0)
        return 1.0;
    return std::sqrt(2.0) * std::cos(k * kPi * x);
}

double basis_dphi(int k, double x) {
    if (k == 0)
        return 0.0;
    return -std::sqrt(2.0) * k * kPi * std::sin(k * kPi * x);
}

double collocation_node(int j, int n_points) {
    return (2.0 * j + 1.0) / (2.0 * n_points);
}

namespace {

void require_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x))
            throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

// Tables of phi_k(x_j) and phi_k'(x_j), built once per (n_modes, n_points)
// pair and shared; transforms are plain matrix passes over them.
struct BasisTables {
    int n_modes;
    int n_points;
    std::vector<double> phi;   // [k * n_points + j]
    std::vector<double> dphi;  // [k * n_points + j]

    BasisTables(int N, int M) : n_modes(N), n_points(M), phi(static_cast<size_t>(N) * M), dphi(static_cast<size_t>(N) * M) {
        for (int k = 0; k < N; ++k) {
            for (int j = 0; j < M; ++j) {
                const double x = collocation_node(j, M);
                phi[static_cast<size_t>(k) * M + j] = basis_phi(k, x);
                dphi[static_cast<size_t>(k) * M + j] = basis_dphi(k, x);
            }
        }
    }
};

std::shared_ptr<const BasisTables> tables_for(int N, int M) {
    static std::mutex mtx;
    static std::map<std::pair<int, int>, std::shared_ptr<const BasisTables>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(N, M);
    auto it = cache.find(key);
    if (it != cache.end())
        return it->second;
    auto t = std::make_shared<const BasisTables>(N, M);
    cache.emplace(key, t);
    return t;
}

}  // namespace

SpectralField::SpectralField(std::vector<double> c) : coeffs(std::move(c)) {
    require_finite(coeffs, "SpectralField");
}

GridField::GridField(std::vector<double> v) : values(std::move(v)) {
    require_finite(values, "GridField");
}

double GridField::min_value() const {
    if (values.empty())
        throw std::invalid_argument("GridField::min_value: empty field");
    return *std::min_element(values.begin(), values.end());
}

double GridField::max_abs() const {
    double m = 0.0;
    for (double x : values)
        m = std::max(m, std::fabs(x));
    return m;
}

SpectralField analyze(const GridField& g) {
    const int M = g.n_points();
    if (M < 1)
        throw std::invalid_argument("analyze: empty grid");
    auto t = tables_for(M, M);
    std::vector<double> c(M, 0.0);
    for (int k = 0; k < M; ++k) {
        double s = 0.0;
        const double* row = &t->phi[static_cast<size_t>(k) * M];
        for (int j = 0; j < M; ++j)
            s += g.values[j] * row[j];
        c[k] = s / M;
    }
    return SpectralField(std::move(c));
}

GridField synthesize(const SpectralField& u, int n_points) {
    const int N = u.n_modes();
    if (n_points < N)
        throw std::invalid_argument("synthesize: n_points < n_modes");
    auto t = tables_for(N, n_points);
    std::vector<double> v(n_points, 0.0);
    for (int k = 0; k < N; ++k) {
        const double c = u.coeffs[k];
        if (c == 0.0)
            continue;
        const double* row = &t->phi[static_cast<size_t>(k) * n_points];
        for (int j = 0; j < n_points; ++j)
            v[j] += c * row[j];
    }
    return GridField(std::move(v));
}

SpectralField apply_I(const SpectralField& u, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 2.0))
        throw std::invalid_argument("apply_I: alpha outside [0,2]");
    std::vector<double> d(u.coeffs.size(), 0.0);
    for (int k = 1; k < u.n_modes(); ++k)
        d[k] = -std::pow(k * kPi, alpha) * u.coeffs[k];
    return SpectralField(std::move(d));
}

GridField apply_dx(const SpectralField& u, int n_points) {
    const int N = u.n_modes();
    if (n_points < N)
        throw std::invalid_argument("apply_dx: n_points < n_modes");
    auto t = tables_for(N, n_points);
    std::vector<double> v(n_points, 0.0);
    for (int k = 1; k < N; ++k) {
        const double c = u.coeffs[k];
        if (c == 0.0)
            continue;
        const double* row = &t->dphi[static_cast<size_t>(k) * n_points];
        for (int j = 0; j < n_points; ++j)
            v[j] += c * row[j];
    }
    return GridField(std::move(v));
}

double seminorm_sq(const SpectralField& u, double s) {
    if (s < 0.0)
        throw std::invalid_argument("seminorm_sq: s < 0");
    double acc = 0.0;
    for (int k = 1; k < u.n_modes(); ++k) {
        const double w = std::pow(k * kPi, 2.0 * s);
        acc += u.coeffs[k] * u.coeffs[k] * w;
    }
    return acc;
}

SpectralField invert_I(const SpectralField& g, double alpha, double mean_tol) {
    if (!(alpha >= 0.0 && alpha <= 2.0))
        throw std::invalid_argument("invert_I: alpha outside [0,2]");
    if (g.n_modes() < 1)
        throw std::invalid_argument("invert_I: empty field");
    double scale = 0.0;
    for (double c : g.coeffs)
        scale = std::max(scale, std::fabs(c));
    if (mean_tol < 0.0)
        mean_tol = 1e-12 * (1.0 + scale);
    if (std::fabs(g.coeffs[0]) > mean_tol)
        throw std::invalid_argument("invert_I: right-hand side has nonzero mean; -I(u) = g is unsolvable");
    std::vector<double> c(g.coeffs.size(), 0.0);
    for (int k = 1; k < g.n_modes(); ++k)
        c[k] = g.coeffs[k] / std::pow(k * kPi, alpha);
    return SpectralField(std::move(c));
}

SpectralField shifted_invert_I(const SpectralField& g, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 2.0))
        throw std::invalid_argument("shifted_invert_I: alpha outside [0,2]");
    std::vector<double> c(g.coeffs.size(), 0.0);
    if (!g.coeffs.empty())
        c[0] = g.coeffs[0];
    for (int k = 1; k < g.n_modes(); ++k)
        c[k] = g.coeffs[k] / std::pow(k * kPi, alpha);
    return SpectralField(std::move(c));
}

double quad_mean(const GridField& f) {
    if (f.n_points() < 1)
        throw std::invalid_argument("quad_mean: empty grid");
    double s = 0.0;
    for (double v : f.values)
        s += v;
    return s / f.n_points();
}

std::vector<double> flux_projection(const GridField& h, int n_modes) {
    const int M = h.n_points();
    if (M < n_modes)
        throw std::invalid_argument("flux_projection: grid coarser than mode count");
    auto t = tables_for(n_modes, M);
    std::vector<double> b(n_modes, 0.0);
    for (int k = 1; k < n_modes; ++k) {
        double s = 0.0;
        const double* row = &t->dphi[static_cast<size_t>(k) * M];
        for (int j = 0; j < M; ++j)
            s += h.values[j] * row[j];
        b[k] = s / M;
    }
    return b;
}

SpectralField truncated(const SpectralField& u, int n_modes) {
    std::vector<double> c(n_modes, 0.0);
    const int n = std::min(n_modes, u.n_modes());
    std::copy(u.coeffs.begin(), u.coeffs.begin() + n, c.begin());
    return SpectralField(std::move(c));
}

double l2_distance(const SpectralField& a, const SpectralField& b) {
    const int n = std::max(a.n_modes(), b.n_modes());
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        const double ca = k < a.n_modes() ? a.coeffs[k] : 0.0;
        const double cb = k < b.n_modes() ? b.coeffs[k] : 0.0;
        acc += (ca - cb) * (ca - cb);
    }
    return std::sqrt(acc);
}

}  // namespace fracfilm
