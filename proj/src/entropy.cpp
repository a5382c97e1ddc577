#include "fracfilm/entropy.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fracfilm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// |n - 1| or |n - 2| below this routes to the adjacent closed form (the
// general 1 < n < 2 expression degenerates to 0/0 there).
constexpr double kCaseBoundaryTol = 1e-8;

double closed_form(double s, double n) {
    if (s < 0.0)
        return kInf;
    if (std::fabs(n - 1.0) < kCaseBoundaryTol) {
        if (s == 0.0)
            return 1.0;
        return s * std::log(s) - s + 1.0;
    }
    if (std::fabs(n - 2.0) < kCaseBoundaryTol) {
        if (s == 0.0)
            return kInf;
        return std::log(1.0 / s) + s - 1.0;
    }
    if (n < 2.0) {
        // 1 < n < 2; finite down to s = 0 where it equals 1/(2-n)
        return -std::pow(s, 2.0 - n) / ((2.0 - n) * (n - 1.0)) + s / (n - 1.0) + 1.0 / (2.0 - n);
    }
    // n > 2
    if (s == 0.0)
        return kInf;
    return std::pow(s, -(n - 2.0)) / ((n - 2.0) * (n - 1.0)) + s / (n - 1.0) - 1.0 / (n - 2.0);
}

// int_1^s (s-t)/f_eps(t) dt over t >= 0, oriented.
double segment_integral(double s, double lo, double hi, double n, double eps) {
    using boost::math::quadrature::gauss_kronrod;
    if (lo == hi)
        return 0.0;
    auto f = [s, n, eps](double t) { return (s - t) / (std::pow(t, n) + eps); };
    const double sign = lo < hi ? 1.0 : -1.0;
    const double a = std::min(lo, hi), b = std::max(lo, hi);
    return sign * gauss_kronrod<double, 31>::integrate(f, a, b, 8, 1e-13);
}

double quadrature_form(double s, double n, double eps) {
    if (s == 1.0)
        return 0.0;
    if (eps == 0.0) {
        // degenerate mobility: only s > 0 is quadrature-reachable
        if (s < 0.0)
            return kInf;
        if (s == 0.0) {
            if (std::fabs(n - 1.0) < kCaseBoundaryTol)
                return 1.0;
            if (n < 2.0)
                return 1.0 / (2.0 - n);
            return kInf;
        }
        return segment_integral(s, 1.0, s, n, eps);
    }
    if (s >= 0.0)
        return segment_integral(s, 1.0, s, n, eps);
    // f_eps is the constant eps on t < 0; that part integrates exactly
    return segment_integral(s, 1.0, 0.0, n, eps) + s * s / (2.0 * eps);
}

}  // namespace

double mobility(double s, const MobilitySpec& spec) {
    const double sp = s > 0.0 ? s : 0.0;
    return std::pow(sp, spec.n) + spec.epsilon;
}

EntropyFn EntropyFn::for_mobility(const MobilitySpec& spec) {
    EntropyFn fn;
    fn.n = spec.n;
    fn.epsilon = spec.epsilon;
    fn.method = spec.epsilon == 0.0 ? EntropyMethod::closed_form : EntropyMethod::quadrature;
    return fn;
}

double entropy_value(double s, const EntropyFn& fn) {
    if (fn.n < 1.0)
        throw std::invalid_argument("entropy_value: n < 1 unsupported");
    if (!std::isfinite(s))
        return kInf;
    if (fn.method == EntropyMethod::closed_form) {
        if (fn.epsilon != 0.0)
            throw std::invalid_argument("entropy_value: closed forms require eps = 0");
        return closed_form(s, fn.n);
    }
    return quadrature_form(s, fn.n, fn.epsilon);
}

double entropy_total(const GridField& u, const EntropyFn& fn) {
    const int M = u.n_points();
    if (M < 1)
        throw std::invalid_argument("entropy_total: empty grid");
    double acc = 0.0;
    for (double v : u.values) {
        const double g = entropy_value(v, fn);
        if (g == kInf)
            return kInf;
        acc += g;
    }
    return acc / M;
}

}  // namespace fracfilm
