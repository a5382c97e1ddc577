// Regularized mobility f_eps(s) = max(s,0)^n + eps and the entropy function
//
//   G_eps(s) = int_1^s int_1^r dt dr / f_eps(t),   G_eps(1) = G_eps'(1) = 0,
//
// which is convex with G_eps'' = 1/f_eps. For eps = 0 the closed forms are
//
//   n = 1     : s ln s - s + 1
//   1 < n < 2 : -s^{2-n}/((2-n)(n-1)) + s/(n-1) + 1/(2-n)
//   n = 2     : ln(1/s) + s - 1
//   n > 2     : s^{-(n-2)}/((n-2)(n-1)) + s/(n-1) - 1/(n-2)
//
// with G(s) = +inf for s < 0 (and at s = 0 when n >= 2). For eps > 0 the
// double integral collapses to int_1^s (s-t)/f_eps(t) dt, evaluated by
// adaptive Gauss-Kronrod quadrature.

#ifndef FRACFILM_ENTROPY_HPP
#define FRACFILM_ENTROPY_HPP

#include "fracfilm/spectral_field.hpp"

namespace fracfilm {

struct MobilitySpec {
    double n = 1.0;       // mobility exponent, n >= 1
    double epsilon = 0.0; // regularization strength, >= 0
};

// f_eps(s) = max(s,0)^n + eps
double mobility(double s, const MobilitySpec& spec);

enum class EntropyMethod { closed_form, quadrature };

struct EntropyFn {
    double n = 1.0;
    double epsilon = 0.0;
    EntropyMethod method = EntropyMethod::closed_form;

    // closed_form when eps == 0, quadrature otherwise
    static EntropyFn for_mobility(const MobilitySpec& spec);
};

// G_eps(s); returns +inf where the entropy blows up.
double entropy_value(double s, const EntropyFn& fn);

// Midpoint quadrature of int G_eps(u); +inf poisons the sum.
double entropy_total(const GridField& u, const EntropyFn& fn);

}  // namespace fracfilm

#endif
