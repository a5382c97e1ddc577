// Singular-integral realization of I on (0,1):
//
//   I(u)(x) = int_0^1 (u(y) - u(x)) K(x,y) dy,
//   K(x,y)  = c_a sum_{k in Z} ( |x-y-2k|^{-1-a} + |x+y-2k|^{-1-a} ),
//
// the even 2-periodic image expansion of the fractional Laplacian kernel.
// The normalization c_a = 2^a Gamma((1+a)/2) / (sqrt(pi) |Gamma(-a/2)|) is
// the one for which (-d^2/dx^2)^{a/2} cos(k pi x) = (k pi)^a cos(k pi x) on
// the line, so this module must agree with the spectral operator; that
// agreement is verified, not assumed. Used as an oracle only -- the time
// stepper never touches it.

#ifndef FRACFILM_INTEGRAL_KERNEL_HPP
#define FRACFILM_INTEGRAL_KERNEL_HPP

#include "fracfilm/spectral_field.hpp"

namespace fracfilm {

double kernel_normalization(double alpha);

struct KernelParams {
    double alpha;    // in (0,2)
    int k_max;       // image-sum truncation, |k| <= k_max
    double c_alpha;  // > 0

    static KernelParams make(double alpha, int k_max);
};

// Truncated kernel sum; symmetric in (x,y) exactly in arithmetic.
// x == y is an error (the k = 0 direct term is singular there).
double kernel_eval(double x, double y, const KernelParams& p);

// Bound on the discarded |k| > k_max part of the kernel sum for x,y in (0,1).
double kernel_tail_bound(const KernelParams& p);

// Midpoint quadrature of the singular integral with singularity subtraction:
// the direct |x-y|^{-1-a} term is dropped on cells within delta = 1/quad_points
// of x and replaced by the analytic integral of its second-order Taylor
// expansion, leaving an O(delta^{2-a}) local error. u must be band-limited
// (it is evaluated spectrally, including u' and u'' at x).
double apply_I_integral(const SpectralField& u, double x, const KernelParams& p, int quad_points);

}  // namespace fracfilm

#endif
