#pragma once

#include <cmath>
#include <numbers>

#include "stepcross/multiindex.hpp"

namespace stepcross {

// ---------------------------------------------------------------------------
// Trapezoid multipliers and dyadic frequency blocks
// ---------------------------------------------------------------------------

// Even piecewise-linear multiplier: 1 on |lambda| < 2^{m-1}, linear ramp to 0
// at 2^m. m = 0 is the unit triangle, m = -1 is identically zero.
inline double trapezoid_multiplier(int m, double lambda) {
    if (m < 0) return 0.0;
    const double a = std::fabs(lambda);
    if (m == 0) return a <= 1.0 ? 1.0 - a : 0.0;
    const double top = std::ldexp(1.0, m);  // 2^m
    if (a < 0.5 * top) return 1.0;
    if (a <= top) return 2.0 * (1.0 - a / top);
    return 0.0;
}

// Per-coordinate difference k_{s_j} - k_{s_j-1}; factor j is supported on
// 2^{s_j-2} <= |lambda_j| <= 2^{s_j} (on |lambda_j| <= 1 for s_j = 0).
inline double block_multiplier(const MultiIndex& s, const std::vector<double>& lambda) {
    check_dims(s.size(), lambda.size(), "block_multiplier");
    double prod = 1.0;
    for (std::size_t j = 0; j < s.size(); ++j)
        prod *= trapezoid_multiplier(s[j], lambda[j]) - trapezoid_multiplier(s[j] - 1, lambda[j]);
    return prod;
}

// Dyadic annulus eta(s_j) 2^{s_j-1} <= |lambda_j| < 2^{s_j} per coordinate,
// eta(0) = 0. Blocks for distinct s are disjoint and tile all of R^d.
inline bool block_contains(const MultiIndex& s, const std::vector<double>& lambda) {
    check_dims(s.size(), lambda.size(), "block_contains");
    for (std::size_t j = 0; j < s.size(); ++j) {
        const double a = std::fabs(lambda[j]);
        if (s[j] == 0) {
            if (!(a < 1.0)) return false;
        } else {
            const double hi = std::ldexp(1.0, s[j]);
            if (!(a >= 0.5 * hi && a < hi)) return false;
        }
    }
    return true;
}

// Label of the unique dyadic block containing lambda, computed through the
// binary exponent so powers of two land on the correct (half-open) side.
inline int dyadic_block_index(double lambda) {
    const double a = std::fabs(lambda);
    if (a < 1.0) return 0;
    int e = 0;
    std::frexp(a, &e);  // a = mant * 2^e, mant in [0.5, 1)  =>  a in [2^{e-1}, 2^e)
    return e;
}

// ---------------------------------------------------------------------------
// The kernel profile and de la Vallee Poussin block kernels
// ---------------------------------------------------------------------------

// Normalized kernel profile
//   G(t) = sin^2(t) (2 cos 2t + 1) (cos 2t + cos 4t - 1) / t^2,
// with the removable singularity G(0) = 3. Every per-coordinate kernel
// factor at scale s >= 1 is the dilation 2^{s-2} G(pi 2^{s-2} x), so all
// L_p norms of single blocks reduce to one-dimensional facts about G.
// |G(t)| <= 9/t^2 for t != 0, and sup |G| = G(0) = 3 (confirmed numerically
// in the test suite before the constant is relied on).
inline double kernel_profile(double t) {
    if (std::fabs(t) < 1e-4) return 3.0 - 35.0 * t * t;  // quadratic Taylor surrogate
    const double st = std::sin(t);
    const double c2 = std::cos(2.0 * t);
    const double c4 = std::cos(4.0 * t);
    return st * st * (2.0 * c2 + 1.0) * (c2 + c4 - 1.0) / (t * t);
}

inline constexpr double kernel_profile_at_zero = 3.0;
inline constexpr double kernel_profile_sup = 3.0;       // = G(0); see tests
inline constexpr double kernel_profile_envelope = 9.0;  // |G(t)| <= 9/t^2

// Fejer kernel sin^2(pi x) / (pi x)^2, the scale-0 factor (inverse transform
// of the unit triangle multiplier). Value 1 at x = 0.
inline double fejer_factor(double x) {
    const double u = std::numbers::pi * x;
    if (std::fabs(u) < 1e-4) return 1.0 - u * u / 3.0;
    const double s = std::sin(u);
    return s * s / (u * u);
}

// One coordinate factor of the block kernel:
//   s = 0 : Fejer kernel, value 1 at the origin;
//   s >= 1: 2^{s-2} G(pi 2^{s-2} x), value 3 * 2^{s-2} at the origin.
// The s >= 1 branch is exactly self-similar across scales. For s >= 2 it
// coincides with the transform of the multiplier difference k_s - k_{s-1};
// at s = 1 it is instead the dyadic dilation of the s = 2 factor, whose
// frequency symbol is (k_2 - k_1)(2 lambda) (see vp_factor_multiplier).
inline double vp_factor(int s, double x) {
    if (s == 0) return fejer_factor(x);
    const double z = std::ldexp(x, s - 2);  // 2^{s-2} x
    return std::ldexp(kernel_profile(std::numbers::pi * z), s - 2);
}

// Frequency symbol of vp_factor: the dilation family (k_2 - k_1)(2^{2-s} .)
// for s >= 1, which equals k_s - k_{s-1} for every s >= 2, and the triangle
// k_0 for s = 0. Supported on [2^{s-2}, 2^s] for s >= 2 and on [1/2, 2]
// for s = 1.
inline double vp_factor_multiplier(int s, double lambda) {
    if (s == 0) return trapezoid_multiplier(0, lambda);
    const double u = std::ldexp(lambda, 2 - s);
    return trapezoid_multiplier(2, u) - trapezoid_multiplier(1, u);
}

// Block kernel: tensor product of the per-coordinate factors. Even in every
// coordinate; value at the origin is the product of the factor peaks.
inline double vp_kernel(const MultiIndex& s, const std::vector<double>& x) {
    check_dims(s.size(), x.size(), "vp_kernel");
    double prod = 1.0;
    for (std::size_t j = 0; j < s.size(); ++j) prod *= vp_factor(s[j], x[j]);
    return prod;
}

// Peak (and supremum) of |vp_factor(s, .)|: 3 * 2^{s-2} for s >= 1, 1 for
// s = 0, both attained at the origin.
inline double vp_factor_peak(int s) {
    return s == 0 ? 1.0 : std::ldexp(kernel_profile_sup, s - 2);
}

// Envelope constant B with |vp_factor(s, x)| <= B / x^2.
inline double vp_factor_envelope(int s) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    if (s == 0) return 1.0 / pi2;
    return kernel_profile_envelope / (pi2 * std::ldexp(1.0, s - 2));
}

}  // namespace stepcross
