#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "stepcross/blocksum.hpp"
#include "stepcross/kernels.hpp"
#include "stepcross/smoothness.hpp"
#include "stepcross/util.hpp"

namespace stepcross {

inline constexpr double inf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Exact integrals of piecewise-linear multiplier products (frequency side)
// ---------------------------------------------------------------------------

namespace detail {

// Integrates fa*fb over R for even piecewise-linear fa, fb: merge the
// breakpoints, apply Simpson on each piece (exact for the quadratic
// product), double for evenness.
inline double pl_product_integral(const std::function<double(double)>& fa,
                                  std::vector<double> breaks_a,
                                  const std::function<double(double)>& fb,
                                  std::vector<double> breaks_b) {
    std::vector<double> pts;
    pts.reserve(breaks_a.size() + breaks_b.size() + 1);
    pts.push_back(0.0);
    pts.insert(pts.end(), breaks_a.begin(), breaks_a.end());
    pts.insert(pts.end(), breaks_b.begin(), breaks_b.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double l = pts[i], r = pts[i + 1], m = 0.5 * (l + r);
        acc += (r - l) / 6.0 * (fa(l) * fb(l) + 4.0 * fa(m) * fb(m) + fa(r) * fb(r));
    }
    return 2.0 * acc;
}

inline std::vector<double> kdiff_breaks(int m) {
    if (m == 0) return {0.0, 1.0};
    if (m == 1) return {0.0, 1.0, 2.0};
    return {std::ldexp(1.0, m - 2), std::ldexp(1.0, m - 1), std::ldexp(1.0, m)};
}

// vp_factor_multiplier breakpoints: [2^{s-2}, 2^{s-1}, 2^s] for every s >= 1.
inline std::vector<double> vp_mult_breaks(int s) {
    if (s == 0) return {0.0, 1.0};
    return {std::ldexp(1.0, s - 2), std::ldexp(1.0, s - 1), std::ldexp(1.0, s)};
}

}  // namespace detail

// Integral over R of (k_a - k_{a-1})(k_b - k_{b-1}); exact. Zero whenever
// |a - b| >= 2 (disjoint supports). Diagonal values: 2/3 (a=0), 4/3 (a=1),
// 2^{a-1} for a >= 2.
inline double multiplier_product_integral(int a, int b) {
    auto fa = [a](double l) { return trapezoid_multiplier(a, l) - trapezoid_multiplier(a - 1, l); };
    auto fb = [b](double l) { return trapezoid_multiplier(b, l) - trapezoid_multiplier(b - 1, l); };
    return detail::pl_product_integral(fa, detail::kdiff_breaks(a), fb, detail::kdiff_breaks(b));
}

inline double multiplier_l2sq(int m) { return multiplier_product_integral(m, m); }

// Gram integral of the kernel-factor symbols (the family vp_factor actually
// transforms to): exact, cached. Diagonal is 2^{a-1} for every a >= 1.
inline double vp_gram(int a, int b) {
    if (a > b) std::swap(a, b);
    static std::map<std::pair<int, int>, double> cache;
    static std::mutex mtx;
    std::lock_guard lock(mtx);
    auto it = cache.find({a, b});
    if (it != cache.end()) return it->second;
    double v = 0.0;
    if (b - a < 2) {
        auto fa = [a](double l) { return vp_factor_multiplier(a, l); };
        auto fb = [b](double l) { return vp_factor_multiplier(b, l); };
        v = detail::pl_product_integral(fa, detail::vp_mult_breaks(a), fb, detail::vp_mult_breaks(b));
    }
    cache[{a, b}] = v;
    return v;
}

// ---------------------------------------------------------------------------
// One-dimensional reference constants (cached per process)
// ---------------------------------------------------------------------------

namespace detail {

// Gauss-Legendre nodes/weights on [-1, 1], computed once by Newton iteration.
inline const std::array<std::array<double, 2>, 20>& gauss20() {
    static const auto table = [] {
        std::array<std::array<double, 2>, 20> t{};
        const int n = 20;
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-15) break;
            }
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            t[i] = {x, w};
            t[n - 1 - i] = {-x, w};
        }
        return t;
    }();
    return table;
}

template <typename F>
double gauss_piece(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (const auto& [x, w] : gauss20()) acc += w * f(mid + half * x);
    return acc * half;
}

// sum_{k >= K} k^{-a}: explicit head plus midpoint integral remainder.
inline double zeta_tail(int K, double a) {
    double acc = 0.0;
    const int M = 4096;
    for (int k = K + M - 1; k >= K; --k) acc += std::pow(static_cast<double>(k), -a);
    acc += std::pow(K + M - 0.5, 1.0 - a) / (a - 1.0);
    return acc;
}

// || f ||_{L_p(R)} for an even function whose numerator is periodic with the
// given period and piece offsets (smooth-sign pieces), and which decays like
// (envelope / t^2): integrate K periods piecewise with Gauss rules, bracket
// the remainder by the one-period numerator mass times power-sum brackets.
inline double periodic_decay_lp_norm(const std::function<double(double)>& absf_p,
                                     const std::function<double(double)>& numerator_abs_p,
                                     double period, const std::vector<double>& offsets,
                                     double p) {
    // one-period numerator mass (for the tail bracket)
    double cP = 0.0;
    for (std::size_t i = 0; i + 1 < offsets.size(); ++i)
        cP += gauss_piece(numerator_abs_p, offsets[i], offsets[i + 1]);

    int K = 256;
    double head = 0.0;
    int done = 0;
    double value_p = 0.0;
    for (;;) {
        for (int k = done; k < K; ++k)
            for (std::size_t i = 0; i + 1 < offsets.size(); ++i)
                head += gauss_piece(absf_p, k * period + offsets[i], k * period + offsets[i + 1]);
        done = K;
        const double scale = std::pow(period, -2.0 * p);
        const double hi = cP * scale * zeta_tail(K, 2.0 * p);
        const double lo = cP * scale * zeta_tail(K + 1, 2.0 * p);
        value_p = 2.0 * (head + 0.5 * (lo + hi));
        if (hi - lo < 1e-10 * std::max(1.0, value_p) || K >= 131072) break;
        K *= 2;
    }
    return std::pow(value_p, 1.0 / p);
}

}  // namespace detail

// ||G||_{L_p(R)} for the kernel profile; cached per p.
inline double profile_lp_norm(double p) {
    if (!(p >= 1.0) || !std::isfinite(p))
        throw std::invalid_argument("profile_lp_norm: p must be finite and >= 1");
    static std::map<double, double> cache;
    static std::mutex mtx;
    std::lock_guard lock(mtx);
    if (auto it = cache.find(p); it != cache.end()) return it->second;

    // Sign-change roots of the numerator within one period [0, pi]:
    // 2 cos 2t + 1 = 0 at pi/3, 2pi/3; cos 2t + cos 4t - 1 = 0 at t0, pi-t0.
    const double t0 = 0.5 * std::acos((std::sqrt(17.0) - 1.0) / 4.0);
    const double pi = std::numbers::pi;
    const std::vector<double> offsets = {0.0, t0, pi / 3.0, 2.0 * pi / 3.0, pi - t0, pi};
    auto absf_p = [p](double t) { return std::pow(std::fabs(kernel_profile(t)), p); };
    auto num_p = [p](double t) {
        const double st = std::sin(t), c2 = std::cos(2.0 * t), c4 = std::cos(4.0 * t);
        return std::pow(std::fabs(st * st * (2.0 * c2 + 1.0) * (c2 + c4 - 1.0)), p);
    };
    const double v = detail::periodic_decay_lp_norm(absf_p, num_p, pi, offsets, p);
    cache[p] = v;
    return v;
}

// ||K_0||_{L_p(R)} for the Fejer factor; cached. Equals 1 at p = 1 and
// sqrt(2/3) at p = 2 (both verified against closed forms in the tests).
inline double fejer_lp_norm(double p) {
    if (!(p >= 1.0) || !std::isfinite(p))
        throw std::invalid_argument("fejer_lp_norm: p must be finite and >= 1");
    static std::map<double, double> cache;
    static std::mutex mtx;
    std::lock_guard lock(mtx);
    if (auto it = cache.find(p); it != cache.end()) return it->second;
    auto absf_p = [p](double x) { return std::pow(fejer_factor(x), p); };
    auto num_p = [p](double x) {
        const double s = std::sin(std::numbers::pi * x);
        return std::pow(s * s / (std::numbers::pi * std::numbers::pi), p);
    };
    const double v = detail::periodic_decay_lp_norm(absf_p, num_p, 1.0, {0.0, 1.0}, p);
    cache[p] = v;
    return v;
}

// ---------------------------------------------------------------------------
// Block norms (scale-reduced, exact by self-similarity)
// ---------------------------------------------------------------------------

// Per-coordinate L_p norm constants: c1(p) for scales >= 1, c0(p) at scale 0.
inline double block_factor_constant(double p) {
    return std::pow(2.0, -2.0 * (1.0 - 1.0 / p)) * std::pow(std::numbers::pi, -1.0 / p) *
           profile_lp_norm(p);
}

// Exact L_p norm of the block kernel at index s:
//   prod_j rho_j,  rho_j = c1(p) 2^{s_j (1 - 1/p)}  (s_j >= 1),  c0(p)  (s_j = 0).
// The scale factor is exact because every s_j >= 1 factor is a dilation of
// the one profile G; only the 1-d reference constant carries quadrature error.
inline double block_lp_norm(const MultiIndex& s, double p) {
    if (!(p >= 1.0) || !std::isfinite(p))
        throw std::invalid_argument("block_lp_norm: p must be finite and >= 1");
    check_multiindex(s);
    const double c0 = fejer_lp_norm(p);
    const double c1 = block_factor_constant(p);
    double prod = 1.0;
    for (int v : s)
        prod *= v == 0 ? c0 : c1 * std::exp2(v * (1.0 - 1.0 / p));
    return prod;
}

// Exact sup norm: prod_j (3 * 2^{s_j - 2} or 1), attained at the origin.
inline double block_sup_norm(const MultiIndex& s) {
    check_multiindex(s);
    double prod = 1.0;
    for (int v : s) prod *= vp_factor_peak(v);
    return prod;
}

// Exact L_2 norm of a BlockSum through the frequency side: the cross Gram
// integrals factor per coordinate, so
//   ||f||_2^2 = sum_{s,s'} c_s c_{s'} prod_j vp_gram(s_j, s'_j),
// with only |s_j - s'_j| <= 1 interactions surviving.
inline double blocksum_l2_norm(const BlockSum& f) {
    double acc = 0.0;
    for (const auto& [s, c] : f.terms()) {
        for (const auto& [t, e] : f.terms()) {
            double prod = c * e;
            for (std::size_t j = 0; j < s.size() && prod != 0.0; ++j)
                prod *= vp_gram(s[j], t[j]);
            acc += prod;
        }
    }
    return std::sqrt(std::max(acc, 0.0));
}

// ---------------------------------------------------------------------------
// Surrogate decomposition norm for block sums
// ---------------------------------------------------------------------------

// ( sum_s 2^{(s,r) theta} (|c_s| ||A_s||_p)^theta )^{1/theta}, sup for
// theta = inf. This is the per-term norm the extremal-function arguments
// compute with (frequency leakage between neighbouring terms is ignored by
// construction); the true-block comparison lives in gridpath diagnostics.
inline double surrogate_besov_norm(const BlockSum& f, const SmoothnessProfile& profile,
                                   double theta, double p) {
    if (!(theta >= 1.0)) throw std::invalid_argument("surrogate_besov_norm: theta must be >= 1");
    if (!(p >= 1.0)) throw std::invalid_argument("surrogate_besov_norm: p must be >= 1");
    check_dims(profile.r.size(), static_cast<std::size_t>(f.dim()), "surrogate_besov_norm");
    if (f.empty()) return 0.0;
    std::vector<double> weighted;
    weighted.reserve(f.size());
    for (const auto& [s, c] : f.terms()) {
        const double bn = std::isinf(p) ? block_sup_norm(s) : block_lp_norm(s, p);
        weighted.push_back(std::exp2(dot(profile.r, s)) * std::fabs(c) * bn);
    }
    const double peak = *std::max_element(weighted.begin(), weighted.end());
    if (std::isinf(theta) || peak == 0.0) return peak;
    double acc = 0.0;
    for (double w : weighted) acc += std::pow(w / peak, theta);
    return peak * std::pow(acc, 1.0 / theta);
}

// ---------------------------------------------------------------------------
// Error-controlled L_q norms on R^d
// ---------------------------------------------------------------------------

// Composite-midpoint settings. points_per_wavelength is measured against the
// finest oscillation period of the content per coordinate; tail_tol is the
// certified bound allowed for the mass outside the box, relative to the
// rough scale of the norm (the box half-width escalates until it is met,
// up to box_cap).
struct QuadratureSpec {
    double box_halfwidth = 16.0;
    int points_per_wavelength = 32;
    double tail_tol = 1e-3;
    double box_cap = 4096.0;
};

struct NormResult {
    double value = 0.0;
    double tail_bound = 0.0;
    double discretization_estimate = 0.0;
    double box_used = 0.0;
};

struct TailToleranceError : std::runtime_error {
    double achieved_bound;
    explicit TailToleranceError(double b)
        : std::runtime_error("lq_norm: tail tolerance unreachable at the box cap; achieved bound " +
                             format_double(b)),
          achieved_bound(b) {}
};

enum class LqMethod { automatic, quadrature, exact_l2 };

namespace detail {

inline double factor_period(int s) { return s == 0 ? 1.0 : std::ldexp(1.0, 2 - s); }

// int_{|x| > L} min(A, B/x^2)^q dx (assumes the crossover is inside L when
// L >= sqrt(B/A); handles the other case too).
inline double envelope_tail_1d(double A, double B, double q, double L) {
    const double xc = std::sqrt(B / A);
    if (L >= xc) return 2.0 * std::pow(B, q) * std::pow(L, 1.0 - 2.0 * q) / (2.0 * q - 1.0);
    return 2.0 * (std::pow(A, q) * (xc - L) +
                  std::pow(B, q) * std::pow(xc, 1.0 - 2.0 * q) / (2.0 * q - 1.0));
}

inline double envelope_full_1d(double A, double B, double q) {
    const double xc = std::sqrt(B / A);
    return 2.0 * (std::pow(A, q) * xc +
                  std::pow(B, q) * std::pow(xc, 1.0 - 2.0 * q) / (2.0 * q - 1.0));
}

// Triangle-inequality bound on the L_q norm of f outside [-L, L]^d.
inline double lq_tail_bound(const BlockSum& f, double q, double L) {
    double total = 0.0;
    for (const auto& [s, c] : f.terms()) {
        double mass = 0.0;
        for (std::size_t j = 0; j < s.size(); ++j) {
            double piece = envelope_tail_1d(vp_factor_peak(s[j]), vp_factor_envelope(s[j]), q, L);
            for (std::size_t k = 0; k < s.size(); ++k)
                if (k != j)
                    piece *= envelope_full_1d(vp_factor_peak(s[k]), vp_factor_envelope(s[k]), q);
            mass += piece;
        }
        total += std::fabs(c) * std::pow(mass, 1.0 / q);
    }
    return total;
}

// Fractional positions (within one oscillation period) of the factor's
// sign-change roots; panel boundaries snap to them so every midpoint panel
// sees a smooth integrand. The Fejer factor is nonnegative with no kinks.
inline const std::vector<double>& factor_kink_offsets(int s) {
    static const std::vector<double> none{0.0, 1.0};
    static const std::vector<double> profile = [] {
        const double t0 = 0.5 * std::acos((std::sqrt(17.0) - 1.0) / 4.0) / std::numbers::pi;
        return std::vector<double>{0.0, t0, 1.0 / 3.0, 2.0 / 3.0, 1.0 - t0, 1.0};
    }();
    return s == 0 ? none : profile;
}

// Composite midpoint for int_0^L |vp_factor(s,x)|^q dx: periods in ascending
// order, kink-aligned pieces per period, ~ppw cells per period overall.
inline double factor_lq_box(int s, double q, double L, int ppw) {
    const double X = factor_period(s);
    const auto& offs = factor_kink_offsets(s);
    const std::size_t nperiods = static_cast<std::size_t>(std::ceil(L / X));
    std::vector<double> period_sums(nperiods);
    parallel_for(nperiods, [&](std::size_t k) {
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < offs.size(); ++i) {
            const double lo = (static_cast<double>(k) + offs[i]) * X;
            double hi = (static_cast<double>(k) + offs[i + 1]) * X;
            if (lo >= L) break;
            hi = std::min(hi, L);
            const int cells = std::max(1, static_cast<int>(std::lround(ppw * (offs[i + 1] - offs[i]))));
            const double h = (hi - lo) / cells;
            double piece = 0.0;
            for (int c = 0; c < cells; ++c)
                piece += std::pow(std::fabs(vp_factor(s, lo + (c + 0.5) * h)), q);
            acc += piece * h;
        }
        period_sums[k] = acc;
    });
    return pairwise_sum(period_sums);
}

// Tensor midpoint rule over the positive orthant for a multi-term sum.
inline double tensor_lq_box(const BlockSum& f, double q, double L,
                            const std::vector<double>& w) {
    const int d = f.dim();
    std::vector<std::size_t> npts(d);
    double cells = 1.0;
    for (int j = 0; j < d; ++j) {
        npts[j] = static_cast<std::size_t>(std::ceil(L / w[j]));
        cells *= static_cast<double>(npts[j]);
    }
    if (cells > 1.5e8)
        throw std::runtime_error(
            "lq_norm: tensor quadrature would need " + format_double(cells) +
            " cells; use q = 2 (exact path), a smaller box, or coarser resolution");

    // per-coordinate factor values for every term
    const std::size_t nterms = f.size();
    std::vector<std::vector<std::vector<double>>> fv(d);
    std::vector<double> coef(nterms);
    {
        std::size_t t = 0;
        for (const auto& [s, c] : f.terms()) coef[t++] = c;
    }
    for (int j = 0; j < d; ++j) {
        fv[j].assign(nterms, std::vector<double>(npts[j]));
        std::size_t t = 0;
        for (const auto& [s, c] : f.terms()) {
            for (std::size_t i = 0; i < npts[j]; ++i)
                fv[j][t][i] = vp_factor(s[j], (i + 0.5) * w[j]);
            ++t;
        }
    }

    // outer rows = all coordinates except the last; reduce rows in order
    std::size_t nrows = 1;
    for (int j = 0; j < d - 1; ++j) nrows *= npts[j];
    std::vector<double> row_sums(nrows);
    parallel_for(nrows, [&](std::size_t row) {
        std::vector<std::size_t> idx(d - 1);
        std::size_t rem = row;
        for (int j = d - 2; j >= 0; --j) {
            idx[j] = rem % npts[j];
            rem /= npts[j];
        }
        std::vector<double> wterm(nterms);
        for (std::size_t t = 0; t < nterms; ++t) {
            double x = coef[t];
            for (int j = 0; j < d - 1; ++j) x *= fv[j][t][idx[j]];
            wterm[t] = x;
        }
        const auto& last = fv[d - 1];
        std::vector<double> vals(npts[d - 1]);
        for (std::size_t i = 0; i < npts[d - 1]; ++i) {
            double v = 0.0;
            for (std::size_t t = 0; t < nterms; ++t) v += wterm[t] * last[t][i];
            vals[i] = std::pow(std::fabs(v), q);
        }
        row_sums[row] = pairwise_sum(vals);
    });
    double cellw = 1.0;
    for (int j = 0; j < d; ++j) cellw *= w[j];
    return cellw * pairwise_sum(row_sums);
}

inline double lq_box_value(const BlockSum& f, double q, double L, int ppw) {
    const int d = f.dim();
    if (f.size() == 1) {
        const auto& [s, c] = *f.terms().begin();
        double prod = std::pow(std::fabs(c), q);
        for (int j = 0; j < d; ++j) prod *= 2.0 * factor_lq_box(s[j], q, L, ppw);
        return std::pow(prod, 1.0 / q);
    }
    std::vector<double> w(d, 1.0);
    for (int j = 0; j < d; ++j) {
        double finest = inf;
        for (const auto& [s, c] : f.terms()) finest = std::min(finest, factor_period(s[j]));
        w[j] = finest / ppw;
    }
    return std::pow(std::exp2(d) * tensor_lq_box(f, q, L, w), 1.0 / q);
}

}  // namespace detail

// L_q norm of a BlockSum over R^d. q = 2 has an exact frequency-side path
// (the default); the quadrature path is composite midpoint over the box with
// a certified envelope bound for the omitted tail. The box half-width
// escalates (doubling, up to box_cap) until the analytic tail bound is
// within tail_tol relative to the scale of the norm.
inline NormResult lq_norm(const BlockSum& f, double q, const QuadratureSpec& spec = {},
                          LqMethod method = LqMethod::automatic) {
    if (!(q >= 1.0) || !std::isfinite(q)) throw std::invalid_argument("lq_norm: q must be finite and >= 1");
    if (f.empty()) return {0.0, 0.0, 0.0, spec.box_halfwidth};
    if (method == LqMethod::automatic) method = q == 2.0 ? LqMethod::exact_l2 : LqMethod::quadrature;
    if (method == LqMethod::exact_l2) {
        if (q != 2.0) throw std::invalid_argument("lq_norm: exact_l2 method requires q = 2");
        return {blocksum_l2_norm(f), 0.0, 0.0, 0.0};
    }

    double scale = 0.0;  // rough magnitude of the answer, for the relative tail test
    for (const auto& [s, c] : f.terms())
        scale = std::max(scale, std::fabs(c) * block_lp_norm(s, q));

    double L = spec.box_halfwidth;
    double tail = detail::lq_tail_bound(f, q, L);
    while (tail > spec.tail_tol * scale && L < spec.box_cap) {
        L *= 2.0;
        tail = detail::lq_tail_bound(f, q, L);
    }
    if (tail > spec.tail_tol * scale) throw TailToleranceError(tail);

    const int ppw = std::max(spec.points_per_wavelength, 4);
    const double value = detail::lq_box_value(f, q, L, ppw);
    const double coarse = detail::lq_box_value(f, q, L, std::max(ppw / 2, 2));
    return {value, tail, std::fabs(value - coarse), L};
}

// ---------------------------------------------------------------------------
// Sup-norm lower-bound certificate
// ---------------------------------------------------------------------------

namespace detail {

// Multi-scale search grid per coordinate: for every content scale, points at
// `resolution` per oscillation period, reaching a few periods out; plus the
// origin. Doubling `resolution` refines each scale's points monotonically.
inline std::vector<double> sup_search_points(int max_scale, int resolution) {
    std::vector<double> pts{0.0};
    for (int k = 0; k <= max_scale; ++k) {
        const double h = factor_period(k) / resolution;
        const int reach = (k == 0 ? 8 : 4) * resolution;
        for (int u = 1; u <= reach; ++u) pts.push_back(u * h);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

template <typename F>
double golden_max(F&& fn, double a, double b, int iters) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = fn(x1), f2 = fn(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = fn(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = fn(x1);
        }
    }
    return std::max(f1, f2);
}

}  // namespace detail

// Lower-bound certificate for ||f||_inf: max of |f| over a structured
// multi-scale grid (evenness reduces the search to the positive orthant),
// then coordinate-wise golden-section polish around the best grid point.
// Never decreases when resolution is doubled or refine_steps grows.
inline double sup_norm(const BlockSum& f, int resolution = 16, int refine_steps = 24) {
    if (f.empty()) return 0.0;
    if (resolution < 2) throw std::invalid_argument("sup_norm: resolution must be >= 2");
    const int d = f.dim();
    const auto pts = detail::sup_search_points(f.max_scale(), resolution);
    const std::size_t npts = pts.size();
    const std::size_t nterms = f.size();

    std::vector<double> coef(nterms);
    std::vector<std::vector<std::vector<double>>> fv(d);
    {
        std::size_t t = 0;
        for (const auto& [s, c] : f.terms()) coef[t++] = c;
    }
    for (int j = 0; j < d; ++j) {
        fv[j].assign(nterms, std::vector<double>(npts));
        std::size_t t = 0;
        for (const auto& [s, c] : f.terms()) {
            for (std::size_t i = 0; i < npts; ++i) fv[j][t][i] = vp_factor(s[j], pts[i]);
            ++t;
        }
    }

    std::size_t nrows = 1;
    for (int j = 0; j < d - 1; ++j) nrows *= npts;
    std::vector<std::pair<double, std::size_t>> row_best(nrows);
    parallel_for(nrows, [&](std::size_t row) {
        std::vector<std::size_t> idx(d - 1);
        std::size_t rem = row;
        for (int j = d - 2; j >= 0; --j) {
            idx[j] = rem % npts;
            rem /= npts;
        }
        std::vector<double> wterm(nterms);
        for (std::size_t t = 0; t < nterms; ++t) {
            double x = coef[t];
            for (int j = 0; j < d - 1; ++j) x *= fv[j][t][idx[j]];
            wterm[t] = x;
        }
        double best = -1.0;
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < npts; ++i) {
            double v = 0.0;
            for (std::size_t t = 0; t < nterms; ++t) v += wterm[t] * fv[d - 1][t][i];
            v = std::fabs(v);
            if (v > best) {
                best = v;
                best_i = i;
            }
        }
        row_best[row] = {best, best_i};
    });

    double best = -1.0;
    std::vector<double> argmax(d, 0.0);
    for (std::size_t row = 0; row < nrows; ++row) {
        if (row_best[row].first > best) {
            best = row_best[row].first;
            std::size_t rem = row;
            for (int j = d - 2; j >= 0; --j) {
                argmax[j] = pts[rem % npts];
                rem /= npts;
            }
            argmax[d - 1] = pts[row_best[row].second];
        }
    }

    // coordinate-wise polish; brackets shrink with the local grid spacing
    std::vector<double> x = argmax;
    for (int step = 0; step < refine_steps; ++step) {
        const int j = step % d;
        const double h = std::max(detail::factor_period(f.max_scale()) / resolution,
                                  std::fabs(x[j]) / resolution);
        auto prof = [&](double xj) {
            std::vector<double> y = x;
            y[j] = xj;
            return std::fabs(f.eval(y));
        };
        const double lo = x[j] - h, hi = x[j] + h;
        const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = lo, b = hi;
        double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
        double f1 = prof(x1), f2 = prof(x2);
        for (int it = 0; it < 24; ++it) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = prof(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = prof(x1);
            }
        }
        const double cand = std::max(f1, f2);
        if (cand > best) {
            best = cand;
            x[j] = f1 > f2 ? x1 : x2;
        }
    }
    return best;
}

// Minkowski upper bound sum_s |c_s| ||A_s||_inf, the companion to the
// sup_norm lower-bound certificate.
inline double sup_norm_upper_bound(const BlockSum& f) {
    double acc = 0.0;
    for (const auto& [s, c] : f.terms()) acc += std::fabs(c) * block_sup_norm(s);
    return acc;
}

// ---------------------------------------------------------------------------
// Nikolskii inequality check
// ---------------------------------------------------------------------------

struct NikolskiiResult {
    bool holds = false;
    double lhs = 0.0;    // ||A_s||_q
    double bound = 0.0;  // 2^d (prod 2^{s_j})^{1/p - 1/q} ||A_s||_p
    double slack = 0.0;  // bound / lhs
};

// Different-metrics inequality for the block kernel (exponential type
// nu_j = 2^{s_j} per coordinate).
inline NikolskiiResult nikolskii_check(const MultiIndex& s, double p, double q) {
    if (!(p >= 1.0) || !(q >= p)) throw std::invalid_argument("nikolskii_check: need 1 <= p <= q");
    const int d = static_cast<int>(s.size());
    const double np = std::isinf(p) ? block_sup_norm(s) : block_lp_norm(s, p);
    const double nq = std::isinf(q) ? block_sup_norm(s) : block_lp_norm(s, q);
    const double invp = std::isinf(p) ? 0.0 : 1.0 / p;
    const double invq = std::isinf(q) ? 0.0 : 1.0 / q;
    const double type = std::exp2(static_cast<double>(l1_norm(s)));  // prod 2^{s_j}
    const double bound = std::exp2(static_cast<double>(d)) * std::pow(type, invp - invq) * np;
    NikolskiiResult res;
    res.lhs = nq;
    res.bound = bound;
    res.slack = bound / nq;
    res.holds = nq <= bound * (1.0 + 1e-12);
    return res;
}

}  // namespace stepcross
