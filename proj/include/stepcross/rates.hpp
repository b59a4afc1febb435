#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stepcross/extremal.hpp"
#include "stepcross/norms.hpp"
#include "stepcross/smoothness.hpp"

namespace stepcross {

struct RateRow {
    int n = 0;
    double error = 0.0;
    double predicted = 0.0;
    double ratio = 0.0;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
};

struct RateReport {
    std::vector<RateRow> rows;
    double fitted_slope = 0.0;
    double fit_intercept = 0.0;
    double residual_rms = 0.0;
    double ratio_spread = 1.0;
    double log_power = 0.0;  // the exponent held fixed in the fit
    nlohmann::json params;   // echo of the run parameters
};

// Theoretical decay: 2^{-n(r1-1)} n^{(nu-1)(1-1/theta)} for q = inf, and
// 2^{-n(r1-1+1/q)} n^{(nu-1)(1/q-1/theta)_+} for finite q. Hypotheses are
// checked and named in the error.
inline double predicted_rate(const SmoothnessProfile& profile, double theta, double q, int n) {
    if (n < 1) throw std::invalid_argument("predicted_rate: n must be >= 1");
    if (!(theta >= 1.0)) throw std::invalid_argument("predicted_rate: theta must be >= 1");
    const double r1 = profile.r_min;
    const double nu = profile.nu;
    const double inv_theta = std::isinf(theta) ? 0.0 : 1.0 / theta;
    double decay = 0.0, power = 0.0;
    if (std::isinf(q)) {
        if (!(r1 > 1.0))
            throw std::domain_error("predicted_rate: hypothesis r_1 > 1 fails (r_1 = " +
                                    format_double(r1) + ")");
        decay = r1 - 1.0;
        power = (nu - 1.0) * (1.0 - inv_theta);
    } else {
        if (!(q > 1.0)) throw std::invalid_argument("predicted_rate: q must be in (1, inf) or inf");
        if (!(r1 > 1.0 - 1.0 / q))
            throw std::domain_error("predicted_rate: hypothesis r_1 > 1 - 1/q fails (r_1 = " +
                                    format_double(r1) + ", q = " + format_double(q) + ")");
        decay = r1 - 1.0 + 1.0 / q;
        power = (nu - 1.0) * std::max(1.0 / q - inv_theta, 0.0);
    }
    const double npow = power == 0.0 ? 1.0 : std::pow(static_cast<double>(n), power);
    return std::exp2(-decay * n) * npow;
}

// Fixed-log-power least squares: log2 error = a n + b log2 n + c with b
// given; returns a, c and the residual RMS.
inline RateFit fit_rate(const std::vector<RateRow>& rows, double fixed_log_power) {
    if (rows.size() < 4) throw std::invalid_argument("fit_rate: need at least 4 rows");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(rows.size());
    for (const auto& r : rows) {
        const double x = r.n;
        const double y = std::log2(r.error) - fixed_log_power * std::log2(static_cast<double>(r.n));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = m * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fit_rate: degenerate design (all n equal)");
    RateFit fit;
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    double rss = 0.0;
    for (const auto& r : rows) {
        const double y = std::log2(r.error) - fixed_log_power * std::log2(static_cast<double>(r.n));
        const double e = y - fit.slope * r.n - fit.intercept;
        rss += e * e;
    }
    fit.residual_rms = std::sqrt(rss / m);
    return fit;
}

namespace detail {

inline double spread(const std::vector<RateRow>& rows) {
    double lo = rows.front().ratio, hi = lo;
    for (const auto& r : rows) {
        lo = std::min(lo, r.ratio);
        hi = std::max(hi, r.ratio);
    }
    return hi / lo;
}

inline void finish_report(RateReport& rep, double log_power) {
    rep.log_power = log_power;
    const RateFit fit = fit_rate(rep.rows, log_power);
    rep.fitted_slope = fit.slope;
    rep.fit_intercept = fit.intercept;
    rep.residual_rms = fit.residual_rms;
    rep.ratio_spread = spread(rep.rows);
}

}  // namespace detail

// Sup-norm truncation-error experiment: build the level-n extremal function,
// check that the cross projection annihilates it, measure ||f||_inf, compare
// with the predicted order.
inline RateReport run_theorem1(const SmoothnessProfile& profile, double theta, int n_lo, int n_hi,
                               int sup_resolution = 16, int sup_refine = 24) {
    if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("run_theorem1: bad n range");
    if (!(profile.r_min > 1.0))
        throw std::domain_error("run_theorem1: hypothesis r_1 > 1 fails (r_1 = " +
                                format_double(profile.r_min) + ")");
    if (profile.nu != profile.dim())
        throw std::domain_error("run_theorem1: lower-bound regime needs gamma = 1 (nu = d)");
    const ExtremalKind kind =
        std::isinf(theta) ? ExtremalKind::layer_sup : ExtremalKind::layer_theta;
    RateReport rep;
    for (int n = n_lo; n <= n_hi; ++n) {
        ExtremalSpec spec{profile, theta, n, kind, std::nullopt};
        const BlockSum f = make_extremal(spec);
        const CrossSpec cross{std::vector<double>(profile.dim(), 1.0), n, std::nullopt};
        if (!project_cross(f, cross).empty())
            throw std::logic_error("run_theorem1: cross projection failed to annihilate the layer");
        RateRow row;
        row.n = n;
        row.error = sup_norm(f, sup_resolution, sup_refine);
        row.predicted = predicted_rate(profile, theta, inf, n);
        row.ratio = row.error / row.predicted;
        rep.rows.push_back(row);
    }
    const double inv_theta = std::isinf(theta) ? 0.0 : 1.0 / theta;
    detail::finish_report(rep, (profile.nu - 1.0) * (1.0 - inv_theta));
    rep.params = {{"experiment", "theorem1"},
                  {"d", profile.dim()},
                  {"r", profile.r},
                  {"theta", std::isinf(theta) ? nlohmann::json("inf") : nlohmann::json(theta)},
                  {"q", "inf"},
                  {"kind", to_string(kind)},
                  {"sup_resolution", sup_resolution},
                  {"sup_refine", sup_refine}};
    return rep;
}

// L_q truncation-error experiment; the extremal kind follows the proof's
// case split on theta versus q.
inline RateReport run_theorem2(const SmoothnessProfile& profile, double theta, double q, int n_lo,
                               int n_hi, const QuadratureSpec& quad = {}) {
    if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("run_theorem2: bad n range");
    if (!(q > 1.0) || std::isinf(q))
        throw std::invalid_argument("run_theorem2: q must lie in (1, inf)");
    if (!(profile.r_min > 1.0 - 1.0 / q))
        throw std::domain_error("run_theorem2: hypothesis r_1 > 1 - 1/q fails (r_1 = " +
                                format_double(profile.r_min) + ", q = " + format_double(q) + ")");
    if (profile.nu != profile.dim())
        throw std::domain_error("run_theorem2: lower-bound regime needs gamma = 1 (nu = d)");
    ExtremalKind kind = ExtremalKind::single;
    if (std::isinf(theta))
        kind = ExtremalKind::layer_sup;
    else if (theta > q)
        kind = ExtremalKind::layer_theta;
    RateReport rep;
    for (int n = n_lo; n <= n_hi; ++n) {
        ExtremalSpec spec{profile, theta, n, kind, std::nullopt};
        const BlockSum f = make_extremal(spec);
        const CrossSpec cross{std::vector<double>(profile.dim(), 1.0), n, std::nullopt};
        if (!project_cross(f, cross).empty())
            throw std::logic_error("run_theorem2: cross projection failed to annihilate the layer");
        RateRow row;
        row.n = n;
        row.error = lq_norm(f, q, quad).value;
        row.predicted = predicted_rate(profile, theta, q, n);
        row.ratio = row.error / row.predicted;
        rep.rows.push_back(row);
    }
    const double inv_theta = std::isinf(theta) ? 0.0 : 1.0 / theta;
    detail::finish_report(rep, (profile.nu - 1.0) * std::max(1.0 / q - inv_theta, 0.0));
    rep.params = {{"experiment", "theorem2"},
                  {"d", profile.dim()},
                  {"r", profile.r},
                  {"theta", std::isinf(theta) ? nlohmann::json("inf") : nlohmann::json(theta)},
                  {"q", q},
                  {"kind", to_string(kind)},
                  {"quad_box", quad.box_halfwidth},
                  {"quad_ppw", quad.points_per_wavelength}};
    return rep;
}

// Normalized-ratio bracket over a set of indices: min, max and max/min of
// block_norm(s) / 2^{||s||_1 (1 - 1/p)} (1/inf = 0 gives the sup-norm case).
struct BracketReport {
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    double bracket = 1.0;
};

inline BracketReport verify_lemma_brackets(const std::vector<MultiIndex>& s_set, double p) {
    if (s_set.empty()) throw std::invalid_argument("verify_lemma_brackets: empty index set");
    BracketReport rep;
    bool first = true;
    for (const auto& s : s_set) {
        const double invp = std::isinf(p) ? 0.0 : 1.0 / p;
        const double nrm = std::isinf(p) ? block_sup_norm(s) : block_lp_norm(s, p);
        const double ratio = nrm * std::exp2(-l1_norm(s) * (1.0 - invp));
        if (first) {
            rep.min_ratio = rep.max_ratio = ratio;
            first = false;
        } else {
            rep.min_ratio = std::min(rep.min_ratio, ratio);
            rep.max_ratio = std::max(rep.max_ratio, ratio);
        }
    }
    rep.bracket = rep.max_ratio / rep.min_ratio;
    return rep;
}

// --- report serialization (fixed order, 17 significant digits) ---

inline std::string to_csv(const RateReport& rep) {
    std::ostringstream os;
    os << "n,error,predicted,ratio\n";
    for (const auto& r : rep.rows)
        os << r.n << ',' << format_double(r.error) << ',' << format_double(r.predicted) << ','
           << format_double(r.ratio) << '\n';
    return os.str();
}

inline nlohmann::json to_json(const RateReport& rep) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : rep.rows)
        rows.push_back(
            {{"n", r.n}, {"error", r.error}, {"predicted", r.predicted}, {"ratio", r.ratio}});
    return {{"params", rep.params},
            {"rows", std::move(rows)},
            {"fitted_slope", rep.fitted_slope},
            {"fit_intercept", rep.fit_intercept},
            {"residual_rms", rep.residual_rms},
            {"ratio_spread", rep.ratio_spread},
            {"log_power", rep.log_power}};
}

}  // namespace stepcross
