#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "stepcross/blocksum.hpp"
#include "stepcross/cross.hpp"
#include "stepcross/norms.hpp"
#include "stepcross/smoothness.hpp"

namespace stepcross {

// The three coefficient patterns behind the lower-bound functions: a full
// layer with the theta-dependent log factor, a full layer without it, and a
// single block on the layer. All live on ||s||_1 = n + 1, so the cross
// projection at level n kills them exactly.
enum class ExtremalKind { layer_theta, layer_sup, single };

inline const char* to_string(ExtremalKind k) {
    switch (k) {
        case ExtremalKind::layer_theta: return "layer_theta";
        case ExtremalKind::layer_sup: return "layer_sup";
        case ExtremalKind::single: return "single";
    }
    return "?";
}

struct ExtremalSpec {
    SmoothnessProfile profile;  // requires nu = d (gamma identically 1)
    double theta = 1.0;
    int n = 1;
    ExtremalKind kind = ExtremalKind::single;
    std::optional<MultiIndex> block_override;  // custom s~ for kind = single
};

inline void validate_extremal_spec(const ExtremalSpec& spec) {
    if (spec.n < 1) throw std::invalid_argument("extremal: n must be >= 1");
    if (!(spec.theta >= 1.0)) throw std::invalid_argument("extremal: theta must be >= 1");
    if (spec.profile.nu != spec.profile.dim())
        throw std::invalid_argument(
            "extremal: profile must have nu = d (all smoothness coordinates equal)");
    if (std::isinf(spec.theta) && spec.kind == ExtremalKind::layer_theta)
        throw std::invalid_argument(
            "extremal: layer_theta is undefined at theta = inf; use kind = layer_sup");
    if (spec.block_override) {
        if (spec.kind != ExtremalKind::single)
            throw std::invalid_argument("extremal: block_override applies to kind = single only");
        check_multiindex(*spec.block_override);
        check_dims(spec.block_override->size(), static_cast<std::size_t>(spec.profile.dim()),
                   "extremal block_override");
        if (l1_norm(*spec.block_override) != spec.n + 1)
            throw std::invalid_argument("extremal: block_override must lie on the layer n + 1");
    }
}

// Coefficients exactly as printed (normalization constant 1). The default
// single block puts the whole layer budget on the first coordinate.
inline BlockSum make_extremal_raw(const ExtremalSpec& spec) {
    validate_extremal_spec(spec);
    const int d = spec.profile.dim();
    const double r1 = spec.profile.r_min;
    BlockSum f(d);
    switch (spec.kind) {
        case ExtremalKind::layer_theta: {
            const double coef =
                std::exp2(-spec.n * r1) * std::pow(static_cast<double>(spec.n), -(d - 1) / spec.theta);
            for (const auto& s : enumerate_layer(d, spec.n + 1)) f.add_term(s, coef);
            break;
        }
        case ExtremalKind::layer_sup: {
            const double coef = std::exp2(-spec.n * r1);
            for (const auto& s : enumerate_layer(d, spec.n + 1)) f.add_term(s, coef);
            break;
        }
        case ExtremalKind::single: {
            MultiIndex s(d, 0);
            s[0] = spec.n + 1;
            if (spec.block_override) s = *spec.block_override;
            f.add_term(s, std::exp2(-r1 * spec.n));
            break;
        }
    }
    return f;
}

// Raw pattern rescaled so that the surrogate decomposition norm at p = 1
// equals 1 exactly; class membership becomes an equality and the rate
// constants are reproducible.
inline BlockSum make_extremal(const ExtremalSpec& spec) {
    BlockSum f = make_extremal_raw(spec);
    const double nrm = surrogate_besov_norm(f, spec.profile, spec.theta, 1.0);
    f.scale(1.0 / nrm);
    return f;
}

}  // namespace stepcross
