#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "stepcross/multiindex.hpp"
#include "stepcross/util.hpp"

namespace stepcross {

// Step hyperbolic cross {s in Z_+^d : (s, gamma) <= n}. alt_gamma is the
// auxiliary direction gamma' used by the Lemma-Г style tail sums: it agrees
// with gamma on the minimal coordinates and sits strictly between 1 and
// gamma_j elsewhere.
struct CrossSpec {
    std::vector<double> gamma;
    int n = 0;
    std::optional<std::vector<double>> alt_gamma;

    int dim() const { return static_cast<int>(gamma.size()); }
};

inline void validate_cross_spec(const CrossSpec& spec) {
    if (spec.gamma.empty()) throw std::invalid_argument("cross: gamma must have d >= 1");
    double mn = spec.gamma[0];
    for (double g : spec.gamma) {
        if (!(g >= 1.0)) throw std::invalid_argument("cross: gamma entries must be >= 1");
        mn = std::min(mn, g);
    }
    if (mn != 1.0) throw std::invalid_argument("cross: min gamma entry must equal 1");
    if (spec.n < 0) throw std::invalid_argument("cross: n must be >= 0");
    if (spec.alt_gamma) {
        const auto& a = *spec.alt_gamma;
        check_dims(a.size(), spec.gamma.size(), "cross alt_gamma");
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (spec.gamma[j] == 1.0) {
                if (a[j] != 1.0)
                    throw std::invalid_argument("cross: alt_gamma must equal gamma on minimal coordinates");
            } else if (!(a[j] > 1.0 && a[j] < spec.gamma[j])) {
                throw std::invalid_argument("cross: alt_gamma must satisfy 1 < alt_gamma_j < gamma_j");
            }
        }
    }
}

namespace detail {

template <typename Visit>
void walk_cross(const std::vector<double>& gamma, double budget, MultiIndex& s,
                std::size_t j, Visit&& visit) {
    if (j == gamma.size()) {
        visit(s);
        return;
    }
    for (int v = 0;; ++v) {
        const double cost = v * gamma[j];
        if (cost > budget) break;
        s[j] = v;
        walk_cross(gamma, budget - cost, s, j + 1, visit);
    }
    s[j] = 0;
}

}  // namespace detail

// All s with (s, gamma) <= n, in lexicographic order (the DFS below emits
// them sorted by construction).
inline std::vector<MultiIndex> enumerate_cross(const CrossSpec& spec) {
    validate_cross_spec(spec);
    std::vector<MultiIndex> out;
    MultiIndex s(spec.gamma.size(), 0);
    detail::walk_cross(spec.gamma, static_cast<double>(spec.n), s, 0,
                       [&](const MultiIndex& v) { out.push_back(v); });
    return out;
}

// The layer ||s||_1 = m, lexicographic; C(m+d-1, d-1) elements.
inline std::vector<MultiIndex> enumerate_layer(int d, int m) {
    if (d < 1) throw std::invalid_argument("enumerate_layer: d must be >= 1");
    if (m < 0) throw std::invalid_argument("enumerate_layer: m must be >= 0");
    std::vector<MultiIndex> out;
    MultiIndex s(d, 0);
    // lexicographic DFS over compositions of m into d parts
    auto rec = [&](auto&& self, int j, int rem) -> void {
        if (j == d - 1) {
            s[j] = rem;
            out.push_back(s);
            return;
        }
        for (int v = 0; v <= rem; ++v) {
            s[j] = v;
            self(self, j + 1, rem - v);
        }
    };
    rec(rec, 0, m);
    return out;
}

// Sum over {s : (s, constraint_gamma) >= n} of 2^{-alpha (s, weight_gamma)},
// truncated with certified absolute error <= tol. Shells are the l1 layers
// ||s||_1 = m, summed in ascending m with a fixed lexicographic inner order;
// the remainder past the last shell is bounded by a geometric comparison
// (every s on layer m has (s, weight) >= m because min weight = 1).
inline double lacunary_tail_sum(const std::vector<double>& weight_gamma,
                                const std::vector<double>& constraint_gamma,
                                double alpha, int n, double tol) {
    if (!(alpha > 0.0)) throw std::invalid_argument("lacunary_tail_sum: alpha must be > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("lacunary_tail_sum: tol must be > 0");
    check_dims(weight_gamma.size(), constraint_gamma.size(), "lacunary_tail_sum");
    CrossSpec wcheck{weight_gamma, std::max(n, 0), std::nullopt};
    validate_cross_spec(wcheck);
    CrossSpec ccheck{constraint_gamma, std::max(n, 0), std::nullopt};
    validate_cross_spec(ccheck);

    const int d = static_cast<int>(weight_gamma.size());
    const double ratio_base = std::exp2(-alpha);
    std::vector<double> shell_sums;
    double layer_bound = 0.0;
    int m = 0;
    for (;; ++m) {
        const auto layer = enumerate_layer(d, m);
        std::vector<double> terms;
        terms.reserve(layer.size());
        for (const auto& s : layer) {
            if (dot(constraint_gamma, s) >= static_cast<double>(n))
                terms.push_back(std::exp2(-alpha * dot(weight_gamma, s)));
        }
        shell_sums.push_back(pairwise_sum(terms));
        // Remainder bound: layers m' > m contribute at most
        // C(m'+d-1, d-1) 2^{-alpha m'}, a ratio-tested geometric tail.
        layer_bound = static_cast<double>(layer.size()) * std::exp2(-alpha * m);
        const double grow = std::pow(static_cast<double>(m + d) / (m + 1), d - 1);
        const double rho = grow * ratio_base;
        if (m >= n && rho < 1.0) {
            const double tail = layer_bound * grow * ratio_base / (1.0 - rho);
            if (tail <= tol) break;
        }
        if (m > 100000) throw std::runtime_error("lacunary_tail_sum: failed to converge");
    }
    return pairwise_sum(shell_sums);
}

}  // namespace stepcross
