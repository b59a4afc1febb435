#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "stepcross/cross.hpp"
#include "stepcross/kernels.hpp"
#include "stepcross/multiindex.hpp"

namespace stepcross {

// Finite linear combination sum_s c_s * vp_kernel(s, .), the exact carrier
// for the extremal functions. Terms are kept in a lexicographically ordered
// map with zero coefficients removed, so the representation is canonical.
class BlockSum {
public:
    explicit BlockSum(int d) : d_(d) {
        if (d < 1) throw std::invalid_argument("BlockSum: d must be >= 1");
    }

    int dim() const { return d_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    const std::map<MultiIndex, double>& terms() const { return terms_; }

    void add_term(const MultiIndex& s, double c) {
        check_multiindex(s);
        check_dims(s.size(), static_cast<std::size_t>(d_), "BlockSum::add_term");
        auto [it, inserted] = terms_.try_emplace(s, c);
        if (!inserted) it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }

    void scale(double a) {
        if (a == 0.0) {
            terms_.clear();
            return;
        }
        for (auto& [s, c] : terms_) c *= a;
    }

    // Largest coordinate scale over all terms; -1 for the empty sum.
    int max_scale() const {
        int m = -1;
        for (const auto& [s, c] : terms_)
            for (int v : s) m = std::max(m, v);
        return m;
    }

    double eval(const std::vector<double>& x) const {
        check_dims(x.size(), static_cast<std::size_t>(d_), "BlockSum::eval");
        double acc = 0.0;
        for (const auto& [s, c] : terms_) acc += c * vp_kernel(s, x);
        return acc;
    }

private:
    int d_;
    std::map<MultiIndex, double> terms_;
};

// Keeps exactly the terms with (s, gamma) <= n; a pure filter, coefficients
// are never rescaled. Idempotent.
inline BlockSum project_cross(const BlockSum& f, const CrossSpec& spec) {
    validate_cross_spec(spec);
    check_dims(spec.gamma.size(), static_cast<std::size_t>(f.dim()), "project_cross");
    BlockSum out(f.dim());
    for (const auto& [s, c] : f.terms())
        if (dot(spec.gamma, s) <= static_cast<double>(spec.n)) out.add_term(s, c);
    return out;
}

// --- JSON document {"d": int, "terms": [{"c": real, "s": [int,...]}, ...]} ---
// Writers emit terms sorted lexicographically by s; readers accept any order
// (and duplicate indices, which are merged) and canonicalize.

inline nlohmann::json to_json(const BlockSum& f) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [s, c] : f.terms())
        terms.push_back({{"c", c}, {"s", s}});
    return {{"d", f.dim()}, {"terms", std::move(terms)}};
}

inline BlockSum blocksum_from_json(const nlohmann::json& j) {
    BlockSum f(j.at("d").get<int>());
    for (const auto& t : j.at("terms")) {
        MultiIndex s = t.at("s").get<MultiIndex>();
        f.add_term(s, t.at("c").get<double>());
    }
    return f;
}

}  // namespace stepcross
