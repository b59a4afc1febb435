#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace stepcross {

// Mixed-smoothness vector r together with the derived quantities that drive
// every rate formula: the smallest coordinate r_min, its multiplicity nu,
// and the direction vector gamma_j = r_j / r_min.
struct SmoothnessProfile {
    std::vector<double> r;
    double r_min = 0.0;
    int nu = 0;
    std::vector<double> gamma;

    int dim() const { return static_cast<int>(r.size()); }
};

// nu counts coordinates exactly equal to the minimum. Equality is exact on
// purpose: nu enters rate exponents discretely, so a silent tolerance would
// change the asymptotics. Callers with "nearly equal" minima must pre-round.
inline SmoothnessProfile analyze_smoothness(const std::vector<double>& r) {
    if (r.empty()) throw std::invalid_argument("smoothness vector must have d >= 1");
    for (std::size_t j = 0; j < r.size(); ++j) {
        if (!(r[j] > 0.0))
            throw std::invalid_argument("smoothness vector: coordinate " +
                                        std::to_string(j) + " is not strictly positive");
    }
    SmoothnessProfile p;
    p.r = r;
    p.r_min = *std::min_element(r.begin(), r.end());
    p.nu = static_cast<int>(std::count(r.begin(), r.end(), p.r_min));
    p.gamma.resize(r.size());
    for (std::size_t j = 0; j < r.size(); ++j)
        p.gamma[j] = r[j] == p.r_min ? 1.0 : r[j] / p.r_min;
    return p;
}

// Shifted direction vector (r_j - shift) / (r_min - shift). shift = 0 gives
// gamma back; shift = 1 and shift = 1 - 1/q are the values the two rate
// theorems use. Entries are exactly 1 on the minimal coordinates.
inline std::vector<double> gamma_bar(const SmoothnessProfile& p, double shift) {
    if (!(shift < p.r_min))
        throw std::domain_error("gamma_bar: shift must be < r_min (rate exponent would be non-positive)");
    std::vector<double> out(p.r.size());
    const double denom = p.r_min - shift;
    for (std::size_t j = 0; j < p.r.size(); ++j)
        out[j] = p.r[j] == p.r_min ? 1.0 : (p.r[j] - shift) / denom;
    return out;
}

}  // namespace stepcross
