#pragma once

#include <numeric>
#include <stdexcept>
#include <vector>

namespace stepcross {

// Dyadic scale label s in Z_+^d, one scale per coordinate.
using MultiIndex = std::vector<int>;

inline int l1_norm(const MultiIndex& s) {
    return std::accumulate(s.begin(), s.end(), 0);
}

inline void check_multiindex(const MultiIndex& s) {
    if (s.empty()) throw std::invalid_argument("multi-index must have d >= 1");
    for (int v : s)
        if (v < 0) throw std::invalid_argument("multi-index entries must be >= 0");
}

inline void check_dims(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string("dimension mismatch in ") + what);
}

// Lexicographic order; used as the canonical term order everywhere.
struct LexLess {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const {
        return a < b;  // std::vector already compares lexicographically
    }
};

inline double dot(const std::vector<double>& w, const MultiIndex& s) {
    double acc = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) acc += w[j] * s[j];
    return acc;
}

}  // namespace stepcross
