#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "stepcross/blocksum.hpp"
#include "stepcross/cross.hpp"
#include "stepcross/kernels.hpp"
#include "stepcross/util.hpp"

namespace stepcross {

// Uniform sample tensor over [-L, L)^d, N samples per coordinate (power of
// two), spacing h = 2L/N, row-major with the last coordinate fastest.
// Carrier for the discrete-transform multiplier pipeline; grid results are
// periodizations of the continuous objects, so every report derived from a
// grid carries an O(1/L)-per-coordinate aliasing disclaimer.
struct SampledGrid {
    int d = 1;
    double L = 1.0;
    std::size_t N = 2;
    std::vector<double> values;

    double spacing() const { return 2.0 * L / static_cast<double>(N); }
    std::size_t total() const {
        std::size_t t = 1;
        for (int j = 0; j < d; ++j) t *= N;
        return t;
    }
    double coord(std::size_t i) const { return -L + static_cast<double>(i) * spacing(); }
    // grid frequency of DFT bin k (bins are k/(2L), k = -N/2 .. N/2-1)
    double freq(std::size_t k) const {
        const auto ks = static_cast<std::ptrdiff_t>(k) < static_cast<std::ptrdiff_t>(N / 2)
                            ? static_cast<std::ptrdiff_t>(k)
                            : static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(N);
        return static_cast<double>(ks) / (2.0 * L);
    }
};

namespace detail {

inline void fft_radix2(std::vector<std::complex<double>>& a, bool invert) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (invert ? 1.0 : -1.0);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (invert)
        for (auto& x : a) x /= static_cast<double>(n);
}

// d-dimensional transform by axis passes over an N^d tensor.
inline void fft_nd(std::vector<std::complex<double>>& a, int d, std::size_t N, bool invert) {
    std::size_t total = a.size();
    for (int axis = d - 1; axis >= 0; --axis) {
        std::size_t stride = 1;
        for (int j = axis + 1; j < d; ++j) stride *= N;
        const std::size_t lines = total / N;
        std::vector<std::complex<double>> line(N);
        for (std::size_t l = 0; l < lines; ++l) {
            // origin of line l along `axis`
            const std::size_t block = l / stride;
            const std::size_t offset = l % stride;
            const std::size_t base = block * stride * N + offset;
            for (std::size_t i = 0; i < N; ++i) line[i] = a[base + i * stride];
            fft_radix2(line, invert);
            for (std::size_t i = 0; i < N; ++i) a[base + i * stride] = line[i];
        }
    }
}

inline void decompose_index(std::size_t flat, int d, std::size_t N, std::vector<std::size_t>& idx) {
    for (int j = d - 1; j >= 0; --j) {
        idx[j] = flat % N;
        flat /= N;
    }
}

}  // namespace detail

// Pointwise samples of a BlockSum. Errors out (stating the required N) when
// the grid cannot represent the content band 2^{max scale}.
inline SampledGrid sample(const BlockSum& f, double L, std::size_t N) {
    if (!is_pow2(N)) throw std::invalid_argument("sample: N must be a power of two");
    if (!(L > 0.0)) throw std::invalid_argument("sample: L must be positive");
    const int ms = std::max(f.max_scale(), 0);
    const double band = std::ldexp(1.0, ms);
    if (static_cast<double>(N) / (4.0 * L) < band) {
        const auto need = next_pow2(static_cast<std::size_t>(std::ceil(4.0 * L * band)));
        throw std::invalid_argument("sample: Nyquist violation for band 2^" + std::to_string(ms) +
                                    " on [-" + format_double(L) + "," + format_double(L) +
                                    "); need N >= " + std::to_string(need));
    }
    SampledGrid g;
    g.d = f.dim();
    g.L = L;
    g.N = N;
    g.values.resize(g.total());
    const std::size_t total = g.total();
    std::vector<std::size_t> idx(g.d);
    std::vector<double> x(g.d);
    for (std::size_t flat = 0; flat < total; ++flat) {
        detail::decompose_index(flat, g.d, N, idx);
        for (int j = 0; j < g.d; ++j) x[j] = g.coord(idx[j]);
        g.values[flat] = f.eval(x);
    }
    return g;
}

inline double grid_linf(const SampledGrid& g) {
    double m = 0.0;
    for (double v : g.values) m = std::max(m, std::fabs(v));
    return m;
}

inline double grid_lp(const SampledGrid& g, double p) {
    if (std::isinf(p)) return grid_linf(g);
    std::vector<double> tmp(g.values.size());
    for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] = std::pow(std::fabs(g.values[i]), p);
    double cell = 1.0;
    for (int j = 0; j < g.d; ++j) cell *= g.spacing();
    return std::pow(cell * pairwise_sum(tmp), 1.0 / p);
}

namespace detail {

// forward transform -> multiply by symbol(lambda) -> inverse transform.
// Real output is asserted (residue relative to the input peak), never
// silently truncated: a large imaginary part means a broken multiplier.
template <typename Symbol>
SampledGrid apply_symbol(const SampledGrid& g, Symbol&& symbol) {
    std::vector<std::complex<double>> a(g.values.begin(), g.values.end());
    detail::fft_nd(a, g.d, g.N, false);
    const std::size_t total = a.size();
    std::vector<std::size_t> idx(g.d);
    std::vector<double> lam(g.d);
    for (std::size_t flat = 0; flat < total; ++flat) {
        detail::decompose_index(flat, g.d, g.N, idx);
        for (int j = 0; j < g.d; ++j) lam[j] = g.freq(idx[j]);
        a[flat] *= symbol(lam);
    }
    detail::fft_nd(a, g.d, g.N, true);
    double residue = 0.0;
    for (const auto& z : a) residue = std::max(residue, std::fabs(z.imag()));
    const double ref = std::max(1.0, grid_linf(g));
    if (residue > 1e-10 * ref)
        throw std::runtime_error("grid multiplier: imaginary residue " + format_double(residue) +
                                 " exceeds threshold");
    SampledGrid out = g;
    for (std::size_t i = 0; i < total; ++i) out.values[i] = a[i].real();
    return out;
}

}  // namespace detail

// Sharp projection: indicator of the dyadic block Q*_{2^s} on the discrete
// frequencies (half-open boundary, ties resolved by the binary exponent).
inline SampledGrid delta_star(const SampledGrid& g, const MultiIndex& s) {
    check_dims(s.size(), static_cast<std::size_t>(g.d), "delta_star");
    return detail::apply_symbol(g, [&](const std::vector<double>& lam) {
        return block_contains(s, lam) ? 1.0 : 0.0;
    });
}

// Smooth block: multiply by the trapezoid-difference multiplier.
inline SampledGrid vp_block(const SampledGrid& g, const MultiIndex& s) {
    check_dims(s.size(), static_cast<std::size_t>(g.d), "vp_block");
    return detail::apply_symbol(g, [&](const std::vector<double>& lam) {
        return block_multiplier(s, lam);
    });
}

// Cross truncation: one pass with the union indicator of Q_n^gamma
// (equivalent to summing delta_star over the cross; blocks are disjoint).
// Idempotent.
inline SampledGrid project_sharp(const SampledGrid& g, const CrossSpec& spec) {
    validate_cross_spec(spec);
    check_dims(spec.gamma.size(), static_cast<std::size_t>(g.d), "project_sharp");
    return detail::apply_symbol(g, [&](const std::vector<double>& lam) {
        double acc = 0.0;
        for (std::size_t j = 0; j < lam.size(); ++j)
            acc += spec.gamma[j] * dyadic_block_index(lam[j]);
        return acc <= static_cast<double>(spec.n) ? 1.0 : 0.0;
    });
}

// || (sum_s |delta_s g|^2)^{1/2} ||_p / ||g||_p over every block the grid can
// hold. Must be 1 (to 1e-8) at p = 2 by Plancherel and block disjointness;
// other p are report-only diagnostics. The zero grid returns 1 by convention.
inline double littlewood_paley_ratio(const SampledGrid& g, double p = 2.0) {
    const double gnorm = grid_lp(g, p);
    if (gnorm == 0.0) return 1.0;
    const int smax = dyadic_block_index(static_cast<double>(g.N) / (4.0 * g.L));
    std::vector<double> sq(g.values.size(), 0.0);
    MultiIndex s(g.d, 0);
    auto rec = [&](auto&& self, int j) -> void {
        if (j == g.d) {
            SampledGrid block = delta_star(g, s);
            for (std::size_t i = 0; i < sq.size(); ++i) sq[i] += block.values[i] * block.values[i];
            return;
        }
        for (int v = 0; v <= smax; ++v) {
            s[j] = v;
            self(self, j + 1);
        }
    };
    rec(rec, 0);
    SampledGrid root = g;
    for (std::size_t i = 0; i < sq.size(); ++i) root.values[i] = std::sqrt(sq[i]);
    return grid_lp(root, p) / gnorm;
}

// --- header JSON + raw little-endian float64 sidecar payload ---

inline void write_grid(const SampledGrid& g, const std::string& header_path,
                       const std::string& payload_path) {
    static_assert(std::endian::native == std::endian::little,
                  "grid payload writer assumes a little-endian host");
    nlohmann::json h = {{"d", g.d}, {"L", g.L}, {"N", g.N}, {"payload", payload_path}};
    std::ofstream hf(header_path);
    if (!hf) throw std::runtime_error("write_grid: cannot open " + header_path);
    hf << h.dump(2) << '\n';
    std::ofstream pf(payload_path, std::ios::binary);
    if (!pf) throw std::runtime_error("write_grid: cannot open " + payload_path);
    pf.write(reinterpret_cast<const char*>(g.values.data()),
             static_cast<std::streamsize>(g.values.size() * sizeof(double)));
}

inline SampledGrid read_grid(const std::string& header_path) {
    std::ifstream hf(header_path);
    if (!hf) throw std::runtime_error("read_grid: cannot open " + header_path);
    nlohmann::json h = nlohmann::json::parse(hf);
    SampledGrid g;
    g.d = h.at("d").get<int>();
    g.L = h.at("L").get<double>();
    g.N = h.at("N").get<std::size_t>();
    if (g.d < 1 || !is_pow2(g.N)) throw std::runtime_error("read_grid: invalid header");
    std::filesystem::path payload = h.at("payload").get<std::string>();
    if (payload.is_relative()) payload = std::filesystem::path(header_path).parent_path() / payload;
    std::ifstream pf(payload, std::ios::binary);
    if (!pf) throw std::runtime_error("read_grid: cannot open payload " + payload.string());
    g.values.resize(g.total());
    pf.read(reinterpret_cast<char*>(g.values.data()),
            static_cast<std::streamsize>(g.values.size() * sizeof(double)));
    if (static_cast<std::size_t>(pf.gcount()) != g.values.size() * sizeof(double))
        throw std::runtime_error("read_grid: payload shorter than header promises");
    return g;
}

}  // namespace stepcross
