// Command-line surface for the step-hyperbolic-cross library: index-set
// enumeration, kernel and norm evaluation, lemma bracket verification, rate
// experiments, and sharp grid decomposition. Emits CSV or JSON.
//
// Exit codes: 0 success, 2 usage/validation error, 3 a verification bracket
// was exceeded (math disagrees; distinct code for CI consumption).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stepcross/gridpath.hpp"
#include "stepcross/rates.hpp"

using nlohmann::json;
using namespace stepcross;

namespace {

struct BracketExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_extended(const std::string& tok, const char* what) {
    if (tok == "inf") return inf;
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw CLI::ValidationError(std::string(what) + ": expected a decimal number or 'inf', got '" + tok + "'");
    }
}

template <typename T>
std::vector<T> parse_list(const std::string& csv, const char* what) {
    std::vector<T> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            if constexpr (std::is_same_v<T, int>)
                out.push_back(std::stoi(tok));
            else
                out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw CLI::ValidationError(std::string(what) + ": bad list entry '" + tok + "'");
        }
    }
    if (out.empty()) throw CLI::ValidationError(std::string(what) + ": empty list");
    return out;
}

void emit(const std::string& text, const std::string& output) {
    if (output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(output, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + output);
    f << text;
}

std::string bracket_rows_csv(const std::vector<std::array<double, 2>>& rows) {
    std::ostringstream os;
    os << "n,ratio\n";
    for (const auto& r : rows)
        os << static_cast<int>(r[0]) << ',' << format_double(r[1]) << '\n';
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"step hyperbolic cross approximation toolkit"};
    app.set_config("--config", "", "key = value config file; flags override it");
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "cap on parallel work units (0 = hardware default)");

    std::string format = "csv";
    std::string output;
    app.add_option("--format", format, "output format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--output", output, "write output to this path instead of stdout");

    // --- cross enum ---
    auto* cross_cmd = app.add_subcommand("cross", "index-set operations");
    auto* enum_cmd = cross_cmd->add_subcommand("enum", "enumerate the step hyperbolic cross");
    int enum_d = 1, enum_n = 0;
    std::string enum_gamma;
    enum_cmd->add_option("--d", enum_d, "dimension")->required();
    enum_cmd->add_option("--gamma", enum_gamma, "direction vector, comma separated")->required();
    enum_cmd->add_option("--n", enum_n, "cross level")->required();

    // --- kernel eval / norm ---
    auto* kernel_cmd = app.add_subcommand("kernel", "block kernel evaluation and norms");
    auto* keval = kernel_cmd->add_subcommand("eval", "evaluate the block kernel at a point");
    std::string keval_s, keval_x;
    keval->add_option("--s", keval_s, "block index, comma separated")->required();
    keval->add_option("--x", keval_x, "evaluation point, comma separated")->required();
    auto* knorm = kernel_cmd->add_subcommand("norm", "L_p norm of a block kernel");
    std::string knorm_s, knorm_p;
    double knorm_tol = 0.0;
    knorm->add_option("--s", knorm_s, "block index, comma separated")->required();
    knorm->add_option("--p", knorm_p, "exponent (decimal or 'inf')")->required();
    knorm->add_option("--tol", knorm_tol,
                      "also cross-check against quadrature within this extra tolerance");

    // --- verify ---
    auto* verify_cmd = app.add_subcommand("verify", "lemma bracket verification");
    auto* vl1 = verify_cmd->add_subcommand("lemma1", "sup-norm constancy of single blocks");
    auto* vl2 = verify_cmd->add_subcommand("lemma2", "L_p norm constancy of single blocks");
    int v_d = 2, v_smax = 8;
    std::string v_p = "1";
    for (auto* sc : {vl1, vl2}) {
        sc->add_option("--d", v_d, "dimension");
        sc->add_option("--smax", v_smax, "largest per-coordinate scale");
    }
    vl2->add_option("--p", v_p, "norm exponent")->required();
    auto* vlv = verify_cmd->add_subcommand("lemma-v", "lacunary tail sum order (constraint = weight)");
    auto* vlg = verify_cmd->add_subcommand("lemma-g", "lacunary tail sum order (constraint = gamma')");
    int v_nmin = 5, v_nmax = 12;
    double v_alpha = 1.0;
    std::string v_gamma, v_alt_gamma;
    for (auto* sc : {vlv, vlg}) {
        sc->add_option("--d", v_d, "dimension");
        sc->add_option("--gamma", v_gamma, "weight direction, comma separated")->required();
        sc->add_option("--alpha", v_alpha, "decay exponent (> 0)");
        sc->add_option("--nmin", v_nmin, "first level");
        sc->add_option("--nmax", v_nmax, "last level");
    }
    vlg->add_option("--alt-gamma", v_alt_gamma, "constraint direction gamma'")->required();

    // --- rates ---
    auto* rates_cmd = app.add_subcommand("rates", "truncation-error rate experiments");
    auto* rt1 = rates_cmd->add_subcommand("theorem1", "sup-norm rates");
    auto* rt2 = rates_cmd->add_subcommand("theorem2", "L_q rates");
    std::string rt_r, rt_theta = "1", rt_q = "2";
    int rt_nmin = 4, rt_nmax = 10;
    int sup_res = 16, sup_refine = 24;
    double quad_L = 16.0;
    int quad_res = 32;
    for (auto* sc : {rt1, rt2}) {
        sc->add_option("--r", rt_r, "smoothness vector, comma separated")->required();
        sc->add_option("--theta", rt_theta, "theta (decimal or 'inf')");
        sc->add_option("--nmin", rt_nmin, "first level");
        sc->add_option("--nmax", rt_nmax, "last level");
    }
    rt1->add_option("--sup-res", sup_res, "sup search resolution (points per period)");
    rt1->add_option("--sup-refine", sup_refine, "sup search polish steps");
    rt2->add_option("--q", rt_q, "target metric exponent")->required();
    rt2->add_option("--quad-L", quad_L, "quadrature box half-width");
    rt2->add_option("--quad-res", quad_res, "quadrature points per wavelength");

    // --- grid decompose ---
    auto* grid_cmd = app.add_subcommand("grid", "sampled-grid operations");
    auto* gdec = grid_cmd->add_subcommand("decompose", "sharp cross projection and residual report");
    std::string g_input, g_gamma, g_save;
    int g_n = 0;
    gdec->add_option("--input", g_input, "grid header JSON")->required();
    gdec->add_option("--gamma", g_gamma, "cross direction, comma separated")->required();
    gdec->add_option("--n", g_n, "cross level")->required();
    gdec->add_option("--save", g_save, "write the projected grid to this header path");

    CLI11_PARSE(app, argc, argv);
    thread_cap().store(threads);

    try {
        if (*enum_cmd) {
            const auto gamma = parse_list<double>(enum_gamma, "--gamma");
            if (static_cast<int>(gamma.size()) != enum_d)
                throw std::invalid_argument("--gamma length must match --d");
            const auto idx = enumerate_cross({gamma, enum_n, std::nullopt});
            if (format == "json") {
                json j = json::array();
                for (const auto& s : idx) j.push_back(s);
                emit(j.dump(2) + "\n", output);
            } else {
                std::ostringstream os;
                for (const auto& s : idx) {
                    for (std::size_t j = 0; j < s.size(); ++j)
                        os << (j ? "," : "") << s[j];
                    os << '\n';
                }
                emit(os.str(), output);
            }
        } else if (*keval) {
            const auto s = parse_list<int>(keval_s, "--s");
            const auto x = parse_list<double>(keval_x, "--x");
            const double v = vp_kernel(s, x);
            if (format == "json")
                emit(json{{"s", s}, {"x", x}, {"value", v}}.dump(2) + "\n", output);
            else
                emit(format_double(v) + "\n", output);
        } else if (*knorm) {
            const auto s = parse_list<int>(knorm_s, "--s");
            const double p = parse_extended(knorm_p, "--p");
            const double nrm = std::isinf(p) ? block_sup_norm(s) : block_lp_norm(s, p);
            json j = {{"s", s}, {"p", std::isinf(p) ? json("inf") : json(p)}, {"value", nrm}};
            if (knorm->count("--tol") && !std::isinf(p)) {
                BlockSum f(static_cast<int>(s.size()));
                f.add_term(s, 1.0);
                const NormResult qr = lq_norm(f, p, {}, LqMethod::quadrature);
                j["quadrature"] = qr.value;
                j["quadrature_tail_bound"] = qr.tail_bound;
                j["quadrature_discretization"] = qr.discretization_estimate;
                const double budget = qr.tail_bound + qr.discretization_estimate + knorm_tol;
                if (std::fabs(qr.value - nrm) > budget)
                    throw BracketExceeded("kernel norm: quadrature disagrees with the scale-reduced value by " +
                                          format_double(std::fabs(qr.value - nrm)) +
                                          " (budget " + format_double(budget) + ")");
            }
            if (format == "json")
                emit(j.dump(2) + "\n", output);
            else
                emit(format_double(nrm) + "\n", output);
        } else if (*vl1 || *vl2) {
            const double p = *vl1 ? inf : parse_extended(v_p, "--p");
            std::vector<MultiIndex> set;
            MultiIndex s(v_d, 1);
            auto rec = [&](auto&& self, int j) -> void {
                if (j == v_d) {
                    set.push_back(s);
                    return;
                }
                for (int v = 1; v <= v_smax; ++v) {
                    s[j] = v;
                    self(self, j + 1);
                }
            };
            rec(rec, 0);
            const auto rep = verify_lemma_brackets(set, p);
            const double threshold = *vl1 ? 1.05 : 1.01;
            json j = {{"min_ratio", rep.min_ratio},
                      {"max_ratio", rep.max_ratio},
                      {"bracket", rep.bracket},
                      {"threshold", threshold}};
            emit(format == "json" ? j.dump(2) + "\n"
                                  : "bracket," + format_double(rep.bracket) + "\n",
                 output);
            if (rep.bracket > threshold)
                throw BracketExceeded("lemma bracket " + format_double(rep.bracket) +
                                      " exceeds threshold " + format_double(threshold));
        } else if (*vlv || *vlg) {
            const auto gamma = parse_list<double>(v_gamma, "--gamma");
            if (static_cast<int>(gamma.size()) != v_d)
                throw std::invalid_argument("--gamma length must match --d");
            std::vector<double> constraint = gamma;
            int nu = v_d;
            if (*vlg) {
                constraint = parse_list<double>(v_alt_gamma, "--alt-gamma");
                CrossSpec chk{gamma, std::max(v_nmin, 0), constraint};
                validate_cross_spec(chk);
                nu = static_cast<int>(std::count(gamma.begin(), gamma.end(), 1.0));
            }
            const double power = *vlv ? v_d - 1.0 : nu - 1.0;
            std::vector<std::array<double, 2>> rows;
            double lo = 0.0, hi = 0.0;
            for (int n = v_nmin; n <= v_nmax; ++n) {
                const double sum = lacunary_tail_sum(gamma, constraint, v_alpha, n, 1e-13);
                const double ref = std::exp2(-v_alpha * n) *
                                   (power == 0.0 ? 1.0 : std::pow(static_cast<double>(n), power));
                const double ratio = sum / ref;
                rows.push_back({static_cast<double>(n), ratio});
                lo = lo == 0.0 ? ratio : std::min(lo, ratio);
                hi = std::max(hi, ratio);
            }
            const double bracket = hi / lo;
            const double threshold = *vlv ? 1.6 : 2.0;
            if (format == "json") {
                json jr = json::array();
                for (const auto& r : rows) jr.push_back({{"n", static_cast<int>(r[0])}, {"ratio", r[1]}});
                emit(json{{"rows", jr}, {"bracket", bracket}, {"threshold", threshold}}.dump(2) + "\n",
                     output);
            } else {
                emit(bracket_rows_csv(rows), output);
            }
            if (bracket > threshold)
                throw BracketExceeded("lacunary bracket " + format_double(bracket) +
                                      " exceeds threshold " + format_double(threshold));
        } else if (*rt1 || *rt2) {
            const auto r = parse_list<double>(rt_r, "--r");
            const auto profile = analyze_smoothness(r);
            const double theta = parse_extended(rt_theta, "--theta");
            RateReport rep;
            if (*rt1) {
                rep = run_theorem1(profile, theta, rt_nmin, rt_nmax, sup_res, sup_refine);
            } else {
                const double q = parse_extended(rt_q, "--q");
                QuadratureSpec quad;
                quad.box_halfwidth = quad_L;
                quad.points_per_wavelength = quad_res;
                rep = run_theorem2(profile, theta, q, rt_nmin, rt_nmax, quad);
            }
            emit(format == "json" ? to_json(rep).dump(2) + "\n" : to_csv(rep), output);
        } else if (*gdec) {
            const auto gamma = parse_list<double>(g_gamma, "--gamma");
            const SampledGrid g = read_grid(g_input);
            if (static_cast<int>(gamma.size()) != g.d)
                throw std::invalid_argument("--gamma length must match the grid dimension");
            const CrossSpec spec{gamma, g_n, std::nullopt};
            const SampledGrid proj = project_sharp(g, spec);
            SampledGrid resid = g;
            for (std::size_t i = 0; i < resid.values.size(); ++i)
                resid.values[i] -= proj.values[i];
            const double g2 = grid_lp(g, 2.0), ginf = grid_linf(g);
            json j = {{"n", g_n},
                      {"gamma", gamma},
                      {"l2_residual_rel", g2 == 0.0 ? 0.0 : grid_lp(resid, 2.0) / g2},
                      {"linf_residual_rel", ginf == 0.0 ? 0.0 : grid_linf(resid) / ginf},
                      {"note", "grid results are periodizations on [-L,L)^d; aliasing decays like 1/L per coordinate"}};
            if (!g_save.empty()) write_grid(proj, g_save, g_save + ".f64");
            emit(j.dump(2) + "\n", output);
        }
    } catch (const BracketExceeded& e) {
        std::cerr << "verification failed: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
