#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "stepcross/blocksum.hpp"
#include "stepcross/norms.hpp"

using namespace stepcross;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("eval of empty, single and two-term sums") {
    BlockSum empty(1);
    CHECK(empty.eval({0.3}) == 0.0);

    BlockSum single(1);
    single.add_term({3}, 1.0);
    CHECK_THAT(single.eval({0.0}), WithinAbs(6.0, 1e-14));

    BlockSum two(1);
    two.add_term({1}, 1.0);
    two.add_term({2}, 1.0);
    CHECK_THAT(two.eval({0.0}), WithinAbs(4.5, 1e-14));
}

TEST_CASE("eval is linear in the coefficients") {
    BlockSum f(2);
    f.add_term({1, 0}, 0.7);
    f.add_term({2, 3}, -1.3);
    BlockSum g = f;
    g.scale(2.5);
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> xs(-2.0, 2.0);
    for (int i = 0; i < 50; ++i) {
        const std::vector<double> x{xs(rng), xs(rng)};
        CHECK_THAT(g.eval(x), WithinAbs(2.5 * f.eval(x), 1e-12));
    }
}

TEST_CASE("terms merge and zero coefficients vanish") {
    BlockSum f(1);
    f.add_term({2}, 1.5);
    f.add_term({2}, -1.5);
    CHECK(f.empty());
    f.add_term({2}, 0.5);
    f.add_term({2}, 0.25);
    CHECK(f.size() == 1);
    CHECK(f.terms().at({2}) == 0.75);
}

TEST_CASE("project_cross keeps exactly the indices inside the cross") {
    BlockSum layer(2);
    for (int i = 0; i <= 5; ++i) layer.add_term({i, 5 - i}, 1.0);
    CHECK(project_cross(layer, {{1.0, 1.0}, 4, std::nullopt}).empty());

    BlockSum base(2);
    base.add_term({0, 0}, 2.0);
    CHECK(project_cross(base, {{1.0, 1.0}, 0, std::nullopt}).terms() == base.terms());

    BlockSum mixed(2);
    mixed.add_term({2, 0}, 1.0);
    mixed.add_term({0, 3}, 1.0);
    const auto kept = project_cross(mixed, {{1.0, 1.0}, 2, std::nullopt});
    CHECK(kept.size() == 1);
    CHECK(kept.terms().count({2, 0}) == 1);
    CHECK(kept.terms().at({2, 0}) == 1.0);  // a pure filter, never a rescale
}

TEST_CASE("project_cross is idempotent") {
    BlockSum f(2);
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> cs(-2.0, 2.0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) f.add_term({i, j}, cs(rng));
    const CrossSpec spec{{1.0, 1.5}, 3, std::nullopt};
    const auto once = project_cross(f, spec);
    const auto twice = project_cross(once, spec);
    CHECK(once.terms() == twice.terms());
}

TEST_CASE("JSON round trip is canonical and readers accept any order") {
    BlockSum f(2);
    f.add_term({2, 1}, -0.5);
    f.add_term({0, 0}, 1.25);
    f.add_term({1, 3}, 3.0);
    const auto j = to_json(f);
    // writer emits lexicographic order
    REQUIRE(j.at("terms").size() == 3);
    CHECK(j.at("terms")[0].at("s") == nlohmann::json({0, 0}));
    CHECK(j.at("terms")[2].at("s") == nlohmann::json({2, 1}));
    CHECK(blocksum_from_json(j).terms() == f.terms());

    // shuffled order with a duplicate index: canonicalized on read
    nlohmann::json shuffled = {
        {"d", 2},
        {"terms",
         {{{"c", 3.0}, {"s", {1, 3}}},
          {{"c", 1.0}, {"s", {0, 0}}},
          {{"c", -0.5}, {"s", {2, 1}}},
          {{"c", 0.25}, {"s", {0, 0}}}}}};
    CHECK(blocksum_from_json(shuffled).terms() == f.terms());
}

TEST_CASE("surrogate decomposition norm: examples") {
    const auto prof2 = analyze_smoothness({2.0, 2.0});
    BlockSum empty(2);
    CHECK(surrogate_besov_norm(empty, prof2, 2.0, 1.0) == 0.0);

    // single term at theta = inf: 2^{(s,r)} |c| ||A_s||_p
    BlockSum single(2);
    single.add_term({2, 1}, -0.75);
    const double expect = std::exp2(2.0 * 3) * 0.75 * block_lp_norm({2, 1}, 1.0);
    CHECK_THAT(surrogate_besov_norm(single, prof2, inf, 1.0), WithinRel(expect, 1e-13));

    // single-block family: norm is independent of n (bounded as n grows)
    const auto prof1 = analyze_smoothness({1.5});
    double first = 0.0;
    for (int n = 3; n <= 9; ++n) {
        BlockSum f(1);
        f.add_term({n + 1}, std::exp2(-1.5 * n));
        const double nrm = surrogate_besov_norm(f, prof1, 1.0, 1.0);
        if (first == 0.0)
            first = nrm;
        else
            CHECK_THAT(nrm, WithinRel(first, 1e-12));
    }
}

TEST_CASE("surrogate decomposition norm is absolutely homogeneous") {
    const auto prof = analyze_smoothness({2.0, 3.0});
    BlockSum f(2);
    f.add_term({1, 2}, 0.4);
    f.add_term({3, 0}, -1.1);
    for (double theta : {1.0, 2.0, inf}) {
        const double base = surrogate_besov_norm(f, prof, theta, 1.0);
        BlockSum g = f;
        g.scale(-3.0);
        CHECK_THAT(surrogate_besov_norm(g, prof, theta, 1.0), WithinRel(3.0 * base, 1e-13));
    }
}
