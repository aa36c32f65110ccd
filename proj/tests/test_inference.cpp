#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "synth.hpp"

using namespace crack;

namespace {

Attribute nominal_attr(const std::string& name, std::vector<int> codes, int k) {
    Attribute a;
    a.name = name;
    a.type = k == 2 ? AttrType::Binary : AttrType::Categorical;
    a.codes = std::move(codes);
    a.category_count = k;
    for (int c = 0; c < k; ++c) a.categories.push_back("c" + std::to_string(c));
    finalize_attribute(a);
    return a;
}

}  // namespace

TEST_CASE("numeric marginal under the domain prior") {
    Attribute a;
    a.type = AttrType::Numeric;
    a.vmin = 0.0;
    a.vmax = 1.0;
    a.resolution = 0.01;  // |D| = 101
    CHECK(marginal_cost(a, 100, MarginalMode::Domain) ==
          doctest::Approx(100.0 * std::log2(101.0)).epsilon(1e-12));
    CHECK(marginal_cost(a, 100, MarginalMode::Domain) == doctest::Approx(665.8).epsilon(1e-3));
    CHECK(marginal_cost(a, 100, MarginalMode::Res) ==
          doctest::Approx(-100.0 * std::log2(0.01)).epsilon(1e-12));
}

TEST_CASE("nominal marginal is the trivial-tree code") {
    std::vector<int> codes;
    for (int i = 0; i < 100; ++i) codes.push_back(i % 2);
    Attribute a = nominal_attr("b", codes, 2);
    CHECK(marginal_cost(a, 100, MarginalMode::Domain) ==
          doctest::Approx(1.0 + 100.0 + nml_regret(100, 2)).epsilon(1e-9));
}

TEST_CASE("constant attributes cost nothing and are excluded") {
    Attribute a = nominal_attr("c", std::vector<int>(50, 0), 1);
    CHECK(a.constant);
    CHECK(marginal_cost(a, 50, MarginalMode::Domain) == 0.0);
}

TEST_CASE("deterministic copy compresses far below its marginal") {
    std::mt19937_64 rng(5);
    std::vector<int> x;
    for (int i = 0; i < 300; ++i) x.push_back(static_cast<int>(rng() % 3));
    Dataset d;
    d.n = 300;
    d.attributes.push_back(nominal_attr("x", x, 3));
    d.attributes.push_back(nominal_attr("y", x, 3));
    d.x_indices = {0};
    d.y_indices = {1};
    ConditionalCost cc = conditional_cost(d, Side::Y, {});
    double marginal = marginal_cost(d.attributes[1], d.n, MarginalMode::Domain);
    CHECK(cc.total < 0.25 * marginal);
}

TEST_CASE("independent nominal data gives equal unit ratios in both directions") {
    std::mt19937_64 rng(17);
    std::vector<int> x, y;
    for (int i = 0; i < 200; ++i) {
        x.push_back(static_cast<int>(rng() % 3));
        y.push_back(static_cast<int>(rng() % 4));
    }
    Dataset d;
    d.n = 200;
    d.attributes.push_back(nominal_attr("x", x, 3));
    d.attributes.push_back(nominal_attr("y", y, 4));
    d.x_indices = {0};
    d.y_indices = {1};
    InferenceOutcome out = infer(d, {});
    REQUIRE(out.scores_valid);
    if (out.forward.forest.edges.empty() && out.backward.forest.edges.empty()) {
        CHECK(out.nci_xy == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(out.nci_yx == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(std::fabs(out.nci_xy - out.nci_yx) < 1e-9);
}

TEST_CASE("label swap flips the verdict and preserves confidence") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        SyntheticSpec spec;
        spec.n = 400;
        spec.k = 2;
        spec.l = 2;
        spec.seed = seed;
        GeneratedPair pair = generate_pair(spec, 0);
        InferenceOutcome a = infer(pair.data, {});
        InferenceOutcome b = infer(swap_sides(pair.data), {});
        REQUIRE(a.scores_valid);
        REQUIRE(b.scores_valid);
        for (Indicator ind : {Indicator::Delta, Indicator::Nci}) {
            CausalVerdict va = a.verdict(ind, 0.0);
            CausalVerdict vb = b.verdict(ind, 0.0);
            CHECK(va.confidence == doctest::Approx(vb.confidence).epsilon(1e-9));
            if (va.direction == Direction::XtoY)
                CHECK(vb.direction == Direction::YtoX);
            else if (va.direction == Direction::YtoX)
                CHECK(vb.direction == Direction::XtoY);
            else
                CHECK(vb.direction == Direction::Inconclusive);
        }
    }
}

TEST_CASE("decision rule honours the epsilon margin") {
    CausalVerdict v = decide(Indicator::Nci, 0.8, 0.9, 0.0);
    CHECK(v.direction == Direction::XtoY);
    CHECK(v.confidence == doctest::Approx(0.1));

    CHECK(decide(Indicator::Nci, 0.8, 0.9, 0.2).direction == Direction::Inconclusive);
    CHECK(decide(Indicator::Nci, 0.9, 0.8, 0.0).direction == Direction::YtoX);
    CHECK(decide(Indicator::Delta, 0.5, 0.5, 0.0).direction == Direction::Inconclusive);
}

TEST_CASE("verdict serializes with scores, direction, and breakdown") {
    SyntheticSpec spec;
    spec.n = 200;
    spec.k = 2;
    spec.l = 2;
    spec.seed = 11;
    GeneratedPair pair = generate_pair(spec, 0);
    InferenceOutcome out = infer(pair.data, {});
    std::string j = verdict_to_json(out.verdict(Indicator::Nci, 0.0));
    for (const char* key : {"\"indicator\"", "\"score_xy\"", "\"score_yx\"",
                            "\"direction\"", "\"confidence\"", "\"breakdown\"",
                            "\"runtime_ms\""})
        CHECK(j.find(key) != std::string::npos);
}

TEST_CASE("empty side is an input error") {
    Dataset d;
    d.n = 2;
    d.attributes.push_back(nominal_attr("x", {0, 1}, 2));
    d.x_indices = {0};
    CHECK_THROWS_AS(infer(d, {}), InputError);
}
