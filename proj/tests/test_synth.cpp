#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "synth.hpp"

using namespace crack;

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double excess_kurtosis(const std::vector<double>& v) {
    double m = mean_of(v);
    double m2 = 0.0, m4 = 0.0;
    for (double x : v) {
        double c = x - m;
        m2 += c * c;
        m4 += c * c * c * c;
    }
    m2 /= v.size();
    m4 /= v.size();
    return m4 / (m2 * m2) - 3.0;
}

}  // namespace

TEST_CASE("spec validation rejects bad parameters") {
    SyntheticSpec bad;
    bad.k = 0;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = SyntheticSpec{};
    bad.phi = 1.5;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = SyntheticSpec{};
    bad.q_range.clear();
    CHECK_THROWS_AS(bad.validate(), InputError);
    CHECK_NOTHROW(SyntheticSpec{}.validate());
}

TEST_CASE("generation is deterministic in seed and pair index") {
    SyntheticSpec spec;
    spec.n = 500;
    spec.seed = 42;
    GeneratedPair a = generate_pair(spec, 3);
    GeneratedPair b = generate_pair(spec, 3);
    REQUIRE(a.data.m() == b.data.m());
    for (std::size_t c = 0; c < a.data.m(); ++c) {
        CHECK(a.data.attributes[c].codes == b.data.attributes[c].codes);
        CHECK(a.data.attributes[c].values == b.data.attributes[c].values);
    }
    CHECK(a.dependencies == b.dependencies);

    GeneratedPair other = generate_pair(spec, 4);
    bool identical = true;
    for (std::size_t c = 0; c < a.data.m() && identical; ++c)
        identical = a.data.attributes[c].codes == other.data.attributes[c].codes &&
                    a.data.attributes[c].values == other.data.attributes[c].values;
    CHECK(!identical);
}

TEST_CASE("nominal sources use 2 to 5 roughly uniform classes") {
    SyntheticSpec spec;
    spec.type_mode = TypeMode::Nominal;
    spec.n = 5000;
    spec.seed = 9;
    std::mt19937_64 rng(9);
    for (int t = 0; t < 20; ++t) {
        Attribute a = gen_source_attribute(spec, "s", rng);
        REQUIRE(is_nominal(a.type));
        CHECK(a.category_count >= 2);
        CHECK(a.category_count <= 5);
        std::vector<long> hist(static_cast<std::size_t>(a.category_count), 0);
        for (int c : a.codes) hist[static_cast<std::size_t>(c)]++;
        // chi-square against uniform; 99.9% critical value for df <= 4 is < 18.5
        double expected = static_cast<double>(spec.n) / a.category_count;
        double chi2 = 0.0;
        for (long h : hist) chi2 += (h - expected) * (h - expected) / expected;
        CHECK(chi2 < 18.5);
    }
}

TEST_CASE("q=2 power transform has heavier tails than normal") {
    SyntheticSpec spec;
    spec.type_mode = TypeMode::Numeric;
    spec.n = 5000;
    spec.q_range = {2.0};
    std::mt19937_64 rng(31);
    Attribute a = gen_source_attribute(spec, "s", rng);
    CHECK(excess_kurtosis(a.values) > 1.0);
}

TEST_CASE("q=0.5 power transform has lighter tails than normal") {
    SyntheticSpec spec;
    spec.type_mode = TypeMode::Numeric;
    spec.n = 5000;
    spec.q_range = {0.5};
    std::mt19937_64 rng(31);
    Attribute a = gen_source_attribute(spec, "s", rng);
    CHECK(excess_kurtosis(a.values) < 0.0);
}

TEST_CASE("phi controls the dependency count") {
    SyntheticSpec spec;
    spec.n = 300;
    spec.seed = 1;
    spec.phi = 0.0;
    CHECK(generate_pair(spec, 0).dependencies.empty());
    spec.phi = 1.0;
    GeneratedPair full = generate_pair(spec, 0);
    CHECK(full.dependencies.size() == static_cast<std::size_t>(spec.k * spec.l));
    CHECK(full.kinds.size() == full.dependencies.size());
}

TEST_CASE("odd pair indices swap presentation and flip the ground truth") {
    SyntheticSpec spec;
    spec.n = 200;
    spec.seed = 4;
    GeneratedPair even = generate_pair(spec, 0);
    CHECK(!even.swapped);
    CHECK(even.truth == Direction::XtoY);
    CHECK(even.data.x_indices == std::vector<int>{0, 1, 2});

    GeneratedPair odd = generate_pair(spec, 1);
    CHECK(odd.swapped);
    CHECK(odd.truth == Direction::YtoX);
    CHECK(odd.data.x_indices == std::vector<int>{3, 4, 5});
    CHECK(odd.data.y_indices == std::vector<int>{0, 1, 2});
}

TEST_CASE("split dependency separates conditional means of a numeric effect") {
    SyntheticSpec spec;
    spec.n = 2000;
    std::mt19937_64 rng(77);
    Attribute cause;
    cause.name = "x";
    cause.type = AttrType::Binary;
    cause.category_count = 2;
    cause.categories = {"c0", "c1"};
    cause.codes.resize(2000);
    for (auto& c : cause.codes) c = static_cast<int>(rng() & 1);
    finalize_attribute(cause);

    SyntheticSpec numeric_spec = spec;
    numeric_spec.type_mode = TypeMode::Numeric;
    Attribute effect = gen_source_attribute(numeric_spec, "y", rng);
    apply_dependency(effect, cause, DependencyKind::Split, spec, rng);

    std::vector<double> g0, g1;
    for (std::size_t r = 0; r < 2000; ++r)
        (cause.codes[r] == 0 ? g0 : g1).push_back(effect.values[r]);
    double m0 = mean_of(g0), m1 = mean_of(g1);
    double s0 = 0.0, s1 = 0.0;
    for (double v : g0) s0 += (v - m0) * (v - m0);
    for (double v : g1) s1 += (v - m1) * (v - m1);
    double t = std::fabs(m0 - m1) /
               std::sqrt(s0 / (g0.size() * (g0.size() - 1.0)) +
                         s1 / (g1.size() * (g1.size() - 1.0)));
    CHECK(t > 5.0);
}

TEST_CASE("kind coercion keeps dependencies type-compatible") {
    SyntheticSpec spec;
    spec.n = 500;
    std::mt19937_64 rng(15);
    Attribute nom_cause;
    nom_cause.type = AttrType::Categorical;
    nom_cause.category_count = 3;
    nom_cause.categories = {"c0", "c1", "c2"};
    nom_cause.codes.resize(500);
    for (auto& c : nom_cause.codes) c = static_cast<int>(rng() % 3);
    finalize_attribute(nom_cause);

    SyntheticSpec ns = spec;
    ns.type_mode = TypeMode::Numeric;
    Attribute num_effect = gen_source_attribute(ns, "y", rng);
    DependencyKind got =
        apply_dependency(num_effect, nom_cause, DependencyKind::Linear, spec, rng);
    CHECK((got == DependencyKind::Split || got == DependencyKind::Multiway));

    SyntheticSpec noms = spec;
    noms.type_mode = TypeMode::Nominal;
    Attribute nom_effect = gen_source_attribute(noms, "y", rng);
    Attribute num_cause = gen_source_attribute(ns, "x", rng);
    finalize_attribute(num_cause);
    DependencyKind got2 =
        apply_dependency(nom_effect, num_cause, DependencyKind::Quadratic, spec, rng);
    CHECK(got2 == DependencyKind::Split);
}
