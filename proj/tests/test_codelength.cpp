#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "codelength.hpp"

using namespace crack;

namespace {

// Independent brute-force normalizer: sum the maximum likelihood over all
// count vectors (h_1..h_k) with sum n.
double brute_normalizer(long n, int k, long remaining, double log_binom_acc,
                        double log_ml_acc) {
    if (k == 1) {
        double log_ml = log_ml_acc;
        if (remaining > 0)
            log_ml += remaining * std::log(static_cast<double>(remaining) / n);
        return std::exp(log_binom_acc - std::lgamma(remaining + 1.0) + log_ml);
    }
    double total = 0.0;
    for (long h = 0; h <= remaining; ++h) {
        double log_ml = log_ml_acc;
        if (h > 0) log_ml += h * std::log(static_cast<double>(h) / n);
        total += brute_normalizer(n, k - 1, remaining - h,
                                  log_binom_acc - std::lgamma(h + 1.0), log_ml);
    }
    return total;
}

double brute_nml_regret(long n, int k) {
    if (n == 0 || k == 1) return 0.0;
    return std::log2(brute_normalizer(n, k, n, std::lgamma(n + 1.0), 0.0));
}

// Independent restatement of the parameter encoder for oracle comparison.
double oracle_parameter_bits(double phi, double precision) {
    int s_max = std::max(1, static_cast<int>(std::lround(-std::log10(precision))));
    double mag = std::fabs(phi);
    for (int s = 1; s <= s_max; ++s) {
        double scale = std::pow(10.0, s);
        double shifted = std::floor(mag * scale);
        if (std::fabs(mag - shifted / scale) < precision || s == s_max) {
            double bits = 1.0 + universal_int(s);
            double t = std::log2(shifted + 1.0);
            bits += std::log2(2.865064);
            while (t > 0) {
                bits += t;
                t = std::log2(t);
            }
            return bits;
        }
    }
    return -1.0;
}

}  // namespace

TEST_CASE("universal integer code values") {
    CHECK(universal_int(1) == doctest::Approx(1.5186).epsilon(1e-3));
    CHECK(universal_int(2) == doctest::Approx(2.5186).epsilon(1e-3));
    CHECK(universal_int(5) == doctest::Approx(5.3374).epsilon(1e-3));
    CHECK_THROWS_AS(universal_int(0), InternalError);
    // monotone in z
    double prev = universal_int(1);
    for (long z = 2; z < 200; ++z) {
        double cur = universal_int(z);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("nml regret matches brute-force enumeration for n <= 12, k <= 5") {
    for (long n = 0; n <= 12; ++n)
        for (int k = 1; k <= 5; ++k)
            CHECK(std::fabs(nml_regret(n, k) - brute_nml_regret(n, k)) < 1e-9);
    CHECK(nml_regret(2, 2) == doctest::Approx(std::log2(2.5)).epsilon(1e-9));
    CHECK(nml_regret(5, 2) == doctest::Approx(1.8117).epsilon(1e-3));
}

TEST_CASE("nml regret large-n sanity") {
    // regret grows roughly like (k-1)/2 log2 n; just check monotonicity and
    // that big tables fill without issue
    CHECK(nml_regret(5000, 5) > nml_regret(5000, 2));
    CHECK(nml_regret(5000, 2) > nml_regret(500, 2));
    CHECK(std::isfinite(nml_regret(20000, 5)));
}

TEST_CASE("nominal leaf costs") {
    LeafStats s;
    s.count = 1;
    s.hist = {1, 0};
    CHECK(leaf_nominal(s) == doctest::Approx(1.0).epsilon(1e-9));

    s.count = 2;
    s.hist = {1, 1};
    CHECK(leaf_nominal(s) == doctest::Approx(2.0 + std::log2(2.5)).epsilon(1e-9));

    s.count = 5;
    s.hist = {5, 0};
    CHECK(leaf_nominal(s) == doctest::Approx(1.8117).epsilon(1e-3));
}

TEST_CASE("gaussian leaf cost") {
    LeafStats s;
    s.count = 100;
    s.var = 1.0;
    CHECK(leaf_numeric_gaussian(s, 0.01) == doctest::Approx(869.10).epsilon(1e-4));
    // tiny variance with coarse resolution clamps at zero
    s.var = 1e-12;
    CHECK(leaf_numeric_gaussian(s, 1.0) == 0.0);
}

TEST_CASE("full numeric leaf cost") {
    LeafStats constant;
    constant.count = 7;
    constant.var = 0.0;
    constant.vmin = constant.vmax = 3.0;
    CHECK(leaf_numeric(constant, 0.01, 101.0) ==
          doctest::Approx(1.0 + 2.0 * std::log2(101.0)).epsilon(1e-9));

    LeafStats g;
    g.count = 100;
    g.var = 1.0;
    g.vmin = -500.0;
    g.vmax = 500.0;  // uniform alternative far more expensive
    CHECK(leaf_numeric(g, 0.01, 1001.0) ==
          doctest::Approx(1.0 + 2.0 * std::log2(1001.0) + 869.10).epsilon(1e-4));
}

TEST_CASE("single split costs") {
    Attribute bin;
    bin.type = AttrType::Binary;
    bin.category_count = 2;
    CHECK(cost_single_split(6, bin) == doctest::Approx(1.0 + std::log2(6.0)).epsilon(1e-9));

    Attribute cat;
    cat.type = AttrType::Categorical;
    cat.category_count = 4;
    CHECK(cost_single_split(6, cat) == doctest::Approx(5.585).epsilon(1e-3));

    Attribute num;
    num.type = AttrType::Numeric;
    num.vmin = 0.0;
    num.vmax = 1.0;
    num.resolution = 0.01;  // domain 101
    CHECK(cost_single_split(6, num) == doctest::Approx(10.229).epsilon(1e-3));
}

TEST_CASE("multiway split costs") {
    Attribute cat;
    cat.type = AttrType::Categorical;
    cat.category_count = 4;
    CHECK(cost_multiway_split(6, cat, 0) == doctest::Approx(3.585).epsilon(1e-3));

    Attribute num;
    num.type = AttrType::Numeric;
    CHECK(cost_multiway_split(6, num, 3) ==
          doctest::Approx(1.0 + std::log2(6.0) + universal_int(3)).epsilon(1e-9));
}

TEST_CASE("regression parameter encoder") {
    // phi = 0.5 encodes exactly at s=1: shifted value floor(0.5*10)+1 = 6
    RegressionEncoding enc = encode_parameter(0.5, 0.001);
    CHECK(enc.bits == doctest::Approx(1.0 + universal_int(1) + universal_int(6)).epsilon(1e-9));
    CHECK(enc.rounded[0] == doctest::Approx(0.5).epsilon(1e-12));

    // sign rides the leading bit; magnitude encoding is symmetric
    RegressionEncoding neg = encode_parameter(-0.5, 0.001);
    CHECK(neg.bits == doctest::Approx(enc.bits).epsilon(1e-12));
    CHECK(neg.rounded[0] == doctest::Approx(-0.5).epsilon(1e-12));

    // oracle comparison across magnitudes and precisions
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> mag(-50.0, 50.0);
    for (int t = 0; t < 500; ++t) {
        double phi = mag(rng);
        for (double p : {0.1, 0.01, 0.001}) {
            RegressionEncoding e = encode_parameter(phi, p);
            CHECK(e.bits == doctest::Approx(oracle_parameter_bits(phi, p)).epsilon(1e-12));
            // decoder reconstruction is within the precision grid
            CHECK(std::fabs(e.rounded[0] - phi) < p + 1e-12);
        }
    }
}

TEST_CASE("regression node cost composes per-parameter encodings") {
    std::vector<double> rounded;
    double bits = cost_regression(6, {0.0, 2.0}, 0.001, &rounded);
    double expect = std::log2(6.0) + oracle_parameter_bits(0.0, 0.001) +
                    oracle_parameter_bits(2.0, 0.001);
    CHECK(bits == doctest::Approx(expect).epsilon(1e-12));
    REQUIRE(rounded.size() == 2);
    CHECK(rounded[0] == doctest::Approx(0.0));
    CHECK(rounded[1] == doctest::Approx(2.0));
}

TEST_CASE("costs are non-negative") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-10.0, 10.0);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> vals;
        long n = 1 + static_cast<long>(rng() % 50);
        for (long i = 0; i < n; ++i) vals.push_back(unif(rng));
        LeafStats s = LeafStats::from_values(vals);
        CHECK(leaf_numeric_gaussian(s, 0.01) >= 0.0);
        CHECK(leaf_numeric_uniform(s, 0.01) >= 0.0);
        CHECK(leaf_numeric(s, 0.01, 2001.0) >= 0.0);

        std::vector<int> codes;
        int k = 2 + static_cast<int>(rng() % 4);
        for (long i = 0; i < n; ++i) codes.push_back(static_cast<int>(rng() % k));
        LeafStats c = LeafStats::from_codes(codes, k);
        CHECK(leaf_nominal(c) >= 0.0);
    }
}

TEST_CASE("nominal leaf cost is invariant under category relabeling") {
    std::vector<int> codes = {0, 1, 1, 2, 0, 2, 2, 1, 0, 0};
    std::vector<int> relabeled;  // permutation 0->2, 1->0, 2->1
    for (int c : codes) relabeled.push_back((c + 2) % 3);
    double a = leaf_nominal(LeafStats::from_codes(codes, 3));
    double b = leaf_nominal(LeafStats::from_codes(relabeled, 3));
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("nominal leaf cost is bounded below by n times empirical entropy") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 100; ++t) {
        int k = 2 + static_cast<int>(rng() % 4);
        long n = 2 + static_cast<long>(rng() % 80);
        std::vector<int> codes;
        for (long i = 0; i < n; ++i) codes.push_back(static_cast<int>(rng() % k));
        LeafStats s = LeafStats::from_codes(codes, k);
        double entropy_bits = 0.0;
        for (int h : s.hist)
            if (h > 0) entropy_bits -= h * std::log2(static_cast<double>(h) / n);
        CHECK(leaf_nominal(s) >= entropy_bits - 1e-9);
    }
}

TEST_CASE("numeric leaf data cost is invariant to joint scaling of values and resolution") {
    std::vector<double> vals = {0.1, 0.4, 0.9, 1.6, 2.5, 3.1, 0.7, 2.2};
    LeafStats base = LeafStats::from_values(vals);
    for (double scale : {10.0, 100.0, 0.5}) {
        std::vector<double> scaled;
        for (double v : vals) scaled.push_back(v * scale);
        LeafStats s = LeafStats::from_values(scaled);
        CHECK(leaf_numeric_gaussian(s, 0.01 * scale) ==
              doctest::Approx(leaf_numeric_gaussian(base, 0.01)).epsilon(1e-9));
        CHECK(leaf_numeric_uniform(s, 0.01 * scale) ==
              doctest::Approx(leaf_numeric_uniform(base, 0.01)).epsilon(1e-9));
    }
}
