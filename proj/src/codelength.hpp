#pragma once

#include <vector>

#include "dataset.hpp"

namespace crack {

using Bits = double;

/// Rissanen's universal code for integers z >= 1:
/// log2(c0) + log2 z + log2 log2 z + ... over strictly positive terms.
Bits universal_int(long z);

/// log2 of the multinomial NML normalizer C(n, k). Linear-time recurrence
/// over k with memoized rows; thread-safe.
Bits nml_regret(long n, int k);

/// Statistics of the points held by one leaf.
struct LeafStats {
    long count = 0;
    // nominal
    std::vector<int> hist;
    // numeric
    double mean = 0.0;
    double var = 0.0;  // ML variance (divide by count)
    double vmin = 0.0;
    double vmax = 0.0;

    static LeafStats from_codes(const std::vector<int>& codes, int category_count);
    static LeafStats from_values(const std::vector<double>& values);
};

/// NML cost of a nominal leaf: empirical entropy plus regret.
Bits leaf_nominal(const LeafStats& stats);

/// Two-part Gaussian data cost, clamped at zero.
Bits leaf_numeric_gaussian(const LeafStats& stats, double resolution);

/// Uniform data cost over the leaf's own range.
Bits leaf_numeric_uniform(const LeafStats& stats, double resolution);

/// Full numeric leaf cost: model-choice bit, parameter prefix over the
/// attribute domain, and the cheaper of the two data codes.
Bits leaf_numeric(const LeafStats& stats, double resolution, double domain);

/// Leaf cost dispatched on the owning attribute's type. Residual leaves
/// reuse the parent attribute's resolution and domain.
Bits leaf_cost(const LeafStats& stats, const Attribute& owner);

Bits cost_single_split(std::size_t m, const Attribute& source);
Bits cost_multiway_split(std::size_t m, const Attribute& source, long dup_threshold);

struct RegressionEncoding {
    Bits bits = 0;
    std::vector<double> rounded;  // parameters after grid rounding
};

/// Cost of one regression parameter at precision p plus its grid-rounded
/// value (the value the decoder reconstructs).
RegressionEncoding encode_parameter(double phi, double precision);

Bits cost_regression(std::size_t m, const std::vector<double>& params,
                     double precision, std::vector<double>* rounded_out = nullptr);

/// Round every parameter to the encoder grid; the residuals downstream are
/// computed against these values so the code is self-consistent.
std::vector<double> round_parameters(const std::vector<double>& params,
                                     double precision);

}  // namespace crack
