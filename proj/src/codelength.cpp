#include "codelength.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_map>

namespace crack {

namespace {

constexpr double kLogStarC0 = 2.865064;
constexpr double kPi = 3.14159265358979323846;

// log2 C(n,2) by direct summation over the left-bucket count.
double log_normalizer_binary(long n) {
    if (n == 0) return 0.0;
    double ln2 = std::log(2.0);
    double acc = 0.0;  // sum of terms, each <= 1
    double lf_n = std::lgamma(static_cast<double>(n) + 1.0);
    for (long h = 0; h <= n; ++h) {
        double log_binom = lf_n - std::lgamma(static_cast<double>(h) + 1.0) -
                           std::lgamma(static_cast<double>(n - h) + 1.0);
        double log_ml = 0.0;
        if (h > 0) log_ml += h * std::log(static_cast<double>(h) / n);
        if (n - h > 0) log_ml += (n - h) * std::log(static_cast<double>(n - h) / n);
        acc += std::exp(log_binom + log_ml);
    }
    return std::log(acc) / ln2;
}

double log2_add(double a, double b) {
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp2(b - a)) / std::log(2.0);
}

// log* series for z >= 1, taking z as a real so shifted regression
// parameters beyond long range still encode.
double log_star(double z) {
    double total = std::log2(kLogStarC0);
    double t = std::log2(z);
    while (t > 0) {
        total += t;
        t = std::log2(t);
    }
    return total;
}

}  // namespace

Bits universal_int(long z) {
    if (z < 1) throw InternalError("universal_int: z < 1");
    return log_star(static_cast<double>(z));
}

namespace {

// Rows of log2 C(n, k), indexed by n, grown geometrically on demand.
// Row 2 comes from direct summation, higher rows from the k-recurrence
// C(n,k) = C(n,k-1) + n/(k-2) * C(n,k-2).
struct NmlTables {
    std::mutex mutex;
    std::vector<std::vector<double>> rows;  // rows[k] for k >= 2

    const double* row(int k, long n) {
        std::lock_guard<std::mutex> lock(mutex);
        std::size_t need = static_cast<std::size_t>(n) + 1;
        if (rows.size() > static_cast<std::size_t>(k) &&
            rows[static_cast<std::size_t>(k)].size() >= need)
            return rows[static_cast<std::size_t>(k)].data();
        std::size_t cap = 256;
        while (cap < need) cap *= 2;
        if (rows.size() <= static_cast<std::size_t>(k)) rows.resize(static_cast<std::size_t>(k) + 1);
        if (rows[2].size() < cap) {
            rows[2].resize(cap);
            for (std::size_t nn = 0; nn < cap; ++nn)
                rows[2][nn] = log_normalizer_binary(static_cast<long>(nn));
        }
        for (int kk = 3; kk <= k; ++kk) {
            auto& out = rows[static_cast<std::size_t>(kk)];
            const auto& r1 = rows[static_cast<std::size_t>(kk - 1)];
            if (out.size() >= cap) continue;
            out.assign(cap, 0.0);
            for (std::size_t nn = 0; nn < cap; ++nn) {
                double prev = kk - 2 >= 2 ? rows[static_cast<std::size_t>(kk - 2)][nn] : 0.0;
                if (nn == 0) {
                    out[nn] = 0.0;
                    continue;
                }
                out[nn] = log2_add(r1[nn], std::log2(static_cast<double>(nn) / (kk - 2)) + prev);
            }
        }
        return rows[static_cast<std::size_t>(k)].data();
    }
};

NmlTables g_nml_tables;

}  // namespace

Bits nml_regret(long n, int k) {
    if (k < 1) throw InternalError("nml_regret: k < 1");
    if (n == 0 || k == 1) return 0.0;
    return g_nml_tables.row(k, n)[n];
}

LeafStats LeafStats::from_codes(const std::vector<int>& codes, int category_count) {
    LeafStats s;
    s.count = static_cast<long>(codes.size());
    s.hist.assign(static_cast<std::size_t>(category_count), 0);
    for (int c : codes) s.hist[static_cast<std::size_t>(c)]++;
    return s;
}

LeafStats LeafStats::from_values(const std::vector<double>& values) {
    LeafStats s;
    s.count = static_cast<long>(values.size());
    if (values.empty()) return s;
    double sum = 0.0, sum2 = 0.0;
    s.vmin = s.vmax = values[0];
    for (double v : values) {
        sum += v;
        sum2 += v * v;
        s.vmin = std::min(s.vmin, v);
        s.vmax = std::max(s.vmax, v);
    }
    s.mean = sum / s.count;
    s.var = std::max(0.0, sum2 / s.count - s.mean * s.mean);
    return s;
}

Bits leaf_nominal(const LeafStats& stats) {
    if (stats.count == 0) return 0.0;
    double entropy_bits = 0.0;
    for (int h : stats.hist) {
        if (h == 0) continue;
        double p = static_cast<double>(h) / stats.count;
        entropy_bits -= h * std::log2(p);
    }
    return entropy_bits + nml_regret(stats.count, static_cast<int>(stats.hist.size()));
}

Bits leaf_numeric_gaussian(const LeafStats& stats, double resolution) {
    if (stats.count == 0) return 0.0;
    double bits = stats.count / 2.0 * (1.0 / std::log(2.0) + std::log2(2.0 * kPi * stats.var)) -
                  stats.count * std::log2(resolution);
    return std::max(0.0, bits);
}

Bits leaf_numeric_uniform(const LeafStats& stats, double resolution) {
    if (stats.count == 0) return 0.0;
    return stats.count * std::log2((stats.vmax - stats.vmin) / resolution + 1.0);
}

Bits leaf_numeric(const LeafStats& stats, double resolution, double domain) {
    double data_bits;
    if (stats.var <= 0.0) {
        data_bits = leaf_numeric_uniform(stats, resolution);
    } else {
        data_bits = std::min(leaf_numeric_gaussian(stats, resolution),
                             leaf_numeric_uniform(stats, resolution));
    }
    return 1.0 + 2.0 * std::log2(domain) + data_bits;
}

Bits leaf_cost(const LeafStats& stats, const Attribute& owner) {
    if (is_nominal(owner.type)) return leaf_nominal(stats);
    return leaf_numeric(stats, owner.resolution, domain_size(owner));
}

Bits cost_single_split(std::size_t m, const Attribute& source) {
    double bits = 1.0 + std::log2(static_cast<double>(m));
    switch (source.type) {
        case AttrType::Binary:
            break;  // one possible condition, zero bits
        case AttrType::Categorical:
            bits += std::log2(domain_size(source));
            break;
        case AttrType::Numeric: {
            double d = domain_size(source);
            if (d <= 1.0)
                throw InternalError("single split on degenerate numeric domain");
            bits += std::log2(d - 1.0);
            break;
        }
    }
    return bits;
}

Bits cost_multiway_split(std::size_t m, const Attribute& source, long dup_threshold) {
    double bits = 1.0 + std::log2(static_cast<double>(m));
    if (source.type == AttrType::Numeric) bits += universal_int(dup_threshold);
    return bits;
}

RegressionEncoding encode_parameter(double phi, double precision) {
    if (!std::isfinite(phi)) throw InternalError("non-finite regression parameter");
    RegressionEncoding enc;
    int s_max = std::max(1, static_cast<int>(std::lround(-std::log10(precision))));
    double mag = std::fabs(phi);
    double sign = phi < 0 ? -1.0 : 1.0;
    for (int s = 1; s <= s_max; ++s) {
        double scale = std::pow(10.0, s);
        double shifted = std::floor(mag * scale);
        double rounded = shifted / scale;
        if (std::fabs(mag - rounded) < precision || s == s_max) {
            enc.bits = 1.0 + universal_int(s) + log_star(shifted + 1.0);
            enc.rounded.push_back(sign * rounded);
            return enc;
        }
    }
    throw InternalError("unreachable: parameter encoding");
}

Bits cost_regression(std::size_t m, const std::vector<double>& params,
                     double precision, std::vector<double>* rounded_out) {
    double bits = std::log2(static_cast<double>(m));
    if (rounded_out) rounded_out->clear();
    for (double phi : params) {
        RegressionEncoding enc = encode_parameter(phi, precision);
        bits += enc.bits;
        if (rounded_out) rounded_out->push_back(enc.rounded[0]);
    }
    return bits;
}

std::vector<double> round_parameters(const std::vector<double>& params,
                                     double precision) {
    std::vector<double> out;
    for (double phi : params) out.push_back(encode_parameter(phi, precision).rounded[0]);
    return out;
}

}  // namespace crack
