#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace crack {

void SyntheticSpec::validate() const {
    if (k < 1 || l < 1) throw InputError("k and l must be positive");
    if (n < 1) throw InputError("n must be positive");
    if (phi < 0.0 || phi > 1.0) throw InputError("phi must lie in [0,1]");
    if (q_range.empty()) throw InputError("q_range must be non-empty");
    if (coef_min <= 0 || coef_max < coef_min) throw InputError("bad coefficient range");
}

namespace {

std::vector<double> dirichlet_symmetric(int k, double alpha, std::mt19937_64& rng) {
    std::gamma_distribution<double> gamma(alpha, 1.0);
    std::vector<double> p(static_cast<std::size_t>(k));
    double sum = 0.0;
    while (sum <= 0.0) {
        sum = 0.0;
        for (auto& v : p) {
            v = gamma(rng);
            sum += v;
        }
    }
    for (auto& v : p) v /= sum;
    return p;
}

int draw_categorical(const std::vector<double>& p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double u = u01(rng);
    double acc = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
        acc += p[c];
        if (u < acc) return static_cast<int>(c);
    }
    return static_cast<int>(p.size()) - 1;
}

double draw_coefficient(const SyntheticSpec& spec, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mag(spec.coef_min, spec.coef_max);
    double c = mag(rng);
    return rng() & 1 ? c : -c;
}

double column_sd(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / v.size());
}

/// Redraw the nominal effect within `rows` from a fresh Dirichlet-categorical.
void redraw_nominal_group(Attribute& effect, const std::vector<int>& rows,
                          double alpha, std::mt19937_64& rng) {
    auto p = dirichlet_symmetric(effect.category_count, alpha, rng);
    for (int r : rows) effect.codes[static_cast<std::size_t>(r)] = draw_categorical(p, rng);
}

/// Give the numeric effect a group-specific distribution by an affine
/// distortion: rescale (changing spread) and shift (separating means).
void distort_numeric_group(Attribute& effect, const std::vector<int>& rows,
                           double scale, double offset) {
    for (int r : rows) {
        double& v = effect.values[static_cast<std::size_t>(r)];
        v = v * scale + offset;
    }
}

std::vector<std::vector<int>> group_rows_by_cause(const Attribute& cause,
                                                  DependencyKind kind,
                                                  std::mt19937_64& rng) {
    std::size_t n = cause.size();
    std::vector<std::vector<int>> groups;
    if (is_nominal(cause.type)) {
        if (kind == DependencyKind::Multiway) {
            groups.resize(static_cast<std::size_t>(cause.category_count));
            for (std::size_t r = 0; r < n; ++r)
                groups[static_cast<std::size_t>(cause.codes[r])].push_back(static_cast<int>(r));
        } else {
            std::uniform_int_distribution<int> pick(0, cause.category_count - 1);
            int c = pick(rng);
            groups.resize(2);
            for (std::size_t r = 0; r < n; ++r)
                groups[cause.codes[r] == c ? 0 : 1].push_back(static_cast<int>(r));
        }
    } else {
        // split point at a random central quantile to keep both groups populated
        std::vector<double> sorted = cause.values;
        std::sort(sorted.begin(), sorted.end());
        std::uniform_real_distribution<double> q(0.25, 0.75);
        double thresh = sorted[static_cast<std::size_t>(q(rng) * (n - 1))];
        groups.resize(2);
        for (std::size_t r = 0; r < n; ++r)
            groups[cause.values[r] <= thresh ? 0 : 1].push_back(static_cast<int>(r));
    }
    return groups;
}

}  // namespace

Attribute gen_source_attribute(const SyntheticSpec& spec, const std::string& name,
                               std::mt19937_64& rng) {
    Attribute a;
    a.name = name;
    bool nominal;
    switch (spec.type_mode) {
        case TypeMode::Nominal: nominal = true; break;
        case TypeMode::Numeric: nominal = false; break;
        case TypeMode::Mixed: nominal = (rng() & 1) != 0; break;
        default: nominal = false; break;
    }
    if (nominal) {
        std::uniform_int_distribution<int> classes(2, 5);
        int cc = classes(rng);
        a.type = cc == 2 ? AttrType::Binary : AttrType::Categorical;
        a.category_count = cc;
        std::uniform_int_distribution<int> pick(0, cc - 1);
        a.codes.resize(static_cast<std::size_t>(spec.n));
        for (auto& c : a.codes) c = pick(rng);
        for (int c = 0; c < cc; ++c) a.categories.push_back("c" + std::to_string(c));
    } else {
        a.type = AttrType::Numeric;
        std::uniform_int_distribution<std::size_t> qi(0, spec.q_range.size() - 1);
        double q = spec.q_range[qi(rng)];
        std::normal_distribution<double> normal(0.0, 1.0);
        a.values.resize(static_cast<std::size_t>(spec.n));
        for (auto& v : a.values) {
            double z = normal(rng);
            v = std::copysign(std::pow(std::fabs(z), q), z);
        }
    }
    return a;
}

DependencyKind coerce_kind(DependencyKind kind, const Attribute& cause,
                           const Attribute& effect, std::mt19937_64& rng) {
    if (is_nominal(cause.type)) {
        if (kind == DependencyKind::Linear || kind == DependencyKind::Quadratic)
            kind = (rng() & 1) ? DependencyKind::Split : DependencyKind::Multiway;
    } else {
        if (kind == DependencyKind::Multiway) kind = DependencyKind::Split;
        if (is_nominal(effect.type) &&
            (kind == DependencyKind::Linear || kind == DependencyKind::Quadratic))
            kind = DependencyKind::Split;
    }
    return kind;
}

DependencyKind apply_dependency(Attribute& effect, const Attribute& cause,
                                DependencyKind kind, const SyntheticSpec& spec,
                                std::mt19937_64& rng) {
    bool effect_nominal = is_nominal(effect.type);
    kind = coerce_kind(kind, cause, effect, rng);

    if (kind == DependencyKind::Linear || kind == DependencyKind::Quadratic) {
        std::vector<double> f(cause.values.size());
        double b = draw_coefficient(spec, rng);
        double g = kind == DependencyKind::Quadratic ? draw_coefficient(spec, rng) : 0.0;
        for (std::size_t r = 0; r < f.size(); ++r) {
            double x = cause.values[r];
            f[r] = b * x + g * x * x;
        }
        double noise_sd = spec.noise_sd_factor * column_sd(f);
        std::normal_distribution<double> noise(0.0, noise_sd > 0 ? noise_sd : 1e-12);
        for (std::size_t r = 0; r < f.size(); ++r)
            effect.values[r] += f[r] + (noise_sd > 0 ? noise(rng) : 0.0);
        return kind;
    }

    auto groups = group_rows_by_cause(cause, kind, rng);
    if (effect_nominal) {
        for (const auto& rows : groups)
            if (!rows.empty()) redraw_nominal_group(effect, rows, spec.dirichlet_alpha, rng);
    } else {
        std::uniform_real_distribution<double> off(0.75, 2.0);
        std::uniform_real_distribution<double> sc(0.25, 0.6);
        for (const auto& rows : groups) {
            if (rows.empty()) continue;
            double o = off(rng);
            double s = sc(rng);
            distort_numeric_group(effect, rows, s, rng() & 1 ? o : -o);
        }
    }
    return kind;
}

GeneratedPair generate_pair(const SyntheticSpec& spec, std::uint64_t pair_index) {
    spec.validate();
    std::seed_seq seq{static_cast<std::uint64_t>(spec.seed),
                      static_cast<std::uint64_t>(0x9e3779b97f4a7c15ULL), pair_index};
    std::mt19937_64 rng(seq);

    GeneratedPair out;
    Dataset& d = out.data;
    d.n = static_cast<std::size_t>(spec.n);
    for (int i = 0; i < spec.k; ++i)
        d.attributes.push_back(
            gen_source_attribute(spec, "x" + std::to_string(i), rng));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_int_distribution<int> kind4(0, 3);
    for (int j = 0; j < spec.l; ++j) {
        Attribute y = gen_source_attribute(spec, "y" + std::to_string(j), rng);
        if (is_nominal(y.type)) {
            // A fresh per-group redraw would erase the trace of previously
            // applied causes, so intersect the group partitions of all causes
            // into joint cells and draw one distribution per cell.
            std::vector<std::size_t> cell(d.n, 0);
            std::size_t stride = 1;
            bool any = false;
            for (int i = 0; i < spec.k; ++i) {
                if (u01(rng) >= spec.phi) continue;
                const Attribute& cause = d.attributes[static_cast<std::size_t>(i)];
                auto kind = coerce_kind(static_cast<DependencyKind>(kind4(rng)),
                                        cause, y, rng);
                auto groups = group_rows_by_cause(cause, kind, rng);
                for (std::size_t g = 0; g < groups.size(); ++g)
                    for (int r : groups[g]) cell[static_cast<std::size_t>(r)] += g * stride;
                stride *= groups.size();
                out.dependencies.emplace_back(i, spec.k + j);
                out.kinds.push_back(kind);
                any = true;
            }
            if (any) {
                std::vector<std::vector<int>> cells(stride);
                for (std::size_t r = 0; r < d.n; ++r)
                    cells[cell[r]].push_back(static_cast<int>(r));
                for (const auto& rows : cells)
                    if (!rows.empty()) redraw_nominal_group(y, rows, spec.dirichlet_alpha, rng);
            }
        } else {
            for (int i = 0; i < spec.k; ++i) {
                if (u01(rng) >= spec.phi) continue;
                auto kind = static_cast<DependencyKind>(kind4(rng));
                kind = apply_dependency(y, d.attributes[static_cast<std::size_t>(i)],
                                        kind, spec, rng);
                out.dependencies.emplace_back(i, spec.k + j);
                out.kinds.push_back(kind);
            }
        }
        d.attributes.push_back(std::move(y));
    }
    // Record about half the numeric columns at a coarser resolution so the
    // intrinsic complexities of numeric attributes vary across the dataset:
    // grids of 10^2 or 10^3 cells across the value range.
    std::uniform_int_distribution<int> grid_exp(2, 3);
    for (auto& a : d.attributes) {
        if (a.type != AttrType::Numeric) continue;
        if (rng() & 1) continue;
        auto [lo, hi] = std::minmax_element(a.values.begin(), a.values.end());
        double range = *hi - *lo;
        if (range <= 0.0) continue;
        double step = range / std::pow(10.0, grid_exp(rng));
        for (auto& v : a.values) v = std::round(v / step) * step;
    }
    for (auto& a : d.attributes) finalize_attribute(a);
    d.x_indices.resize(static_cast<std::size_t>(spec.k));
    std::iota(d.x_indices.begin(), d.x_indices.end(), 0);
    d.y_indices.resize(static_cast<std::size_t>(spec.l));
    std::iota(d.y_indices.begin(), d.y_indices.end(), spec.k);

    out.swapped = (pair_index % 2) == 1;
    if (out.swapped) {
        std::swap(d.x_indices, d.y_indices);
        out.truth = Direction::YtoX;
    } else {
        out.truth = Direction::XtoY;
    }
    return out;
}

}  // namespace crack
