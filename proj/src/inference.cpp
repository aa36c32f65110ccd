#include "inference.hpp"

#include <chrono>
#include <cmath>

#include <json.hpp>

namespace crack {

const char* indicator_name(Indicator i) {
    return i == Indicator::Delta ? "delta" : "nci";
}

const char* direction_name(Direction d) {
    switch (d) {
        case Direction::XtoY: return "x->y";
        case Direction::YtoX: return "y->x";
        case Direction::Inconclusive: return "inconclusive";
    }
    return "?";
}

Bits marginal_cost(const Attribute& a, std::size_t n, MarginalMode mode) {
    if (a.constant) return 0.0;
    if (is_nominal(a.type)) {
        // -n log 1 would be zero; use the trivial-tree NML cost instead
        LeafStats s = LeafStats::from_codes(a.codes, a.category_count);
        return 1.0 + leaf_nominal(s);
    }
    if (mode == MarginalMode::Res)
        return -static_cast<double>(n) * std::log2(a.resolution);
    return static_cast<double>(n) * std::log2(domain_size(a));
}

Bits baseline_cost(const Attribute& a) {
    if (a.constant) return 0.0;
    if (is_nominal(a.type))
        return 1.0 + leaf_nominal(LeafStats::from_codes(a.codes, a.category_count));
    return 1.0 + leaf_numeric(LeafStats::from_values(a.values), a.resolution,
                              domain_size(a));
}

ConditionalCost conditional_cost(const Dataset& d, Side target_side,
                                 const SearchOptions& opts) {
    ConditionalCost out;
    ModelClass cls = ModelClass::conditional(d, target_side);
    out.search = crack_search(d, cls, opts);
    const auto& targets = target_side == Side::Y ? d.y_indices : d.x_indices;
    for (int t : targets) {
        if (d.attributes[static_cast<std::size_t>(t)].constant) {
            out.per_attribute.emplace_back(t, 0.0);
            continue;
        }
        double bits = tree_cost(out.search.forest.trees[static_cast<std::size_t>(t)], d,
                                opts.precision);
        out.per_attribute.emplace_back(t, bits);
        out.total += bits;
    }
    return out;
}

InferenceOutcome infer(const Dataset& d, const InferenceOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    if (d.x_indices.empty() || d.y_indices.empty())
        throw InputError("both X and Y must be non-empty");

    InferenceOutcome out;
    ConditionalCost cond_y = conditional_cost(d, Side::Y, opts.search);
    ConditionalCost cond_x = conditional_cost(d, Side::X, opts.search);

    double marg_x = 0.0, marg_y = 0.0;
    auto fill = [&](const std::vector<int>& idx, Side side,
                    const ConditionalCost& cond, double* sum) {
        for (int i : idx) {
            const Attribute& a = d.attributes[static_cast<std::size_t>(i)];
            AttributeScore s;
            s.attribute = i;
            s.name = a.name;
            s.side = side;
            s.excluded = a.constant;
            s.marginal_bits = marginal_cost(a, d.n, opts.marginal);
            s.baseline_bits = baseline_cost(a);
            if (a.type == AttrType::Numeric && !a.constant)
                s.floor_bits = -static_cast<double>(d.n) * std::log2(a.resolution);
            for (const auto& [t, bits] : cond.per_attribute)
                if (t == i) s.conditional_bits = bits;
            *sum += s.marginal_bits;
            out.breakdown.push_back(std::move(s));
        }
    };
    fill(d.x_indices, Side::X, cond_x, &marg_x);
    fill(d.y_indices, Side::Y, cond_y, &marg_y);

    double denom = marg_x + marg_y;
    if (denom <= 0.0) {
        out.diagnostic = "all attributes constant; scores undefined";
        out.forward = std::move(cond_y.search);
        out.backward = std::move(cond_x.search);
        return out;
    }
    out.delta_xy = (marg_x + cond_y.total) / denom;
    out.delta_yx = (marg_y + cond_x.total) / denom;

    double ratio_sum_y = 0.0;
    long counted_y = 0;
    double ratio_sum_x = 0.0;
    long counted_x = 0;
    for (const auto& s : out.breakdown) {
        double denom_bits = s.baseline_bits - s.floor_bits;
        if (s.excluded || denom_bits <= 1e-9) continue;
        double ratio = std::max(0.0, s.conditional_bits - s.floor_bits) / denom_bits;
        if (s.side == Side::Y) {
            ratio_sum_y += ratio;
            counted_y++;
        } else {
            ratio_sum_x += ratio;
            counted_x++;
        }
    }
    if (counted_x == 0 || counted_y == 0) {
        out.diagnostic = "one side has no informative attributes";
        out.forward = std::move(cond_y.search);
        out.backward = std::move(cond_x.search);
        return out;
    }
    out.nci_xy = ratio_sum_y / counted_y;
    out.nci_yx = ratio_sum_x / counted_x;
    out.scores_valid = true;

    out.forward = std::move(cond_y.search);
    out.backward = std::move(cond_x.search);
    auto t1 = std::chrono::steady_clock::now();
    out.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return out;
}

CausalVerdict decide(Indicator indicator, double score_xy, double score_yx,
                     double epsilon) {
    CausalVerdict v;
    v.indicator = indicator;
    v.score_xy = score_xy;
    v.score_yx = score_yx;
    v.confidence = std::fabs(score_xy - score_yx);
    if (score_xy < score_yx - epsilon)
        v.direction = Direction::XtoY;
    else if (score_yx < score_xy - epsilon)
        v.direction = Direction::YtoX;
    else
        v.direction = Direction::Inconclusive;
    return v;
}

CausalVerdict InferenceOutcome::verdict(Indicator indicator, double epsilon) const {
    if (!scores_valid) {
        CausalVerdict v;
        v.indicator = indicator;
        v.direction = Direction::Inconclusive;
        v.diagnostic = diagnostic;
        v.breakdown = breakdown;
        v.runtime_ms = runtime_ms;
        return v;
    }
    CausalVerdict v = indicator == Indicator::Delta
                          ? decide(indicator, delta_xy, delta_yx, epsilon)
                          : decide(indicator, nci_xy, nci_yx, epsilon);
    v.breakdown = breakdown;
    v.runtime_ms = runtime_ms;
    return v;
}

std::string verdict_to_json(const CausalVerdict& v, int indent) {
    nlohmann::json j;
    j["indicator"] = indicator_name(v.indicator);
    j["score_xy"] = v.score_xy;
    j["score_yx"] = v.score_yx;
    j["direction"] = direction_name(v.direction);
    j["confidence"] = v.confidence;
    nlohmann::json breakdown = nlohmann::json::array();
    for (const auto& s : v.breakdown) {
        nlohmann::json e;
        e["attribute"] = s.name;
        e["side"] = s.side == Side::X ? "x" : "y";
        e["marginal_bits"] = s.marginal_bits;
        e["baseline_bits"] = s.baseline_bits;
        e["conditional_bits"] = s.conditional_bits;
        e["excluded"] = s.excluded;
        breakdown.push_back(e);
    }
    j["breakdown"] = breakdown;
    j["runtime_ms"] = v.runtime_ms;
    if (!v.diagnostic.empty()) j["diagnostic"] = v.diagnostic;
    return j.dump(indent);
}

}  // namespace crack
