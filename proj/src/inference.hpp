#pragma once

#include <string>
#include <vector>

#include "search.hpp"

namespace crack {

enum class Indicator { Delta, Nci };
enum class Direction { XtoY, YtoX, Inconclusive };

const char* indicator_name(Indicator i);
const char* direction_name(Direction d);

/// Marginal prior for numeric attributes: uniform over the resolution grid
/// of the observed range, or the raw -n log res form.
enum class MarginalMode { Domain, Res };

struct InferenceOptions {
    Indicator indicator = Indicator::Nci;
    double epsilon = 0.0;
    MarginalMode marginal = MarginalMode::Domain;
    SearchOptions search;
};

struct AttributeScore {
    int attribute = -1;
    std::string name;
    Side side = Side::X;
    double marginal_bits = 0.0;     // uniform-prior marginal, used by delta
    double baseline_bits = 0.0;     // trivial single-attribute tree, used by nci
    double conditional_bits = 0.0;  // tree cost when conditioned on the other side
    // Incompressible part of any numeric code: -n log2 res. Every leaf pays it
    // exactly once per point, so it cancels out of relative comparisons and the
    // NCI ratio is taken above it. Zero for nominal attributes.
    double floor_bits = 0.0;
    bool excluded = false;          // constant attribute
};

struct CausalVerdict {
    Indicator indicator = Indicator::Nci;
    Direction direction = Direction::Inconclusive;
    double score_xy = 0.0;
    double score_yx = 0.0;
    double confidence = 0.0;
    std::vector<AttributeScore> breakdown;
    double runtime_ms = 0.0;
    std::string diagnostic;
};

struct InferenceOutcome {
    double delta_xy = 0.0, delta_yx = 0.0;
    double nci_xy = 0.0, nci_yx = 0.0;
    bool scores_valid = false;
    std::string diagnostic;
    std::vector<AttributeScore> breakdown;
    SearchResult forward;   // M_{Y|X}: Y trees conditioned on X
    SearchResult backward;  // M_{X|Y}
    double runtime_ms = 0.0;

    CausalVerdict verdict(Indicator indicator, double epsilon) const;
};

Bits marginal_cost(const Attribute& a, std::size_t n, MarginalMode mode);

/// Cost of the attribute's trivial coding tree (one leaf, no dependencies);
/// the per-attribute normalizer for the NCI ratio.
Bits baseline_cost(const Attribute& a);

struct ConditionalCost {
    double total = 0.0;
    std::vector<std::pair<int, double>> per_attribute;  // target attr -> bits
    SearchResult search;
};

/// Runs the directed search (targets conditioned on the other side) and
/// sums the target-side tree costs.
ConditionalCost conditional_cost(const Dataset& d, Side target_side,
                                 const SearchOptions& opts);

/// Both directed searches plus both indicators in one pass.
InferenceOutcome infer(const Dataset& d, const InferenceOptions& opts);

CausalVerdict decide(Indicator indicator, double score_xy, double score_yx,
                     double epsilon);

std::string verdict_to_json(const CausalVerdict& v, int indent = -1);

}  // namespace crack
