#pragma once

#include <functional>
#include <string>
#include <vector>

#include "synth.hpp"

namespace crack {

struct PairResult {
    std::string id;
    Direction truth = Direction::XtoY;
    CausalVerdict verdict;
    double weight = 1.0;
    double runtime_ms = 0.0;

    bool decided(double confidence_threshold) const {
        return verdict.direction != Direction::Inconclusive &&
               verdict.confidence > confidence_threshold;
    }
    bool correct() const { return verdict.direction == truth; }
};

struct BenchOptions {
    Indicator indicator = Indicator::Nci;
    double epsilon = 0.0;
    /// Minimum confidence for a verdict to count as a decision in
    /// accuracy summaries.
    double confidence_threshold = 0.0;
    MarginalMode marginal = MarginalMode::Domain;
    double precision = 0.001;
    int threads = 1;
    bool undecided_as_half = true;  // decision-rate convention
};

struct SweepCell {
    SyntheticSpec spec;
    int pairs = 50;
};

struct SweepRow {
    double phi = 0.0;
    int k = 0, l = 0;
    std::string type_mode;
    int pairs = 0;
    int decided = 0;
    int correct = 0;
    double accuracy = 0.0;          // correct / decided; NaN when none decided
    double decided_fraction = 0.0;
};

/// Evaluate one generated pair; runs both directed searches.
PairResult evaluate_pair(const GeneratedPair& pair, const std::string& id,
                         const BenchOptions& opts);

/// One row per cell: generate `pairs` datasets and score them.
std::vector<SweepRow> run_sweep(const std::vector<SweepCell>& grid,
                                const BenchOptions& opts);

struct DecisionRatePoint {
    double rate = 0.0;      // fraction of pairs covered
    double accuracy = 0.0;  // weighted fraction correct within the prefix
};

/// Sort by confidence descending and report weighted prefix accuracy.
/// Undecided verdicts count as half correct (or are skipped entirely).
std::vector<DecisionRatePoint> decision_rate(const std::vector<PairResult>& results,
                                             const BenchOptions& opts);

struct BenchmarkPair {
    std::string id;
    Dataset data;
    Direction truth = Direction::XtoY;
    double weight = 1.0;
};

struct BenchmarkLoad {
    std::vector<BenchmarkPair> pairs;
    std::vector<std::string> warnings;
};

/// Directory of whitespace-separated pair files plus a metadata file with
/// lines: <pair-stem> <cause-first> <cause-last> <effect-first> <effect-last>
/// <weight> (column numbers 1-based). Unreadable entries are skipped with
/// a warning.
BenchmarkLoad load_benchmark_pairs(const std::string& directory);

std::vector<PairResult> evaluate_benchmark(const BenchmarkLoad& load,
                                           const BenchOptions& opts);

double weighted_accuracy(const std::vector<PairResult>& results,
                         const BenchOptions& opts);

}  // namespace crack
