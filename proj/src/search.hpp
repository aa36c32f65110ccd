#pragma once

#include <optional>
#include <string>
#include <vector>

#include "forest.hpp"

namespace crack {

struct SearchOptions {
    double precision = 0.001;  // regression parameter grid
    bool trace = false;
};

struct TraceEntry {
    int iteration = 0;
    int tree = -1;
    int source = -1;
    std::string kind;
    double gain = 0.0;
    double total_bits = 0.0;
};

struct SearchResult {
    CodingForest forest;
    std::vector<TraceEntry> trace;
    double trivial_bits = 0.0;
    double final_bits = 0.0;
};

CodingTree trivial_tree(const Dataset& d, int attribute);
CodingForest trivial_forest(const Dataset& d);

/// OLS fit of y on x; order 1 gives {alpha, beta}, order 2 adds gamma.
/// Empty result when the normal equations are singular or a coefficient
/// is non-finite.
std::optional<std::vector<double>> fit_regression(const std::vector<double>& x,
                                                  const std::vector<double>& y,
                                                  int order);

struct Refinement {
    std::unique_ptr<TreeNode> subtree;
    double gain = 0.0;  // old subtree bits minus new subtree bits
    std::string kind;
};

/// Best split or regression of `leaf` (a leaf of attribute i's tree) on
/// source attribute j, or nullopt when nothing beats the current leaf.
std::optional<Refinement> refine_leaf(const Dataset& d, int i, const TreeNode& leaf,
                                      int j, const SearchOptions& opts);

/// Greedy coding-forest search: applies the single globally best refinement
/// per iteration until the total cost stops decreasing.
SearchResult crack_search(const Dataset& d, const ModelClass& cls,
                          const SearchOptions& opts = {});

}  // namespace crack
