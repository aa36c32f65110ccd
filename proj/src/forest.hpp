#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "codelength.hpp"
#include "dataset.hpp"

namespace crack {

struct TreeNode {
    enum class Kind { Leaf, SingleSplit, MultiwaySplit, Regression };

    Kind kind = Kind::Leaf;

    // Leaf payload. `values` holds the encoded numeric points (residuals
    // below a regression node); empty for nominal attributes.
    std::vector<int> rows;
    std::vector<double> values;
    LeafStats stats;
    std::uint64_t leaf_id = 0;

    // Internal nodes condition on attribute `source`.
    int source = -1;
    double threshold = 0.0;             // numeric single split: <= goes left
    int split_category = -1;            // nominal single split: == goes left
    long dup_threshold = 0;             // numeric multiway k
    std::vector<double> group_values;   // numeric multiway, one per non-residual child
    std::vector<int> group_categories;  // categorical multiway, one per child
    int order = 0;                      // regression order: 1 or 2
    std::vector<double> params;         // grid-rounded regression parameters

    std::vector<std::unique_ptr<TreeNode>> children;

    bool is_leaf() const { return kind == Kind::Leaf; }
    std::unique_ptr<TreeNode> clone() const;
};

std::uint64_t next_leaf_id();

/// Leaf over the given rows of attribute `a`; values may be residuals.
std::unique_ptr<TreeNode> make_leaf(const Attribute& a, std::vector<int> rows,
                                    std::vector<double> values);

struct CodingTree {
    int attribute = -1;
    std::unique_ptr<TreeNode> root;

    CodingTree() = default;
    CodingTree(int attr, std::unique_ptr<TreeNode> r) : attribute(attr), root(std::move(r)) {}
    CodingTree(const CodingTree& o) : attribute(o.attribute), root(o.root ? o.root->clone() : nullptr) {}
    CodingTree& operator=(const CodingTree& o) {
        attribute = o.attribute;
        root = o.root ? o.root->clone() : nullptr;
        return *this;
    }
    CodingTree(CodingTree&&) = default;
    CodingTree& operator=(CodingTree&&) = default;
};

struct Edge {
    int target = -1;  // tree that depends ...
    int source = -1;  // ... on this attribute
    bool operator==(const Edge&) const = default;
};

/// Which dependencies the search may introduce: allowed[i][j] says tree i
/// may split or regress on attribute j.
struct ModelClass {
    std::vector<std::vector<char>> allowed;

    static ModelClass no_dependencies(std::size_t m);
    /// Trees on `target_side` may depend on the opposite side only.
    static ModelClass conditional(const Dataset& d, Side target_side);

    bool allows(int i, int j) const { return allowed[i][j] != 0; }
    std::size_t size() const { return allowed.size(); }
};

struct CodingForest {
    std::vector<CodingTree> trees;
    std::vector<Edge> edges;

    bool has_edge(int target, int source) const;
};

struct Violation {
    std::string message;
};

/// DAG-ness, edge permissions, per-path source uniqueness, leaf typing,
/// and leaf row-partition exactness. Returns the first violation found.
std::optional<Violation> validate(const CodingForest& m, const ModelClass& cls,
                                  const Dataset& d);

struct RouteResult {
    std::vector<std::vector<int>> child_rows;
    std::vector<std::vector<double>> child_values;  // numeric payloads per child
};

/// Partition `rows` (with their encoded values) through an internal node.
/// Regression nodes pass everything to their single child as residuals.
RouteResult route(const TreeNode& node, const Dataset& d,
                  const std::vector<int>& rows, const std::vector<double>& values);

double regression_eval(const std::vector<double>& params, double x);

Bits tree_cost(const CodingTree& t, const Dataset& d, double precision);
Bits forest_cost(const CodingForest& m, const Dataset& d, double precision);

/// Graphviz DOT text for the dependency DAG, deterministic ordering.
std::string export_dag(const CodingForest& m, const Dataset& d);

/// JSON dump of the forest with a per-node cost breakdown.
std::string forest_to_json(const CodingForest& m, const Dataset& d, double precision);

void collect_leaves(TreeNode* node, std::vector<TreeNode*>* out);

}  // namespace crack
