#include "forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <queue>
#include <set>
#include <sstream>

#include <json.hpp>

namespace crack {

namespace {
std::atomic<std::uint64_t> g_leaf_counter{1};
}

std::uint64_t next_leaf_id() { return g_leaf_counter.fetch_add(1); }

std::unique_ptr<TreeNode> TreeNode::clone() const {
    auto out = std::make_unique<TreeNode>();
    out->kind = kind;
    out->rows = rows;
    out->values = values;
    out->stats = stats;
    out->leaf_id = leaf_id;
    out->source = source;
    out->threshold = threshold;
    out->split_category = split_category;
    out->dup_threshold = dup_threshold;
    out->group_values = group_values;
    out->group_categories = group_categories;
    out->order = order;
    out->params = params;
    for (const auto& c : children) out->children.push_back(c->clone());
    return out;
}

std::unique_ptr<TreeNode> make_leaf(const Attribute& a, std::vector<int> rows,
                                    std::vector<double> values) {
    auto leaf = std::make_unique<TreeNode>();
    leaf->kind = TreeNode::Kind::Leaf;
    leaf->leaf_id = next_leaf_id();
    if (is_nominal(a.type)) {
        std::vector<int> codes;
        codes.reserve(rows.size());
        for (int r : rows) codes.push_back(a.codes[static_cast<std::size_t>(r)]);
        leaf->stats = LeafStats::from_codes(codes, a.category_count);
    } else {
        leaf->stats = LeafStats::from_values(values);
        leaf->values = std::move(values);
    }
    leaf->rows = std::move(rows);
    return leaf;
}

ModelClass ModelClass::no_dependencies(std::size_t m) {
    ModelClass c;
    c.allowed.assign(m, std::vector<char>(m, 0));
    return c;
}

ModelClass ModelClass::conditional(const Dataset& d, Side target_side) {
    ModelClass c = no_dependencies(d.m());
    const auto& targets = target_side == Side::Y ? d.y_indices : d.x_indices;
    const auto& sources = target_side == Side::Y ? d.x_indices : d.y_indices;
    for (int i : targets)
        for (int j : sources) c.allowed[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
    return c;
}

bool CodingForest::has_edge(int target, int source) const {
    return std::find(edges.begin(), edges.end(), Edge{target, source}) != edges.end();
}

double regression_eval(const std::vector<double>& params, double x) {
    double y = params[0] + params[1] * x;
    if (params.size() > 2) y += params[2] * x * x;
    return y;
}

RouteResult route(const TreeNode& node, const Dataset& d,
                  const std::vector<int>& rows, const std::vector<double>& values) {
    RouteResult out;
    const Attribute& src = d.attributes[static_cast<std::size_t>(node.source)];
    bool numeric_payload = !values.empty() || rows.empty();
    auto push_to = [&](std::size_t child, std::size_t k) {
        out.child_rows[child].push_back(rows[k]);
        if (numeric_payload && k < values.size()) out.child_values[child].push_back(values[k]);
    };
    switch (node.kind) {
        case TreeNode::Kind::SingleSplit: {
            out.child_rows.resize(2);
            out.child_values.resize(2);
            for (std::size_t k = 0; k < rows.size(); ++k) {
                bool left;
                if (src.type == AttrType::Numeric)
                    left = src.values[static_cast<std::size_t>(rows[k])] <= node.threshold;
                else
                    left = src.codes[static_cast<std::size_t>(rows[k])] == node.split_category;
                push_to(left ? 0 : 1, k);
            }
            break;
        }
        case TreeNode::Kind::MultiwaySplit: {
            if (src.type == AttrType::Numeric) {
                out.child_rows.resize(node.group_values.size() + 1);
                out.child_values.resize(node.group_values.size() + 1);
                for (std::size_t k = 0; k < rows.size(); ++k) {
                    double v = src.values[static_cast<std::size_t>(rows[k])];
                    std::size_t child = node.group_values.size();  // residual
                    for (std::size_t g = 0; g < node.group_values.size(); ++g)
                        if (v == node.group_values[g]) {
                            child = g;
                            break;
                        }
                    push_to(child, k);
                }
            } else {
                out.child_rows.resize(node.group_categories.size());
                out.child_values.resize(node.group_categories.size());
                for (std::size_t k = 0; k < rows.size(); ++k) {
                    int code = src.codes[static_cast<std::size_t>(rows[k])];
                    auto it = std::find(node.group_categories.begin(),
                                        node.group_categories.end(), code);
                    if (it == node.group_categories.end())
                        throw InternalError("multiway split missing category child");
                    push_to(static_cast<std::size_t>(it - node.group_categories.begin()), k);
                }
            }
            break;
        }
        case TreeNode::Kind::Regression: {
            out.child_rows.resize(1);
            out.child_values.resize(1);
            out.child_rows[0] = rows;
            out.child_values[0].reserve(rows.size());
            for (std::size_t k = 0; k < rows.size(); ++k) {
                double x = src.values[static_cast<std::size_t>(rows[k])];
                out.child_values[0].push_back(values[k] - regression_eval(node.params, x));
            }
            break;
        }
        case TreeNode::Kind::Leaf:
            throw InternalError("route called on a leaf");
    }
    return out;
}

namespace {

Bits node_cost(const TreeNode& node, const Dataset& d, double precision) {
    const Attribute& src = d.attributes[static_cast<std::size_t>(node.source)];
    switch (node.kind) {
        case TreeNode::Kind::SingleSplit:
            return cost_single_split(d.m(), src);
        case TreeNode::Kind::MultiwaySplit:
            return cost_multiway_split(d.m(), src, node.dup_threshold);
        case TreeNode::Kind::Regression:
            return cost_regression(d.m(), node.params, precision);
        case TreeNode::Kind::Leaf:
            break;
    }
    throw InternalError("node_cost on a leaf");
}

Bits subtree_cost(const TreeNode& node, const Attribute& owner, const Dataset& d,
                  double precision) {
    if (node.is_leaf()) return 1.0 + leaf_cost(node.stats, owner);
    double bits = 1.0 + 1.0 + node_cost(node, d, precision);
    for (const auto& c : node.children) bits += subtree_cost(*c, owner, d, precision);
    return bits;
}

}  // namespace

Bits tree_cost(const CodingTree& t, const Dataset& d, double precision) {
    const Attribute& owner = d.attributes[static_cast<std::size_t>(t.attribute)];
    return subtree_cost(*t.root, owner, d, precision);
}

Bits forest_cost(const CodingForest& m, const Dataset& d, double precision) {
    double bits = 0.0;
    for (const auto& t : m.trees) bits += tree_cost(t, d, precision);
    return bits;
}

void collect_leaves(TreeNode* node, std::vector<TreeNode*>* out) {
    if (node->is_leaf()) {
        out->push_back(node);
        return;
    }
    for (auto& c : node->children) collect_leaves(c.get(), out);
}

namespace {

bool edges_acyclic(std::size_t m, const std::vector<Edge>& edges) {
    std::vector<std::vector<int>> adj(m);
    std::vector<int> indeg(m, 0);
    for (const auto& e : edges) {
        adj[static_cast<std::size_t>(e.source)].push_back(e.target);
        indeg[static_cast<std::size_t>(e.target)]++;
    }
    std::queue<int> q;
    for (std::size_t i = 0; i < m; ++i)
        if (indeg[i] == 0) q.push(static_cast<int>(i));
    std::size_t seen = 0;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        seen++;
        for (int w : adj[static_cast<std::size_t>(v)])
            if (--indeg[static_cast<std::size_t>(w)] == 0) q.push(w);
    }
    return seen == m;
}

std::optional<Violation> check_tree(const TreeNode& node, const CodingTree& t,
                                    const Dataset& d, std::vector<char>* on_path) {
    const Attribute& owner = d.attributes[static_cast<std::size_t>(t.attribute)];
    if (node.is_leaf()) {
        bool nominal_leaf = !node.stats.hist.empty();
        if (nominal_leaf != is_nominal(owner.type))
            return Violation{"tree " + std::to_string(t.attribute) +
                             ": leaf encoding does not match attribute type"};
        return std::nullopt;
    }
    if (node.source == t.attribute)
        return Violation{"tree " + std::to_string(t.attribute) + " conditions on itself"};
    if ((*on_path)[static_cast<std::size_t>(node.source)])
        return Violation{"tree " + std::to_string(t.attribute) + ": attribute " +
                         std::to_string(node.source) + " used twice on one path"};
    (*on_path)[static_cast<std::size_t>(node.source)] = 1;
    for (const auto& c : node.children)
        if (auto v = check_tree(*c, t, d, on_path)) return v;
    (*on_path)[static_cast<std::size_t>(node.source)] = 0;
    return std::nullopt;
}

void leaf_rows(const TreeNode& node, std::vector<int>* out) {
    if (node.is_leaf()) {
        out->insert(out->end(), node.rows.begin(), node.rows.end());
        return;
    }
    for (const auto& c : node.children) leaf_rows(*c, out);
}

void used_sources(const TreeNode& node, std::set<int>* out) {
    if (node.is_leaf()) return;
    out->insert(node.source);
    for (const auto& c : node.children) used_sources(*c, out);
}

}  // namespace

std::optional<Violation> validate(const CodingForest& m, const ModelClass& cls,
                                  const Dataset& d) {
    if (m.trees.size() != d.m())
        return Violation{"forest has " + std::to_string(m.trees.size()) +
                         " trees for " + std::to_string(d.m()) + " attributes"};
    if (!edges_acyclic(d.m(), m.edges)) return Violation{"dependency graph has a cycle"};
    for (const auto& e : m.edges)
        if (!cls.allows(e.target, e.source))
            return Violation{"edge " + std::to_string(e.target) + "<-" +
                             std::to_string(e.source) + " not permitted by model class"};
    for (const auto& t : m.trees) {
        std::vector<char> on_path(d.m(), 0);
        if (auto v = check_tree(*t.root, t, d, &on_path)) return v;
        std::set<int> sources;
        used_sources(*t.root, &sources);
        for (int j : sources)
            if (!m.has_edge(t.attribute, j))
                return Violation{"tree " + std::to_string(t.attribute) +
                                 " uses attribute " + std::to_string(j) +
                                 " without a recorded edge"};
        std::vector<int> rows;
        leaf_rows(*t.root, &rows);
        std::sort(rows.begin(), rows.end());
        if (rows.size() != d.n)
            return Violation{"tree " + std::to_string(t.attribute) +
                             " leaves do not cover all rows"};
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (rows[r] != static_cast<int>(r))
                return Violation{"tree " + std::to_string(t.attribute) +
                                 " leaf rows are not a partition"};
    }
    return std::nullopt;
}

std::string export_dag(const CodingForest& m, const Dataset& d) {
    std::ostringstream out;
    out << "digraph dependencies {\n";
    for (std::size_t i = 0; i < d.m(); ++i)
        out << "  a" << i << " [label=\"" << d.attributes[i].name << "\"];\n";
    std::vector<Edge> edges = m.edges;
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.target != b.target ? a.target < b.target : a.source < b.source;
    });
    for (const auto& e : edges) out << "  a" << e.source << " -> a" << e.target << ";\n";
    out << "}\n";
    return out.str();
}

namespace {

nlohmann::json node_to_json(const TreeNode& node, const CodingTree& t,
                            const Dataset& d, double precision) {
    nlohmann::json j;
    const Attribute& owner = d.attributes[static_cast<std::size_t>(t.attribute)];
    switch (node.kind) {
        case TreeNode::Kind::Leaf:
            j["kind"] = "leaf";
            j["count"] = node.stats.count;
            j["cost_bits"] = leaf_cost(node.stats, owner);
            break;
        case TreeNode::Kind::SingleSplit:
            j["kind"] = "single_split";
            j["source"] = node.source;
            if (d.attributes[static_cast<std::size_t>(node.source)].type == AttrType::Numeric)
                j["threshold"] = node.threshold;
            else
                j["category"] = node.split_category;
            j["cost_bits"] = node_cost(node, d, precision);
            break;
        case TreeNode::Kind::MultiwaySplit:
            j["kind"] = "multiway_split";
            j["source"] = node.source;
            if (node.dup_threshold > 0) j["k"] = node.dup_threshold;
            j["cost_bits"] = node_cost(node, d, precision);
            break;
        case TreeNode::Kind::Regression:
            j["kind"] = "regression";
            j["source"] = node.source;
            j["order"] = node.order;
            j["params"] = node.params;
            j["cost_bits"] = node_cost(node, d, precision);
            break;
    }
    if (!node.is_leaf()) {
        nlohmann::json kids = nlohmann::json::array();
        for (const auto& c : node.children) kids.push_back(node_to_json(*c, t, d, precision));
        j["children"] = kids;
    }
    return j;
}

}  // namespace

std::string forest_to_json(const CodingForest& m, const Dataset& d, double precision) {
    nlohmann::json j;
    j["trees"] = nlohmann::json::array();
    for (const auto& t : m.trees) {
        nlohmann::json tj;
        tj["attribute"] = t.attribute;
        tj["name"] = d.attributes[static_cast<std::size_t>(t.attribute)].name;
        tj["cost_bits"] = tree_cost(t, d, precision);
        tj["root"] = node_to_json(*t.root, t, d, precision);
        j["trees"].push_back(tj);
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : m.edges)
        edges.push_back({{"target", e.target}, {"source", e.source}});
    j["edges"] = edges;
    j["total_bits"] = forest_cost(m, d, precision);
    return j.dump(2);
}

}  // namespace crack
