#include "search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace crack {

namespace {

constexpr double kMinGain = 1e-9;

double nominal_cost_from(long count, const std::vector<long>& hist) {
    if (count == 0) return 0.0;
    double entropy = count * std::log2(static_cast<double>(count));
    for (long h : hist)
        if (h > 0) entropy -= h * std::log2(static_cast<double>(h));
    return entropy + nml_regret(count, static_cast<int>(hist.size()));
}

double nominal_cost(long count, double sum_hlogh, int k) {
    if (count == 0) return 0.0;
    double entropy = count * std::log2(static_cast<double>(count)) - sum_hlogh;
    return entropy + nml_regret(count, k);
}

double numeric_cost(long count, double sum, double sum2, double mn, double mx,
                    const Attribute& owner) {
    LeafStats s;
    s.count = count;
    if (count > 0) {
        s.mean = sum / count;
        s.var = std::max(0.0, sum2 / count - s.mean * s.mean);
        s.vmin = mn;
        s.vmax = mx;
    }
    return leaf_numeric(s, owner.resolution, domain_size(owner));
}

struct NumericAgg {
    long count = 0;
    double sum = 0, sum2 = 0;
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    void add(double v) {
        count++;
        sum += v;
        sum2 += v * v;
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    double cost(const Attribute& owner) const {
        return numeric_cost(count, sum, sum2, mn, mx, owner);
    }
};

// Candidate descriptor; the subtree is only built for the winner.
struct Desc {
    TreeNode::Kind kind = TreeNode::Kind::Leaf;
    double threshold = 0.0;
    int split_category = -1;
    long dup_threshold = 0;
    std::vector<double> group_values;
    std::vector<int> group_categories;
    int order = 0;
    std::vector<double> raw_params;
    double cost = std::numeric_limits<double>::infinity();
    const char* label = "";
};

const char* kind_label(const Desc& d) { return d.label; }

}  // namespace

CodingTree trivial_tree(const Dataset& d, int attribute) {
    const Attribute& a = d.attributes[static_cast<std::size_t>(attribute)];
    std::vector<int> rows(d.n);
    std::iota(rows.begin(), rows.end(), 0);
    std::vector<double> values;
    if (a.type == AttrType::Numeric) values = a.values;
    return CodingTree(attribute, make_leaf(a, std::move(rows), std::move(values)));
}

CodingForest trivial_forest(const Dataset& d) {
    CodingForest f;
    for (std::size_t i = 0; i < d.m(); ++i)
        f.trees.push_back(trivial_tree(d, static_cast<int>(i)));
    return f;
}

std::optional<std::vector<double>> fit_regression(const std::vector<double>& x,
                                                  const std::vector<double>& y,
                                                  int order) {
    std::size_t n = x.size();
    if (n != y.size() || n < static_cast<std::size_t>(order) + 2) return std::nullopt;
    int p = order + 1;
    // normal equations, solved by Gaussian elimination with partial pivoting
    double xtx[3][3] = {{0}};
    double xty[3] = {0};
    for (std::size_t r = 0; r < n; ++r) {
        double basis[3] = {1.0, x[r], x[r] * x[r]};
        for (int a = 0; a < p; ++a) {
            for (int b = 0; b < p; ++b) xtx[a][b] += basis[a] * basis[b];
            xty[a] += basis[a] * y[r];
        }
    }
    double scale = 0.0;
    for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) scale = std::max(scale, std::fabs(xtx[a][b]));
    for (int col = 0; col < p; ++col) {
        int pivot = col;
        for (int r = col + 1; r < p; ++r)
            if (std::fabs(xtx[r][col]) > std::fabs(xtx[pivot][col])) pivot = r;
        if (std::fabs(xtx[pivot][col]) < 1e-12 * std::max(1.0, scale)) return std::nullopt;
        if (pivot != col) {
            for (int b = 0; b < p; ++b) std::swap(xtx[col][b], xtx[pivot][b]);
            std::swap(xty[col], xty[pivot]);
        }
        for (int r = col + 1; r < p; ++r) {
            double f = xtx[r][col] / xtx[col][col];
            for (int b = col; b < p; ++b) xtx[r][b] -= f * xtx[col][b];
            xty[r] -= f * xty[col];
        }
    }
    std::vector<double> theta(static_cast<std::size_t>(p), 0.0);
    for (int r = p - 1; r >= 0; --r) {
        double acc = xty[r];
        for (int b = r + 1; b < p; ++b) acc -= xtx[r][b] * theta[static_cast<std::size_t>(b)];
        theta[static_cast<std::size_t>(r)] = acc / xtx[r][r];
    }
    for (double t : theta)
        if (!std::isfinite(t)) return std::nullopt;
    return theta;
}

namespace {

std::unique_ptr<TreeNode> build_subtree(const Dataset& d, const Attribute& owner,
                                        const TreeNode& leaf, int j, const Desc& desc,
                                        double precision) {
    auto node = std::make_unique<TreeNode>();
    node->kind = desc.kind;
    node->source = j;
    node->threshold = desc.threshold;
    node->split_category = desc.split_category;
    node->dup_threshold = desc.dup_threshold;
    node->group_values = desc.group_values;
    node->group_categories = desc.group_categories;
    node->order = desc.order;
    if (desc.kind == TreeNode::Kind::Regression)
        node->params = round_parameters(desc.raw_params, precision);
    RouteResult rr = route(*node, d, leaf.rows, leaf.values);
    for (std::size_t c = 0; c < rr.child_rows.size(); ++c)
        node->children.push_back(
            make_leaf(owner, std::move(rr.child_rows[c]), std::move(rr.child_values[c])));
    return node;
}

}  // namespace

std::optional<Refinement> refine_leaf(const Dataset& d, int i, const TreeNode& leaf,
                                      int j, const SearchOptions& opts) {
    const Attribute& owner = d.attributes[static_cast<std::size_t>(i)];
    const Attribute& src = d.attributes[static_cast<std::size_t>(j)];
    std::size_t s = leaf.rows.size();
    if (s < 2) return std::nullopt;

    bool owner_nominal = is_nominal(owner.type);
    int ki = owner_nominal ? owner.category_count : 0;
    std::size_t m = d.m();

    double current_cost = 1.0 + leaf_cost(leaf.stats, owner);
    Desc best;

    if (src.type == AttrType::Numeric) {
        // order leaf entries by the source value
        std::vector<int> order(s);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            double va = src.values[static_cast<std::size_t>(leaf.rows[static_cast<std::size_t>(a)])];
            double vb = src.values[static_cast<std::size_t>(leaf.rows[static_cast<std::size_t>(b)])];
            if (va != vb) return va < vb;
            return a < b;
        });
        std::vector<double> xs(s);
        for (std::size_t k = 0; k < s; ++k)
            xs[k] = src.values[static_cast<std::size_t>(leaf.rows[static_cast<std::size_t>(order[k])])];
        bool src_constant = xs.front() == xs.back();

        if (!src_constant && domain_size(src) > 1.0) {
            double split_node_cost = cost_single_split(m, src);
            if (owner_nominal) {
                std::vector<long> histL(static_cast<std::size_t>(ki), 0);
                std::vector<long> histR(leaf.stats.hist.begin(), leaf.stats.hist.end());
                double sumL = 0.0;
                double sumR = 0.0;
                for (long h : histR)
                    if (h > 0) sumR += h * std::log2(static_cast<double>(h));
                for (std::size_t pos = 0; pos + 1 < s; ++pos) {
                    int code = owner.codes[static_cast<std::size_t>(
                        leaf.rows[static_cast<std::size_t>(order[pos])])];
                    long& hl = histL[static_cast<std::size_t>(code)];
                    long& hr = histR[static_cast<std::size_t>(code)];
                    if (hl > 0) sumL -= hl * std::log2(static_cast<double>(hl));
                    sumL += (hl + 1) * std::log2(static_cast<double>(hl + 1));
                    sumR -= hr * std::log2(static_cast<double>(hr));
                    if (hr > 1) sumR += (hr - 1) * std::log2(static_cast<double>(hr - 1));
                    hl++;
                    hr--;
                    if (xs[pos + 1] == xs[pos]) continue;
                    long nl = static_cast<long>(pos) + 1;
                    long nr = static_cast<long>(s) - nl;
                    double cost = 2.0 + split_node_cost + 2.0 +
                                  nominal_cost(nl, sumL, ki) + nominal_cost(nr, sumR, ki);
                    if (cost < best.cost) {
                        Desc cand;
                        cand.kind = TreeNode::Kind::SingleSplit;
                        cand.threshold = (xs[pos] + xs[pos + 1]) / 2.0;
                        cand.cost = cost;
                        cand.label = "single_split";
                        best = std::move(cand);
                    }
                }
            } else {
                std::vector<double> ys(s);
                for (std::size_t k = 0; k < s; ++k)
                    ys[k] = leaf.values[static_cast<std::size_t>(order[k])];
                std::vector<double> sufmin(s + 1, std::numeric_limits<double>::infinity());
                std::vector<double> sufmax(s + 1, -std::numeric_limits<double>::infinity());
                for (std::size_t k = s; k-- > 0;) {
                    sufmin[k] = std::min(sufmin[k + 1], ys[k]);
                    sufmax[k] = std::max(sufmax[k + 1], ys[k]);
                }
                double sumL = 0, sum2L = 0;
                double minL = std::numeric_limits<double>::infinity();
                double maxL = -std::numeric_limits<double>::infinity();
                double sumT = 0, sum2T = 0;
                for (double v : ys) {
                    sumT += v;
                    sum2T += v * v;
                }
                for (std::size_t pos = 0; pos + 1 < s; ++pos) {
                    double v = ys[pos];
                    sumL += v;
                    sum2L += v * v;
                    minL = std::min(minL, v);
                    maxL = std::max(maxL, v);
                    if (xs[pos + 1] == xs[pos]) continue;
                    long nl = static_cast<long>(pos) + 1;
                    long nr = static_cast<long>(s) - nl;
                    double cost = 2.0 + split_node_cost + 2.0 +
                                  numeric_cost(nl, sumL, sum2L, minL, maxL, owner) +
                                  numeric_cost(nr, sumT - sumL, sum2T - sum2L,
                                               sufmin[pos + 1], sufmax[pos + 1], owner);
                    if (cost < best.cost) {
                        Desc cand;
                        cand.kind = TreeNode::Kind::SingleSplit;
                        cand.threshold = (xs[pos] + xs[pos + 1]) / 2.0;
                        cand.cost = cost;
                        cand.label = "single_split";
                        best = std::move(cand);
                    }
                }
            }
        }

        // multiway: only non-deterministic (duplicated) source values
        if (!src_constant) {
            std::vector<std::pair<std::size_t, std::size_t>> runs;  // [begin, end)
            std::size_t begin = 0;
            for (std::size_t k = 1; k <= s; ++k) {
                if (k == s || xs[k] != xs[begin]) {
                    runs.emplace_back(begin, k);
                    begin = k;
                }
            }
            std::vector<long> dup_lengths;
            for (auto& r : runs)
                if (r.second - r.first >= 2) dup_lengths.push_back(static_cast<long>(r.second - r.first));
            std::sort(dup_lengths.begin(), dup_lengths.end());
            dup_lengths.erase(std::unique(dup_lengths.begin(), dup_lengths.end()),
                              dup_lengths.end());
            for (long k_thresh : dup_lengths) {
                double cost = 2.0 + cost_multiway_split(m, src, k_thresh);
                std::vector<double> groups;
                if (owner_nominal) {
                    std::vector<long> hist(static_cast<std::size_t>(ki), 0);
                    std::vector<long> reshist(static_cast<std::size_t>(ki), 0);
                    for (auto& r : runs) {
                        std::size_t len = r.second - r.first;
                        if (len >= static_cast<std::size_t>(k_thresh) && len >= 2) {
                            std::fill(hist.begin(), hist.end(), 0);
                            for (std::size_t k = r.first; k < r.second; ++k)
                                hist[static_cast<std::size_t>(owner.codes[static_cast<std::size_t>(
                                    leaf.rows[static_cast<std::size_t>(order[k])])])]++;
                            cost += 1.0 + nominal_cost_from(static_cast<long>(len), hist);
                            groups.push_back(xs[r.first]);
                        } else {
                            for (std::size_t k = r.first; k < r.second; ++k)
                                reshist[static_cast<std::size_t>(owner.codes[static_cast<std::size_t>(
                                    leaf.rows[static_cast<std::size_t>(order[k])])])]++;
                        }
                    }
                    long rc = std::accumulate(reshist.begin(), reshist.end(), 0L);
                    cost += 1.0 + nominal_cost_from(rc, reshist);
                } else {
                    NumericAgg residual;
                    std::vector<double> ys(s);
                    for (std::size_t k = 0; k < s; ++k)
                        ys[k] = leaf.values[static_cast<std::size_t>(order[k])];
                    for (auto& r : runs) {
                        std::size_t len = r.second - r.first;
                        if (len >= static_cast<std::size_t>(k_thresh) && len >= 2) {
                            NumericAgg g;
                            for (std::size_t k = r.first; k < r.second; ++k) g.add(ys[k]);
                            cost += 1.0 + g.cost(owner);
                            groups.push_back(xs[r.first]);
                        } else {
                            for (std::size_t k = r.first; k < r.second; ++k) residual.add(ys[k]);
                        }
                    }
                    cost += 1.0 + residual.cost(owner);
                }
                if (!groups.empty() && cost < best.cost) {
                    Desc cand;
                    cand.kind = TreeNode::Kind::MultiwaySplit;
                    cand.dup_threshold = k_thresh;
                    cand.group_values = std::move(groups);
                    cand.cost = cost;
                    cand.label = "multiway_split";
                    best = std::move(cand);
                }
            }
        }

        // regression, numeric on numeric only; split wins exact ties
        if (!owner_nominal && !src_constant) {
            std::vector<double> xvals(s), yvals(s);
            for (std::size_t k = 0; k < s; ++k) {
                xvals[k] = src.values[static_cast<std::size_t>(leaf.rows[k])];
                yvals[k] = leaf.values[k];
            }
            for (int ord = 1; ord <= 2; ++ord) {
                if (s < static_cast<std::size_t>(ord) + 3) continue;
                auto fit = fit_regression(xvals, yvals, ord);
                if (!fit) continue;
                std::vector<double> rounded;
                double reg_bits = cost_regression(m, *fit, opts.precision, &rounded);
                LeafStats rs;
                {
                    std::vector<double> residuals(s);
                    for (std::size_t k = 0; k < s; ++k)
                        residuals[k] = yvals[k] - regression_eval(rounded, xvals[k]);
                    rs = LeafStats::from_values(residuals);
                }
                double cost = 2.0 + reg_bits + 1.0 +
                              leaf_numeric(rs, owner.resolution, domain_size(owner));
                if (cost < best.cost) {
                    Desc cand;
                    cand.kind = TreeNode::Kind::Regression;
                    cand.order = ord;
                    cand.raw_params = *fit;
                    cand.cost = cost;
                    cand.label = ord == 1 ? "linear_regression" : "quadratic_regression";
                    best = std::move(cand);
                }
            }
        }
    } else {
        // nominal source: per-category aggregates
        int kj = src.category_count;
        std::vector<long> cat_count(static_cast<std::size_t>(kj), 0);
        std::vector<std::vector<long>> table;  // nominal owner: kj x ki
        std::vector<NumericAgg> aggs;          // numeric owner
        if (owner_nominal)
            table.assign(static_cast<std::size_t>(kj), std::vector<long>(static_cast<std::size_t>(ki), 0));
        else
            aggs.assign(static_cast<std::size_t>(kj), NumericAgg{});
        for (std::size_t k = 0; k < s; ++k) {
            int row = leaf.rows[k];
            int cj = src.codes[static_cast<std::size_t>(row)];
            cat_count[static_cast<std::size_t>(cj)]++;
            if (owner_nominal)
                table[static_cast<std::size_t>(cj)][static_cast<std::size_t>(owner.codes[static_cast<std::size_t>(row)])]++;
            else
                aggs[static_cast<std::size_t>(cj)].add(leaf.values[k]);
        }

        double split_node_cost = cost_single_split(m, src);
        for (int c = 0; c < kj; ++c) {
            long nl = cat_count[static_cast<std::size_t>(c)];
            long nr = static_cast<long>(s) - nl;
            if (nl == 0 || nr == 0) continue;
            double cost = 2.0 + split_node_cost + 2.0;
            if (owner_nominal) {
                std::vector<long> right(static_cast<std::size_t>(ki), 0);
                for (int cc = 0; cc < kj; ++cc) {
                    if (cc == c) continue;
                    for (int t = 0; t < ki; ++t)
                        right[static_cast<std::size_t>(t)] += table[static_cast<std::size_t>(cc)][static_cast<std::size_t>(t)];
                }
                cost += nominal_cost_from(nl, table[static_cast<std::size_t>(c)]) +
                        nominal_cost_from(nr, right);
            } else {
                NumericAgg right;
                for (int cc = 0; cc < kj; ++cc) {
                    if (cc == c) continue;
                    const NumericAgg& g = aggs[static_cast<std::size_t>(cc)];
                    if (g.count == 0) continue;
                    right.count += g.count;
                    right.sum += g.sum;
                    right.sum2 += g.sum2;
                    right.mn = std::min(right.mn, g.mn);
                    right.mx = std::max(right.mx, g.mx);
                }
                cost += aggs[static_cast<std::size_t>(c)].cost(owner) + right.cost(owner);
            }
            if (cost < best.cost) {
                Desc cand;
                cand.kind = TreeNode::Kind::SingleSplit;
                cand.split_category = c;
                cand.cost = cost;
                cand.label = "single_split";
                best = std::move(cand);
            }
        }

        if (src.type == AttrType::Categorical) {
            std::vector<int> present;
            for (int c = 0; c < kj; ++c)
                if (cat_count[static_cast<std::size_t>(c)] > 0) present.push_back(c);
            if (present.size() >= 2) {
                double cost = 2.0 + cost_multiway_split(m, src, 0);
                for (int c : present) {
                    cost += 1.0;
                    if (owner_nominal)
                        cost += nominal_cost_from(cat_count[static_cast<std::size_t>(c)],
                                                  table[static_cast<std::size_t>(c)]);
                    else
                        cost += aggs[static_cast<std::size_t>(c)].cost(owner);
                }
                if (cost < best.cost) {
                    Desc cand;
                    cand.kind = TreeNode::Kind::MultiwaySplit;
                    cand.group_categories = present;
                    cand.cost = cost;
                    cand.label = "multiway_split";
                    best = std::move(cand);
                }
            }
        }
    }

    if (!(best.cost < current_cost)) return std::nullopt;

    auto subtree = build_subtree(d, owner, leaf, j, best, opts.precision);
    double exact_cost = 0.0;
    {
        // recompute from the built subtree so the reported gain is exact
        CodingTree tmp(i, subtree->clone());
        exact_cost = tree_cost(tmp, d, opts.precision);
    }
    double gain = current_cost - exact_cost;
    if (gain <= kMinGain) return std::nullopt;

    Refinement r;
    r.subtree = std::move(subtree);
    r.gain = gain;
    r.kind = kind_label(best);
    return r;
}

namespace {

bool would_cycle(const std::vector<Edge>& edges, int target, int source, std::size_t m) {
    // adding target->source cycles iff source already (transitively) depends on target
    std::vector<char> seen(m, 0);
    std::vector<int> stack{source};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        if (v == target) return true;
        if (seen[static_cast<std::size_t>(v)]) continue;
        seen[static_cast<std::size_t>(v)] = 1;
        for (const auto& e : edges)
            if (e.target == v) stack.push_back(e.source);
    }
    return false;
}

void collect_with_paths(TreeNode* node, std::vector<char>& path,
                        std::vector<std::pair<TreeNode*, std::vector<char>>>* out) {
    if (node->is_leaf()) {
        out->emplace_back(node, path);
        return;
    }
    path[static_cast<std::size_t>(node->source)] = 1;
    for (auto& c : node->children) collect_with_paths(c.get(), path, out);
    path[static_cast<std::size_t>(node->source)] = 0;
}

bool replace_leaf(std::unique_ptr<TreeNode>& node, std::uint64_t leaf_id,
                  std::unique_ptr<TreeNode>& subtree) {
    if (node->is_leaf()) {
        if (node->leaf_id != leaf_id) return false;
        node = std::move(subtree);
        return true;
    }
    for (auto& c : node->children)
        if (replace_leaf(c, leaf_id, subtree)) return true;
    return false;
}

}  // namespace

SearchResult crack_search(const Dataset& d, const ModelClass& cls,
                          const SearchOptions& opts) {
    SearchResult result;
    result.forest = trivial_forest(d);
    result.trivial_bits = forest_cost(result.forest, d, opts.precision);
    std::size_t m = d.m();

    // (leaf_id, j) -> evaluated refinement; row per tree, cleared when the
    // tree is modified. Other trees' leaves are untouched so entries stay valid.
    std::vector<std::unordered_map<std::uint64_t, std::optional<Refinement>>> cache(m);
    auto cache_key = [](std::uint64_t leaf_id, int j) {
        return (leaf_id << 12) | static_cast<std::uint64_t>(j);
    };
    if (m >= 4096) throw InputError("too many attributes");

    int iteration = 0;
    while (true) {
        iteration++;
        double best_gain = 0.0;
        int best_i = -1, best_j = -1;
        std::uint64_t best_leaf = 0;
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<std::pair<TreeNode*, std::vector<char>>> leaves;
            std::vector<char> path(m, 0);
            collect_with_paths(result.forest.trees[i].root.get(), path, &leaves);
            for (auto& [leaf, leaf_path] : leaves) {
                for (std::size_t j = 0; j < m; ++j) {
                    if (j == i || !cls.allows(static_cast<int>(i), static_cast<int>(j)))
                        continue;
                    if (d.attributes[j].constant) continue;
                    if (leaf_path[j]) continue;
                    if (would_cycle(result.forest.edges, static_cast<int>(i),
                                    static_cast<int>(j), m))
                        continue;
                    auto key = cache_key(leaf->leaf_id, static_cast<int>(j));
                    auto it = cache[i].find(key);
                    if (it == cache[i].end()) {
                        it = cache[i]
                                 .emplace(key, refine_leaf(d, static_cast<int>(i), *leaf,
                                                           static_cast<int>(j), opts))
                                 .first;
                    }
                    if (it->second && it->second->gain > best_gain) {
                        best_gain = it->second->gain;
                        best_i = static_cast<int>(i);
                        best_j = static_cast<int>(j);
                        best_leaf = leaf->leaf_id;
                    }
                }
            }
        }
        if (best_i < 0 || best_gain <= kMinGain) break;

        auto key = cache_key(best_leaf, best_j);
        Refinement chosen = std::move(*cache[static_cast<std::size_t>(best_i)][key]);
        if (!replace_leaf(result.forest.trees[static_cast<std::size_t>(best_i)].root,
                          best_leaf, chosen.subtree))
            throw InternalError("refined leaf vanished");
        if (!result.forest.has_edge(best_i, best_j))
            result.forest.edges.push_back(Edge{best_i, best_j});
        cache[static_cast<std::size_t>(best_i)].clear();

        if (opts.trace) {
            TraceEntry t;
            t.iteration = iteration;
            t.tree = best_i;
            t.source = best_j;
            t.kind = chosen.kind;
            t.gain = best_gain;
            t.total_bits = forest_cost(result.forest, d, opts.precision);
            result.trace.push_back(t);
        }
    }

    result.final_bits = forest_cost(result.forest, d, opts.precision);
    return result;
}

}  // namespace crack
