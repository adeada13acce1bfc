#include "phonboost/c45.hpp"

#include "phonboost/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace phonboost::c45 {

namespace {

// slack on weight comparisons so that uniform weights rescaled to mean 1 do not fall a few ulps short
constexpr double weight_slack = 1e-9;

double entropy_unchecked(std::span<const double> w, double total) {
    double h = 0.0;
    for (const double wc : w) {
        if (wc > 0.0) {
            const double p = wc / total;
            h -= p * std::log2(p);
        }
    }
    return h;
}

double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) {
        return 0.0;
    }
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

struct Candidate {
    Eigen::Index attribute;
    double threshold;
    double gain_ratio;
    double gain;
};

std::optional<Split> pick(const std::vector<Candidate> &candidates) {
    if (candidates.empty()) {
        return std::nullopt;
    }
    double best = candidates.front().gain_ratio;
    for (const Candidate &c : candidates) {
        best = std::max(best, c.gain_ratio);
    }
    const double cutoff = best - gain_ratio_tie_tolerance * std::max(1.0, std::abs(best));
    // candidates arrive ordered by (attribute, threshold)
    for (const Candidate &c : candidates) {
        if (c.gain_ratio >= cutoff) {
            return Split{ c.attribute, c.threshold, c.gain_ratio, c.gain };
        }
    }
    return std::nullopt;
}

class Grower {
  public:
    Grower(const Dataset &d, std::vector<double> weights, const C45Params &params) :
        d_{ d },
        w_{ std::move(weights) },
        params_{ params },
        k_{ static_cast<std::size_t>(d.num_classes()) } { }

    std::vector<double> class_weights(std::span<const std::size_t> rows) const {
        std::vector<double> cw(k_, 0.0);
        for (const std::size_t r : rows) {
            cw[static_cast<std::size_t>(d_.label(r))] += w_[r];
        }
        return cw;
    }

    std::optional<Split> find_split(std::span<const std::size_t> rows) const {
        const std::vector<double> parent = class_weights(rows);
        const double total = std::accumulate(parent.begin(), parent.end(), 0.0);
        const double h_parent = entropy_unchecked(parent, total);
        const double min_leaf = params_.min_weight_leaf * (1.0 - weight_slack);

        std::vector<Candidate> candidates;
        std::vector<std::size_t> order(rows.begin(), rows.end());
        std::vector<double> left(k_);
        std::vector<double> right(k_);
        const auto &x = d_.features();
        for (Eigen::Index a = 0; a < d_.dimension(); ++a) {
            std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
                const double xi = x(static_cast<Eigen::Index>(i), a);
                const double xj = x(static_cast<Eigen::Index>(j), a);
                return xi < xj || (xi == xj && i < j);
            });
            std::fill(left.begin(), left.end(), 0.0);
            double w_left = 0.0;
            for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
                const std::size_t r = order[pos];
                left[static_cast<std::size_t>(d_.label(r))] += w_[r];
                w_left += w_[r];
                const double v = x(static_cast<Eigen::Index>(r), a);
                const double v_next = x(static_cast<Eigen::Index>(order[pos + 1]), a);
                if (!(v < v_next)) {
                    continue;
                }
                const double w_right = total - w_left;
                if (w_left < min_leaf || w_right < min_leaf) {
                    continue;
                }
                for (std::size_t c = 0; c < k_; ++c) {
                    right[c] = std::max(0.0, parent[c] - left[c]);
                }
                const double p_left = w_left / total;
                const double gain = h_parent - p_left * entropy_unchecked(left, w_left) - (1.0 - p_left) * entropy_unchecked(right, w_right);
                if (gain < params_.min_gain) {
                    continue;
                }
                const double split_info = binary_entropy(p_left);
                if (!(split_info > 0.0)) {
                    continue;
                }
                double threshold = 0.5 * (v + v_next);
                if (!(threshold < v_next)) {
                    threshold = v;
                }
                candidates.push_back({ a, threshold, gain / split_info, gain });
            }
        }
        return pick(candidates);
    }

    std::unique_ptr<TreeNode> grow(std::vector<std::size_t> rows, int depth) const {
        std::vector<double> cw = class_weights(rows);
        const double total = std::accumulate(cw.begin(), cw.end(), 0.0);
        const auto present = std::count_if(cw.begin(), cw.end(), [](double v) { return v > 0.0; });
        const bool depth_capped = params_.max_depth >= 0 && depth >= params_.max_depth;
        const bool too_light = total < 2.0 * params_.min_weight_leaf * (1.0 - weight_slack);

        if (present <= 1 || depth_capped || too_light) {
            return make_leaf(std::move(cw));
        }
        const std::optional<Split> split = find_split(rows);
        if (!split) {
            return make_leaf(std::move(cw));
        }
        std::vector<std::size_t> left_rows;
        std::vector<std::size_t> right_rows;
        for (const std::size_t r : rows) {
            (d_.features()(static_cast<Eigen::Index>(r), split->attribute) <= split->threshold ? left_rows : right_rows).push_back(r);
        }
        auto node = std::make_unique<TreeNode>();
        node->content = TreeNode::Internal{ split->attribute, split->threshold, grow(std::move(left_rows), depth + 1), grow(std::move(right_rows), depth + 1) };
        return node;
    }

  private:
    static std::unique_ptr<TreeNode> make_leaf(std::vector<double> cw) {
        auto node = std::make_unique<TreeNode>();
        node->content = TreeNode::Leaf{ std::move(cw) };
        return node;
    }

    const Dataset &d_;
    std::vector<double> w_;
    C45Params params_;
    std::size_t k_;
};

/// Weights rescaled to mean 1 over all samples; throws on invalid input.
std::vector<double> normalized_weights(const Dataset &d, std::span<const double> weights) {
    if (weights.size() != d.size()) {
        throw invalid_argument{ "weights do not align with samples" };
    }
    double total = 0.0;
    for (const double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw invalid_argument{ "sample weights must be finite and nonnegative" };
        }
        total += w;
    }
    if (!(total > 0.0)) {
        throw invalid_argument{ "sample weights must have a positive sum" };
    }
    const double scale = static_cast<double>(d.size()) / total;
    std::vector<double> out(weights.begin(), weights.end());
    for (double &w : out) {
        w *= scale;
    }
    return out;
}

std::vector<std::size_t> positive_rows(std::span<const double> w) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] > 0.0) {
            rows.push_back(i);
        }
    }
    return rows;
}

nlohmann::json node_to_json(const TreeNode &node) {
    if (const auto *leaf = std::get_if<TreeNode::Leaf>(&node.content)) {
        return { { "type", "leaf" }, { "class_weights", leaf->class_weights } };
    }
    const auto &in = std::get<TreeNode::Internal>(node.content);
    return { { "type", "split" }, { "attribute", in.attribute }, { "threshold", in.threshold }, { "left", node_to_json(*in.left) }, { "right", node_to_json(*in.right) } };
}

std::unique_ptr<TreeNode> node_from_json(const nlohmann::json &j, std::size_t k, Eigen::Index dim) {
    auto node = std::make_unique<TreeNode>();
    const std::string type = j.at("type").get<std::string>();
    if (type == "leaf") {
        auto cw = j.at("class_weights").get<std::vector<double>>();
        if (cw.size() != k) {
            throw data_error{ "tree leaf has wrong number of class weights" };
        }
        node->content = TreeNode::Leaf{ std::move(cw) };
    } else if (type == "split") {
        const auto attribute = j.at("attribute").get<Eigen::Index>();
        if (attribute < 0 || attribute >= dim) {
            throw data_error{ "tree split attribute out of range" };
        }
        node->content = TreeNode::Internal{ attribute, j.at("threshold").get<double>(), node_from_json(j.at("left"), k, dim), node_from_json(j.at("right"), k, dim) };
    } else {
        throw data_error{ "unknown tree node type '" + type + "'" };
    }
    return node;
}

int depth_of(const TreeNode &n) {
    if (n.is_leaf()) {
        return 0;
    }
    const auto &in = std::get<TreeNode::Internal>(n.content);
    return 1 + std::max(depth_of(*in.left), depth_of(*in.right));
}

int count_internal(const TreeNode &n) {
    if (n.is_leaf()) {
        return 0;
    }
    const auto &in = std::get<TreeNode::Internal>(n.content);
    return 1 + count_internal(*in.left) + count_internal(*in.right);
}

}  // namespace

void C45Params::validate() const {
    if (!(min_weight_leaf > 0.0)) {
        throw invalid_argument{ "min_weight_leaf must be positive" };
    }
    if (!(min_gain >= 0.0)) {
        throw invalid_argument{ "min_gain must be nonnegative" };
    }
}

double weighted_entropy(std::span<const double> class_weights) {
    double total = 0.0;
    for (const double w : class_weights) {
        if (!(w >= 0.0)) {
            throw invalid_argument{ "class weights must be nonnegative" };
        }
        total += w;
    }
    if (!(total > 0.0)) {
        throw invalid_argument{ "class weights must have a positive sum" };
    }
    return entropy_unchecked(class_weights, total);
}

std::optional<double> gain_ratio(std::span<const double> parent, std::span<const double> left, std::span<const double> right) {
    if (parent.size() != left.size() || parent.size() != right.size()) {
        throw invalid_argument{ "class weight vectors differ in length" };
    }
    const double total = std::accumulate(parent.begin(), parent.end(), 0.0);
    for (std::size_t c = 0; c < parent.size(); ++c) {
        if (std::abs(parent[c] - left[c] - right[c]) > 1e-9 * std::max(1.0, total)) {
            throw invalid_argument{ "left + right does not equal parent" };
        }
    }
    const double w_left = std::accumulate(left.begin(), left.end(), 0.0);
    const double w_right = std::accumulate(right.begin(), right.end(), 0.0);
    if (!(w_left > 0.0) || !(w_right > 0.0)) {
        return std::nullopt;
    }
    const double gain = weighted_entropy(parent) - (w_left / total) * weighted_entropy(left) - (w_right / total) * weighted_entropy(right);
    return gain / binary_entropy(w_left / total);
}

std::optional<Split> best_split(const Dataset &d, std::span<const double> weights, const C45Params &params) {
    params.validate();
    std::vector<double> w = normalized_weights(d, weights);
    const std::vector<std::size_t> rows = positive_rows(w);
    return Grower{ d, std::move(w), params }.find_split(rows);
}

DecisionTree::DecisionTree(std::unique_ptr<TreeNode> root, int num_classes, Eigen::Index dimension) :
    root_{ std::move(root) },
    num_classes_{ num_classes },
    dimension_{ dimension } {
    if (!root_) {
        throw invalid_argument{ "tree needs a root node" };
    }
}

ClassId leaf_decision(const TreeNode::Leaf &leaf) {
    return static_cast<ClassId>(std::max_element(leaf.class_weights.begin(), leaf.class_weights.end()) - leaf.class_weights.begin());
}

ClassId DecisionTree::predict(FeatureRef x) const {
    if (x.size() != dimension_) {
        throw invalid_argument{ "feature dimension " + std::to_string(x.size()) + " does not match tree dimension " + std::to_string(dimension_) };
    }
    const TreeNode *node = root_.get();
    while (const auto *in = std::get_if<TreeNode::Internal>(&node->content)) {
        node = x(in->attribute) <= in->threshold ? in->left.get() : in->right.get();
    }
    return leaf_decision(std::get<TreeNode::Leaf>(node->content));
}

int DecisionTree::depth() const { return depth_of(*root_); }

int DecisionTree::internal_nodes() const { return count_internal(*root_); }

int DecisionTree::leaves() const { return internal_nodes() + 1; }

std::string DecisionTree::to_json(int indent) const {
    const nlohmann::json j = { { "classes", num_classes_ }, { "dimension", dimension_ }, { "root", node_to_json(*root_) } };
    return j.dump(indent);
}

DecisionTree DecisionTree::from_json(const std::string &text) {
    try {
        const auto j = nlohmann::json::parse(text);
        const int k = j.at("classes").get<int>();
        const auto dim = j.at("dimension").get<Eigen::Index>();
        return DecisionTree{ node_from_json(j.at("root"), static_cast<std::size_t>(k), dim), k, dim };
    } catch (const nlohmann::json::exception &e) {
        throw data_error{ std::string{ "malformed tree JSON: " } + e.what() };
    }
}

DecisionTree build_tree(const Dataset &d, std::span<const double> weights, const C45Params &params) {
    params.validate();
    std::vector<double> w = normalized_weights(d, weights);
    std::vector<std::size_t> rows = positive_rows(w);
    Grower grower{ d, std::move(w), params };
    return DecisionTree{ grower.grow(std::move(rows), 0), d.num_classes(), d.dimension() };
}

DecisionTree build_tree(const Dataset &d, const C45Params &params) {
    const std::vector<double> uniform(d.size(), 1.0);
    return build_tree(d, uniform, params);
}

}  // namespace phonboost::c45
