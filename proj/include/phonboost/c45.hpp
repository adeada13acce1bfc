/**
 * @file
 * @brief Gain-ratio decision tree over continuous attributes with per-sample weights.
 */

#ifndef PHONBOOST_C45_HPP_
#define PHONBOOST_C45_HPP_
#pragma once

#include "phonboost/classifier.hpp"
#include "phonboost/dataset.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace phonboost::c45 {

/**
 * @brief Capacity controls.
 *
 * Sample weights are rescaled to mean 1 before growing, so min_weight_leaf is
 * measured in "average samples" and the tree is invariant to the overall weight scale.
 */
struct C45Params {
    int max_depth{ -1 };  // negative: unlimited
    double min_weight_leaf{ 1.0 };
    double min_gain{ 1e-7 };

    void validate() const;
};

/// Relative tolerance under which two gain ratios count as tied.
inline constexpr double gain_ratio_tie_tolerance = 1e-12;

/// Entropy in bits of the class distribution given by nonnegative weights.
[[nodiscard]] double weighted_entropy(std::span<const double> class_weights);

/**
 * @brief Information gain of a binary split divided by its split information.
 * @return std::nullopt when either side carries no weight (split information is zero)
 */
[[nodiscard]] std::optional<double> gain_ratio(std::span<const double> parent, std::span<const double> left, std::span<const double> right);

struct Split {
    Eigen::Index attribute{ 0 };
    double threshold{ 0.0 };
    double gain_ratio{ 0.0 };
    double gain{ 0.0 };
};

/**
 * @brief Best threshold split of the whole weighted dataset.
 *
 * Candidates are midpoints between consecutive distinct values of each attribute,
 * both children must keep at least min_weight_leaf, and the gain must reach min_gain.
 * Among candidates whose gain ratio is within the tie tolerance of the maximum the
 * lowest (attribute, threshold) wins.
 */
[[nodiscard]] std::optional<Split> best_split(const Dataset &d, std::span<const double> weights, const C45Params &params);

struct TreeNode {
    struct Leaf {
        std::vector<double> class_weights;
    };
    struct Internal {
        Eigen::Index attribute{ 0 };
        double threshold{ 0.0 };
        std::unique_ptr<TreeNode> left;   // x[attribute] <= threshold
        std::unique_ptr<TreeNode> right;  // x[attribute] >  threshold
    };
    std::variant<Leaf, Internal> content;

    [[nodiscard]] bool is_leaf() const noexcept { return std::holds_alternative<Leaf>(content); }
};

class DecisionTree final : public Classifier {
  public:
    DecisionTree(std::unique_ptr<TreeNode> root, int num_classes, Eigen::Index dimension);

    [[nodiscard]] ClassId predict(FeatureRef x) const override;

    [[nodiscard]] const TreeNode &root() const noexcept { return *root_; }
    [[nodiscard]] int num_classes() const noexcept { return num_classes_; }
    [[nodiscard]] Eigen::Index dimension() const noexcept { return dimension_; }
    [[nodiscard]] int depth() const;
    [[nodiscard]] int internal_nodes() const;
    [[nodiscard]] int leaves() const;

    /// JSON text: {"classes":k,"dimension":d,"root":{"type":"split"|"leaf",...}}.
    [[nodiscard]] std::string to_json(int indent = -1) const;
    [[nodiscard]] static DecisionTree from_json(const std::string &text);

  private:
    std::unique_ptr<TreeNode> root_;
    int num_classes_;
    Eigen::Index dimension_;
};

/// Argmax of leaf class weights, ties to the lower class id.
[[nodiscard]] ClassId leaf_decision(const TreeNode::Leaf &leaf);

/// Grow a tree by recursive best_split until purity, depth cap, weight floor or no valid split.
[[nodiscard]] DecisionTree build_tree(const Dataset &d, std::span<const double> weights, const C45Params &params);
[[nodiscard]] DecisionTree build_tree(const Dataset &d, const C45Params &params);

[[nodiscard]] inline ClassId predict(const DecisionTree &tree, FeatureRef x) { return tree.predict(x); }

}  // namespace phonboost::c45

#endif  // PHONBOOST_C45_HPP_
