/**
 * @file
 * @brief AdaBoost.M1 over an arbitrary WeakLearner.
 */

#ifndef PHONBOOST_ADABOOST_HPP_
#define PHONBOOST_ADABOOST_HPP_
#pragma once

#include "phonboost/classifier.hpp"
#include "phonboost/dataset.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace phonboost::adaboost {

/// Probability vector over training samples.
using Distribution = Eigen::VectorXd;

/// beta substituted for a zero-error round so its vote weight stays finite.
inline constexpr double beta_cap = 1e-10;

[[nodiscard]] Distribution init_uniform(std::size_t n);

/// True if every entry is >= 0 and the sum is 1 within @p tol.
[[nodiscard]] bool is_distribution(const Distribution &w, double tol = 1e-9);

/// Sum of the weights of the samples the classifier gets wrong.
[[nodiscard]] double weighted_error(std::span<const ClassId> predictions, const Dataset &d, const Distribution &w);
[[nodiscard]] double weighted_error(const Classifier &h, const Dataset &d, const Distribution &w);

/// Multiply correctly classified weights by beta = eps / (1 - eps) and renormalize.
[[nodiscard]] Distribution update_weights(const Distribution &w, std::span<const ClassId> predictions, const Dataset &d, double epsilon);
[[nodiscard]] Distribution update_weights(const Distribution &w, const Classifier &h, const Dataset &d, double epsilon);

enum class WeightMode { weighted_loss, resample };
enum class HaltReason { completed_T, epsilon_zero, epsilon_ge_half };

[[nodiscard]] std::string to_string(WeightMode m);
[[nodiscard]] std::string to_string(HaltReason r);

struct BoostParams {
    int rounds{ 25 };
    WeightMode weight_mode{ WeightMode::weighted_loss };
    std::size_t resample_size{ 0 };  // 0: same as the training set
    std::uint64_t seed{ 0 };

    void validate() const;
};

struct BoostRound {
    std::shared_ptr<const Classifier> classifier;
    double vote_weight{ 1.0 };
    double epsilon{ 0.0 };
};

/// One line per stored round; the post-update fields are NaN for rounds that halted boosting.
struct TraceEntry {
    int round{ 0 };
    double epsilon{ 0.0 };
    double vote_weight{ 0.0 };
    double train_error{ 0.0 };        // ensemble of rounds 1..round, fraction of training samples
    double distribution_sum{ 0.0 };   // after this round's update
    double misclassified_mass{ 0.0 }; // weight of this round's mistakes after the update
};

class BoostedEnsemble final : public Classifier {
  public:
    BoostedEnsemble(int num_classes, std::vector<BoostRound> rounds, HaltReason halted, std::vector<TraceEntry> trace = {}, std::vector<std::string> notes = {});

    [[nodiscard]] ClassId predict(FeatureRef x) const override;

    /// Per-class sum of vote weights of the rounds predicting that class.
    [[nodiscard]] Eigen::VectorXd class_scores(FeatureRef x) const;

    [[nodiscard]] const std::vector<BoostRound> &rounds() const noexcept { return rounds_; }
    [[nodiscard]] HaltReason halted_reason() const noexcept { return halted_; }
    [[nodiscard]] const std::vector<TraceEntry> &trace() const noexcept { return trace_; }
    [[nodiscard]] const std::vector<std::string> &notes() const noexcept { return notes_; }
    [[nodiscard]] int num_classes() const noexcept { return num_classes_; }

  private:
    int num_classes_;
    std::vector<BoostRound> rounds_;
    HaltReason halted_;
    std::vector<TraceEntry> trace_;
    std::vector<std::string> notes_;
};

/**
 * @brief AdaBoost.M1.
 *
 * Each round trains on the current distribution (passed as weights, or through a seeded
 * weighted bootstrap in resample mode), measures the weighted error on the original
 * training set and stops on eps >= 1/2 (the round is dropped, except a first round which
 * is kept with vote weight 1) or eps = 0 (kept with beta capped at beta_cap).
 */
[[nodiscard]] BoostedEnsemble boost_m1(const Dataset &d, const WeakLearner &learner, const BoostParams &params);

[[nodiscard]] inline ClassId predict_ensemble(const BoostedEnsemble &e, FeatureRef x) { return e.predict(x); }

/// Rows "round,epsilon,vote_weight,train_error" with a header line.
[[nodiscard]] std::string trace_csv(const BoostedEnsemble &e);

}  // namespace phonboost::adaboost

#endif  // PHONBOOST_ADABOOST_HPP_
