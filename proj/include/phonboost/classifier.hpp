#ifndef PHONBOOST_CLASSIFIER_HPP_
#define PHONBOOST_CLASSIFIER_HPP_
#pragma once

#include "phonboost/dataset.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace phonboost {

/// A trained model mapping a feature vector to a class id. Trained models are immutable.
class Classifier {
  public:
    virtual ~Classifier() = default;

    [[nodiscard]] virtual ClassId predict(FeatureRef x) const = 0;

    /// Predictions for every row of @p d, in order.
    [[nodiscard]] std::vector<ClassId> predict_all(const Dataset &d) const {
        std::vector<ClassId> out(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            out[i] = predict(d.sample(i));
        }
        return out;
    }
};

/**
 * @brief Anything AdaBoost can call once per round.
 *
 * train() receives the round's dataset with one nonnegative weight per sample
 * (uniform when the booster resampled) and must be a pure function of its inputs.
 */
class WeakLearner {
  public:
    virtual ~WeakLearner() = default;

    [[nodiscard]] virtual std::shared_ptr<const Classifier> train(const Dataset &d, std::span<const double> weights, std::uint64_t seed) const = 0;
    [[nodiscard]] virtual std::string name() const = 0;
};

}  // namespace phonboost

#endif  // PHONBOOST_CLASSIFIER_HPP_
