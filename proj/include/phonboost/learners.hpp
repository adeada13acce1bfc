#ifndef PHONBOOST_LEARNERS_HPP_
#define PHONBOOST_LEARNERS_HPP_
#pragma once

#include "phonboost/c45.hpp"
#include "phonboost/classifier.hpp"
#include "phonboost/svm.hpp"

#include <string>

namespace phonboost {

/// Decision tree as a boostable learner; weights are consumed natively.
class TreeLearner final : public WeakLearner {
  public:
    explicit TreeLearner(c45::C45Params params) : params_{ params } { params_.validate(); }

    [[nodiscard]] std::shared_ptr<const Classifier> train(const Dataset &d, std::span<const double> weights, std::uint64_t seed) const override;
    [[nodiscard]] std::string name() const override;

  private:
    c45::C45Params params_;
};

/// One-against-one RBF SVM as a boostable learner; weights become per-sample box constraints.
class SvmLearner final : public WeakLearner {
  public:
    SvmLearner(svm::RbfKernel kernel, svm::SmoParams params);

    [[nodiscard]] std::shared_ptr<const Classifier> train(const Dataset &d, std::span<const double> weights, std::uint64_t seed) const override;
    [[nodiscard]] std::string name() const override;

  private:
    svm::RbfKernel kernel_;
    svm::SmoParams params_;
};

}  // namespace phonboost

#endif  // PHONBOOST_LEARNERS_HPP_
