#include "phonboost/learners.hpp"

#include <memory>
#include <sstream>

namespace phonboost {

std::shared_ptr<const Classifier> TreeLearner::train(const Dataset &d, std::span<const double> weights, std::uint64_t /*seed*/) const {
    return std::make_shared<const c45::DecisionTree>(c45::build_tree(d, weights, params_));
}

std::string TreeLearner::name() const {
    std::ostringstream out;
    out << "C4.5(max_depth=" << params_.max_depth << ", min_weight_leaf=" << params_.min_weight_leaf << ")";
    return out.str();
}

SvmLearner::SvmLearner(svm::RbfKernel kernel, svm::SmoParams params) :
    kernel_{ kernel },
    params_{ std::move(params) } {
    params_.sample_weights.clear();
    params_.validate();
    if (!(kernel_.gamma > 0.0)) {
        throw invalid_argument{ "RBF gamma must be positive" };
    }
}

std::shared_ptr<const Classifier> SvmLearner::train(const Dataset &d, std::span<const double> weights, std::uint64_t seed) const {
    svm::SmoParams p = params_;
    p.seed = seed;
    return std::make_shared<const svm::SvmMulticlassModel>(svm::train_ovo(d, weights, kernel_, p));
}

std::string SvmLearner::name() const {
    std::ostringstream out;
    out << "SVM-RBF(gamma=" << kernel_.gamma << ", C=" << params_.cost << ")";
    return out.str();
}

}  // namespace phonboost
