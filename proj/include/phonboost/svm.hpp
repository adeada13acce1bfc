/**
 * @file
 * @brief Soft-margin RBF support vector machines trained by sequential minimal optimization,
 *        with per-sample box constraints and one-against-one multi-class voting.
 */

#ifndef PHONBOOST_SVM_HPP_
#define PHONBOOST_SVM_HPP_
#pragma once

#include "phonboost/classifier.hpp"
#include "phonboost/dataset.hpp"
#include "phonboost/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace phonboost::svm {

/// exp(-gamma * ||x - y||^2)
template <typename DerivedX, typename DerivedY>
[[nodiscard]] typename DerivedX::Scalar rbf(const Eigen::MatrixBase<DerivedX> &x, const Eigen::MatrixBase<DerivedY> &y, typename DerivedX::Scalar gamma) {
    if (x.size() != y.size()) {
        throw invalid_argument{ "rbf: dimension mismatch" };
    }
    return std::exp(-gamma * (x.derived().reshaped() - y.derived().reshaped()).squaredNorm());
}

struct RbfKernel {
    double gamma{ 1.0 / 39.0 };

    template <typename DerivedX, typename DerivedY>
    [[nodiscard]] double operator()(const Eigen::MatrixBase<DerivedX> &x, const Eigen::MatrixBase<DerivedY> &y) const {
        return rbf(x, y, gamma);
    }
};

/// Gram matrix K(i, j) = rbf(row i, row j).
[[nodiscard]] Eigen::MatrixXd gram_matrix(const FeatureMatrix &x, const RbfKernel &kernel);

struct SmoParams {
    double cost{ 10.0 };
    double tolerance{ 1e-3 };
    double eps{ 1e-12 };
    int max_passes{ 2000 };
    /// Optional per-sample weights; sample i gets box C_i = cost * n * w_i / sum(w).
    std::vector<double> sample_weights;
    /// Record the dual objective after every successful pair update.
    bool track_objective{ false };
    /// Seed for the starting offset of the second-choice scans.
    std::uint64_t seed{ 0 };
    /// Above this sample count the full Gram matrix is replaced by an LRU row cache.
    Eigen::Index full_gram_limit{ 4096 };

    void validate() const;
};

struct SmoDiagnostics {
    bool converged{ false };
    int passes{ 0 };
    long updates{ 0 };
    /// Samples whose KKT residual exceeds the tolerance under the final bias.
    int kkt_violations{ 0 };
    double max_kkt_residual{ 0.0 };
    std::vector<double> objective_trace;
    bool objective_monotone{ true };
};

/// Raw dual solution: alpha_i in [0, C_i], labels in {-1, +1}.
struct SmoSolution {
    Eigen::VectorXd alpha;
    Eigen::VectorXd box;
    double bias{ 0.0 };
    SmoDiagnostics diagnostics;
};

/// KKT residual of sample i given y_i f(x_i): zero iff the optimality condition for its alpha holds.
[[nodiscard]] double kkt_residual(double alpha, double box, double margin, double bound_eps = 1e-12);

/// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.
[[nodiscard]] double dual_objective(const Eigen::VectorXd &alpha, std::span<const double> y, const Eigen::MatrixXd &gram);

/// Solve the binary dual for labels y in {-1, +1}.
[[nodiscard]] SmoSolution smo_solve(const FeatureMatrix &x, std::span<const double> y, const RbfKernel &kernel, const SmoParams &params);

class SvmBinaryModel {
  public:
    SvmBinaryModel() = default;
    SvmBinaryModel(FeatureMatrix support_vectors, Eigen::VectorXd dual_coefs, double bias, RbfKernel kernel, SmoDiagnostics diagnostics = {});

    /// sum_i dual_coef_i K(sv_i, x) + bias
    [[nodiscard]] double decision_value(FeatureRef x) const;

    [[nodiscard]] const FeatureMatrix &support_vectors() const noexcept { return sv_; }
    [[nodiscard]] const Eigen::VectorXd &dual_coefs() const noexcept { return coef_; }
    [[nodiscard]] double bias() const noexcept { return bias_; }
    [[nodiscard]] const RbfKernel &kernel() const noexcept { return kernel_; }
    [[nodiscard]] const SmoDiagnostics &diagnostics() const noexcept { return diag_; }
    [[nodiscard]] Eigen::Index dimension() const noexcept { return sv_.cols(); }

  private:
    FeatureMatrix sv_;
    Eigen::VectorXd coef_;
    double bias_{ 0.0 };
    RbfKernel kernel_;
    SmoDiagnostics diag_;
};

/// Train on samples labelled +1 / -1; only samples with alpha > 0 are kept as support vectors.
[[nodiscard]] SvmBinaryModel smo_train_binary(const FeatureMatrix &x, std::span<const double> y, const RbfKernel &kernel, const SmoParams &params);

[[nodiscard]] inline double decision_value(const SvmBinaryModel &m, FeatureRef x) { return m.decision_value(x); }

/// One model per unordered class pair (first < second). A positive decision value votes for `first`.
struct PairwiseModel {
    enum class Kind { trained, constant, abstain };

    ClassId first{ 0 };
    ClassId second{ 1 };
    Kind kind{ Kind::trained };
    ClassId constant_class{ 0 };  // used when kind == constant
    SvmBinaryModel model;
};

class SvmMulticlassModel final : public Classifier {
  public:
    SvmMulticlassModel(std::vector<std::string> classes, Eigen::Index dimension, RbfKernel kernel, std::vector<PairwiseModel> pairs);

    [[nodiscard]] ClassId predict(FeatureRef x) const override;

    [[nodiscard]] const std::vector<PairwiseModel> &pairs() const noexcept { return pairs_; }
    [[nodiscard]] const std::vector<std::string> &classes() const noexcept { return classes_; }
    [[nodiscard]] int num_classes() const noexcept { return static_cast<int>(classes_.size()); }
    [[nodiscard]] Eigen::Index dimension() const noexcept { return dimension_; }
    [[nodiscard]] const RbfKernel &kernel() const noexcept { return kernel_; }
    /// Human-readable notes, e.g. pairs that became constant voters.
    [[nodiscard]] const std::vector<std::string> &diagnostics() const noexcept { return notes_; }

    /// Text serialization: header, gamma, class names, then per pair a header line and (coef, sv...) rows.
    [[nodiscard]] std::string serialize() const;
    [[nodiscard]] static SvmMulticlassModel deserialize(const std::string &text);

  private:
    std::vector<std::string> classes_;
    Eigen::Index dimension_;
    RbfKernel kernel_;
    std::vector<PairwiseModel> pairs_;
    std::vector<std::string> notes_;

    friend SvmMulticlassModel train_ovo(const Dataset &, std::span<const double>, const RbfKernel &, const SmoParams &);
};

/**
 * @brief One-against-one training. Each pair sees only its two classes and, when weights are
 *        given, their weights. A pair with only one class carrying weight becomes a constant voter.
 */
[[nodiscard]] SvmMulticlassModel train_ovo(const Dataset &d, std::span<const double> weights, const RbfKernel &kernel, const SmoParams &params);
[[nodiscard]] SvmMulticlassModel train_ovo(const Dataset &d, const RbfKernel &kernel, const SmoParams &params);

/// Per-class votes and the margin sums used to break vote ties.
struct VoteTally {
    std::vector<int> votes;
    std::vector<double> margin;  // sum of |decision value| over the pairs won by each class
};

[[nodiscard]] VoteTally tally_votes(const SvmMulticlassModel &m, FeatureRef x);

/// Most votes; ties by larger margin sum, then lower class id.
[[nodiscard]] ClassId resolve_votes(const VoteTally &tally);

[[nodiscard]] inline ClassId predict_ovo(const SvmMulticlassModel &m, FeatureRef x) { return m.predict(x); }

}  // namespace phonboost::svm

#endif  // PHONBOOST_SVM_HPP_
