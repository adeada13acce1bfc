/**
 * @file
 * @brief Labeled feature-vector datasets: construction, CSV I/O, splitting and a synthetic generator.
 */

#ifndef PHONBOOST_DATASET_HPP_
#define PHONBOOST_DATASET_HPP_
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace phonboost {

using FeatureVector = Eigen::VectorXd;
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Read-only view of one sample; binds to a row of FeatureMatrix without copying.
using FeatureRef = Eigen::Ref<const Eigen::RowVectorXd>;

/// Index into a dataset's class alphabet.
using ClassId = int;

/**
 * @brief Immutable collection of labeled fixed-dimension samples.
 *
 * Row i of features() is sample i; labels()[i] indexes into classes().
 * Construction validates finiteness, label range and name uniqueness, so
 * a Dataset that exists is always well formed.
 */
class Dataset {
  public:
    Dataset(std::string name, FeatureMatrix features, std::vector<ClassId> labels, std::vector<std::string> classes);

    [[nodiscard]] const std::string &name() const noexcept { return name_; }
    [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
    [[nodiscard]] Eigen::Index dimension() const noexcept { return features_.cols(); }
    [[nodiscard]] int num_classes() const noexcept { return static_cast<int>(classes_.size()); }

    [[nodiscard]] const FeatureMatrix &features() const noexcept { return features_; }
    [[nodiscard]] const std::vector<ClassId> &labels() const noexcept { return labels_; }
    [[nodiscard]] const std::vector<std::string> &classes() const noexcept { return classes_; }

    [[nodiscard]] auto sample(std::size_t i) const { return features_.row(static_cast<Eigen::Index>(i)); }
    [[nodiscard]] ClassId label(std::size_t i) const { return labels_[i]; }

    /// Number of distinct class ids that actually occur in the samples.
    [[nodiscard]] int num_present_classes() const;

    /// Rows selected by @p indices, in that order. Keeps the full class alphabet.
    [[nodiscard]] Dataset subset(std::span<const std::size_t> indices) const;

    [[nodiscard]] Dataset renamed(std::string name) const;

    friend bool operator==(const Dataset &a, const Dataset &b);

  private:
    std::string name_;
    FeatureMatrix features_;
    std::vector<ClassId> labels_;
    std::vector<std::string> classes_;
};

/// Throws invalid_argument unless @p d has at least two present classes.
void require_trainable(const Dataset &d);

// CSV: comma separated, optional header, trailing label column.
[[nodiscard]] Dataset load_csv(const std::filesystem::path &path, bool has_header);
[[nodiscard]] Dataset parse_csv(const std::string &text, bool has_header, std::string name = "csv");
void write_csv(const Dataset &d, const std::filesystem::path &path, bool with_header = true);
[[nodiscard]] std::string to_csv(const Dataset &d, bool with_header = true);

struct SplitSpec {
    double train_fraction{ 0.7 };
    std::uint64_t seed{ 0 };
    bool stratified{ false };
};

/// Index partition produced by split_indices; both halves are sorted.
struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

[[nodiscard]] SplitIndices split_indices(const Dataset &d, const SplitSpec &spec);
[[nodiscard]] std::pair<Dataset, Dataset> split_train_test(const Dataset &d, const SplitSpec &spec);

/**
 * @brief Isotropic Gaussian mixture with one component per class.
 *
 * Class means sit on the vertices of the unit simplex in R^n_classes, mapped
 * into R^dimension (zero padded when dimension >= n_classes, otherwise through a
 * seeded random projection). @p overlap is the shared standard deviation.
 */
[[nodiscard]] Dataset synth_phoneme_like(int n_classes, int n_per_class, int dimension, double overlap, std::uint64_t seed, std::string name = "synthetic");

/// Fraction of samples per class id (absent classes map to 0).
[[nodiscard]] std::map<ClassId, double> class_priors(const Dataset &d);

/// Per-feature z-score statistics, estimated on one dataset and applied to others.
struct Standardizer {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd scale;

    [[nodiscard]] static Standardizer fit(const Dataset &d);
    [[nodiscard]] Dataset apply(const Dataset &d) const;
};

}  // namespace phonboost

#endif  // PHONBOOST_DATASET_HPP_
