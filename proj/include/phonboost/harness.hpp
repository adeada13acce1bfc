/**
 * @file
 * @brief Configuration-driven benchmark: every method on every dataset over one shared
 *        train/test split per dataset, reported as a generalization-error table.
 */

#ifndef PHONBOOST_HARNESS_HPP_
#define PHONBOOST_HARNESS_HPP_
#pragma once

#include "phonboost/adaboost.hpp"
#include "phonboost/c45.hpp"
#include "phonboost/classifier.hpp"
#include "phonboost/dataset.hpp"
#include "phonboost/table.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace phonboost::harness {

struct CsvSource {
    std::filesystem::path path;
    bool has_header{ true };
};

struct SyntheticSource {
    int classes{ 2 };
    int per_class{ 50 };
    int dimension{ 39 };
    double overlap{ 0.5 };
    std::uint64_t seed{ 0 };
};

struct DatasetSource {
    std::string name;
    std::variant<CsvSource, SyntheticSource> source;
};

enum class MethodKind { svm, adaboost_svm, c45, adaboost_c45 };

/// A table column: the method plus, for tree methods, the C4.5 profile it uses.
struct MethodSpec {
    MethodKind kind{ MethodKind::svm };
    std::string tree_profile;  // empty for SVM methods
    std::string label;         // column heading, e.g. "AdaboostC45:weak"

    friend bool operator==(const MethodSpec &, const MethodSpec &) = default;
};

/// Parses "SVM", "AdaboostSVM", "C45", "AdaboostC45", optionally followed by ":<tree profile>".
[[nodiscard]] MethodSpec parse_method(std::string_view text);

struct SvmSettings {
    double gamma{ 1.0 / 39.0 };
    double cost{ 10.0 };
    double tol{ 1e-3 };
    int max_passes{ 2000 };
};

struct OutputSpec {
    TableFormat format{ TableFormat::markdown };
    std::filesystem::path path;  // empty: standard output
};

struct ExperimentConfig {
    std::vector<DatasetSource> datasets;
    std::vector<MethodSpec> methods;
    SplitSpec split{};
    SvmSettings svm{};
    std::map<std::string, c45::C45Params> tree_profiles{ { "strong", c45::C45Params{} }, { "weak", c45::C45Params{ 2, 1.0, 1e-7 } } };
    adaboost::BoostParams boost{};
    bool standardize{ false };
    OutputSpec output{};

    /// Throws config_error on an invalid configuration.
    void validate() const;
};

/// Parse the JSON configuration. Relative CSV paths are resolved against @p base_dir. Unknown keys are rejected.
[[nodiscard]] ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path &base_dir = {});
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path &path);

/// Canonical JSON form of a configuration (parse_config accepts it back).
[[nodiscard]] std::string config_to_json(const ExperimentConfig &cfg);

/// Seven synthetic datasets named after the phoneme groups, every method, the default profiles.
[[nodiscard]] ExperimentConfig paper_shaped_config(std::uint64_t seed);

/// 100 * misclassified / size.
[[nodiscard]] double generalization_error(const Classifier &model, const Dataset &test);

[[nodiscard]] Dataset materialize(const DatasetSource &source);

struct TraceRow {
    std::string dataset;
    std::string method;
    adaboost::TraceEntry entry;
};

struct ExperimentResult {
    ResultTable table;
    std::vector<TraceRow> trace;
    std::vector<std::string> diagnostics;
};

/// Train and score one method on a prepared split.
[[nodiscard]] double evaluate_method(const ExperimentConfig &cfg, const MethodSpec &method, const Dataset &train, const Dataset &test, std::uint64_t seed,
                                     std::vector<adaboost::TraceEntry> *trace = nullptr, std::vector<std::string> *notes = nullptr);

[[nodiscard]] ExperimentResult run_experiment(const ExperimentConfig &cfg);

/// Same configuration with split and boosting seeds shifted by @p offset (dataset generation untouched).
[[nodiscard]] ExperimentConfig with_seed_offset(const ExperimentConfig &cfg, std::uint64_t offset);

[[nodiscard]] std::string trace_csv(const std::vector<TraceRow> &rows);

}  // namespace phonboost::harness

#endif  // PHONBOOST_HARNESS_HPP_
