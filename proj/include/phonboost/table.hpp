#ifndef PHONBOOST_TABLE_HPP_
#define PHONBOOST_TABLE_HPP_
#pragma once

#include <string>
#include <vector>

namespace phonboost {

/// Cell value marking a method that failed on a dataset; rendered as "FAIL".
inline constexpr double failed_cell = -1.0;

/**
 * @brief Generalization error (percent) per dataset row and method column, plus an average row.
 *
 * The average of a column is the mean of its non-failed cells (failed_cell if every cell failed).
 */
struct ResultTable {
    std::vector<std::string> methods;
    std::vector<std::string> datasets;
    std::vector<std::vector<double>> errors;  // [dataset][method]
    std::vector<double> average;

    /// Recompute the average row from the cells.
    void update_average();
    void validate() const;

    friend bool operator==(const ResultTable &, const ResultTable &) = default;
};

enum class TableFormat { markdown, csv, json };

[[nodiscard]] TableFormat parse_table_format(const std::string &name);
[[nodiscard]] std::string to_string(TableFormat f);

/// Markdown and CSV print errors with two decimals; JSON keeps full precision so it parses back losslessly.
[[nodiscard]] std::string format_table(const ResultTable &t, TableFormat format);
[[nodiscard]] ResultTable parse_table_json(const std::string &text);

/// Cell-wise mean and (population) standard deviation over repeated runs of the same layout.
struct TableSummary {
    ResultTable mean;
    ResultTable stddev;
};
[[nodiscard]] TableSummary summarize(const std::vector<ResultTable> &runs);

}  // namespace phonboost

#endif  // PHONBOOST_TABLE_HPP_
