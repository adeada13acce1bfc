#include "phonboost/table.hpp"

#include "phonboost/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace phonboost {

namespace {

std::string cell(double v) {
    if (v == failed_cell) {
        return "FAIL";
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

}  // namespace

void ResultTable::update_average() {
    average.assign(methods.size(), failed_cell);
    for (std::size_t m = 0; m < methods.size(); ++m) {
        double sum = 0.0;
        int count = 0;
        for (const auto &row : errors) {
            if (row[m] != failed_cell) {
                sum += row[m];
                ++count;
            }
        }
        if (count > 0) {
            average[m] = sum / count;
        }
    }
}

void ResultTable::validate() const {
    if (errors.size() != datasets.size() || average.size() != methods.size()) {
        throw invalid_argument{ "result table shape mismatch" };
    }
    for (const auto &row : errors) {
        if (row.size() != methods.size()) {
            throw invalid_argument{ "result table row has wrong width" };
        }
        for (const double v : row) {
            if (v != failed_cell && !(v >= 0.0 && v <= 100.0)) {
                throw invalid_argument{ "result table error outside [0, 100]" };
            }
        }
    }
}

TableFormat parse_table_format(const std::string &name) {
    if (name == "md" || name == "markdown") {
        return TableFormat::markdown;
    }
    if (name == "csv") {
        return TableFormat::csv;
    }
    if (name == "json") {
        return TableFormat::json;
    }
    throw config_error{ "unknown table format '" + name + "' (expected md, csv or json)" };
}

std::string to_string(TableFormat f) {
    switch (f) {
    case TableFormat::markdown:
        return "md";
    case TableFormat::csv:
        return "csv";
    case TableFormat::json:
        return "json";
    }
    return "md";
}

std::string format_table(const ResultTable &t, TableFormat format) {
    t.validate();
    std::ostringstream out;
    switch (format) {
    case TableFormat::markdown: {
        out << "| Dataset |";
        for (const auto &m : t.methods) {
            out << ' ' << m << " |";
        }
        out << "\n|---|";
        for (std::size_t m = 0; m < t.methods.size(); ++m) {
            out << "---:|";
        }
        out << '\n';
        for (std::size_t r = 0; r < t.datasets.size(); ++r) {
            out << "| " << t.datasets[r] << " |";
            for (const double v : t.errors[r]) {
                out << ' ' << cell(v) << " |";
            }
            out << '\n';
        }
        out << "| Average |";
        for (const double v : t.average) {
            out << ' ' << cell(v) << " |";
        }
        out << '\n';
        break;
    }
    case TableFormat::csv: {
        out << "dataset";
        for (const auto &m : t.methods) {
            out << ',' << csv_field(m);
        }
        out << '\n';
        for (std::size_t r = 0; r < t.datasets.size(); ++r) {
            out << csv_field(t.datasets[r]);
            for (const double v : t.errors[r]) {
                out << ',' << cell(v);
            }
            out << '\n';
        }
        out << "Average";
        for (const double v : t.average) {
            out << ',' << cell(v);
        }
        out << '\n';
        break;
    }
    case TableFormat::json: {
        nlohmann::ordered_json j;
        j["methods"] = t.methods;
        auto rows = nlohmann::ordered_json::array();
        for (std::size_t r = 0; r < t.datasets.size(); ++r) {
            rows.push_back({ { "dataset", t.datasets[r] }, { "errors", t.errors[r] } });
        }
        j["rows"] = rows;
        j["average"] = t.average;
        out << j.dump(2) << '\n';
        break;
    }
    }
    return out.str();
}

ResultTable parse_table_json(const std::string &text) {
    try {
        const auto j = nlohmann::json::parse(text);
        ResultTable t;
        t.methods = j.at("methods").get<std::vector<std::string>>();
        for (const auto &row : j.at("rows")) {
            t.datasets.push_back(row.at("dataset").get<std::string>());
            t.errors.push_back(row.at("errors").get<std::vector<double>>());
        }
        t.average = j.at("average").get<std::vector<double>>();
        t.validate();
        return t;
    } catch (const nlohmann::json::exception &e) {
        throw data_error{ std::string{ "malformed result table JSON: " } + e.what() };
    }
}

TableSummary summarize(const std::vector<ResultTable> &runs) {
    if (runs.empty()) {
        throw invalid_argument{ "nothing to summarize" };
    }
    TableSummary s{ runs.front(), runs.front() };
    const std::size_t rows = runs.front().datasets.size();
    const std::size_t cols = runs.front().methods.size();
    for (const auto &r : runs) {
        if (r.datasets != runs.front().datasets || r.methods != runs.front().methods) {
            throw invalid_argument{ "repeated runs differ in layout" };
        }
    }
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t m = 0; m < cols; ++m) {
            double sum = 0.0;
            double sq = 0.0;
            int count = 0;
            for (const auto &r : runs) {
                const double v = r.errors[i][m];
                if (v != failed_cell) {
                    sum += v;
                    sq += v * v;
                    ++count;
                }
            }
            if (count == 0) {
                s.mean.errors[i][m] = failed_cell;
                s.stddev.errors[i][m] = failed_cell;
                continue;
            }
            const double mean = sum / count;
            s.mean.errors[i][m] = mean;
            s.stddev.errors[i][m] = std::min(100.0, std::sqrt(std::max(0.0, sq / count - mean * mean)));
        }
    }
    s.mean.update_average();
    // spread of the per-run average rows, not the mean of cell spreads
    for (std::size_t m = 0; m < cols; ++m) {
        double sum = 0.0;
        double sq = 0.0;
        int count = 0;
        for (const auto &r : runs) {
            if (r.average[m] != failed_cell) {
                sum += r.average[m];
                sq += r.average[m] * r.average[m];
                ++count;
            }
        }
        const double mean = count > 0 ? sum / count : 0.0;
        s.stddev.average[m] = count > 0 ? std::sqrt(std::max(0.0, sq / count - mean * mean)) : failed_cell;
    }
    return s;
}

}  // namespace phonboost
