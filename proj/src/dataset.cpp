#include "phonboost/dataset.hpp"

#include "phonboost/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string_view>
#include <unordered_map>

namespace phonboost {

Dataset::Dataset(std::string name, FeatureMatrix features, std::vector<ClassId> labels, std::vector<std::string> classes) :
    name_{ std::move(name) },
    features_{ std::move(features) },
    labels_{ std::move(labels) },
    classes_{ std::move(classes) } {
    if (labels_.empty()) {
        throw data_error{ "dataset '" + name_ + "' is empty" };
    }
    if (static_cast<std::size_t>(features_.rows()) != labels_.size()) {
        throw data_error{ "dataset '" + name_ + "': feature rows and labels differ in count" };
    }
    if (features_.cols() < 1) {
        throw data_error{ "dataset '" + name_ + "': dimension must be positive" };
    }
    if (!features_.allFinite()) {
        throw data_error{ "dataset '" + name_ + "': non-finite feature value" };
    }
    if (std::set<std::string>(classes_.begin(), classes_.end()).size() != classes_.size()) {
        throw data_error{ "dataset '" + name_ + "': duplicate class names" };
    }
    for (const ClassId l : labels_) {
        if (l < 0 || l >= num_classes()) {
            throw data_error{ "dataset '" + name_ + "': label id out of range" };
        }
    }
}

int Dataset::num_present_classes() const {
    std::vector<bool> seen(classes_.size(), false);
    for (const ClassId l : labels_) {
        seen[static_cast<std::size_t>(l)] = true;
    }
    return static_cast<int>(std::count(seen.begin(), seen.end(), true));
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    FeatureMatrix x(static_cast<Eigen::Index>(indices.size()), dimension());
    std::vector<ClassId> y;
    y.reserve(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        x.row(static_cast<Eigen::Index>(r)) = sample(indices[r]);
        y.push_back(labels_.at(indices[r]));
    }
    return Dataset{ name_, std::move(x), std::move(y), classes_ };
}

Dataset Dataset::renamed(std::string name) const {
    Dataset copy{ *this };
    copy.name_ = std::move(name);
    return copy;
}

bool operator==(const Dataset &a, const Dataset &b) {
    return a.name_ == b.name_ && a.classes_ == b.classes_ && a.labels_ == b.labels_ && a.features_.rows() == b.features_.rows()
           && a.features_.cols() == b.features_.cols() && a.features_ == b.features_;
}

void require_trainable(const Dataset &d) {
    if (d.num_present_classes() < 2) {
        throw invalid_argument{ "dataset '" + d.name() + "' needs at least two distinct classes for training" };
    }
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return cells;
}

double parse_real(std::string_view cell, std::size_t row, std::size_t col) {
    if (!cell.empty() && cell.front() == '+') {
        cell.remove_prefix(1);
    }
    double value{};
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
        throw data_error{ "row " + std::to_string(row) + ", column " + std::to_string(col + 1) + ": '" + std::string{ cell } + "' is not a finite number" };
    }
    return value;
}

std::string format_real(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

Dataset parse_csv(const std::string &text, bool has_header, std::string name) {
    std::istringstream in{ text };
    std::string line;
    std::size_t row = 0;
    std::size_t columns = 0;
    std::vector<double> values;
    std::vector<ClassId> labels;
    std::vector<std::string> classes;
    std::unordered_map<std::string, ClassId> class_index;

    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) {
            continue;
        }
        if (has_header && row == 1) {
            continue;
        }
        const auto cells = split_commas(line);
        if (columns == 0) {
            if (cells.size() < 2) {
                throw data_error{ "row " + std::to_string(row) + ": need at least one feature column and a label column" };
            }
            columns = cells.size();
        } else if (cells.size() != columns) {
            throw data_error{ "row " + std::to_string(row) + ": expected " + std::to_string(columns) + " columns, found " + std::to_string(cells.size()) };
        }
        for (std::size_t c = 0; c + 1 < columns; ++c) {
            values.push_back(parse_real(cells[c], row, c));
        }
        const std::string label{ cells.back() };
        if (label.empty()) {
            throw data_error{ "row " + std::to_string(row) + ": empty class label" };
        }
        auto [it, inserted] = class_index.try_emplace(label, static_cast<ClassId>(classes.size()));
        if (inserted) {
            classes.push_back(label);
        }
        labels.push_back(it->second);
    }
    if (labels.empty()) {
        throw data_error{ "no data rows in '" + name + "'" };
    }
    const auto dim = static_cast<Eigen::Index>(columns - 1);
    FeatureMatrix x = Eigen::Map<FeatureMatrix>(values.data(), static_cast<Eigen::Index>(labels.size()), dim);
    return Dataset{ std::move(name), std::move(x), std::move(labels), std::move(classes) };
}

Dataset load_csv(const std::filesystem::path &path, bool has_header) {
    std::ifstream in{ path, std::ios::binary };
    if (!in) {
        throw data_error{ "cannot open '" + path.string() + "'" };
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw data_error{ "read failure on '" + path.string() + "'" };
    }
    try {
        return parse_csv(buf.str(), has_header, path.stem().string());
    } catch (const data_error &e) {
        throw data_error{ path.string() + ": " + e.what() };
    }
}

std::string to_csv(const Dataset &d, bool with_header) {
    std::string out;
    if (with_header) {
        for (Eigen::Index j = 0; j < d.dimension(); ++j) {
            out += "f" + std::to_string(j) + ",";
        }
        out += "label\n";
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (Eigen::Index j = 0; j < d.dimension(); ++j) {
            out += format_real(d.features()(static_cast<Eigen::Index>(i), j));
            out += ',';
        }
        out += d.classes()[static_cast<std::size_t>(d.label(i))];
        out += '\n';
    }
    return out;
}

void write_csv(const Dataset &d, const std::filesystem::path &path, bool with_header) {
    std::ofstream out{ path, std::ios::binary };
    if (!out) {
        throw data_error{ "cannot write '" + path.string() + "'" };
    }
    out << to_csv(d, with_header);
    if (!out) {
        throw data_error{ "write failure on '" + path.string() + "'" };
    }
}

SplitIndices split_indices(const Dataset &d, const SplitSpec &spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw invalid_argument{ "train_fraction must lie in (0, 1)" };
    }
    std::mt19937_64 rng{ spec.seed };
    SplitIndices out;
    const std::size_t n = d.size();

    if (!spec.stratified) {
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{ 0 });
        std::shuffle(perm.begin(), perm.end(), rng);
        const auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));
        out.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
        out.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    } else {
        std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(d.num_classes()));
        for (std::size_t i = 0; i < n; ++i) {
            members[static_cast<std::size_t>(d.label(i))].push_back(i);
        }
        // largest-remainder apportionment of round(f * n) over the present classes
        std::vector<std::size_t> quota(members.size(), 0);
        std::vector<std::pair<double, std::size_t>> remainders;
        std::size_t assigned = 0;
        for (std::size_t c = 0; c < members.size(); ++c) {
            if (members[c].empty()) {
                continue;
            }
            if (members[c].size() < 2) {
                throw invalid_argument{ "stratified split: class '" + d.classes()[c] + "' has fewer than 2 samples" };
            }
            const double exact = spec.train_fraction * static_cast<double>(members[c].size());
            quota[c] = static_cast<std::size_t>(std::floor(exact));
            assigned += quota[c];
            remainders.emplace_back(exact - std::floor(exact), c);
        }
        const auto target = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));
        std::stable_sort(remainders.begin(), remainders.end(), [](const auto &a, const auto &b) { return a.first > b.first; });
        for (std::size_t r = 0; assigned < target && r < remainders.size(); ++r, ++assigned) {
            ++quota[remainders[r].second];
        }
        for (std::size_t c = 0; c < members.size(); ++c) {
            if (members[c].empty()) {
                continue;
            }
            quota[c] = std::clamp<std::size_t>(quota[c], 1, members[c].size() - 1);
            std::shuffle(members[c].begin(), members[c].end(), rng);
            out.train.insert(out.train.end(), members[c].begin(), members[c].begin() + static_cast<std::ptrdiff_t>(quota[c]));
            out.test.insert(out.test.end(), members[c].begin() + static_cast<std::ptrdiff_t>(quota[c]), members[c].end());
        }
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset &d, const SplitSpec &spec) {
    const SplitIndices idx = split_indices(d, spec);
    if (idx.train.empty() || idx.test.empty()) {
        throw invalid_argument{ "split of '" + d.name() + "' leaves an empty side" };
    }
    return { d.subset(idx.train), d.subset(idx.test) };
}

Dataset synth_phoneme_like(int n_classes, int n_per_class, int dimension, double overlap, std::uint64_t seed, std::string name) {
    if (n_classes < 2) {
        throw invalid_argument{ "synth_phoneme_like: n_classes must be >= 2" };
    }
    if (dimension < 1 || n_per_class < 1) {
        throw invalid_argument{ "synth_phoneme_like: dimension and n_per_class must be >= 1" };
    }
    if (!(overlap >= 0.0) || !std::isfinite(overlap)) {
        throw invalid_argument{ "synth_phoneme_like: overlap must be finite and >= 0" };
    }
    std::mt19937_64 rng{ seed };
    std::normal_distribution<double> normal{ 0.0, 1.0 };

    // column c holds the mean of class c
    Eigen::MatrixXd means = Eigen::MatrixXd::Zero(dimension, n_classes);
    if (dimension >= n_classes) {
        means.topRows(n_classes).setIdentity();
    } else {
        for (Eigen::Index r = 0; r < means.rows(); ++r) {
            for (Eigen::Index c = 0; c < means.cols(); ++c) {
                means(r, c) = normal(rng) / std::sqrt(static_cast<double>(dimension));
            }
        }
    }

    const auto n = static_cast<Eigen::Index>(n_classes) * n_per_class;
    FeatureMatrix x(n, dimension);
    std::vector<ClassId> labels;
    labels.reserve(static_cast<std::size_t>(n));
    Eigen::Index row = 0;
    for (int c = 0; c < n_classes; ++c) {
        for (int i = 0; i < n_per_class; ++i, ++row) {
            for (Eigen::Index j = 0; j < dimension; ++j) {
                x(row, j) = means(j, c) + overlap * normal(rng);
            }
            labels.push_back(c);
        }
    }
    std::vector<std::string> classes;
    for (int c = 0; c < n_classes; ++c) {
        classes.push_back("c" + std::to_string(c));
    }
    return Dataset{ std::move(name), std::move(x), std::move(labels), std::move(classes) };
}

std::map<ClassId, double> class_priors(const Dataset &d) {
    std::map<ClassId, double> priors;
    for (ClassId c = 0; c < d.num_classes(); ++c) {
        priors[c] = 0.0;
    }
    for (const ClassId l : d.labels()) {
        priors[l] += 1.0;
    }
    for (auto &[c, p] : priors) {
        p /= static_cast<double>(d.size());
    }
    return priors;
}

Standardizer Standardizer::fit(const Dataset &d) {
    Standardizer s;
    s.mean = d.features().colwise().mean();
    const FeatureMatrix centered = d.features().rowwise() - s.mean;
    s.scale = (centered.array().square().colwise().sum() / static_cast<double>(d.size())).sqrt();
    for (Eigen::Index j = 0; j < s.scale.size(); ++j) {
        if (!(s.scale(j) > 0.0)) {
            s.scale(j) = 1.0;
        }
    }
    return s;
}

Dataset Standardizer::apply(const Dataset &d) const {
    if (d.dimension() != mean.size()) {
        throw invalid_argument{ "standardizer dimension mismatch" };
    }
    FeatureMatrix x = (d.features().rowwise() - mean).array().rowwise() / scale.array();
    return Dataset{ d.name(), std::move(x), d.labels(), d.classes() };
}

}  // namespace phonboost
