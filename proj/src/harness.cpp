#include "phonboost/harness.hpp"

#include "phonboost/errors.hpp"
#include "phonboost/learners.hpp"
#include "phonboost/svm.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace phonboost::harness {

namespace {

using nlohmann::json;

void check_keys(const json &j, std::initializer_list<std::string_view> allowed, const std::string &where) {
    if (!j.is_object()) {
        throw config_error{ where + ": expected an object" };
    }
    for (const auto &[key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw config_error{ where + ": unknown key '" + key + "'" };
        }
    }
}

template <typename T>
T get_or(const json &j, const char *key, T fallback, const std::string &where) {
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception &) {
        throw config_error{ where + ": key '" + key + "' has the wrong type" };
    }
}

c45::C45Params parse_tree_profile(const json &j, const std::string &where) {
    check_keys(j, { "max_depth", "min_weight_leaf", "min_gain" }, where);
    c45::C45Params p;
    if (j.contains("max_depth") && j.at("max_depth").is_null()) {
        p.max_depth = -1;
    } else {
        p.max_depth = get_or(j, "max_depth", p.max_depth, where);
    }
    p.min_weight_leaf = get_or(j, "min_weight_leaf", p.min_weight_leaf, where);
    p.min_gain = get_or(j, "min_gain", p.min_gain, where);
    return p;
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31U);
}

bool is_tree(MethodKind k) { return k == MethodKind::c45 || k == MethodKind::adaboost_c45; }

}  // namespace

MethodSpec parse_method(std::string_view text) {
    const auto colon = text.find(':');
    const std::string base{ text.substr(0, colon) };
    MethodSpec m;
    if (base == "SVM") {
        m.kind = MethodKind::svm;
    } else if (base == "AdaboostSVM") {
        m.kind = MethodKind::adaboost_svm;
    } else if (base == "C45" || base == "C4.5") {
        m.kind = MethodKind::c45;
    } else if (base == "AdaboostC45" || base == "AdaboostC4.5") {
        m.kind = MethodKind::adaboost_c45;
    } else {
        throw config_error{ "unknown method '" + std::string{ text } + "' (expected SVM, AdaboostSVM, C45 or AdaboostC45)" };
    }
    if (colon != std::string_view::npos) {
        if (!is_tree(m.kind)) {
            throw config_error{ "method '" + std::string{ text } + "': only tree methods take a profile" };
        }
        m.tree_profile = std::string{ text.substr(colon + 1) };
        if (m.tree_profile.empty()) {
            throw config_error{ "method '" + std::string{ text } + "': empty tree profile" };
        }
    } else if (is_tree(m.kind)) {
        m.tree_profile = "strong";
    }
    m.label = std::string{ text };
    return m;
}

void ExperimentConfig::validate() const {
    if (datasets.empty()) {
        throw config_error{ "config needs at least one dataset" };
    }
    if (methods.empty()) {
        throw config_error{ "config needs at least one method" };
    }
    std::set<std::string> names;
    for (const auto &d : datasets) {
        if (d.name.empty() || !names.insert(d.name).second) {
            throw config_error{ "dataset names must be nonempty and unique ('" + d.name + "')" };
        }
        if (const auto *s = std::get_if<SyntheticSource>(&d.source)) {
            if (s->classes < 2 || s->per_class < 1 || s->dimension < 1 || !(s->overlap >= 0.0)) {
                throw config_error{ "dataset '" + d.name + "': invalid synthetic parameters" };
            }
        }
    }
    std::set<std::string> labels;
    for (const auto &m : methods) {
        if (!labels.insert(m.label).second) {
            throw config_error{ "duplicate method '" + m.label + "'" };
        }
        if (is_tree(m.kind) && !tree_profiles.contains(m.tree_profile)) {
            throw config_error{ "method '" + m.label + "' names unknown tree profile '" + m.tree_profile + "'" };
        }
    }
    if (!(split.train_fraction > 0.0 && split.train_fraction < 1.0)) {
        throw config_error{ "split.train_fraction must lie in (0, 1)" };
    }
    if (!(svm.gamma > 0.0) || !(svm.cost > 0.0) || !(svm.tol > 0.0) || svm.max_passes < 1) {
        throw config_error{ "svm: gamma, cost and tol must be positive and max_passes >= 1" };
    }
    for (const auto &[name, p] : tree_profiles) {
        if (!(p.min_weight_leaf > 0.0) || !(p.min_gain >= 0.0)) {
            throw config_error{ "tree profile '" + name + "': min_weight_leaf must be > 0 and min_gain >= 0" };
        }
    }
    if (boost.rounds < 1) {
        throw config_error{ "boost.rounds must be >= 1" };
    }
}

ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path &base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception &e) {
        throw config_error{ std::string{ "config is not valid JSON: " } + e.what() };
    }
    check_keys(j, { "datasets", "methods", "split", "svm", "tree", "boost", "standardize", "output" }, "config");
    ExperimentConfig cfg;

    if (!j.contains("datasets") || !j.at("datasets").is_array()) {
        throw config_error{ "config: 'datasets' must be an array" };
    }
    for (const auto &d : j.at("datasets")) {
        check_keys(d, { "name", "csv", "synthetic" }, "dataset");
        DatasetSource src;
        src.name = get_or<std::string>(d, "name", "", "dataset");
        const std::string where = "dataset '" + src.name + "'";
        if (d.contains("csv") == d.contains("synthetic")) {
            throw config_error{ where + ": exactly one of 'csv' or 'synthetic' is required" };
        }
        if (d.contains("csv")) {
            const auto &c = d.at("csv");
            CsvSource csv;
            if (c.is_string()) {
                csv.path = c.get<std::string>();
            } else {
                check_keys(c, { "path", "has_header" }, where + " csv");
                csv.path = get_or<std::string>(c, "path", "", where);
                csv.has_header = get_or(c, "has_header", csv.has_header, where);
            }
            if (csv.path.empty()) {
                throw config_error{ where + ": empty csv path" };
            }
            if (csv.path.is_relative() && !base_dir.empty()) {
                csv.path = base_dir / csv.path;
            }
            src.source = csv;
        } else {
            const auto &s = d.at("synthetic");
            check_keys(s, { "classes", "per_class", "dimension", "overlap", "seed" }, where + " synthetic");
            SyntheticSource syn;
            syn.classes = get_or(s, "classes", syn.classes, where);
            syn.per_class = get_or(s, "per_class", syn.per_class, where);
            syn.dimension = get_or(s, "dimension", syn.dimension, where);
            syn.overlap = get_or(s, "overlap", syn.overlap, where);
            syn.seed = get_or(s, "seed", syn.seed, where);
            src.source = syn;
        }
        cfg.datasets.push_back(std::move(src));
    }

    if (!j.contains("methods") || !j.at("methods").is_array()) {
        throw config_error{ "config: 'methods' must be an array" };
    }
    for (const auto &m : j.at("methods")) {
        if (!m.is_string()) {
            throw config_error{ "config: methods must be strings" };
        }
        cfg.methods.push_back(parse_method(m.get<std::string>()));
    }

    if (j.contains("split")) {
        const auto &s = j.at("split");
        check_keys(s, { "train_fraction", "seed", "stratified" }, "split");
        cfg.split.train_fraction = get_or(s, "train_fraction", cfg.split.train_fraction, "split");
        cfg.split.seed = get_or(s, "seed", cfg.split.seed, "split");
        cfg.split.stratified = get_or(s, "stratified", cfg.split.stratified, "split");
    }
    if (j.contains("svm")) {
        const auto &s = j.at("svm");
        check_keys(s, { "gamma", "cost", "tol", "max_passes" }, "svm");
        cfg.svm.gamma = get_or(s, "gamma", cfg.svm.gamma, "svm");
        cfg.svm.cost = get_or(s, "cost", cfg.svm.cost, "svm");
        cfg.svm.tol = get_or(s, "tol", cfg.svm.tol, "svm");
        cfg.svm.max_passes = get_or(s, "max_passes", cfg.svm.max_passes, "svm");
    }
    if (j.contains("tree")) {
        const auto &t = j.at("tree");
        if (!t.is_object()) {
            throw config_error{ "tree: expected an object of named profiles" };
        }
        for (const auto &[name, profile] : t.items()) {
            cfg.tree_profiles[name] = parse_tree_profile(profile, "tree profile '" + name + "'");
        }
    }
    if (j.contains("boost")) {
        const auto &b = j.at("boost");
        check_keys(b, { "rounds", "weight_mode", "resample_size", "seed" }, "boost");
        cfg.boost.rounds = get_or(b, "rounds", cfg.boost.rounds, "boost");
        const std::string mode = get_or<std::string>(b, "weight_mode", "weighted_loss", "boost");
        if (mode == "weighted_loss") {
            cfg.boost.weight_mode = adaboost::WeightMode::weighted_loss;
        } else if (mode == "resample") {
            cfg.boost.weight_mode = adaboost::WeightMode::resample;
        } else {
            throw config_error{ "boost.weight_mode must be 'weighted_loss' or 'resample'" };
        }
        cfg.boost.resample_size = get_or(b, "resample_size", cfg.boost.resample_size, "boost");
        cfg.boost.seed = get_or(b, "seed", cfg.boost.seed, "boost");
    }
    cfg.standardize = get_or(j, "standardize", cfg.standardize, "config");
    if (j.contains("output")) {
        const auto &o = j.at("output");
        check_keys(o, { "format", "path" }, "output");
        cfg.output.format = parse_table_format(get_or<std::string>(o, "format", "md", "output"));
        cfg.output.path = get_or<std::string>(o, "path", "", "output");
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    std::ifstream in{ path, std::ios::binary };
    if (!in) {
        throw config_error{ "cannot open config '" + path.string() + "'" };
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

std::string config_to_json(const ExperimentConfig &cfg) {
    nlohmann::ordered_json j;
    auto datasets = nlohmann::ordered_json::array();
    for (const auto &d : cfg.datasets) {
        nlohmann::ordered_json e;
        e["name"] = d.name;
        if (const auto *c = std::get_if<CsvSource>(&d.source)) {
            e["csv"] = { { "path", c->path.string() }, { "has_header", c->has_header } };
        } else {
            const auto &s = std::get<SyntheticSource>(d.source);
            e["synthetic"] = { { "classes", s.classes }, { "per_class", s.per_class }, { "dimension", s.dimension }, { "overlap", s.overlap }, { "seed", s.seed } };
        }
        datasets.push_back(e);
    }
    j["datasets"] = datasets;
    auto methods = nlohmann::ordered_json::array();
    for (const auto &m : cfg.methods) {
        methods.push_back(m.label);
    }
    j["methods"] = methods;
    j["split"] = { { "train_fraction", cfg.split.train_fraction }, { "seed", cfg.split.seed }, { "stratified", cfg.split.stratified } };
    j["svm"] = { { "gamma", cfg.svm.gamma }, { "cost", cfg.svm.cost }, { "tol", cfg.svm.tol }, { "max_passes", cfg.svm.max_passes } };
    nlohmann::ordered_json tree = nlohmann::ordered_json::object();
    for (const auto &[name, p] : cfg.tree_profiles) {
        tree[name] = { { "max_depth", p.max_depth }, { "min_weight_leaf", p.min_weight_leaf }, { "min_gain", p.min_gain } };
    }
    j["tree"] = tree;
    j["boost"] = { { "rounds", cfg.boost.rounds },
                   { "weight_mode", adaboost::to_string(cfg.boost.weight_mode) },
                   { "resample_size", cfg.boost.resample_size },
                   { "seed", cfg.boost.seed } };
    j["standardize"] = cfg.standardize;
    j["output"] = { { "format", to_string(cfg.output.format) }, { "path", cfg.output.path.string() } };
    return j.dump(2);
}

ExperimentConfig paper_shaped_config(std::uint64_t seed) {
    struct Group {
        const char *name;
        int classes;
        double overlap;
    };
    // class counts and overlaps loosely follow how hard each phoneme group is
    constexpr Group groups[] = {
        { "Vowel", 5, 0.55 }, { "Semi-Vowel", 4, 0.40 }, { "Stops", 4, 0.55 }, { "Others", 2, 0.35 }, { "Nasal", 3, 0.50 }, { "Fricative", 4, 0.40 }, { "Affricate", 2, 0.45 },
    };
    ExperimentConfig cfg;
    std::uint64_t index = 0;
    for (const Group &g : groups) {
        cfg.datasets.push_back({ g.name, SyntheticSource{ g.classes, 40, 39, g.overlap, mix(seed, index++) } });
    }
    for (const char *m : { "SVM", "AdaboostSVM", "C45", "AdaboostC45" }) {
        cfg.methods.push_back(parse_method(m));
    }
    cfg.split.seed = seed;
    cfg.boost.seed = seed;
    return cfg;
}

double generalization_error(const Classifier &model, const Dataset &test) {
    if (test.size() == 0) {
        throw invalid_argument{ "empty test set" };
    }
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        wrong += model.predict(test.sample(i)) != test.label(i) ? 1U : 0U;
    }
    return 100.0 * static_cast<double>(wrong) / static_cast<double>(test.size());
}

Dataset materialize(const DatasetSource &source) {
    try {
        if (const auto *c = std::get_if<CsvSource>(&source.source)) {
            return load_csv(c->path, c->has_header).renamed(source.name);
        }
        const auto &s = std::get<SyntheticSource>(source.source);
        return synth_phoneme_like(s.classes, s.per_class, s.dimension, s.overlap, s.seed, source.name);
    } catch (const std::exception &e) {
        throw data_error{ "dataset '" + source.name + "': " + e.what() };
    }
}

double evaluate_method(const ExperimentConfig &cfg, const MethodSpec &method, const Dataset &train, const Dataset &test, std::uint64_t seed,
                       std::vector<adaboost::TraceEntry> *trace, std::vector<std::string> *notes) {
    svm::SmoParams smo;
    smo.cost = cfg.svm.cost;
    smo.tolerance = cfg.svm.tol;
    smo.max_passes = cfg.svm.max_passes;
    smo.seed = seed;
    const svm::RbfKernel kernel{ cfg.svm.gamma };
    adaboost::BoostParams boost = cfg.boost;
    boost.seed = seed;

    const auto boosted = [&](const WeakLearner &learner) {
        const adaboost::BoostedEnsemble e = adaboost::boost_m1(train, learner, boost);
        if (trace != nullptr) {
            *trace = e.trace();
        }
        if (notes != nullptr) {
            notes->insert(notes->end(), e.notes().begin(), e.notes().end());
        }
        return generalization_error(e, test);
    };

    switch (method.kind) {
    case MethodKind::svm: {
        const svm::SvmMulticlassModel m = svm::train_ovo(train, kernel, smo);
        if (notes != nullptr) {
            notes->insert(notes->end(), m.diagnostics().begin(), m.diagnostics().end());
        }
        return generalization_error(m, test);
    }
    case MethodKind::adaboost_svm:
        return boosted(SvmLearner{ kernel, smo });
    case MethodKind::c45:
        return generalization_error(c45::build_tree(train, cfg.tree_profiles.at(method.tree_profile)), test);
    case MethodKind::adaboost_c45:
        return boosted(TreeLearner{ cfg.tree_profiles.at(method.tree_profile) });
    }
    throw invalid_argument{ "unhandled method kind" };
}

ExperimentResult run_experiment(const ExperimentConfig &cfg) {
    cfg.validate();
    ExperimentResult result;
    ResultTable &table = result.table;
    for (const auto &m : cfg.methods) {
        table.methods.push_back(m.label);
    }
    for (std::size_t di = 0; di < cfg.datasets.size(); ++di) {
        const DatasetSource &src = cfg.datasets[di];
        Dataset data = materialize(src);
        SplitSpec split = cfg.split;
        split.seed = mix(cfg.split.seed, di);
        std::pair<Dataset, Dataset> parts = [&] {
            try {
                return split_train_test(data, split);
            } catch (const std::exception &e) {
                throw data_error{ "dataset '" + src.name + "': " + e.what() };
            }
        }();
        Dataset &train = parts.first;
        Dataset &test = parts.second;
        if (cfg.standardize) {
            const Standardizer z = Standardizer::fit(train);
            train = z.apply(train);
            test = z.apply(test);
        }
        const std::uint64_t seed = mix(cfg.boost.seed, di);

        std::vector<double> row;
        for (const MethodSpec &m : cfg.methods) {
            std::vector<adaboost::TraceEntry> trace;
            std::vector<std::string> notes;
            try {
                require_trainable(train);
                row.push_back(evaluate_method(cfg, m, train, test, seed, &trace, &notes));
            } catch (const std::exception &e) {
                row.push_back(failed_cell);
                result.diagnostics.push_back(src.name + " / " + m.label + ": FAILED: " + e.what());
            }
            for (const auto &t : trace) {
                result.trace.push_back({ src.name, m.label, t });
            }
            for (const auto &n : notes) {
                result.diagnostics.push_back(src.name + " / " + m.label + ": " + n);
            }
        }
        table.datasets.push_back(src.name);
        table.errors.push_back(std::move(row));
    }
    table.update_average();
    return result;
}

ExperimentConfig with_seed_offset(const ExperimentConfig &cfg, std::uint64_t offset) {
    ExperimentConfig out = cfg;
    out.split.seed += offset;
    out.boost.seed += offset;
    return out;
}

std::string trace_csv(const std::vector<TraceRow> &rows) {
    std::ostringstream out;
    out.precision(17);
    out << "dataset,method,round,epsilon,vote_weight,train_error\n";
    for (const auto &r : rows) {
        out << r.dataset << ',' << r.method << ',' << r.entry.round << ',' << r.entry.epsilon << ',' << r.entry.vote_weight << ',' << r.entry.train_error << '\n';
    }
    return out.str();
}

}  // namespace phonboost::harness
