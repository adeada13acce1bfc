#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "phonboost/cli.hpp"
#include "phonboost/errors.hpp"
#include "phonboost/harness.hpp"
#include "phonboost/mfcc.hpp"
#include "phonboost/table.hpp"
#include "phonboost/wav.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace phonboost;
using namespace phonboost::harness;

namespace {

std::size_t count_lines(const std::string &s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

class Constant final : public Classifier {
  public:
    explicit Constant(ClassId c) : c_{ c } { }
    ClassId predict(FeatureRef) const override { return c_; }

  private:
    ClassId c_;
};

struct Cli {
    int code;
    std::string out;
    std::string err;
};

Cli cli(std::vector<std::string> args) {
    args.insert(args.begin(), "phonboost");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return { code, out.str(), err.str() };
}

std::filesystem::path temp(const std::string &name) { return std::filesystem::temp_directory_path() / ("phonboost_" + name); }

void write_file(const std::filesystem::path &p, const std::string &text) {
    std::ofstream f{ p };
    f << text;
}

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.datasets.push_back({ "blobs", SyntheticSource{ 3, 20, 5, 0.6, 4 } });
    cfg.methods.push_back(parse_method("C45"));
    cfg.split.seed = 9;
    return cfg;
}

}  // namespace

TEST_CASE("generalization error") {
    const Dataset d = synth_phoneme_like(2, 5, 2, 0.5, 1);
    CHECK(generalization_error(Constant{ 0 }, d) == doctest::Approx(50.0));

    FeatureMatrix x = FeatureMatrix::Zero(10, 1);
    std::vector<ClassId> y(10, 0);
    y[0] = y[1] = y[2] = 1;
    const Dataset ten{ "ten", x, y, { "a", "b" } };
    CHECK(generalization_error(Constant{ 0 }, ten) == doctest::Approx(30.0));

    const Dataset skew = synth_phoneme_like(3, 7, 2, 0.5, 2).subset(std::vector<std::size_t>{ 0, 1, 2, 3, 7, 8, 14 });
    const auto priors = class_priors(skew);
    for (ClassId c = 0; c < 3; ++c) {
        CHECK(generalization_error(Constant{ c }, skew) == doctest::Approx(100.0 * (1.0 - priors.at(c))));
    }
}

TEST_CASE("method parsing") {
    CHECK(parse_method("SVM").kind == MethodKind::svm);
    CHECK(parse_method("AdaboostC45:weak").tree_profile == "weak");
    CHECK(parse_method("C45").tree_profile == "strong");
    CHECK(parse_method("AdaboostC45:weak").label == "AdaboostC45:weak");
    CHECK_THROWS_AS((void)parse_method("KNN"), config_error);
    CHECK_THROWS_AS((void)parse_method("SVM:weak"), config_error);
}

TEST_CASE("table formats") {
    ResultTable t;
    t.methods = { "SVM" };
    t.datasets = { "Vowel" };
    t.errors = { { 12.3456789 } };
    t.update_average();
    const std::string md = format_table(t, TableFormat::markdown);
    CHECK(md.find("12.35") != std::string::npos);
    CHECK(md.find("| Average |") != std::string::npos);
    CHECK(format_table(t, TableFormat::csv).find("12.35") != std::string::npos);
    CHECK(parse_table_json(format_table(t, TableFormat::json)) == t);

    t.errors[0][0] = failed_cell;
    t.update_average();
    CHECK(format_table(t, TableFormat::markdown).find("FAIL") != std::string::npos);
    CHECK_THROWS_AS((void)parse_table_format("xml"), config_error);
}

TEST_CASE("the published table layout and its average row") {
    ResultTable t;
    t.methods = { "SVM", "AdaboostSVM", "C4.5", "AdaboostC4.5" };
    t.datasets = { "Vowel", "Semi-Vowel", "Stops", "Others", "Nasal", "Fricative", "Affricate" };
    t.errors = { { 44.74, 45.83, 72.95, 75.80 }, { 18.55, 22.38, 38.91, 27.62 }, { 45.72, 45.99, 64.62, 68.45 }, { 14.93, 15.97, 18.40, 16.32 },
                 { 39.46, 41.57, 61.45, 48.80 }, { 21.02, 26.14, 44.51, 29.17 }, { 21.43, 33.33, 45.24, 33.33 } };
    t.update_average();
    const std::string md = format_table(t, TableFormat::markdown);
    CHECK(count_lines(md) == 10);  // header, separator, 7 datasets, Average
    // published average row: 29.40 / 32.95 / 49.44 / 42.78
    CHECK(std::abs(t.average[0] - 29.40) <= 0.01);
    CHECK(std::abs(t.average[2] - 49.44) <= 0.005);
    CHECK(std::abs(t.average[3] - 42.78) <= 0.005);
    // the published AdaboostSVM average is not the mean of its column
    CHECK(std::abs(t.average[1] - 33.03) <= 0.005);
}

TEST_CASE("paper-shaped run: 7 rows, 4 columns, consistent average") {
    ExperimentConfig cfg = paper_shaped_config(3);
    const ExperimentResult r = run_experiment(cfg);
    CHECK(r.table.datasets.size() == 7);
    CHECK(r.table.methods == std::vector<std::string>{ "SVM", "AdaboostSVM", "C45", "AdaboostC45" });
    CHECK(count_lines(format_table(r.table, TableFormat::markdown)) == 10);  // header, separator, 7 datasets, Average
    for (std::size_t m = 0; m < 4; ++m) {
        double sum = 0.0;
        for (const auto &row : r.table.errors) {
            CHECK(row[m] >= 0.0);
            CHECK(row[m] <= 100.0);
            sum += row[m];
        }
        CHECK(std::abs(sum / 7.0 - r.table.average[m]) <= 1e-9);
    }
}

TEST_CASE("runs are deterministic and columns follow config order") {
    ExperimentConfig cfg = small_config();
    cfg.methods = { parse_method("AdaboostC45:weak"), parse_method("C45:weak") };
    const ExperimentResult a = run_experiment(cfg);
    const ExperimentResult b = run_experiment(cfg);
    CHECK(a.table == b.table);
    CHECK(a.table.methods == std::vector<std::string>{ "AdaboostC45:weak", "C45:weak" });
    CHECK_FALSE(a.trace.empty());
    CHECK(trace_csv(a.trace) == trace_csv(b.trace));
}

TEST_CASE("all methods share the split") {
    // a boosted round-1-only ensemble equals the single learner, so identical errors imply identical test sets
    ExperimentConfig cfg = small_config();
    cfg.boost.rounds = 1;
    cfg.methods = { parse_method("C45"), parse_method("AdaboostC45") };
    const ExperimentResult r = run_experiment(cfg);
    CHECK(r.table.errors[0][0] == r.table.errors[0][1]);
}

TEST_CASE("config parsing") {
    const std::string text = R"({
      "datasets": [ { "name": "a", "synthetic": { "classes": 3, "per_class": 10, "dimension": 4, "overlap": 0.5, "seed": 1 } },
                    { "name": "b", "csv": "data/b.csv" } ],
      "methods": [ "SVM", "AdaboostC45:weak" ],
      "split": { "train_fraction": 0.6, "seed": 5, "stratified": true },
      "svm": { "gamma": 0.008, "cost": 10 },
      "tree": { "weak": { "max_depth": 1 } },
      "boost": { "rounds": 10, "weight_mode": "resample" },
      "output": { "format": "csv" }
    })";
    const ExperimentConfig cfg = parse_config(text, "/base");
    CHECK(cfg.datasets.size() == 2);
    CHECK(std::get<CsvSource>(cfg.datasets[1].source).path == std::filesystem::path{ "/base/data/b.csv" });
    CHECK(cfg.split.stratified);
    CHECK(cfg.svm.gamma == 0.008);
    CHECK(cfg.tree_profiles.at("weak").max_depth == 1);
    CHECK(cfg.boost.weight_mode == adaboost::WeightMode::resample);
    CHECK(cfg.output.format == TableFormat::csv);

    const ExperimentConfig back = parse_config(config_to_json(cfg));
    CHECK(config_to_json(back) == config_to_json(cfg));
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS((void)parse_config("{not json"), config_error);
    CHECK_THROWS_AS((void)parse_config(R"({"datasets": [], "methods": ["SVM"]})"), config_error);
    CHECK_THROWS_AS((void)parse_config(R"({"datasets": [{"name":"a","synthetic":{}}], "methods": []})"), config_error);
    CHECK_THROWS_AS((void)parse_config(R"({"datasets": [{"name":"a","synthetic":{}}], "methods": ["SVM"], "bogus": 1})"), config_error);
    CHECK_THROWS_AS((void)parse_config(R"({"datasets": [{"name":"a","synthetic":{"colour":1}}], "methods": ["SVM"]})"), config_error);
    CHECK_THROWS_AS((void)parse_config(R"({"datasets": [{"name":"a","synthetic":{}},{"name":"a","synthetic":{}}], "methods": ["SVM"]})"), config_error);
    CHECK_THROWS_AS((void)parse_config(R"({"datasets": [{"name":"a","synthetic":{}}], "methods": ["C45:missing"]})"), config_error);
}

TEST_CASE("dataset load failures name the dataset; method failures become FAIL cells") {
    ExperimentConfig cfg = small_config();
    cfg.datasets.push_back({ "ghost", CsvSource{ "/nonexistent/ghost.csv", true } });
    try {
        (void)run_experiment(cfg);
        FAIL("expected data_error");
    } catch (const data_error &e) {
        CHECK(std::string{ e.what() }.find("ghost") != std::string::npos);
    }

    // a training split holding a single class cannot be trained on
    const auto path = temp("oneclass.csv");
    write_file(path, "f0,label\n1,a\n2,a\n3,a\n4,a\n5,a\n6,a\n7,a\n8,a\n9,a\n10,b\n");
    ExperimentConfig bad;
    bad.datasets.push_back({ "lopsided", CsvSource{ path, true } });
    bad.methods = { parse_method("SVM"), parse_method("C45") };
    bad.split.seed = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        bad.split.seed = s;
        const ExperimentResult r = run_experiment(bad);
        if (r.table.errors[0][0] == failed_cell) {
            CHECK(r.table.errors[0][1] == failed_cell);
            CHECK_FALSE(r.diagnostics.empty());
            CHECK(format_table(r.table, TableFormat::markdown).find("FAIL") != std::string::npos);
            break;
        }
        CHECK(s < 49);
    }
    std::filesystem::remove(path);
}

TEST_CASE("repeat summary") {
    const ResultTable a = run_experiment(small_config()).table;
    const ResultTable b = run_experiment(with_seed_offset(small_config(), 1)).table;
    const TableSummary s = summarize({ a, b });
    CHECK(s.mean.errors[0][0] == doctest::Approx((a.errors[0][0] + b.errors[0][0]) / 2));
    CHECK(s.stddev.errors[0][0] == doctest::Approx(std::abs(a.errors[0][0] - b.errors[0][0]) / 2));
}

TEST_CASE("cli: synth, run and exit codes") {
    const auto csv = temp("cli_synth.csv");
    const Cli s = cli({ "synth", "--classes", "3", "--per-class", "12", "--dimension", "4", "--overlap", "0.5", "--seed", "2", "--out", csv.string() });
    CHECK(s.code == exit_ok);
    CHECK(load_csv(csv, true).size() == 36);

    const auto cfg = temp("cli_cfg.json");
    write_file(cfg, R"({"datasets":[{"name":"s","csv":")" + csv.filename().string() + R"("}],"methods":["C45","AdaboostC45:weak"],"split":{"seed":3}})");
    const Cli r1 = cli({ "run", "--config", cfg.string(), "--format", "json" });
    const Cli r2 = cli({ "run", "--config", cfg.string(), "--format", "json" });
    CHECK(r1.code == exit_ok);
    CHECK(r1.out == r2.out);
    CHECK(parse_table_json(r1.out).methods.size() == 2);

    const auto trace = temp("cli_trace.csv");
    const Cli r3 = cli({ "run", "--config", cfg.string(), "--repeat", "3", "--trace", trace.string() });
    CHECK(r3.code == exit_ok);
    CHECK(r3.out.find("standard deviation") != std::string::npos);
    CHECK(std::filesystem::file_size(trace) > 0);

    const Cli g = cli({ "run", "--config", cfg.string(), "--svm-gamma", "0.008", "--svm-cost", "5", "--svm-tol", "0.01" });
    CHECK(g.code == exit_ok);
    CHECK(cli({ "run", "--config", cfg.string(), "--svm-gamma", "-1" }).code == exit_config);
    CHECK(cli({ "run", "--config", "/nonexistent.json" }).code == exit_config);
    CHECK(cli({ "run" }).code == exit_config);
    CHECK(cli({ "frobnicate" }).code == exit_config);
    write_file(cfg, R"({"datasets":[{"name":"s","csv":"missing.csv"}],"methods":["C45"]})");
    CHECK(cli({ "run", "--config", cfg.string() }).code == exit_data);
    CHECK(cli({ "--help" }).code == exit_ok);
    for (const auto &p : { csv, cfg, trace }) {
        std::filesystem::remove(p);
    }
}

TEST_CASE("cli: extract") {
    std::mt19937_64 rng{ 1 };
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    mfcc::AudioBuffer<double> a{ Eigen::VectorXd(16000), 16000 };
    for (auto &v : a.samples) {
        v = u(rng);
    }
    const auto wav = temp("cli.wav");
    write_wav(a, wav);
    const Cli e = cli({ "extract", "--wav", wav.string() });
    CHECK(e.code == exit_ok);
    std::istringstream lines{ e.out };
    std::string header;
    std::getline(lines, header);
    CHECK(std::count(header.begin(), header.end(), ',') == 38);
    CHECK(count_lines(e.out) == 1 + 124);

    const Cli m = cli({ "extract", "--wav", wav.string(), "--middle", "--label", "aa" });
    CHECK(m.code == exit_ok);
    CHECK(count_lines(m.out) == 2);
    CHECK(parse_csv(m.out, true).dimension() == 39);

    const auto junk = temp("junk.wav");
    write_file(junk, "not a wav file");
    CHECK(cli({ "extract", "--wav", junk.string() }).code == exit_data);
    std::filesystem::remove(wav);
    std::filesystem::remove(junk);
}
