#include "phonboost/cli.hpp"

#include "phonboost/dataset.hpp"
#include "phonboost/errors.hpp"
#include "phonboost/harness.hpp"
#include "phonboost/mfcc.hpp"
#include "phonboost/table.hpp"
#include "phonboost/wav.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

namespace phonboost {

namespace {

void write_text(const std::string &text, const std::filesystem::path &path, std::ostream &out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f{ path, std::ios::binary };
    if (!f || !(f << text)) {
        throw data_error{ "cannot write '" + path.string() + "'" };
    }
}

std::string number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return { buf, res.ptr };
}

struct RunArgs {
    std::string config;
    std::string format;
    std::string out;
    std::string trace;
    int repeat{ 1 };
    std::optional<double> svm_gamma;
    std::optional<double> svm_cost;
    std::optional<double> svm_tol;
};

struct ExtractArgs {
    std::string wav;
    std::string out;
    bool middle{ false };
    bool concatenate{ false };
    int middle_frames{ 3 };
    std::string label;
};

struct SynthArgs {
    int classes{ 2 };
    int per_class{ 50 };
    int dimension{ 39 };
    double overlap{ 0.5 };
    std::uint64_t seed{ 0 };
    std::string out;
};

int do_run(const RunArgs &a, std::ostream &out, std::ostream &err) {
    harness::ExperimentConfig cfg = harness::load_config(a.config);
    if (!a.format.empty()) {
        cfg.output.format = parse_table_format(a.format);
    }
    if (!a.out.empty()) {
        cfg.output.path = a.out;
    }
    cfg.svm.gamma = a.svm_gamma.value_or(cfg.svm.gamma);
    cfg.svm.cost = a.svm_cost.value_or(cfg.svm.cost);
    cfg.svm.tol = a.svm_tol.value_or(cfg.svm.tol);
    cfg.validate();
    if (a.repeat < 1) {
        throw config_error{ "--repeat must be >= 1" };
    }

    std::vector<ResultTable> tables;
    std::vector<harness::TraceRow> trace;
    for (int r = 0; r < a.repeat; ++r) {
        harness::ExperimentResult res = harness::run_experiment(harness::with_seed_offset(cfg, static_cast<std::uint64_t>(r)));
        for (const auto &d : res.diagnostics) {
            err << (a.repeat > 1 ? "[run " + std::to_string(r + 1) + "] " : std::string{}) << d << '\n';
        }
        if (r == 0) {
            trace = std::move(res.trace);
        }
        tables.push_back(std::move(res.table));
    }

    std::string text;
    if (a.repeat == 1) {
        text = format_table(tables.front(), cfg.output.format);
    } else {
        const TableSummary s = summarize(tables);
        if (cfg.output.format == TableFormat::json) {
            text = "{\"runs\": " + std::to_string(a.repeat) + ",\n\"mean\": " + format_table(s.mean, TableFormat::json) + ",\n\"stddev\": " +
                   format_table(s.stddev, TableFormat::json) + "}\n";
        } else {
            text = "mean over " + std::to_string(a.repeat) + " seeds\n" + format_table(s.mean, cfg.output.format) + "\nstandard deviation\n" +
                   format_table(s.stddev, cfg.output.format);
        }
    }
    write_text(text, cfg.output.path, out);
    if (!a.trace.empty()) {
        write_text(harness::trace_csv(trace), a.trace, out);
    }
    const auto &cells = tables.front().errors;
    if (std::any_of(cells.begin(), cells.end(), [](const auto &row) { return std::find(row.begin(), row.end(), failed_cell) != row.end(); })) {
        err << "warning: some methods failed (cells marked FAIL)\n";
    }
    return exit_ok;
}

int do_extract(const ExtractArgs &a, std::ostream &out) {
    const mfcc::AudioBuffer<double> audio = read_wav(a.wav);
    mfcc::MfccConfig cfg;
    cfg.middle_frames = a.middle_frames;
    cfg.middle_mode = a.concatenate ? mfcc::MiddleMode::concatenate : mfcc::MiddleMode::average;
    try {
        cfg.validate(audio.sample_rate);
    } catch (const invalid_argument &e) {
        throw config_error{ e.what() };
    }
    mfcc::FrameMatrix<double> rows;
    try {
        rows = mfcc::extract_39(audio, cfg);
        if (a.middle) {
            rows = mfcc::middle_window_stack(rows, cfg.middle_frames, cfg.middle_mode).transpose();
        }
    } catch (const invalid_argument &e) {
        throw data_error{ "'" + a.wav + "': " + e.what() };
    }

    std::ostringstream csv;
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
        csv << (c == 0 ? "" : ",") << 'f' << c;
    }
    csv << (a.label.empty() ? "" : ",label") << '\n';
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        for (Eigen::Index c = 0; c < rows.cols(); ++c) {
            csv << (c == 0 ? "" : ",") << number(rows(r, c));
        }
        csv << (a.label.empty() ? "" : "," + a.label) << '\n';
    }
    write_text(csv.str(), a.out, out);
    return exit_ok;
}

int do_synth(const SynthArgs &a, std::ostream &out) {
    if (a.classes < 2 || a.per_class < 1 || a.dimension < 1 || !(a.overlap >= 0.0)) {
        throw config_error{ "synth: need classes >= 2, per-class >= 1, dimension >= 1, overlap >= 0" };
    }
    const Dataset d = synth_phoneme_like(a.classes, a.per_class, a.dimension, a.overlap, a.seed);
    write_text(to_csv(d), a.out, out);
    return exit_ok;
}

}  // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{ "Boosted SVM / C4.5 phoneme classification toolkit" };
    app.name("phonboost");
    app.require_subcommand(1);

    RunArgs run_args;
    auto *run = app.add_subcommand("run", "Run an experiment config and print the error table");
    run->add_option("--config", run_args.config, "JSON experiment config")->required();
    run->add_option("--format", run_args.format, "Table format: md, csv or json");
    run->add_option("--out", run_args.out, "Write the table here instead of stdout");
    run->add_option("--trace", run_args.trace, "Write per-round boosting trace CSV (first run)");
    run->add_option("--repeat", run_args.repeat, "Repeat over N seed offsets and report mean and std");
    run->add_option("--svm-gamma", run_args.svm_gamma, "Override the RBF gamma");
    run->add_option("--svm-cost", run_args.svm_cost, "Override the SVM cost C");
    run->add_option("--svm-tol", run_args.svm_tol, "Override the SMO tolerance");

    ExtractArgs ex_args;
    auto *extract = app.add_subcommand("extract", "Compute 39-dim MFCC frames from a 16-bit mono WAV file");
    extract->add_option("--wav", ex_args.wav, "Input WAV")->required();
    extract->add_option("--out", ex_args.out, "Output CSV (stdout if omitted)");
    extract->add_flag("--middle", ex_args.middle, "Emit one middle-window row instead of every frame");
    extract->add_option("--middle-frames", ex_args.middle_frames, "Frames in the middle window");
    extract->add_flag("--concatenate", ex_args.concatenate, "Concatenate the middle frames instead of averaging");
    extract->add_option("--label", ex_args.label, "Append a label column with this class name");

    SynthArgs syn_args;
    auto *synth = app.add_subcommand("synth", "Generate a synthetic labelled dataset as CSV");
    synth->add_option("--classes", syn_args.classes, "Number of classes");
    synth->add_option("--per-class", syn_args.per_class, "Samples per class");
    synth->add_option("--dimension", syn_args.dimension, "Feature dimension");
    synth->add_option("--overlap", syn_args.overlap, "Noise scale relative to class separation");
    synth->add_option("--seed", syn_args.seed, "RNG seed");
    synth->add_option("--out", syn_args.out, "Output CSV (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (run->parsed()) {
            return do_run(run_args, out, err);
        }
        if (extract->parsed()) {
            return do_extract(ex_args, out);
        }
        return do_synth(syn_args, out);
    } catch (const config_error &e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const data_error &e) {
        err << "data error: " << e.what() << '\n';
        return exit_data;
    } catch (const std::exception &e) {
        err << "internal error: " << e.what() << '\n';
        return exit_internal;
    }
}

}  // namespace phonboost
