#include "oracles.hpp"

#include "phonboost/adaboost.hpp"
#include "phonboost/c45.hpp"
#include "phonboost/harness.hpp"
#include "phonboost/learners.hpp"
#include "phonboost/mfcc.hpp"
#include "phonboost/svm.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace phonboost;

namespace {

struct Verdict {
    bool pass{ false };
    std::string detail;
};

Verdict boosting_distribution() {
    std::mt19937_64 rng{ 101 };
    std::uniform_int_distribution<int> classes(2, 4);
    std::uniform_real_distribution<double> overlap(0.2, 0.6);
    int bad_sum = 0;
    int bad_mass = 0;
    int bad_eps = 0;
    long updates = 0;
    for (int run = 0; run < 100; ++run) {
        const int k = classes(rng);
        const Dataset d = synth_phoneme_like(k, 30, 5, overlap(rng), rng());
        adaboost::BoostParams p;
        p.seed = rng();
        p.weight_mode = run % 2 == 0 ? adaboost::WeightMode::weighted_loss : adaboost::WeightMode::resample;
        const auto e = adaboost::boost_m1(d, TreeLearner{ c45::C45Params{ 3, 1.0, 1e-7 } }, p);
        for (const auto &r : e.rounds()) {
            bad_eps += r.epsilon < 0.5 ? 0 : 1;
        }
        for (const auto &t : e.trace()) {
            if (std::isnan(t.distribution_sum)) {
                continue;
            }
            ++updates;
            bad_sum += std::abs(t.distribution_sum - 1.0) <= 1e-9 ? 0 : 1;
            bad_mass += std::abs(t.misclassified_mass - 0.5) <= 1e-9 ? 0 : 1;
        }
    }
    return { bad_sum == 0 && bad_mass == 0 && bad_eps == 0 && updates > 0,
             std::to_string(updates) + " updates, " + std::to_string(bad_sum) + " bad sums, " + std::to_string(bad_mass) + " bad masses, " +
                 std::to_string(bad_eps) + " rounds with eps >= 0.5" };
}

Verdict training_error_bound() {
    int violations = 0;
    int rounds = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const Dataset d = synth_phoneme_like(2, 100, 4, 0.9, 500 + s);
        adaboost::BoostParams p;
        p.seed = s;
        const auto e = adaboost::boost_m1(d, TreeLearner{ c45::C45Params{ 1, 1.0, 1e-7 } }, p);
        double bound = 1.0;
        for (const auto &t : e.trace()) {
            bound *= 2.0 * std::sqrt(t.epsilon * (1.0 - t.epsilon));
            ++rounds;
            violations += t.train_error <= bound + 1e-12 ? 0 : 1;
        }
    }
    return { violations == 0 && rounds > 20, std::to_string(rounds) + " rounds, " + std::to_string(violations) + " above the bound" };
}

Verdict boosting_helps() {
    int tree_wins = 0;
    int svm_ok = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        harness::ExperimentConfig cfg = harness::paper_shaped_config(seed);
        cfg.methods = { harness::parse_method("C45:weak"), harness::parse_method("AdaboostC45:weak"), harness::parse_method("SVM"),
                        harness::parse_method("AdaboostSVM") };
        const ResultTable t = harness::run_experiment(cfg).table;
        tree_wins += t.average[1] < t.average[0] ? 1 : 0;
        svm_ok += t.average[3] >= t.average[2] - 1.0 ? 1 : 0;
    }
    return { tree_wins >= 9 && svm_ok >= 8, "boosted weak tree better in " + std::to_string(tree_wins) + "/10, boosted SVM within 1pp in " +
                                                 std::to_string(svm_ok) + "/10" };
}

Verdict smo_correctness() {
    FeatureMatrix two(2, 1);
    two << -1.0, 1.0;
    svm::SmoParams tight;
    tight.cost = 1000.0;
    tight.tolerance = 1e-6;
    const auto m = svm::smo_train_binary(two, std::vector<double>{ -1.0, 1.0 }, svm::RbfKernel{ 0.01 }, tight);
    Eigen::RowVectorXd zero(1);
    zero << 0.0;
    const double mid = m.decision_value(zero);

    std::mt19937_64 rng{ 404 };
    std::uniform_int_distribution<int> size(10, 60);
    std::normal_distribution<double> g;
    long samples = 0;
    long kkt_ok = 0;
    int infeasible = 0;
    for (int prob = 0; prob < 50; ++prob) {
        const int n = size(rng);
        const int dim = 2 + prob % 3;
        FeatureMatrix x(n, dim);
        std::vector<double> y(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            y[static_cast<std::size_t>(i)] = i % 2 == 0 ? 1.0 : -1.0;
            for (int c = 0; c < dim; ++c) {
                x(i, c) = g(rng) + 0.8 * y[static_cast<std::size_t>(i)] * (c == 0 ? 1.0 : 0.0);
            }
        }
        svm::SmoParams p;
        p.cost = 1.0 + prob % 5;
        const double gamma = 0.5 / dim;
        const auto sol = svm::smo_solve(x, y, svm::RbfKernel{ gamma }, p);
        double balance = 0.0;
        for (int i = 0; i < n; ++i) {
            double f = sol.bias;
            for (int j = 0; j < n; ++j) {
                f += sol.alpha(j) * y[static_cast<std::size_t>(j)] * std::exp(-gamma * (x.row(i) - x.row(j)).squaredNorm());
            }
            const double a = sol.alpha(i);
            const double yf = y[static_cast<std::size_t>(i)] * f;
            double residual = 0.0;
            if (a <= 1e-12) {
                residual = std::max(0.0, 1.0 - yf);
            } else if (a >= sol.box(i) - 1e-12) {
                residual = std::max(0.0, yf - 1.0);
            } else {
                residual = std::abs(yf - 1.0);
            }
            ++samples;
            kkt_ok += residual <= p.tolerance ? 1 : 0;
            infeasible += a >= 0.0 && a <= sol.box(i) ? 0 : 1;
            balance += a * y[static_cast<std::size_t>(i)];
        }
        infeasible += std::abs(balance) <= 1e-9 ? 0 : 1;
    }
    const double frac = static_cast<double>(kkt_ok) / static_cast<double>(samples);
    return { std::abs(mid) <= 1e-6 && frac >= 0.99 && infeasible == 0,
             "midpoint " + std::to_string(mid) + ", KKT satisfied for " + std::to_string(100.0 * frac) + "% of " + std::to_string(samples) +
                 " samples, " + std::to_string(infeasible) + " feasibility violations" };
}

Verdict root_split_oracle() {
    std::mt19937_64 rng{ 505 };
    std::uniform_int_distribution<int> size(4, 25);
    std::uniform_int_distribution<int> dims(1, 4);
    std::uniform_int_distribution<int> classes(2, 4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int agree = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = size(rng);
        const Dataset d = oracle::random_small_dataset(rng, n, dims(rng), classes(rng));
        std::vector<double> w(static_cast<std::size_t>(n), 1.0);
        if (trial % 2 == 1) {
            for (double &v : w) {
                v = u(rng);
            }
        }
        const auto got = c45::best_split(d, w, c45::C45Params{});
        const auto want = oracle::exhaustive_split(d, w, 1.0, 1e-7, c45::gain_ratio_tie_tolerance);
        const bool same = got.has_value() == want.has_value() && (!got || (got->attribute == want->attribute && got->threshold == want->threshold));
        agree += same ? 1 : 0;
    }
    return { agree == 200, std::to_string(agree) + "/200 root splits match" };
}

Verdict mfcc_numerics() {
    std::mt19937_64 rng{ 606 };
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst_parseval = 0.0;
    double worst_dct = 0.0;
    for (int f = 0; f < 50; ++f) {
        Eigen::VectorXd x(256);
        for (auto &v : x) {
            v = u(rng);
        }
        const Eigen::VectorXd p = mfcc::power_spectrum(x, 256);
        const double e = x.squaredNorm();
        worst_parseval = std::max(worst_parseval, std::abs(oracle::two_sided_energy(p, 256) / 256.0 - e) / e);

        const Eigen::VectorXd logmel = x.head(26) * 10.0;
        const Eigen::VectorXd c = mfcc::dct_ii(logmel, 13);
        const auto ref = oracle::naive_dct(std::vector<double>(logmel.begin(), logmel.end()), 13);
        for (int k = 0; k < 13; ++k) {
            worst_dct = std::max(worst_dct, std::abs(c(k) - ref[static_cast<std::size_t>(k)]));
        }
    }
    Eigen::VectorXd second(16000);
    for (auto &v : second) {
        v = 0.5 * u(rng);
    }
    const auto feats = mfcc::extract_39(mfcc::AudioBuffer<double>{ second, 16000 }, mfcc::MfccConfig{});
    const mfcc::MfccConfig cfg;
    const int per_second = 16000 / static_cast<int>(cfg.hop_samples(16000));
    const bool shape = feats.rows() >= 124 && feats.cols() == 39 && feats.allFinite();
    char buf[200];
    std::snprintf(buf, sizeof buf, "parseval rel %.2e, dct abs %.2e, %ldx%ld features, %d frames/s", worst_parseval, worst_dct,
                  static_cast<long>(feats.rows()), static_cast<long>(feats.cols()), per_second);
    return { worst_parseval <= 1e-9 && worst_dct <= 1e-10 && shape && per_second == 125, buf };
}

Verdict reproducible() {
    const harness::ExperimentConfig cfg = harness::paper_shaped_config(7);
    const ResultTable a = harness::run_experiment(cfg).table;
    const ResultTable b = harness::run_experiment(cfg).table;
    bool same = true;
    for (const TableFormat f : { TableFormat::markdown, TableFormat::csv, TableFormat::json }) {
        same = same && format_table(a, f) == format_table(b, f);
    }
    return { same, same ? "markdown, csv and json identical" : "outputs differ" };
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        { "1 boosting distribution invariants", boosting_distribution },
        { "2 training error bound", training_error_bound },
        { "3 boosting on the seven-group suite", boosting_helps },
        { "4 SMO optimality", smo_correctness },
        { "5 C4.5 root split vs exhaustive search", root_split_oracle },
        { "6 MFCC numerics and shape", mfcc_numerics },
        { "7 reproducible tables", reproducible },
    };
    int failed = 0;
    for (const auto &[name, check] : criteria) {
        Verdict v;
        try {
            v = check();
        } catch (const std::exception &e) {
            v = { false, std::string{ "exception: " } + e.what() };
        }
        failed += v.pass ? 0 : 1;
        std::printf("%s  %s  (%s)\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    }
    return failed == 0 ? 0 : 1;
}
