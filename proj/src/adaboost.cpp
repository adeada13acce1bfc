#include "phonboost/adaboost.hpp"

#include "phonboost/errors.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace phonboost::adaboost {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t round) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (round + 1);
    z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31U);
}

void check_alignment(std::span<const ClassId> predictions, const Dataset &d, const Distribution &w) {
    if (predictions.size() != d.size() || static_cast<std::size_t>(w.size()) != d.size()) {
        throw invalid_argument{ "predictions, distribution and dataset must align" };
    }
}

}  // namespace

Distribution init_uniform(std::size_t n) {
    if (n == 0) {
        throw invalid_argument{ "cannot build a distribution over zero samples" };
    }
    return Distribution::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
}

bool is_distribution(const Distribution &w, double tol) {
    return w.size() > 0 && (w.array() >= 0.0).all() && std::abs(w.sum() - 1.0) <= tol;
}

double weighted_error(std::span<const ClassId> predictions, const Dataset &d, const Distribution &w) {
    check_alignment(predictions, d, w);
    double eps = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (predictions[i] != d.label(i)) {
            eps += w(static_cast<Eigen::Index>(i));
        }
    }
    return eps;
}

double weighted_error(const Classifier &h, const Dataset &d, const Distribution &w) {
    const auto predictions = h.predict_all(d);
    return weighted_error(predictions, d, w);
}

Distribution update_weights(const Distribution &w, std::span<const ClassId> predictions, const Dataset &d, double epsilon) {
    check_alignment(predictions, d, w);
    if (!(epsilon > 0.0 && epsilon < 0.5)) {
        throw invalid_argument{ "weight update needs 0 < epsilon < 0.5" };
    }
    const double beta = epsilon / (1.0 - epsilon);
    Distribution next = w;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (predictions[i] == d.label(i)) {
            next(static_cast<Eigen::Index>(i)) *= beta;
        }
    }
    return next / next.sum();
}

Distribution update_weights(const Distribution &w, const Classifier &h, const Dataset &d, double epsilon) {
    const auto predictions = h.predict_all(d);
    return update_weights(w, predictions, d, epsilon);
}

std::string to_string(WeightMode m) { return m == WeightMode::weighted_loss ? "weighted_loss" : "resample"; }

std::string to_string(HaltReason r) {
    switch (r) {
    case HaltReason::completed_T:
        return "completed_T";
    case HaltReason::epsilon_zero:
        return "epsilon_zero";
    case HaltReason::epsilon_ge_half:
        return "epsilon_ge_half";
    }
    return "unknown";
}

void BoostParams::validate() const {
    if (rounds < 1) {
        throw invalid_argument{ "boosting needs at least one round" };
    }
}

BoostedEnsemble::BoostedEnsemble(int num_classes, std::vector<BoostRound> rounds, HaltReason halted, std::vector<TraceEntry> trace, std::vector<std::string> notes) :
    num_classes_{ num_classes },
    rounds_{ std::move(rounds) },
    halted_{ halted },
    trace_{ std::move(trace) },
    notes_{ std::move(notes) } {
    if (rounds_.empty()) {
        throw invalid_argument{ "an ensemble needs at least one round" };
    }
}

Eigen::VectorXd BoostedEnsemble::class_scores(FeatureRef x) const {
    Eigen::VectorXd scores = Eigen::VectorXd::Zero(num_classes_);
    for (const BoostRound &r : rounds_) {
        scores(r.classifier->predict(x)) += r.vote_weight;
    }
    return scores;
}

ClassId BoostedEnsemble::predict(FeatureRef x) const {
    Eigen::Index best = 0;
    // maxCoeff returns the first maximum, which is the lower class id on ties
    class_scores(x).maxCoeff(&best);
    return static_cast<ClassId>(best);
}

BoostedEnsemble boost_m1(const Dataset &d, const WeakLearner &learner, const BoostParams &params) {
    params.validate();
    require_trainable(d);
    const std::size_t n = d.size();
    const auto k = static_cast<Eigen::Index>(d.num_classes());

    Distribution w = init_uniform(n);
    std::vector<BoostRound> rounds;
    std::vector<TraceEntry> trace;
    std::vector<std::string> notes;
    HaltReason halted = HaltReason::completed_T;
    // running ensemble scores on the training set, one row per sample
    Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), k);

    const auto record = [&](const BoostRound &r, std::span<const ClassId> predictions) {
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < n; ++i) {
            scores(static_cast<Eigen::Index>(i), predictions[i]) += r.vote_weight;
            Eigen::Index best = 0;
            scores.row(static_cast<Eigen::Index>(i)).maxCoeff(&best);
            wrong += static_cast<ClassId>(best) != d.label(i) ? 1U : 0U;
        }
        TraceEntry t;
        t.round = static_cast<int>(rounds.size()) + 1;
        t.epsilon = r.epsilon;
        t.vote_weight = r.vote_weight;
        t.train_error = static_cast<double>(wrong) / static_cast<double>(n);
        t.distribution_sum = std::numeric_limits<double>::quiet_NaN();
        t.misclassified_mass = std::numeric_limits<double>::quiet_NaN();
        trace.push_back(t);
        rounds.push_back(r);
    };

    for (int t = 0; t < params.rounds; ++t) {
        const std::uint64_t round_seed = mix_seed(params.seed, static_cast<std::uint64_t>(t));
        std::shared_ptr<const Classifier> h;
        try {
            if (params.weight_mode == WeightMode::weighted_loss) {
                h = learner.train(d, std::span<const double>(w.data(), n), round_seed);
            } else {
                const std::size_t m = params.resample_size == 0 ? n : params.resample_size;
                std::mt19937_64 rng{ round_seed };
                std::discrete_distribution<std::size_t> pick(w.data(), w.data() + n);
                std::vector<std::size_t> idx(m);
                for (auto &i : idx) {
                    i = pick(rng);
                }
                const Dataset sample = d.subset(idx);
                const std::vector<double> uniform(m, 1.0);
                h = learner.train(sample, uniform, round_seed);
            }
        } catch (const std::exception &e) {
            throw training_error{ "boosting round " + std::to_string(t + 1) + " (" + learner.name() + "): " + e.what() };
        }
        const std::vector<ClassId> predictions = h->predict_all(d);
        const double eps = weighted_error(predictions, d, w);

        if (eps >= 0.5) {
            halted = HaltReason::epsilon_ge_half;
            if (rounds.empty()) {
                notes.push_back("round 1 weighted error " + std::to_string(eps) + " >= 0.5; keeping the single classifier with vote weight 1");
                record(BoostRound{ h, 1.0, eps }, predictions);
            } else {
                notes.push_back("round " + std::to_string(t + 1) + " weighted error " + std::to_string(eps) + " >= 0.5; round discarded");
            }
            break;
        }
        if (eps <= 0.0) {
            record(BoostRound{ h, std::log(1.0 / beta_cap), 0.0 }, predictions);
            halted = HaltReason::epsilon_zero;
            break;
        }
        record(BoostRound{ h, std::log((1.0 - eps) / eps), eps }, predictions);
        w = update_weights(w, predictions, d, eps);
        double wrong_mass = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (predictions[i] != d.label(i)) {
                wrong_mass += w(static_cast<Eigen::Index>(i));
            }
        }
        trace.back().distribution_sum = w.sum();
        trace.back().misclassified_mass = wrong_mass;
    }
    return BoostedEnsemble{ d.num_classes(), std::move(rounds), halted, std::move(trace), std::move(notes) };
}

std::string trace_csv(const BoostedEnsemble &e) {
    std::ostringstream out;
    out.precision(17);
    out << "round,epsilon,vote_weight,train_error\n";
    for (const TraceEntry &t : e.trace()) {
        out << t.round << ',' << t.epsilon << ',' << t.vote_weight << ',' << t.train_error << '\n';
    }
    return out.str();
}

}  // namespace phonboost::adaboost
