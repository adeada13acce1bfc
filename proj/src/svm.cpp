#include "phonboost/svm.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <list>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

namespace phonboost::svm {

namespace {

/// Kernel rows on demand: all rows precomputed up to a size limit, otherwise an LRU cache of rows.
class KernelRows {
  public:
    using Row = std::shared_ptr<const Eigen::VectorXd>;

    KernelRows(const FeatureMatrix &x, const RbfKernel &kernel, Eigen::Index full_limit) :
        x_{ x },
        kernel_{ kernel },
        sq_norms_{ x.rowwise().squaredNorm() } {
        const Eigen::Index n = x.rows();
        if (n <= full_limit) {
            full_.reserve(static_cast<std::size_t>(n));
            for (Eigen::Index i = 0; i < n; ++i) {
                full_.push_back(compute(i));
            }
        } else {
            const std::size_t budget_bytes = std::size_t{ 256 } << 20U;
            capacity_ = std::max<std::size_t>(2, budget_bytes / (sizeof(double) * static_cast<std::size_t>(n)));
        }
    }

    Row row(Eigen::Index i) {
        if (!full_.empty()) {
            return full_[static_cast<std::size_t>(i)];
        }
        if (auto it = lru_.find(i); it != lru_.end()) {
            order_.splice(order_.begin(), order_, it->second.second);
            return it->second.first;
        }
        if (lru_.size() >= capacity_) {
            lru_.erase(order_.back());
            order_.pop_back();
        }
        order_.push_front(i);
        Row r = compute(i);
        lru_.emplace(i, std::make_pair(r, order_.begin()));
        return r;
    }

  private:
    Row compute(Eigen::Index i) const {
        auto fresh = std::make_shared<Eigen::VectorXd>(x_.rows());
        const Eigen::VectorXd dots = x_ * x_.row(i).transpose();
        for (Eigen::Index j = 0; j < x_.rows(); ++j) {
            (*fresh)(j) = std::exp(-kernel_.gamma * std::max(0.0, sq_norms_(i) + sq_norms_(j) - 2.0 * dots(j)));
        }
        (*fresh)(i) = 1.0;
        return fresh;
    }

    const FeatureMatrix &x_;
    RbfKernel kernel_;
    Eigen::VectorXd sq_norms_;
    std::vector<Row> full_;
    std::size_t capacity_{ 0 };
    std::list<Eigen::Index> order_;
    std::unordered_map<Eigen::Index, std::pair<Row, std::list<Eigen::Index>::iterator>> lru_;
};

class SmoSolver {
  public:
    SmoSolver(const FeatureMatrix &x, std::span<const double> y, const RbfKernel &kernel, const SmoParams &params) :
        y_{ y },
        params_{ params },
        kernel_rows_{ x, kernel, params.full_gram_limit },
        n_{ x.rows() },
        alpha_{ Eigen::VectorXd::Zero(n_) },
        box_{ Eigen::VectorXd::Constant(n_, params.cost) },
        g_{ Eigen::VectorXd::Zero(n_) },
        rng_{ params.seed } {
        if (!params.sample_weights.empty()) {
            const double total = std::accumulate(params.sample_weights.begin(), params.sample_weights.end(), 0.0);
            for (Eigen::Index i = 0; i < n_; ++i) {
                box_(i) = params.cost * static_cast<double>(n_) * params.sample_weights[static_cast<std::size_t>(i)] / total;
            }
        }
    }

    SmoSolution solve() {
        SmoDiagnostics diag;
        if (params_.track_objective) {
            diag.objective_trace.push_back(0.0);
        }
        bool examine_all = true;
        int changed = 0;
        constexpr int max_refinements = 10;
        int refinements = 0;
        while (diag.passes < params_.max_passes) {
            changed = 0;
            for (Eigen::Index i = 0; i < n_; ++i) {
                if (examine_all || is_unbound(i)) {
                    changed += examine(i, diag);
                }
            }
            ++diag.passes;
            if (examine_all) {
                examine_all = false;
            } else if (changed == 0) {
                examine_all = true;
            }
            if (changed == 0 && examine_all == false) {
                // a clean full sweep: re-centre the bias and stop unless that exposes violations
                const double settled = final_bias();
                if (count_violations(settled) == 0 || refinements == max_refinements) {
                    diag.converged = true;
                    break;
                }
                ++refinements;
                bias_ = settled;
                examine_all = true;
            }
        }
        SmoSolution sol;
        sol.bias = final_bias();
        for (Eigen::Index i = 0; i < n_; ++i) {
            const double r = kkt_residual(alpha_(i), box_(i), y_[static_cast<std::size_t>(i)] * (g_(i) + sol.bias));
            diag.max_kkt_residual = std::max(diag.max_kkt_residual, r);
            if (r > params_.tolerance) {
                ++diag.kkt_violations;
            }
        }
        sol.alpha = alpha_;
        sol.box = box_;
        sol.diagnostics = std::move(diag);
        return sol;
    }

  private:
    [[nodiscard]] bool is_unbound(Eigen::Index i) const { return alpha_(i) > 0.0 && alpha_(i) < box_(i); }

    [[nodiscard]] double error(Eigen::Index i) const { return g_(i) + bias_ - y_[static_cast<std::size_t>(i)]; }

    [[nodiscard]] int count_violations(double bias) const {
        int count = 0;
        for (Eigen::Index i = 0; i < n_; ++i) {
            if (kkt_residual(alpha_(i), box_(i), y_[static_cast<std::size_t>(i)] * (g_(i) + bias)) > params_.tolerance) {
                ++count;
            }
        }
        return count;
    }

    /// Average of y_i - g_i over unbound multipliers; midpoint of the feasible bias interval otherwise.
    [[nodiscard]] double final_bias() const {
        double sum = 0.0;
        int count = 0;
        double lower = -std::numeric_limits<double>::infinity();
        double upper = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n_; ++i) {
            const double yi = y_[static_cast<std::size_t>(i)];
            if (is_unbound(i)) {
                sum += yi - g_(i);
                ++count;
            } else if (box_(i) > 0.0) {
                // alpha = 0 needs y f >= 1, alpha = C needs y f <= 1
                const bool at_upper = alpha_(i) >= box_(i);
                const double edge = yi - g_(i);
                if ((yi > 0.0) != at_upper) {
                    lower = std::max(lower, edge);
                } else {
                    upper = std::min(upper, edge);
                }
            }
        }
        if (count > 0) {
            return sum / count;
        }
        if (std::isfinite(lower) && std::isfinite(upper)) {
            return 0.5 * (lower + upper);
        }
        if (std::isfinite(lower)) {
            return lower;
        }
        if (std::isfinite(upper)) {
            return upper;
        }
        return bias_;
    }

    int examine(Eigen::Index i2, SmoDiagnostics &diag) {
        const double y2 = y_[static_cast<std::size_t>(i2)];
        const double a2 = alpha_(i2);
        const double e2 = error(i2);
        const double r2 = e2 * y2;
        const double tol = params_.tolerance;
        if (!((r2 < -tol && a2 < box_(i2)) || (r2 > tol && a2 > 0.0))) {
            return 0;
        }
        // second choice heuristic: largest |E1 - E2| among unbound multipliers
        Eigen::Index best = -1;
        double best_gap = -1.0;
        int unbound = 0;
        for (Eigen::Index i = 0; i < n_; ++i) {
            if (is_unbound(i)) {
                ++unbound;
                const double gap = std::abs(error(i) - e2);
                if (gap > best_gap) {
                    best_gap = gap;
                    best = i;
                }
            }
        }
        if (unbound > 1 && best >= 0 && take_step(best, i2, diag)) {
            return 1;
        }
        std::uniform_int_distribution<Eigen::Index> start_dist{ 0, n_ - 1 };
        Eigen::Index start = start_dist(rng_);
        for (Eigen::Index k = 0; k < n_; ++k) {
            const Eigen::Index i1 = (start + k) % n_;
            if (is_unbound(i1) && take_step(i1, i2, diag)) {
                return 1;
            }
        }
        start = start_dist(rng_);
        for (Eigen::Index k = 0; k < n_; ++k) {
            const Eigen::Index i1 = (start + k) % n_;
            if (take_step(i1, i2, diag)) {
                return 1;
            }
        }
        return 0;
    }

    void snap(double &a, double c) const {
        const double edge = 1e-8 * c;
        if (a < edge) {
            a = 0.0;
        } else if (a > c - edge) {
            a = c;
        }
    }

    bool take_step(Eigen::Index i1, Eigen::Index i2, SmoDiagnostics &diag) {
        if (i1 == i2) {
            return false;
        }
        const double y1 = y_[static_cast<std::size_t>(i1)];
        const double y2 = y_[static_cast<std::size_t>(i2)];
        const double a1_old = alpha_(i1);
        const double a2_old = alpha_(i2);
        const double c1 = box_(i1);
        const double c2 = box_(i2);
        const double e1 = error(i1);
        const double e2 = error(i2);
        const double s = y1 * y2;

        double lo;
        double hi;
        if (s < 0.0) {
            lo = std::max(0.0, a2_old - a1_old);
            hi = std::min(c2, c1 + a2_old - a1_old);
        } else {
            lo = std::max(0.0, a1_old + a2_old - c1);
            hi = std::min(c2, a1_old + a2_old);
        }
        if (!(hi - lo > params_.eps)) {
            return false;
        }
        const KernelRows::Row row1 = kernel_rows_.row(i1);
        const KernelRows::Row row2 = kernel_rows_.row(i2);
        const double k11 = (*row1)(i1);
        const double k12 = (*row1)(i2);
        const double k22 = (*row2)(i2);
        const double eta = k11 + k22 - 2.0 * k12;

        double a2;
        if (eta > 0.0) {
            a2 = std::clamp(a2_old + y2 * (e1 - e2) / eta, lo, hi);
        } else {
            // objective is linear along the constraint line; take the better end
            const double v1 = g_(i1) - y1 * a1_old * k11 - y2 * a2_old * k12;
            const double v2 = g_(i2) - y1 * a1_old * k12 - y2 * a2_old * k22;
            const auto objective = [&](double b1, double b2) {
                return b1 + b2 - 0.5 * k11 * b1 * b1 - 0.5 * k22 * b2 * b2 - s * k12 * b1 * b2 - y1 * b1 * v1 - y2 * b2 * v2;
            };
            const double obj_lo = objective(a1_old + s * (a2_old - lo), lo);
            const double obj_hi = objective(a1_old + s * (a2_old - hi), hi);
            if (obj_lo > obj_hi + params_.eps) {
                a2 = lo;
            } else if (obj_hi > obj_lo + params_.eps) {
                a2 = hi;
            } else {
                a2 = a2_old;
            }
        }
        snap(a2, c2);
        if (std::abs(a2 - a2_old) < params_.eps * (a2 + a2_old + params_.eps)) {
            return false;
        }
        double a1 = std::clamp(a1_old + s * (a2_old - a2), 0.0, c1);
        snap(a1, c1);

        const double d1 = y1 * (a1 - a1_old);
        const double d2 = y2 * (a2 - a2_old);
        const double b1 = bias_ - e1 - d1 * k11 - d2 * k12;
        const double b2 = bias_ - e2 - d1 * k12 - d2 * k22;
        alpha_(i1) = a1;
        alpha_(i2) = a2;
        if (is_unbound(i1)) {
            bias_ = b1;
        } else if (is_unbound(i2)) {
            bias_ = b2;
        } else {
            bias_ = 0.5 * (b1 + b2);
        }
        g_.noalias() += d1 * (*row1) + d2 * (*row2);
        ++diag.updates;

        if (params_.track_objective) {
            double w = alpha_.sum();
            for (Eigen::Index i = 0; i < n_; ++i) {
                w -= 0.5 * alpha_(i) * y_[static_cast<std::size_t>(i)] * g_(i);
            }
            const double prev = diag.objective_trace.back();
            if (w < prev - 1e-9 * std::max(1.0, std::abs(prev))) {
                diag.objective_monotone = false;
            }
            diag.objective_trace.push_back(w);
        }
        return true;
    }

    std::span<const double> y_;
    const SmoParams &params_;
    KernelRows kernel_rows_;
    Eigen::Index n_;
    Eigen::VectorXd alpha_;
    Eigen::VectorXd box_;
    Eigen::VectorXd g_;  // sum_j alpha_j y_j K(i, j), without bias
    double bias_{ 0.0 };
    std::mt19937_64 rng_;
};

std::string fmt_real(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

double parse_real(const std::string &tok) {
    double v{};
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw data_error{ "malformed number '" + tok + "' in SVM model" };
    }
    return v;
}

template <typename T>
T expect(std::istream &in, const char *what) {
    T value{};
    if (!(in >> value)) {
        throw data_error{ std::string{ "SVM model: expected " } + what };
    }
    return value;
}

void expect_word(std::istream &in, const std::string &word) {
    if (expect<std::string>(in, word.c_str()) != word) {
        throw data_error{ "SVM model: expected '" + word + "'" };
    }
}

}  // namespace

Eigen::MatrixXd gram_matrix(const FeatureMatrix &x, const RbfKernel &kernel) {
    const Eigen::VectorXd sq = x.rowwise().squaredNorm();
    Eigen::MatrixXd dist = (-2.0 * (x * x.transpose())).colwise() + sq;
    dist.rowwise() += sq.transpose();
    Eigen::MatrixXd k = (-kernel.gamma * dist.cwiseMax(0.0)).array().exp().matrix();
    k.diagonal().setOnes();
    return k;
}

void SmoParams::validate() const {
    if (!(cost > 0.0)) {
        throw invalid_argument{ "SVM cost must be positive" };
    }
    if (!(tolerance > 0.0)) {
        throw invalid_argument{ "SMO tolerance must be positive" };
    }
    if (!(eps > 0.0) || max_passes < 1) {
        throw invalid_argument{ "SMO eps must be positive and max_passes >= 1" };
    }
    double total = 0.0;
    for (const double w : sample_weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw invalid_argument{ "SMO sample weights must be finite and nonnegative" };
        }
        total += w;
    }
    if (!sample_weights.empty() && !(total > 0.0)) {
        throw invalid_argument{ "SMO sample weights must have a positive sum" };
    }
}

double kkt_residual(double alpha, double box, double margin, double bound_eps) {
    if (alpha <= bound_eps * std::max(1.0, box)) {
        return std::max(0.0, 1.0 - margin);
    }
    if (alpha >= box - bound_eps * std::max(1.0, box)) {
        return std::max(0.0, margin - 1.0);
    }
    return std::abs(margin - 1.0);
}

double dual_objective(const Eigen::VectorXd &alpha, std::span<const double> y, const Eigen::MatrixXd &gram) {
    const Eigen::VectorXd ay = alpha.cwiseProduct(Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())));
    return alpha.sum() - 0.5 * ay.dot(gram * ay);
}

SmoSolution smo_solve(const FeatureMatrix &x, std::span<const double> y, const RbfKernel &kernel, const SmoParams &params) {
    params.validate();
    if (!(kernel.gamma > 0.0)) {
        throw invalid_argument{ "RBF gamma must be positive" };
    }
    if (static_cast<std::size_t>(x.rows()) != y.size() || y.empty()) {
        throw invalid_argument{ "SMO: labels do not align with samples" };
    }
    if (!params.sample_weights.empty() && params.sample_weights.size() != y.size()) {
        throw invalid_argument{ "SMO: sample weights do not align with samples" };
    }
    bool has_pos = false;
    bool has_neg = false;
    for (const double v : y) {
        if (v == 1.0) {
            has_pos = true;
        } else if (v == -1.0) {
            has_neg = true;
        } else {
            throw invalid_argument{ "SMO labels must be +1 or -1" };
        }
    }
    if (!has_pos || !has_neg) {
        throw invalid_argument{ "SMO needs both classes present" };
    }
    return SmoSolver{ x, y, kernel, params }.solve();
}

SvmBinaryModel::SvmBinaryModel(FeatureMatrix support_vectors, Eigen::VectorXd dual_coefs, double bias, RbfKernel kernel, SmoDiagnostics diagnostics) :
    sv_{ std::move(support_vectors) },
    coef_{ std::move(dual_coefs) },
    bias_{ bias },
    kernel_{ kernel },
    diag_{ std::move(diagnostics) } {
    if (sv_.rows() != coef_.size()) {
        throw invalid_argument{ "support vector and coefficient counts differ" };
    }
}

double SvmBinaryModel::decision_value(FeatureRef x) const {
    if (sv_.rows() == 0) {
        return bias_;
    }
    if (x.size() != sv_.cols()) {
        throw invalid_argument{ "feature dimension " + std::to_string(x.size()) + " does not match model dimension " + std::to_string(sv_.cols()) };
    }
    const Eigen::VectorXd d2 = (sv_.rowwise() - x).rowwise().squaredNorm();
    return coef_.dot((-kernel_.gamma * d2).array().exp().matrix()) + bias_;
}

SvmBinaryModel smo_train_binary(const FeatureMatrix &x, std::span<const double> y, const RbfKernel &kernel, const SmoParams &params) {
    SmoSolution sol = smo_solve(x, y, kernel, params);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < sol.alpha.size(); ++i) {
        if (sol.alpha(i) > 0.0) {
            keep.push_back(i);
        }
    }
    FeatureMatrix sv(static_cast<Eigen::Index>(keep.size()), x.cols());
    Eigen::VectorXd coef(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t r = 0; r < keep.size(); ++r) {
        sv.row(static_cast<Eigen::Index>(r)) = x.row(keep[r]);
        coef(static_cast<Eigen::Index>(r)) = sol.alpha(keep[r]) * y[static_cast<std::size_t>(keep[r])];
    }
    return SvmBinaryModel{ std::move(sv), std::move(coef), sol.bias, kernel, std::move(sol.diagnostics) };
}

SvmMulticlassModel::SvmMulticlassModel(std::vector<std::string> classes, Eigen::Index dimension, RbfKernel kernel, std::vector<PairwiseModel> pairs) :
    classes_{ std::move(classes) },
    dimension_{ dimension },
    kernel_{ kernel },
    pairs_{ std::move(pairs) } {
    const std::size_t k = classes_.size();
    if (pairs_.size() != k * (k - 1) / 2) {
        throw invalid_argument{ "one-against-one model needs k(k-1)/2 pairwise models" };
    }
}

VoteTally tally_votes(const SvmMulticlassModel &m, FeatureRef x) {
    if (x.size() != m.dimension()) {
        throw invalid_argument{ "feature dimension " + std::to_string(x.size()) + " does not match model dimension " + std::to_string(m.dimension()) };
    }
    VoteTally t{ std::vector<int>(static_cast<std::size_t>(m.num_classes()), 0), std::vector<double>(static_cast<std::size_t>(m.num_classes()), 0.0) };
    for (const PairwiseModel &p : m.pairs()) {
        switch (p.kind) {
        case PairwiseModel::Kind::trained: {
            const double f = p.model.decision_value(x);
            const ClassId winner = f >= 0.0 ? p.first : p.second;
            ++t.votes[static_cast<std::size_t>(winner)];
            t.margin[static_cast<std::size_t>(winner)] += std::abs(f);
            break;
        }
        case PairwiseModel::Kind::constant:
            ++t.votes[static_cast<std::size_t>(p.constant_class)];
            break;
        case PairwiseModel::Kind::abstain:
            break;
        }
    }
    return t;
}

ClassId resolve_votes(const VoteTally &tally) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < tally.votes.size(); ++c) {
        if (tally.votes[c] > tally.votes[best] || (tally.votes[c] == tally.votes[best] && tally.margin[c] > tally.margin[best])) {
            best = c;
        }
    }
    return static_cast<ClassId>(best);
}

ClassId SvmMulticlassModel::predict(FeatureRef x) const { return resolve_votes(tally_votes(*this, x)); }

std::string SvmMulticlassModel::serialize() const {
    std::ostringstream out;
    out << "phonboost-svm-ovo 1\n";
    out << "dimension " << dimension_ << '\n';
    out << "gamma " << fmt_real(kernel_.gamma) << '\n';
    out << "classes " << classes_.size() << '\n';
    for (const std::string &c : classes_) {
        out << c << '\n';
    }
    for (const PairwiseModel &p : pairs_) {
        out << "pair " << p.first << ' ' << p.second << ' ';
        switch (p.kind) {
        case PairwiseModel::Kind::trained:
            out << "trained " << p.model.support_vectors().rows() << ' ' << fmt_real(p.model.bias()) << '\n';
            for (Eigen::Index r = 0; r < p.model.support_vectors().rows(); ++r) {
                out << fmt_real(p.model.dual_coefs()(r));
                for (Eigen::Index j = 0; j < p.model.support_vectors().cols(); ++j) {
                    out << ' ' << fmt_real(p.model.support_vectors()(r, j));
                }
                out << '\n';
            }
            break;
        case PairwiseModel::Kind::constant:
            out << "constant " << p.constant_class << '\n';
            break;
        case PairwiseModel::Kind::abstain:
            out << "abstain\n";
            break;
        }
    }
    return out.str();
}

SvmMulticlassModel SvmMulticlassModel::deserialize(const std::string &text) {
    std::istringstream in{ text };
    expect_word(in, "phonboost-svm-ovo");
    if (expect<int>(in, "format version") != 1) {
        throw data_error{ "SVM model: unsupported format version" };
    }
    expect_word(in, "dimension");
    const auto dim = expect<Eigen::Index>(in, "dimension");
    expect_word(in, "gamma");
    const RbfKernel kernel{ parse_real(expect<std::string>(in, "gamma")) };
    expect_word(in, "classes");
    const auto k = expect<std::size_t>(in, "class count");
    std::vector<std::string> classes(k);
    for (auto &c : classes) {
        c = expect<std::string>(in, "class name");
    }
    std::vector<PairwiseModel> pairs;
    for (std::size_t p = 0; p < k * (k - 1) / 2; ++p) {
        expect_word(in, "pair");
        PairwiseModel pm;
        pm.first = expect<ClassId>(in, "class id");
        pm.second = expect<ClassId>(in, "class id");
        const auto kind = expect<std::string>(in, "pair kind");
        if (kind == "trained") {
            const auto nsv = expect<Eigen::Index>(in, "support vector count");
            const double bias = parse_real(expect<std::string>(in, "bias"));
            FeatureMatrix sv(nsv, dim);
            Eigen::VectorXd coef(nsv);
            for (Eigen::Index r = 0; r < nsv; ++r) {
                coef(r) = parse_real(expect<std::string>(in, "dual coefficient"));
                for (Eigen::Index j = 0; j < dim; ++j) {
                    sv(r, j) = parse_real(expect<std::string>(in, "support vector value"));
                }
            }
            pm.model = SvmBinaryModel{ std::move(sv), std::move(coef), bias, kernel };
        } else if (kind == "constant") {
            pm.kind = PairwiseModel::Kind::constant;
            pm.constant_class = expect<ClassId>(in, "class id");
        } else if (kind == "abstain") {
            pm.kind = PairwiseModel::Kind::abstain;
        } else {
            throw data_error{ "SVM model: unknown pair kind '" + kind + "'" };
        }
        pairs.push_back(std::move(pm));
    }
    return SvmMulticlassModel{ std::move(classes), dim, kernel, std::move(pairs) };
}

SvmMulticlassModel train_ovo(const Dataset &d, std::span<const double> weights, const RbfKernel &kernel, const SmoParams &params) {
    if (d.num_classes() < 2) {
        throw invalid_argument{ "one-against-one training needs at least two classes" };
    }
    if (!weights.empty() && weights.size() != d.size()) {
        throw invalid_argument{ "weights do not align with samples" };
    }
    const int k = d.num_classes();
    std::vector<PairwiseModel> pairs;
    std::vector<std::string> notes;
    for (ClassId a = 0; a < k; ++a) {
        for (ClassId b = a + 1; b < k; ++b) {
            std::vector<std::size_t> rows;
            bool has_a = false;
            bool has_b = false;
            for (std::size_t i = 0; i < d.size(); ++i) {
                const ClassId l = d.label(i);
                if ((l == a || l == b) && (weights.empty() || weights[i] > 0.0)) {
                    rows.push_back(i);
                    has_a |= l == a;
                    has_b |= l == b;
                }
            }
            PairwiseModel pm;
            pm.first = a;
            pm.second = b;
            if (has_a && has_b) {
                FeatureMatrix x(static_cast<Eigen::Index>(rows.size()), d.dimension());
                std::vector<double> y(rows.size());
                SmoParams pair_params = params;
                pair_params.sample_weights.clear();
                for (std::size_t r = 0; r < rows.size(); ++r) {
                    x.row(static_cast<Eigen::Index>(r)) = d.sample(rows[r]);
                    y[r] = d.label(rows[r]) == a ? 1.0 : -1.0;
                    if (!weights.empty()) {
                        pair_params.sample_weights.push_back(weights[rows[r]]);
                    }
                }
                pm.model = smo_train_binary(x, y, kernel, pair_params);
                if (!pm.model.diagnostics().converged) {
                    notes.push_back("pair (" + d.classes()[static_cast<std::size_t>(a)] + ", " + d.classes()[static_cast<std::size_t>(b)] + "): SMO hit max_passes");
                }
            } else if (has_a || has_b) {
                pm.kind = PairwiseModel::Kind::constant;
                pm.constant_class = has_a ? a : b;
                notes.push_back("pair (" + d.classes()[static_cast<std::size_t>(a)] + ", " + d.classes()[static_cast<std::size_t>(b)] + "): only "
                                + d.classes()[static_cast<std::size_t>(pm.constant_class)] + " present, constant voter");
            } else {
                pm.kind = PairwiseModel::Kind::abstain;
            }
            pairs.push_back(std::move(pm));
        }
    }
    SvmMulticlassModel model{ d.classes(), d.dimension(), kernel, std::move(pairs) };
    model.notes_ = std::move(notes);
    return model;
}

SvmMulticlassModel train_ovo(const Dataset &d, const RbfKernel &kernel, const SmoParams &params) { return train_ovo(d, std::span<const double>{}, kernel, params); }

}  // namespace phonboost::svm
