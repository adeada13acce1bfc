/**
 * @file
 * @brief MFCC front end: pre-emphasis, framing, Hamming taper, radix-2 power spectrum,
 *        mel filterbank, orthonormal DCT-II, regression deltas and middle-frame pooling.
 *
 * Everything here is a free function templated on the scalar type and accepting
 * Eigen expressions, so the stages compose without intermediate copies where Eigen allows.
 */

#ifndef PHONBOOST_MFCC_HPP_
#define PHONBOOST_MFCC_HPP_
#pragma once

#include "phonboost/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace phonboost::mfcc {

template <typename Scalar>
using Signal = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// One row per frame.
template <typename Scalar>
using FrameMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
struct AudioBuffer {
    Signal<Scalar> samples;
    int sample_rate{ 16000 };
};

/// Throws data_error unless the buffer is nonempty, finite, within [-1, 1] and has a positive rate.
template <typename Scalar>
void validate(const AudioBuffer<Scalar> &a) {
    if (a.samples.size() == 0) {
        throw data_error{ "audio buffer is empty" };
    }
    if (a.sample_rate <= 0) {
        throw data_error{ "audio sample rate must be positive" };
    }
    if (!a.samples.allFinite() || a.samples.cwiseAbs().maxCoeff() > Scalar(1)) {
        throw data_error{ "audio samples must be finite and within [-1, 1]" };
    }
}

enum class MiddleMode { average, concatenate };

struct MfccConfig {
    double frame_length{ 0.016 };  // seconds
    double hop{ 0.008 };           // seconds; 125 frames per second
    double pre_emphasis{ 0.97 };
    int n_fft{ 0 };                // 0: smallest power of two holding one frame
    int n_mels{ 26 };
    int n_ceps{ 13 };
    double log_floor{ 1e-10 };
    int delta_window{ 2 };
    bool use_log_energy{ true };   // replace c0 by the frame log-energy
    int middle_frames{ 3 };
    MiddleMode middle_mode{ MiddleMode::average };

    [[nodiscard]] int frame_samples(int sample_rate) const { return static_cast<int>(std::lround(frame_length * sample_rate)); }
    [[nodiscard]] int hop_samples(int sample_rate) const { return static_cast<int>(std::lround(hop * sample_rate)); }
    [[nodiscard]] int fft_size(int sample_rate) const;
    /// Throws invalid_argument on any violated invariant for this sample rate.
    void validate(int sample_rate) const;
};

[[nodiscard]] constexpr bool is_power_of_two(long n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

[[nodiscard]] inline long next_power_of_two(long n) noexcept {
    long p = 1;
    while (p < n) {
        p <<= 1;
    }
    return p;
}

template <typename Scalar>
[[nodiscard]] Scalar hz_to_mel(Scalar hz) {
    return Scalar(2595) * std::log10(Scalar(1) + hz / Scalar(700));
}

template <typename Scalar>
[[nodiscard]] Scalar mel_to_hz(Scalar mel) {
    return Scalar(700) * (std::pow(Scalar(10), mel / Scalar(2595)) - Scalar(1));
}

/// y[0] = x[0], y[t] = x[t] - alpha * x[t-1].
template <typename Derived>
[[nodiscard]] Signal<typename Derived::Scalar> pre_emphasize(const Eigen::MatrixBase<Derived> &x, typename Derived::Scalar alpha) {
    using Scalar = typename Derived::Scalar;
    if (!(alpha >= Scalar(0) && alpha < Scalar(1))) {
        throw invalid_argument{ "pre-emphasis coefficient must lie in [0, 1)" };
    }
    Signal<Scalar> y(x.size());
    if (x.size() == 0) {
        return y;
    }
    y(0) = x(0);
    const Eigen::Index n = x.size();
    y.tail(n - 1) = x.tail(n - 1) - alpha * x.head(n - 1);
    return y;
}

/// Number of frames frame_signal produces, including the zero-padded tail frame.
[[nodiscard]] inline Eigen::Index frame_count(Eigen::Index n, Eigen::Index frame_len, Eigen::Index hop) {
    if (frame_len <= 0 || hop <= 0) {
        throw invalid_argument{ "frame length and hop must be positive" };
    }
    if (n < frame_len) {
        throw data_error{ "signal shorter than one frame" };
    }
    const Eigen::Index full = 1 + (n - frame_len) / hop;
    const Eigen::Index covered = frame_len + (full - 1) * hop;
    return full + (covered < n ? 1 : 0);
}

template <typename Derived>
[[nodiscard]] FrameMatrix<typename Derived::Scalar> frame_signal(const Eigen::MatrixBase<Derived> &x, Eigen::Index frame_len, Eigen::Index hop) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index rows = frame_count(x.size(), frame_len, hop);
    FrameMatrix<Scalar> frames = FrameMatrix<Scalar>::Zero(rows, frame_len);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Eigen::Index start = r * hop;
        const Eigen::Index len = std::min(frame_len, x.size() - start);
        frames.row(r).head(len) = x.segment(start, len).transpose();
    }
    return frames;
}

template <typename Scalar>
[[nodiscard]] FrameMatrix<Scalar> frame_signal(const AudioBuffer<Scalar> &a, const MfccConfig &cfg) {
    return frame_signal(a.samples, cfg.frame_samples(a.sample_rate), cfg.hop_samples(a.sample_rate));
}

template <typename Scalar>
[[nodiscard]] Signal<Scalar> hamming_window(Eigen::Index n) {
    if (n < 1) {
        throw invalid_argument{ "window length must be positive" };
    }
    if (n == 1) {
        return Signal<Scalar>::Ones(1);
    }
    Signal<Scalar> w(n);
    const Scalar step = Scalar(2) * std::numbers::pi_v<Scalar> / static_cast<Scalar>(n - 1);
    for (Eigen::Index k = 0; k < n; ++k) {
        w(k) = Scalar(0.54) - Scalar(0.46) * std::cos(step * static_cast<Scalar>(k));
    }
    return w;
}

template <typename Derived>
[[nodiscard]] Signal<typename Derived::Scalar> hamming(const Eigen::MatrixBase<Derived> &frame) {
    using Scalar = typename Derived::Scalar;
    return frame.derived().reshaped().cwiseProduct(hamming_window<Scalar>(frame.size()));
}

/// In-place iterative radix-2 decimation-in-time FFT. Size must be a power of two.
template <typename Scalar>
void fft_inplace(std::vector<std::complex<Scalar>> &a) {
    const std::size_t n = a.size();
    if (!is_power_of_two(static_cast<long>(n))) {
        throw invalid_argument{ "FFT size must be a power of two" };
    }
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(a[i], a[j]);
        }
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const Scalar angle = -Scalar(2) * std::numbers::pi_v<Scalar> / static_cast<Scalar>(len);
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                // direct twiddle, no recurrence
                const std::complex<Scalar> w = std::polar(Scalar(1), angle * static_cast<Scalar>(k));
                const std::complex<Scalar> u = a[i + k];
                const std::complex<Scalar> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

/// |DFT|^2 of the zero-padded frame, bins 0..n_fft/2.
template <typename Derived>
[[nodiscard]] Signal<typename Derived::Scalar> power_spectrum(const Eigen::MatrixBase<Derived> &frame, Eigen::Index n_fft) {
    using Scalar = typename Derived::Scalar;
    if (!is_power_of_two(static_cast<long>(n_fft))) {
        throw invalid_argument{ "n_fft must be a power of two" };
    }
    if (frame.size() > n_fft) {
        throw invalid_argument{ "frame longer than n_fft" };
    }
    std::vector<std::complex<Scalar>> buf(static_cast<std::size_t>(n_fft));
    for (Eigen::Index i = 0; i < frame.size(); ++i) {
        buf[static_cast<std::size_t>(i)] = frame.derived().reshaped()(i);
    }
    fft_inplace(buf);
    Signal<Scalar> out(n_fft / 2 + 1);
    for (Eigen::Index k = 0; k < out.size(); ++k) {
        out(k) = std::norm(buf[static_cast<std::size_t>(k)]);
    }
    return out;
}

/**
 * @brief Triangular mel filters, one row per filter, one column per spectrum bin.
 *
 * n_mels + 2 edge frequencies are spaced uniformly in mel between 0 Hz and Nyquist;
 * filter m rises from edge m to edge m+1 and falls to edge m+2. Weights are the
 * triangle evaluated at bin frequencies k * sample_rate / n_fft (peak 1).
 */
template <typename Scalar>
[[nodiscard]] Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> mel_filterbank_matrix(int n_mels, Eigen::Index n_fft, int sample_rate) {
    if (n_mels < 2) {
        throw invalid_argument{ "need at least two mel filters" };
    }
    const Eigen::Index bins = n_fft / 2 + 1;
    const Scalar nyquist = Scalar(sample_rate) / Scalar(2);
    const Scalar mel_max = hz_to_mel(nyquist);
    std::vector<Scalar> edges(static_cast<std::size_t>(n_mels) + 2);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        edges[i] = mel_to_hz(mel_max * static_cast<Scalar>(i) / static_cast<Scalar>(n_mels + 1));
    }
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> bank = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n_mels, bins);
    for (int m = 0; m < n_mels; ++m) {
        const Scalar lo = edges[static_cast<std::size_t>(m)];
        const Scalar mid = edges[static_cast<std::size_t>(m) + 1];
        const Scalar hi = edges[static_cast<std::size_t>(m) + 2];
        for (Eigen::Index k = 0; k < bins; ++k) {
            const Scalar f = Scalar(sample_rate) * static_cast<Scalar>(k) / static_cast<Scalar>(n_fft);
            if (f > lo && f <= mid) {
                bank(m, k) = (f - lo) / (mid - lo);
            } else if (f > mid && f < hi) {
                bank(m, k) = (hi - f) / (hi - mid);
            }
        }
    }
    return bank;
}

/// Filter energies, each floored at @p log_floor so the following log stays finite.
template <typename DerivedBank, typename DerivedSpec>
[[nodiscard]] Signal<typename DerivedSpec::Scalar> mel_filterbank(const Eigen::MatrixBase<DerivedBank> &bank, const Eigen::MatrixBase<DerivedSpec> &spectrum,
                                                                  typename DerivedSpec::Scalar log_floor) {
    if (bank.cols() != spectrum.size()) {
        throw invalid_argument{ "filterbank and spectrum sizes differ" };
    }
    return (bank * spectrum.derived().reshaped()).cwiseMax(log_floor);
}

template <typename DerivedSpec>
[[nodiscard]] Signal<typename DerivedSpec::Scalar> mel_filterbank(const Eigen::MatrixBase<DerivedSpec> &spectrum, int n_mels, int sample_rate,
                                                                  typename DerivedSpec::Scalar log_floor = typename DerivedSpec::Scalar(1e-10)) {
    using Scalar = typename DerivedSpec::Scalar;
    const Eigen::Index n_fft = 2 * (spectrum.size() - 1);
    return mel_filterbank(mel_filterbank_matrix<Scalar>(n_mels, n_fft, sample_rate), spectrum, log_floor);
}

/// Orthonormal DCT-II basis restricted to the first n_ceps rows.
template <typename Scalar>
[[nodiscard]] Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dct_ii_matrix(Eigen::Index n, Eigen::Index n_ceps) {
    if (n_ceps > n || n_ceps < 1) {
        throw invalid_argument{ "n_ceps must lie in [1, input length]" };
    }
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> d(n_ceps, n);
    const Scalar pi = std::numbers::pi_v<Scalar>;
    for (Eigen::Index k = 0; k < n_ceps; ++k) {
        const Scalar s = k == 0 ? std::sqrt(Scalar(1) / Scalar(n)) : std::sqrt(Scalar(2) / Scalar(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            d(k, i) = s * std::cos(pi * Scalar(k) * (Scalar(2 * i + 1)) / Scalar(2 * n));
        }
    }
    return d;
}

template <typename Derived>
[[nodiscard]] Signal<typename Derived::Scalar> dct_ii(const Eigen::MatrixBase<Derived> &x, Eigen::Index n_ceps) {
    using Scalar = typename Derived::Scalar;
    return dct_ii_matrix<Scalar>(x.size(), n_ceps) * x.derived().reshaped();
}

/// Inverse of the full orthonormal DCT-II (i.e. the orthonormal DCT-III).
template <typename Derived>
[[nodiscard]] Signal<typename Derived::Scalar> inverse_dct_ii(const Eigen::MatrixBase<Derived> &c) {
    using Scalar = typename Derived::Scalar;
    return dct_ii_matrix<Scalar>(c.size(), c.size()).transpose() * c.derived().reshaped();
}

/**
 * @brief Regression deltas along the time (row) axis:
 *        d[t] = sum_k k (c[t+k] - c[t-k]) / (2 sum_k k^2), rows outside the range clamp to the edge rows.
 */
template <typename Derived>
[[nodiscard]] FrameMatrix<typename Derived::Scalar> deltas(const Eigen::MatrixBase<Derived> &c, int window) {
    using Scalar = typename Derived::Scalar;
    if (window < 1) {
        throw invalid_argument{ "delta window must be >= 1" };
    }
    const Eigen::Index t_max = c.rows() - 1;
    Scalar denom = 0;
    for (int k = 1; k <= window; ++k) {
        denom += Scalar(k * k);
    }
    denom *= Scalar(2);
    FrameMatrix<Scalar> d = FrameMatrix<Scalar>::Zero(c.rows(), c.cols());
    for (Eigen::Index t = 0; t < c.rows(); ++t) {
        for (int k = 1; k <= window; ++k) {
            const Eigen::Index fwd = std::min<Eigen::Index>(t + k, t_max);
            const Eigen::Index back = std::max<Eigen::Index>(t - k, 0);
            d.row(t) += Scalar(k) * (c.row(fwd) - c.row(back));
        }
    }
    return d / denom;
}

/**
 * @brief Full MFCC pipeline: per frame n_ceps statics, then their deltas, then delta-deltas.
 *
 * With the default configuration this is 13 + 13 + 13 = 39 columns. Requires at least
 * five frames so that both delta orders see real neighbours.
 */
template <typename Scalar>
[[nodiscard]] FrameMatrix<Scalar> extract_features(const AudioBuffer<Scalar> &a, const MfccConfig &cfg) {
    validate(a);
    cfg.validate(a.sample_rate);
    const Eigen::Index frame_len = cfg.frame_samples(a.sample_rate);
    const Eigen::Index hop = cfg.hop_samples(a.sample_rate);
    const Eigen::Index n_fft = cfg.fft_size(a.sample_rate);
    if (a.samples.size() < frame_len || frame_count(a.samples.size(), frame_len, hop) < 5) {
        throw data_error{ "audio too short: at least 5 frames are required" };
    }

    const Signal<Scalar> emphasized = pre_emphasize(a.samples, static_cast<Scalar>(cfg.pre_emphasis));
    const FrameMatrix<Scalar> frames = frame_signal(emphasized, frame_len, hop);
    const auto bank = mel_filterbank_matrix<Scalar>(cfg.n_mels, n_fft, a.sample_rate);
    const auto dct = dct_ii_matrix<Scalar>(cfg.n_mels, cfg.n_ceps);
    const Signal<Scalar> window = hamming_window<Scalar>(frame_len);
    const auto floor = static_cast<Scalar>(cfg.log_floor);

    FrameMatrix<Scalar> statics(frames.rows(), cfg.n_ceps);
    for (Eigen::Index r = 0; r < frames.rows(); ++r) {
        const Signal<Scalar> tapered = frames.row(r).transpose().cwiseProduct(window);
        const Signal<Scalar> log_mel = mel_filterbank(bank, power_spectrum(tapered, n_fft), floor).array().log().matrix();
        Signal<Scalar> ceps = dct * log_mel;
        if (cfg.use_log_energy) {
            ceps(0) = std::log(std::max(frames.row(r).squaredNorm(), floor));
        }
        statics.row(r) = ceps.transpose();
    }
    const FrameMatrix<Scalar> d1 = deltas(statics, cfg.delta_window);
    const FrameMatrix<Scalar> d2 = deltas(d1, cfg.delta_window);

    FrameMatrix<Scalar> out(statics.rows(), 3 * cfg.n_ceps);
    out << statics, d1, d2;
    return out;
}

/// extract_features with the 13-coefficient layout enforced, giving exactly 39 columns.
template <typename Scalar>
[[nodiscard]] FrameMatrix<Scalar> extract_39(const AudioBuffer<Scalar> &a, const MfccConfig &cfg) {
    if (cfg.n_ceps != 13) {
        throw invalid_argument{ "extract_39 requires n_ceps = 13" };
    }
    return extract_features(a, cfg);
}

/// First index of the k consecutive frames centred on frame count/2 (earlier on ties).
[[nodiscard]] inline Eigen::Index middle_window_start(Eigen::Index frame_count, Eigen::Index k) {
    if (k < 1) {
        throw invalid_argument{ "middle window size must be >= 1" };
    }
    if (frame_count < k) {
        throw data_error{ "segment has fewer frames than the middle window" };
    }
    return std::clamp<Eigen::Index>(frame_count / 2 - k / 2, 0, frame_count - k);
}

/// Pool the k middle frames of a segment into one vector (mean, or concatenation in row order).
template <typename Derived>
[[nodiscard]] Signal<typename Derived::Scalar> middle_window_stack(const Eigen::MatrixBase<Derived> &frames, Eigen::Index k = 3, MiddleMode mode = MiddleMode::average) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index start = middle_window_start(frames.rows(), k);
    const auto block = frames.middleRows(start, k);
    if (mode == MiddleMode::average) {
        return block.colwise().mean().transpose();
    }
    Signal<Scalar> out(k * frames.cols());
    for (Eigen::Index r = 0; r < k; ++r) {
        out.segment(r * frames.cols(), frames.cols()) = block.row(r).transpose();
    }
    return out;
}

}  // namespace phonboost::mfcc

#endif  // PHONBOOST_MFCC_HPP_
