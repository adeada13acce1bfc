#include "phonboost/mfcc.hpp"

namespace phonboost::mfcc {

int MfccConfig::fft_size(int sample_rate) const {
    if (n_fft > 0) {
        return n_fft;
    }
    return static_cast<int>(next_power_of_two(frame_samples(sample_rate)));
}

void MfccConfig::validate(int sample_rate) const {
    if (!(frame_length > 0.0) || !(hop > 0.0) || hop > frame_length) {
        throw invalid_argument{ "need 0 < hop <= frame_length" };
    }
    if (frame_samples(sample_rate) < 1 || hop_samples(sample_rate) < 1) {
        throw invalid_argument{ "frame or hop shorter than one sample at this sample rate" };
    }
    if (!(pre_emphasis >= 0.0 && pre_emphasis < 1.0)) {
        throw invalid_argument{ "pre_emphasis must lie in [0, 1)" };
    }
    const int fft = fft_size(sample_rate);
    if (!is_power_of_two(fft) || fft < frame_samples(sample_rate)) {
        throw invalid_argument{ "n_fft must be a power of two holding one frame" };
    }
    if (n_mels < 2 || n_ceps < 1 || n_ceps > n_mels) {
        throw invalid_argument{ "need n_mels >= 2 and 1 <= n_ceps <= n_mels" };
    }
    if (!(log_floor > 0.0)) {
        throw invalid_argument{ "log_floor must be positive" };
    }
    if (delta_window < 1 || middle_frames < 1) {
        throw invalid_argument{ "delta_window and middle_frames must be >= 1" };
    }
}

template FrameMatrix<double> extract_features(const AudioBuffer<double> &, const MfccConfig &);
template FrameMatrix<float> extract_features(const AudioBuffer<float> &, const MfccConfig &);

}  // namespace phonboost::mfcc
