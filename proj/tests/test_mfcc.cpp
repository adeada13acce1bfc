#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"

#include "phonboost/errors.hpp"
#include "phonboost/mfcc.hpp"
#include "phonboost/wav.hpp"

#include <filesystem>
#include <random>

using namespace phonboost;
using namespace phonboost::mfcc;

namespace {

Eigen::VectorXd random_signal(Eigen::Index n, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng{ seed };
    std::uniform_real_distribution<double> u(-scale, scale);
    Eigen::VectorXd x(n);
    for (auto &v : x) {
        v = u(rng);
    }
    return x;
}

}  // namespace

TEST_CASE("pre-emphasis") {
    const Eigen::VectorXd x = random_signal(50, 1);
    CHECK(pre_emphasize(x, 0.0) == x);

    const Eigen::VectorXd c = Eigen::VectorXd::Constant(10, 2.0);
    const Eigen::VectorXd y = pre_emphasize(c, 0.97);
    CHECK(y(0) == 2.0);
    for (Eigen::Index t = 1; t < 10; ++t) {
        CHECK(y(t) == doctest::Approx(0.06).epsilon(1e-12));
    }

    const Eigen::VectorXd z = pre_emphasize(x, 0.97);
    CHECK(z(0) == x(0));
    for (Eigen::Index t = 1; t < x.size(); ++t) {
        CHECK(std::abs(z(t) - (x(t) - 0.97 * x(t - 1))) <= 1e-12);
    }
    CHECK_THROWS_AS((void)pre_emphasize(x, 1.0), invalid_argument);
}

TEST_CASE("framing arithmetic") {
    // 1 s at 16 kHz, 256-sample frames every 128 samples: 1 + (16000 - 256) / 128 = 124, no residual
    CHECK(frame_count(16000, 256, 128) == 124);
    CHECK(frame_count(256, 256, 128) == 1);
    CHECK(frame_count(300, 256, 128) == 2);  // zero-padded tail
    MfccConfig cfg;
    CHECK(cfg.frame_samples(16000) == 256);
    CHECK(cfg.hop_samples(16000) == 128);
    CHECK(16000 / cfg.hop_samples(16000) == 125);
    CHECK(cfg.fft_size(16000) == 256);

    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(12, 0, 11);
    const auto tiles = frame_signal(x, 4, 4);
    REQUIRE(tiles.rows() == 3);
    CHECK(tiles(1, 0) == 4.0);
    CHECK(tiles(2, 3) == 11.0);

    const auto padded = frame_signal(Eigen::VectorXd::Ones(6), 4, 3);
    REQUIRE(padded.rows() == 2);
    CHECK(padded(1, 2) == 1.0);
    CHECK(padded(1, 3) == 0.0);
}

TEST_CASE("hamming window") {
    const Eigen::VectorXd w = hamming_window<double>(9);
    CHECK(w(0) == doctest::Approx(0.08));
    CHECK(w(8) == doctest::Approx(0.08));
    CHECK(w(4) == doctest::Approx(1.0));
    const Eigen::VectorXd f = random_signal(9, 4);
    CHECK(hamming(f).squaredNorm() <= f.squaredNorm());
}

TEST_CASE("power spectrum matches the naive DFT and Parseval") {
    CHECK(power_spectrum(Eigen::VectorXd::Zero(256), 256).isZero());
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Eigen::VectorXd x = random_signal(200, seed);
        const Eigen::VectorXd p = power_spectrum(x, 256);
        const auto ref = oracle::naive_power_spectrum(std::vector<double>(x.begin(), x.end()), 256);
        for (Eigen::Index k = 0; k < p.size(); ++k) {
            CHECK(std::abs(p(k) - ref[static_cast<std::size_t>(k)]) <= 1e-9 * (1.0 + ref[static_cast<std::size_t>(k)]));
        }
        const double time_energy = x.squaredNorm();
        CHECK(std::abs(oracle::two_sided_energy(p, 256) / 256.0 - time_energy) <= 1e-9 * time_energy);
    }
}

TEST_CASE("pure cosine concentrates at its bin") {
    const int k0 = 19;
    Eigen::VectorXd x(256);
    for (Eigen::Index t = 0; t < 256; ++t) {
        x(t) = std::cos(2.0 * std::numbers::pi * k0 * static_cast<double>(t) / 256.0);
    }
    const Eigen::VectorXd p = power_spectrum(x, 256);
    CHECK(p(k0) >= 0.99 * p.sum());
}

TEST_CASE("mel scale and filterbank construction") {
    CHECK(hz_to_mel(700.0) == doctest::Approx(2595.0 * std::log10(2.0)));
    CHECK(hz_to_mel(700.0) == doctest::Approx(781.17).epsilon(1e-4));
    CHECK(mel_to_hz(hz_to_mel(1234.5)) == doctest::Approx(1234.5));

    const auto bank = mel_filterbank_matrix<double>(26, 512, 16000);
    CHECK(bank.rows() == 26);
    CHECK(bank.cols() == 257);
    CHECK(bank.minCoeff() >= 0.0);
    for (Eigen::Index m = 0; m < bank.rows(); ++m) {
        CHECK(bank.row(m).maxCoeff() > 0.0);
        CHECK(bank.row(m).maxCoeff() <= 1.0);
    }
}

TEST_CASE("flat spectrum gives outputs proportional to triangle areas") {
    // on a fine grid the sum of a triangle's samples approaches its area / bin width = (hi - lo) / 2 / df
    const int n_fft = 1 << 16;
    const int rate = 16000;
    const Eigen::VectorXd flat = Eigen::VectorXd::Ones(n_fft / 2 + 1);
    const Eigen::VectorXd out = mel_filterbank(flat, 26, rate);
    const double mel_max = hz_to_mel(rate / 2.0);
    const double df = static_cast<double>(rate) / n_fft;
    for (int m = 0; m < 26; ++m) {
        const double lo = mel_to_hz(mel_max * m / 27.0);
        const double hi = mel_to_hz(mel_max * (m + 2) / 27.0);
        const double area_bins = 0.5 * (hi - lo) / df;
        CHECK(out(m) == doctest::Approx(area_bins).epsilon(1e-3));
    }
}

TEST_CASE("DCT-II") {
    const Eigen::VectorXd c = dct_ii(Eigen::VectorXd::Constant(26, 3.0), 13);
    CHECK(c(0) == doctest::Approx(3.0 * std::sqrt(26.0)));
    CHECK(c.tail(12).cwiseAbs().maxCoeff() < 1e-12);

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Eigen::VectorXd x = random_signal(26, seed, 5.0);
        const Eigen::VectorXd fast = dct_ii(x, 13);
        const auto ref = oracle::naive_dct(std::vector<double>(x.begin(), x.end()), 13);
        for (int k = 0; k < 13; ++k) {
            CHECK(std::abs(fast(k) - ref[static_cast<std::size_t>(k)]) <= 1e-10);
        }
        CHECK((inverse_dct_ii(dct_ii(x, 26)) - x).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("deltas") {
    const Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(8, 3, 4.0);
    CHECK(deltas(flat, 2).isZero());

    Eigen::MatrixXd ramp(10, 1);
    for (int t = 0; t < 10; ++t) {
        ramp(t, 0) = t;
    }
    const auto d = deltas(ramp, 2);
    for (int t = 2; t < 8; ++t) {
        CHECK(d(t, 0) == doctest::Approx(1.0));
    }

    std::mt19937_64 rng{ 3 };
    std::normal_distribution<double> g;
    Eigen::MatrixXd r(12, 5);
    for (auto &v : r.reshaped()) {
        v = g(rng);
    }
    CHECK((deltas(r, 2) - oracle::naive_deltas(r, 2)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("extract_39 on noise and silence") {
    AudioBuffer<double> noise{ random_signal(16000, 17, 0.5), 16000 };
    const auto f = extract_39(noise, MfccConfig{});
    CHECK(f.cols() == 39);
    CHECK(f.rows() >= 124);
    CHECK(f.allFinite());

    AudioBuffer<double> silence{ Eigen::VectorXd::Zero(4000), 16000 };
    const auto s = extract_39(silence, MfccConfig{});
    CHECK(s.cols() == 39);
    CHECK(s.col(0).cwiseEqual(std::log(1e-10)).all());
    CHECK(s.rightCols(26).isZero());
    for (int k = 1; k < 13; ++k) {
        CHECK(s.col(k).cwiseAbs().maxCoeff() < 1e-9);  // DCT of a constant log-floor vector
    }

    const auto ff = extract_39(AudioBuffer<float>{ noise.samples.cast<float>(), 16000 }, MfccConfig{});
    CHECK(ff.rows() == f.rows());
    CHECK(ff.allFinite());
}

TEST_CASE("extraction rejects bad input") {
    CHECK_THROWS_AS((void)extract_39(AudioBuffer<double>{ Eigen::VectorXd::Zero(100), 16000 }, MfccConfig{}), data_error);
    CHECK_THROWS_AS((void)extract_39(AudioBuffer<double>{ Eigen::VectorXd::Constant(4000, 2.0), 16000 }, MfccConfig{}), data_error);
    MfccConfig twelve;
    twelve.n_ceps = 12;
    CHECK_THROWS_AS((void)extract_39(AudioBuffer<double>{ Eigen::VectorXd::Zero(4000), 16000 }, twelve), invalid_argument);
}

TEST_CASE("middle window stacking") {
    Eigen::MatrixXd three(3, 2);
    three << 1, 2, 3, 4, 5, 9;
    const Eigen::VectorXd m = middle_window_stack(three, 3);
    CHECK(m(0) == doctest::Approx(3.0));
    CHECK(m(1) == doctest::Approx(5.0));

    const Eigen::MatrixXd same = Eigen::MatrixXd::Constant(5, 4, 1.5);
    CHECK(middle_window_stack(same, 3).isApprox(Eigen::VectorXd::Constant(4, 1.5)));

    CHECK(middle_window_start(4, 3) == 1);
    CHECK(middle_window_start(5, 3) == 1);
    CHECK(middle_window_start(3, 3) == 0);
    Eigen::MatrixXd four(4, 1);
    four << 10, 20, 30, 40;
    const Eigen::VectorXd cat = middle_window_stack(four, 3, MiddleMode::concatenate);
    CHECK(cat.size() == 3);
    CHECK(cat(0) == 20.0);
    CHECK(cat(2) == 40.0);
    CHECK_THROWS_AS((void)middle_window_stack(four, 5), data_error);
}

TEST_CASE("wav round trip and format checks") {
    AudioBuffer<double> a{ random_signal(1000, 5, 0.9), 16000 };
    for (auto &v : a.samples) {
        v = std::round(v * 32768.0) / 32768.0;
    }
    const auto bytes = encode_wav(a);
    CHECK(bytes.size() == 44 + 2000);
    const auto back = parse_wav(bytes);
    CHECK(back.sample_rate == 16000);
    CHECK(back.samples == a.samples);

    const auto path = std::filesystem::temp_directory_path() / "phonboost_test.wav";
    write_wav(a, path);
    CHECK(read_wav(path).samples == a.samples);
    std::filesystem::remove(path);

    auto stereo = bytes;
    stereo[22] = 2;  // channel count
    CHECK_THROWS_AS((void)parse_wav(stereo), data_error);
    auto eight_bit = bytes;
    eight_bit[34] = 8;  // bits per sample
    CHECK_THROWS_AS((void)parse_wav(eight_bit), data_error);
    CHECK_THROWS_AS((void)parse_wav(std::vector<std::uint8_t>(10, 0)), data_error);
}
