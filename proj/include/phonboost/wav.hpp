#ifndef PHONBOOST_WAV_HPP_
#define PHONBOOST_WAV_HPP_
#pragma once

#include "phonboost/mfcc.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace phonboost {

/// Decode a RIFF/WAVE byte stream. Only mono 16-bit signed PCM is accepted; samples are scaled by 1/32768.
[[nodiscard]] mfcc::AudioBuffer<double> parse_wav(const std::vector<std::uint8_t> &bytes);
[[nodiscard]] mfcc::AudioBuffer<double> read_wav(const std::filesystem::path &path);

/// Encode as mono 16-bit PCM (values clipped to the int16 range after scaling by 32768).
[[nodiscard]] std::vector<std::uint8_t> encode_wav(const mfcc::AudioBuffer<double> &audio);
void write_wav(const mfcc::AudioBuffer<double> &audio, const std::filesystem::path &path);

}  // namespace phonboost

#endif  // PHONBOOST_WAV_HPP_
