#include "phonboost/wav.hpp"

#include "phonboost/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace phonboost {

namespace {

std::uint32_t read_u32(const std::vector<std::uint8_t> &b, std::size_t at) {
    return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8U) | (static_cast<std::uint32_t>(b[at + 2]) << 16U)
           | (static_cast<std::uint32_t>(b[at + 3]) << 24U);
}

std::uint16_t read_u16(const std::vector<std::uint8_t> &b, std::size_t at) {
    return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8U));
}

void put_u32(std::vector<std::uint8_t> &b, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        b.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFFU));
    }
}

void put_u16(std::vector<std::uint8_t> &b, std::uint16_t v) {
    b.push_back(static_cast<std::uint8_t>(v & 0xFFU));
    b.push_back(static_cast<std::uint8_t>(v >> 8U));
}

void put_tag(std::vector<std::uint8_t> &b, const char *tag) {
    b.insert(b.end(), tag, tag + 4);
}

bool tag_is(const std::vector<std::uint8_t> &b, std::size_t at, const char *tag) {
    return std::memcmp(b.data() + at, tag, 4) == 0;
}

}  // namespace

mfcc::AudioBuffer<double> parse_wav(const std::vector<std::uint8_t> &bytes) {
    if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
        throw data_error{ "not a RIFF/WAVE stream" };
    }
    bool have_fmt = false;
    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint16_t bits = 0;
    std::uint32_t rate = 0;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::uint32_t chunk_size = read_u32(bytes, pos + 4);
        const std::size_t body = pos + 8;
        if (body + chunk_size > bytes.size()) {
            throw data_error{ "truncated WAV chunk" };
        }
        if (tag_is(bytes, pos, "fmt ")) {
            if (chunk_size < 16) {
                throw data_error{ "WAV fmt chunk too short" };
            }
            format = read_u16(bytes, body);
            channels = read_u16(bytes, body + 2);
            rate = read_u32(bytes, body + 4);
            bits = read_u16(bytes, body + 14);
            have_fmt = true;
        } else if (tag_is(bytes, pos, "data")) {
            if (!have_fmt) {
                throw data_error{ "WAV data chunk before fmt chunk" };
            }
            if (format != 1 || bits != 16) {
                throw data_error{ "unsupported WAV encoding (format " + std::to_string(format) + ", " + std::to_string(bits)
                                  + " bits): only 16-bit PCM is supported" };
            }
            if (channels != 1) {
                throw data_error{ "unsupported WAV channel count " + std::to_string(channels) + ": only mono is supported" };
            }
            if (rate == 0) {
                throw data_error{ "WAV sample rate is zero" };
            }
            mfcc::AudioBuffer<double> audio;
            audio.sample_rate = static_cast<int>(rate);
            audio.samples.resize(static_cast<Eigen::Index>(chunk_size / 2));
            for (Eigen::Index i = 0; i < audio.samples.size(); ++i) {
                const auto raw = static_cast<std::int16_t>(read_u16(bytes, body + 2 * static_cast<std::size_t>(i)));
                audio.samples(i) = static_cast<double>(raw) / 32768.0;
            }
            if (audio.samples.size() == 0) {
                throw data_error{ "WAV data chunk is empty" };
            }
            return audio;
        }
        pos = body + chunk_size + (chunk_size & 1U);
    }
    throw data_error{ "WAV stream has no data chunk" };
}

mfcc::AudioBuffer<double> read_wav(const std::filesystem::path &path) {
    std::ifstream in{ path, std::ios::binary };
    if (!in) {
        throw data_error{ "cannot open '" + path.string() + "'" };
    }
    std::vector<std::uint8_t> bytes{ std::istreambuf_iterator<char>{ in }, std::istreambuf_iterator<char>{} };
    try {
        return parse_wav(bytes);
    } catch (const data_error &e) {
        throw data_error{ path.string() + ": " + e.what() };
    }
}

std::vector<std::uint8_t> encode_wav(const mfcc::AudioBuffer<double> &audio) {
    const auto n = static_cast<std::uint32_t>(audio.samples.size());
    std::vector<std::uint8_t> b;
    b.reserve(44 + 2 * static_cast<std::size_t>(n));
    put_tag(b, "RIFF");
    put_u32(b, 36 + 2 * n);
    put_tag(b, "WAVE");
    put_tag(b, "fmt ");
    put_u32(b, 16);
    put_u16(b, 1);
    put_u16(b, 1);
    put_u32(b, static_cast<std::uint32_t>(audio.sample_rate));
    put_u32(b, static_cast<std::uint32_t>(audio.sample_rate) * 2);
    put_u16(b, 2);
    put_u16(b, 16);
    put_tag(b, "data");
    put_u32(b, 2 * n);
    for (Eigen::Index i = 0; i < audio.samples.size(); ++i) {
        const double scaled = std::clamp(std::round(audio.samples(i) * 32768.0), -32768.0, 32767.0);
        put_u16(b, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
    }
    return b;
}

void write_wav(const mfcc::AudioBuffer<double> &audio, const std::filesystem::path &path) {
    const auto bytes = encode_wav(audio);
    std::ofstream out{ path, std::ios::binary };
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw data_error{ "cannot write '" + path.string() + "'" };
    }
}

}  // namespace phonboost
