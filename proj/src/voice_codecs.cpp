#include "mpstego/voice_codecs.hpp"

#include "mpstego/errors.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>

namespace mpstego {

namespace {

constexpr int kUlawBias = 0x84; // 33 in the 14-bit domain
constexpr int kUlawClip = 32635;

constexpr std::array<int, 89> kStepTable = {
    7,     8,     9,     10,    11,    12,    13,    14,    16,    17,    19,    21,    23,
    25,    28,    31,    34,    37,    41,    45,    50,    55,    60,    66,    73,    80,
    88,    97,    107,   118,   130,   143,   157,   173,   190,   209,   230,   253,   279,
    307,   337,   371,   408,   449,   494,   544,   598,   658,   724,   796,   876,   963,
    1060,  1166,  1282,  1411,  1552,  1707,  1878,  2066,  2272,  2499,  2749,  3024,  3327,
    3660,  4026,  4428,  4871,  5358,  5894,  6484,  7132,  7845,  8630,  9493,  10442, 11487,
    12635, 13899, 15289, 16818, 18500, 20350, 22385, 24623, 27086, 29794, 32767};

constexpr std::array<int, 8> kIndexAdjust = {-1, -1, -1, -1, 2, 4, 6, 8};

int clamp_index(int idx) { return std::clamp(idx, 0, 88); }

int clamp16(int v) { return std::clamp(v, -32768, 32767); }

// Applies one 4-bit code to the state; shared by encoder and decoder so both
// follow the identical prediction recursion.
void adpcm_step(AdpcmState& st, std::uint8_t code) {
    const int step = kStepTable[st.step_index];
    int diff = step >> 3;
    if (code & 4) diff += step;
    if (code & 2) diff += step >> 1;
    if (code & 1) diff += step >> 2;
    int pred = st.predictor;
    pred = (code & 8) ? pred - diff : pred + diff;
    st.predictor = static_cast<std::int16_t>(clamp16(pred));
    st.step_index = static_cast<std::uint8_t>(clamp_index(st.step_index + kIndexAdjust[code & 7]));
}

} // namespace

unsigned bits_per_code(CodecId codec) noexcept {
    return codec == CodecId::Ulaw ? 8u : 4u;
}

std::uint32_t nominal_rate_hz(CodecId codec) noexcept {
    return codec == CodecId::Ulaw ? 8000u : 11025u;
}

std::uint8_t silence_code(CodecId codec) noexcept {
    return codec == CodecId::Ulaw ? 0xFF : 0x0;
}

std::uint8_t rtp_payload_type(CodecId codec) noexcept {
    return codec == CodecId::Ulaw ? 0 : 5;
}

std::string to_string(CodecId codec) {
    return codec == CodecId::Ulaw ? "ULAW" : "DVI";
}

CodecId parse_codec(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "ulaw" || s == "pcmu" || s == "mulaw") return CodecId::Ulaw;
    if (s == "dvi" || s == "dvi4" || s == "ima") return CodecId::Dvi;
    throw ArgumentError("unknown codec '" + std::string(name) + "'");
}

void EncodedStream::validate() const {
    const unsigned limit = 1u << bits_per_code();
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (codes[i] >= limit) {
            throw ArgumentError("code " + std::to_string(codes[i]) + " at index " +
                                std::to_string(i) + " exceeds " +
                                std::to_string(bits_per_code()) + "-bit width");
        }
    }
}

std::uint8_t ulaw_encode_sample(std::int16_t sample) noexcept {
    int mag = sample;
    int sign = 0;
    if (mag < 0) {
        mag = -mag;
        sign = 0x80;
    }
    mag = std::min(mag, kUlawClip) + kUlawBias;
    int exponent = 7;
    for (int mask = 0x4000; (mag & mask) == 0 && exponent > 0; mask >>= 1) {
        --exponent;
    }
    const int mantissa = (mag >> (exponent + 3)) & 0x0F;
    return static_cast<std::uint8_t>(~(sign | (exponent << 4) | mantissa));
}

std::int16_t ulaw_decode_code(std::uint8_t code) noexcept {
    const int u = static_cast<std::uint8_t>(~code);
    const int exponent = (u >> 4) & 0x07;
    const int mantissa = u & 0x0F;
    const int mag = (((mantissa << 3) + kUlawBias) << exponent) - kUlawBias;
    return static_cast<std::int16_t>((u & 0x80) ? -mag : mag);
}

EncodedStream ulaw_encode(const PcmClip& clip) {
    EncodedStream out{CodecId::Ulaw, {}};
    out.codes.reserve(clip.samples.size());
    for (auto s : clip.samples) {
        out.codes.push_back(ulaw_encode_sample(s));
    }
    return out;
}

PcmClip ulaw_decode(const EncodedStream& stream, std::uint32_t sample_rate_hz) {
    if (stream.codec != CodecId::Ulaw) {
        throw ArgumentError("ulaw_decode: stream codec is " + to_string(stream.codec));
    }
    PcmClip clip;
    clip.sample_rate_hz = sample_rate_hz;
    clip.bit_depth = 16;
    clip.samples.reserve(stream.codes.size());
    for (auto c : stream.codes) {
        clip.samples.push_back(ulaw_decode_code(c));
    }
    return clip;
}

std::pair<EncodedStream, AdpcmState> dvi_encode(const PcmClip& clip, AdpcmState state) {
    EncodedStream out{CodecId::Dvi, {}};
    out.codes.reserve(clip.samples.size());
    for (auto sample : clip.samples) {
        int diff = sample - state.predictor;
        std::uint8_t code = 0;
        if (diff < 0) {
            code = 8;
            diff = -diff;
        }
        int step = kStepTable[state.step_index];
        if (diff >= step) {
            code |= 4;
            diff -= step;
        }
        step >>= 1;
        if (diff >= step) {
            code |= 2;
            diff -= step;
        }
        step >>= 1;
        if (diff >= step) {
            code |= 1;
        }
        adpcm_step(state, code);
        out.codes.push_back(code);
    }
    return {std::move(out), state};
}

std::pair<PcmClip, AdpcmState> dvi_decode(const EncodedStream& stream, AdpcmState state,
                                          std::uint32_t sample_rate_hz) {
    if (stream.codec != CodecId::Dvi) {
        throw ArgumentError("dvi_decode: stream codec is " + to_string(stream.codec));
    }
    PcmClip clip;
    clip.sample_rate_hz = sample_rate_hz;
    clip.bit_depth = 16;
    clip.samples.reserve(stream.codes.size());
    for (auto code : stream.codes) {
        adpcm_step(state, code & 0x0F);
        clip.samples.push_back(state.predictor);
    }
    return {std::move(clip), state};
}

EncodedStream encode_for(CodecId codec, const PcmClip& clip, bool resample) {
    const std::uint32_t rate = nominal_rate_hz(codec);
    const PcmClip& src = clip;
    PcmClip converted;
    const PcmClip* in = &src;
    if (resample && clip.sample_rate_hz != rate) {
        converted = resample_nearest(clip, rate);
        in = &converted;
    }
    if (codec == CodecId::Ulaw) {
        return ulaw_encode(*in);
    }
    return dvi_encode(*in).first;
}

PcmClip decode_any(const EncodedStream& stream) {
    if (stream.codec == CodecId::Ulaw) {
        return ulaw_decode(stream);
    }
    return dvi_decode(stream).first;
}

} // namespace mpstego
