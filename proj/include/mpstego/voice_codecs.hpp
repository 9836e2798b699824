#pragma once

#include "mpstego/audio_io.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mpstego {

enum class CodecId { Ulaw, Dvi };

/// 8 for ULAW, 4 for DVI.
unsigned bits_per_code(CodecId codec) noexcept;
/// Nominal sample rate of the carrier (8000 / 11025 Hz).
std::uint32_t nominal_rate_hz(CodecId codec) noexcept;
/// Code value substituted for lost frames (0xFF for ULAW, 0 for DVI).
std::uint8_t silence_code(CodecId codec) noexcept;
/// RTP static payload type (0 PCMU, 5 DVI4).
std::uint8_t rtp_payload_type(CodecId codec) noexcept;

std::string to_string(CodecId codec);
CodecId parse_codec(std::string_view name);

/// Codec-domain code units; each element holds one code (< 2^bits_per_code).
struct EncodedStream {
    CodecId codec = CodecId::Ulaw;
    std::vector<std::uint8_t> codes;

    unsigned bits_per_code() const noexcept { return mpstego::bits_per_code(codec); }
    std::size_t total_bits() const noexcept { return codes.size() * bits_per_code(); }
    /// Throws ArgumentError if any code exceeds the codec width.
    void validate() const;

    friend bool operator==(const EncodedStream&, const EncodedStream&) = default;
};

/// IMA ADPCM coder state.
struct AdpcmState {
    std::int16_t predictor = 0;
    std::uint8_t step_index = 0;

    friend bool operator==(const AdpcmState&, const AdpcmState&) = default;
};

std::uint8_t ulaw_encode_sample(std::int16_t sample) noexcept;
std::int16_t ulaw_decode_code(std::uint8_t code) noexcept;

EncodedStream ulaw_encode(const PcmClip& clip);
PcmClip ulaw_decode(const EncodedStream& stream, std::uint32_t sample_rate_hz = 8000);

std::pair<EncodedStream, AdpcmState> dvi_encode(const PcmClip& clip, AdpcmState initial = {});
std::pair<PcmClip, AdpcmState> dvi_decode(const EncodedStream& stream, AdpcmState initial = {},
                                          std::uint32_t sample_rate_hz = 11025);

/// Encodes with the codec's default state; resamples to the codec rate first
/// when `resample` is set and the clip rate differs.
EncodedStream encode_for(CodecId codec, const PcmClip& clip, bool resample = true);
PcmClip decode_any(const EncodedStream& stream);

} // namespace mpstego
