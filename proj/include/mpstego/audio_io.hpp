#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace mpstego {

/// Decoded mono cover audio.
///
/// Samples are always held in the signed 16-bit range. Clips read from 8-bit
/// sources keep `bit_depth == 8` as metadata, with samples widened by
/// `(s - 128) * 256`, so writing them back restores the original bytes.
struct PcmClip {
    std::uint32_t sample_rate_hz = 8000;
    std::uint16_t bit_depth = 16;
    std::vector<std::int16_t> samples;

    /// True for the two rates the carrier codecs are defined for (8000, 11025).
    bool has_standard_rate() const noexcept;

    friend bool operator==(const PcmClip&, const PcmClip&) = default;
};

/// Reads a linear PCM WAV (8 or 16 bit, any channel count); multi-channel
/// input is averaged down to mono, rounding toward zero.
PcmClip read_wav(const std::filesystem::path& path);

/// Writes a canonical 44-byte-header PCM WAV.
void write_wav(const PcmClip& clip, const std::filesystem::path& path);

/// In-memory variants used by the file functions and by tests.
PcmClip parse_wav(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> serialize_wav(const PcmClip& clip);

/// Sample-and-hold rate conversion, no anti-alias filter.
/// Output length is round(len * target / source).
PcmClip resample_nearest(const PcmClip& clip, std::uint32_t target_rate_hz);

} // namespace mpstego
