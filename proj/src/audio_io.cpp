#include "mpstego/audio_io.hpp"

#include "mpstego/errors.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace mpstego {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t le16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t le32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
    }
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
    out.insert(out.end(), tag, tag + 4);
}

bool tag_is(const std::uint8_t* p, const char* tag) {
    return std::memcmp(p, tag, 4) == 0;
}

} // namespace

bool PcmClip::has_standard_rate() const noexcept {
    return sample_rate_hz == 8000 || sample_rate_hz == 11025;
}

PcmClip parse_wav(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 12 || !tag_is(bytes.data(), "RIFF") || !tag_is(bytes.data() + 8, "WAVE")) {
        throw FormatError("not a RIFF/WAVE file");
    }

    bool have_fmt = false;
    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t rate = 0;
    std::uint16_t bits = 0;
    const std::uint8_t* data = nullptr;
    std::size_t data_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::uint8_t* chunk = bytes.data() + pos;
        std::size_t size = le32(chunk + 4);
        std::size_t body = pos + 8;
        if (body + size > bytes.size()) {
            // Truncated data chunks are common in streamed captures; take what exists.
            if (tag_is(chunk, "data")) {
                size = bytes.size() - body;
            } else {
                throw FormatError("chunk extends past end of file");
            }
        }
        if (tag_is(chunk, "fmt ")) {
            if (size < 16) {
                throw FormatError("fmt chunk too short");
            }
            format = le16(bytes.data() + body);
            channels = le16(bytes.data() + body + 2);
            rate = le32(bytes.data() + body + 4);
            bits = le16(bytes.data() + body + 14);
            if (format == kFormatExtensible && size >= 26) {
                format = le16(bytes.data() + body + 24);
            }
            have_fmt = true;
        } else if (tag_is(chunk, "data")) {
            data = bytes.data() + body;
            data_size = size;
        }
        pos = body + size + (size & 1);
    }

    if (!have_fmt || data == nullptr) {
        throw FormatError("missing fmt or data chunk");
    }
    if (format != kFormatPcm) {
        throw UnsupportedFormatError("unsupported WAV format tag " + std::to_string(format));
    }
    if (bits != 8 && bits != 16) {
        throw UnsupportedFormatError("unsupported bit depth " + std::to_string(bits));
    }
    if (channels == 0 || rate == 0) {
        throw FormatError("zero channels or sample rate");
    }

    const std::size_t bytes_per_sample = bits / 8;
    const std::size_t frame_bytes = bytes_per_sample * channels;
    const std::size_t frames = data_size / frame_bytes;

    PcmClip clip;
    clip.sample_rate_hz = rate;
    clip.bit_depth = bits;
    clip.samples.reserve(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        const std::uint8_t* p = data + f * frame_bytes;
        std::int32_t sum = 0;
        for (std::uint16_t c = 0; c < channels; ++c) {
            std::int32_t s = 0;
            if (bits == 16) {
                s = static_cast<std::int16_t>(le16(p + c * 2));
            } else {
                s = (static_cast<std::int32_t>(p[c]) - 128) * 256;
            }
            sum += s;
        }
        clip.samples.push_back(static_cast<std::int16_t>(sum / channels));
    }
    return clip;
}

std::vector<std::uint8_t> serialize_wav(const PcmClip& clip) {
    if (clip.bit_depth != 8 && clip.bit_depth != 16) {
        throw ArgumentError("bit depth must be 8 or 16");
    }
    if (clip.sample_rate_hz == 0) {
        throw ArgumentError("sample rate must be positive");
    }
    const std::uint32_t bytes_per_sample = clip.bit_depth / 8u;
    const auto data_size = static_cast<std::uint32_t>(clip.samples.size() * bytes_per_sample);

    std::vector<std::uint8_t> out;
    out.reserve(44 + data_size);
    put_tag(out, "RIFF");
    put32(out, 36 + data_size);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put32(out, 16);
    put16(out, kFormatPcm);
    put16(out, 1);
    put32(out, clip.sample_rate_hz);
    put32(out, clip.sample_rate_hz * bytes_per_sample);
    put16(out, static_cast<std::uint16_t>(bytes_per_sample));
    put16(out, clip.bit_depth);
    put_tag(out, "data");
    put32(out, data_size);
    for (std::int16_t s : clip.samples) {
        if (clip.bit_depth == 16) {
            put16(out, static_cast<std::uint16_t>(s));
        } else {
            out.push_back(static_cast<std::uint8_t>((s >> 8) + 128));
        }
    }
    return out;
}

PcmClip read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return parse_wav(bytes);
}

void write_wav(const PcmClip& clip, const std::filesystem::path& path) {
    const auto bytes = serialize_wav(clip);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

PcmClip resample_nearest(const PcmClip& clip, std::uint32_t target_rate_hz) {
    if (target_rate_hz == 0) {
        throw ArgumentError("target sample rate must be positive");
    }
    if (target_rate_hz == clip.sample_rate_hz) {
        return clip;
    }
    const std::uint64_t src = clip.sample_rate_hz;
    const std::uint64_t len = clip.samples.size();
    // round(len * target / src) in integer arithmetic
    const std::uint64_t out_len = (len * target_rate_hz * 2 + src) / (2 * src);

    PcmClip out;
    out.sample_rate_hz = target_rate_hz;
    out.bit_depth = clip.bit_depth;
    out.samples.reserve(out_len);
    for (std::uint64_t i = 0; i < out_len; ++i) {
        std::uint64_t j = i * src / target_rate_hz;
        if (j >= len) {
            j = len - 1;
        }
        out.samples.push_back(clip.samples[j]);
    }
    return out;
}

} // namespace mpstego
