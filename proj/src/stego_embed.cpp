#include "mpstego/stego_embed.hpp"

#include "mpstego/errors.hpp"

#include <algorithm>
#include <array>

namespace mpstego {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Bit positions written per code, in payload order.
struct Planes {
    std::array<unsigned, 2> bit{};
    unsigned count = 0;
};

Planes planes_for(EmbedAlgorithm alg, unsigned bits_per_code) {
    switch (alg) {
    case EmbedAlgorithm::Lsb1:
        return {{0, 0}, 1};
    case EmbedAlgorithm::Lsb2:
        return {{1, 0}, 2};
    case EmbedAlgorithm::Msb:
        return {{bits_per_code - 1, 0}, 1};
    case EmbedAlgorithm::Lsb6:
        return {{5, 0}, 1};
    }
    return {};
}

void check_width(unsigned bits_per_code, EmbedAlgorithm alg) {
    if (alg == EmbedAlgorithm::Lsb6 && bits_per_code != 8) {
        throw ArgumentError("LSB6 requires 8-bit codes");
    }
}

std::size_t codes_needed(std::size_t nbits, unsigned per_code) {
    return (nbits + per_code - 1) / per_code;
}

} // namespace

std::string to_string(EmbedAlgorithm alg) {
    switch (alg) {
    case EmbedAlgorithm::Lsb1: return "LSB1";
    case EmbedAlgorithm::Lsb2: return "LSB2";
    case EmbedAlgorithm::Msb: return "MSB";
    case EmbedAlgorithm::Lsb6: return "LSB6";
    }
    return "?";
}

EmbedAlgorithm parse_algorithm(std::string_view name) {
    const auto s = lower(name);
    if (s == "lsb1" || s == "lsb") return EmbedAlgorithm::Lsb1;
    if (s == "lsb2") return EmbedAlgorithm::Lsb2;
    if (s == "msb") return EmbedAlgorithm::Msb;
    if (s == "lsb6" || s == "lsb6enh") return EmbedAlgorithm::Lsb6;
    throw ArgumentError("unknown algorithm '" + std::string(name) + "'");
}

unsigned bits_targeted(EmbedAlgorithm alg) noexcept {
    return alg == EmbedAlgorithm::Lsb2 ? 2u : 1u;
}

bool is_valid_combination(CodecId codec, EmbedAlgorithm alg) noexcept {
    return !(alg == EmbedAlgorithm::Lsb6 && bits_per_code(codec) != 8);
}

void check_combination(CodecId codec, EmbedAlgorithm alg) {
    if (!is_valid_combination(codec, alg)) {
        throw ArgumentError(to_string(alg) + " is not supported on " + to_string(codec) +
                            " (" + std::to_string(bits_per_code(codec)) + "-bit codes)");
    }
}

std::string to_string(PlacementMode mode) {
    return mode == PlacementMode::Fixed ? "fixed" : "chained";
}

PlacementMode parse_placement(std::string_view name) {
    const auto s = lower(name);
    if (s == "fixed") return PlacementMode::Fixed;
    if (s == "chained" || s == "dynamic") return PlacementMode::Chained;
    throw ArgumentError("unknown embedding mode '" + std::string(name) + "'");
}

std::size_t capacity(const EncodedStream& stream, EmbedAlgorithm alg) {
    check_combination(stream.codec, alg);
    return stream.codes.size() * bits_targeted(alg);
}

void embed_bits_into(std::span<std::uint8_t> codes, unsigned bits_per_code, EmbedAlgorithm alg,
                     std::size_t offset_codes, const BitString& bits) {
    check_width(bits_per_code, alg);
    const Planes planes = planes_for(alg, bits_per_code);
    const std::size_t need = codes_needed(bits.size(), planes.count);
    if (offset_codes + need > codes.size()) {
        const std::size_t avail =
            offset_codes >= codes.size() ? 0 : (codes.size() - offset_codes) * planes.count;
        throw CapacityError("embedding " + std::to_string(bits.size()) + " bits needs " +
                                std::to_string(need) + " codes from offset " +
                                std::to_string(offset_codes) + ", stream has " +
                                std::to_string(codes.size()),
                            bits.size() - std::min(avail, bits.size()));
    }
    std::size_t k = 0;
    for (std::size_t c = offset_codes; k < bits.size(); ++c) {
        std::uint8_t code = codes[c];
        for (unsigned p = 0; p < planes.count && k < bits.size(); ++p, ++k) {
            const auto mask = static_cast<std::uint8_t>(1u << planes.bit[p]);
            code = bits[k] ? static_cast<std::uint8_t>(code | mask)
                           : static_cast<std::uint8_t>(code & ~mask);
        }
        codes[c] = code;
    }
}

EncodedStream embed_bits(const EncodedStream& stream, EmbedAlgorithm alg,
                         std::size_t offset_codes, const BitString& bits) {
    check_combination(stream.codec, alg);
    EncodedStream out = stream;
    embed_bits_into(out.codes, out.bits_per_code(), alg, offset_codes, bits);
    return out;
}

BitString extract_bits_from(std::span<const std::uint8_t> codes, unsigned bits_per_code,
                            EmbedAlgorithm alg, std::size_t offset_codes, std::size_t count) {
    check_width(bits_per_code, alg);
    const Planes planes = planes_for(alg, bits_per_code);
    const std::size_t need = codes_needed(count, planes.count);
    if (offset_codes + need > codes.size()) {
        const std::size_t avail =
            offset_codes >= codes.size() ? 0 : (codes.size() - offset_codes) * planes.count;
        throw CapacityError("extracting " + std::to_string(count) + " bits from offset " +
                                std::to_string(offset_codes) + " exceeds stream",
                            count - std::min(avail, count));
    }
    BitString out;
    std::size_t k = 0;
    for (std::size_t c = offset_codes; k < count; ++c) {
        for (unsigned p = 0; p < planes.count && k < count; ++p, ++k) {
            out.push_back(((codes[c] >> planes.bit[p]) & 1u) != 0);
        }
    }
    return out;
}

BitString extract_bits(const EncodedStream& stream, EmbedAlgorithm alg,
                       std::size_t offset_codes, std::size_t count) {
    check_combination(stream.codec, alg);
    return extract_bits_from(stream.codes, stream.bits_per_code(), alg, offset_codes, count);
}

double hidden_fraction(std::size_t total_hidden_bits, const EncodedStream& stream) {
    if (stream.codes.empty()) {
        throw ArgumentError("hidden_fraction: empty stream");
    }
    return static_cast<double>(total_hidden_bits) / static_cast<double>(stream.total_bits());
}

} // namespace mpstego
