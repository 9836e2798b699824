#pragma once

#include "mpstego/bit_string.hpp"
#include "mpstego/voice_codecs.hpp"

#include <cstddef>
#include <string>
#include <string_view>

namespace mpstego {

/// Bit-plane embedding algorithms.
///  - Lsb1: bit 0
///  - Lsb2: bits 1 and 0 (first payload bit goes to bit 1)
///  - Msb:  bit (bits_per_code - 1)
///  - Lsb6: bit 5, 8-bit codes only
enum class EmbedAlgorithm { Lsb1, Lsb2, Msb, Lsb6 };

std::string to_string(EmbedAlgorithm alg);
EmbedAlgorithm parse_algorithm(std::string_view name);

/// Number of hidden bits one code unit carries under `alg`.
unsigned bits_targeted(EmbedAlgorithm alg) noexcept;

/// Throws ArgumentError when the algorithm cannot be applied to the codec.
void check_combination(CodecId codec, EmbedAlgorithm alg);
bool is_valid_combination(CodecId codec, EmbedAlgorithm alg) noexcept;

enum class PlacementMode { Fixed, Chained };

std::string to_string(PlacementMode mode);
PlacementMode parse_placement(std::string_view name);

struct Placement {
    PlacementMode mode = PlacementMode::Fixed;
    unsigned initial_offset_codes = 0;
};

std::size_t capacity(const EncodedStream& stream, EmbedAlgorithm alg);

/// Copy of `stream` with `bits` written into the targeted bit planes starting
/// at code `offset_codes`. Throws CapacityError carrying the shortfall in bits.
EncodedStream embed_bits(const EncodedStream& stream, EmbedAlgorithm alg,
                         std::size_t offset_codes, const BitString& bits);

/// In-place variant over a code range; used for per-packet embedding.
void embed_bits_into(std::span<std::uint8_t> codes, unsigned bits_per_code, EmbedAlgorithm alg,
                     std::size_t offset_codes, const BitString& bits);

BitString extract_bits(const EncodedStream& stream, EmbedAlgorithm alg,
                       std::size_t offset_codes, std::size_t count);

BitString extract_bits_from(std::span<const std::uint8_t> codes, unsigned bits_per_code,
                            EmbedAlgorithm alg, std::size_t offset_codes, std::size_t count);

/// total_hidden_bits / total_bits(stream).
double hidden_fraction(std::size_t total_hidden_bits, const EncodedStream& stream);

} // namespace mpstego
