#include "mpstego/errors.hpp"
#include "mpstego/stego_embed.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mpstego;

namespace {

EncodedStream ulaw(std::vector<std::uint8_t> codes) { return {CodecId::Ulaw, std::move(codes)}; }

BitString random_bits(std::mt19937& rng, std::size_t n) {
    BitString b;
    for (std::size_t i = 0; i < n; ++i) b.push_back(rng() & 1u);
    return b;
}

// Bit positions each algorithm may touch, by code width.
std::uint8_t plane_mask(EmbedAlgorithm alg, unsigned width) {
    switch (alg) {
    case EmbedAlgorithm::Lsb1: return 0x01;
    case EmbedAlgorithm::Lsb2: return 0x03;
    case EmbedAlgorithm::Msb: return static_cast<std::uint8_t>(1u << (width - 1));
    case EmbedAlgorithm::Lsb6: return 0x20;
    }
    return 0;
}

} // namespace

TEST(StegoEmbed, SingleCodeExamples) {
    EXPECT_EQ(embed_bits(ulaw({0b10110100}), EmbedAlgorithm::Lsb1, 0, BitString::from_text("1"))
                  .codes[0],
              0b10110101);
    EXPECT_EQ(embed_bits(ulaw({0x00}), EmbedAlgorithm::Msb, 0, BitString::from_text("1")).codes[0],
              0x80);
    EXPECT_EQ(embed_bits(ulaw({0x00}), EmbedAlgorithm::Lsb2, 0, BitString::from_text("11")).codes[0],
              0x03);
    // First bit of a pair lands in bit 1.
    EXPECT_EQ(embed_bits(ulaw({0x00}), EmbedAlgorithm::Lsb2, 0, BitString::from_text("10")).codes[0],
              0x02);
    EXPECT_EQ(embed_bits(ulaw({0xFF}), EmbedAlgorithm::Lsb6, 0, BitString::from_text("0")).codes[0],
              0xDF);
    const EncodedStream dvi{CodecId::Dvi, {0x0}};
    EXPECT_EQ(embed_bits(dvi, EmbedAlgorithm::Msb, 0, BitString::from_text("1")).codes[0], 0x8);
}

TEST(StegoEmbed, Capacities) {
    const auto s = ulaw(std::vector<std::uint8_t>(160, 0xFF));
    EXPECT_EQ(capacity(s, EmbedAlgorithm::Lsb1), 160u);
    EXPECT_EQ(capacity(s, EmbedAlgorithm::Lsb2), 320u);
    EXPECT_EQ(capacity(s, EmbedAlgorithm::Msb), 160u);
    EXPECT_EQ(capacity(s, EmbedAlgorithm::Lsb6), 160u);
    EXPECT_EQ(bits_targeted(EmbedAlgorithm::Lsb2), 2u);
}

TEST(StegoEmbed, Lsb6RejectedOnDvi) {
    const EncodedStream dvi{CodecId::Dvi, std::vector<std::uint8_t>(10, 0)};
    EXPECT_FALSE(is_valid_combination(CodecId::Dvi, EmbedAlgorithm::Lsb6));
    EXPECT_TRUE(is_valid_combination(CodecId::Dvi, EmbedAlgorithm::Lsb2));
    EXPECT_THROW(capacity(dvi, EmbedAlgorithm::Lsb6), ArgumentError);
    EXPECT_THROW(embed_bits(dvi, EmbedAlgorithm::Lsb6, 0, BitString::from_text("1")),
                 ArgumentError);
    EXPECT_THROW(check_combination(CodecId::Dvi, EmbedAlgorithm::Lsb6), ArgumentError);
}

TEST(StegoEmbed, HiddenFraction) {
    const auto s = ulaw(std::vector<std::uint8_t>(60, 0));
    EXPECT_NEAR(hidden_fraction(16, s) * 100.0, 3.333, 5e-4);
    EXPECT_THROW(hidden_fraction(1, ulaw({})), ArgumentError);
}

TEST(StegoEmbed, CapacityErrorReportsShortfall) {
    const auto s = ulaw(std::vector<std::uint8_t>(10, 0));
    try {
        embed_bits(s, EmbedAlgorithm::Lsb2, 4, BitString::from_text(std::string(15, '1')));
        FAIL() << "expected CapacityError";
    } catch (const CapacityError& e) {
        EXPECT_EQ(e.shortfall(), 3u);
    }
    EXPECT_THROW(extract_bits(s, EmbedAlgorithm::Lsb1, 5, 6), CapacityError);
    EXPECT_NO_THROW(extract_bits(s, EmbedAlgorithm::Lsb1, 5, 5));
}

TEST(StegoEmbed, RandomRoundTripAndLocality) {
    std::mt19937 rng(42);
    const EmbedAlgorithm algs[] = {EmbedAlgorithm::Lsb1, EmbedAlgorithm::Lsb2, EmbedAlgorithm::Msb,
                                   EmbedAlgorithm::Lsb6};
    for (int t = 0; t < 2000; ++t) {
        const CodecId codec = t % 2 ? CodecId::Ulaw : CodecId::Dvi;
        const EmbedAlgorithm alg = algs[rng() % 4];
        if (!is_valid_combination(codec, alg)) continue;
        const unsigned width = bits_per_code(codec);
        EncodedStream s{codec, std::vector<std::uint8_t>(1 + rng() % 300)};
        for (auto& c : s.codes) c = static_cast<std::uint8_t>(rng() & ((1u << width) - 1));
        const std::size_t off = rng() % s.codes.size();
        const std::size_t room = (s.codes.size() - off) * bits_targeted(alg);
        const auto bits = random_bits(rng, rng() % (room + 1));

        const auto out = embed_bits(s, alg, off, bits);
        ASSERT_EQ(extract_bits(out, alg, off, bits.size()), bits);
        ASSERT_NO_THROW(out.validate());
        const std::size_t used = (bits.size() + bits_targeted(alg) - 1) / bits_targeted(alg);
        const auto mask = plane_mask(alg, width);
        for (std::size_t i = 0; i < s.codes.size(); ++i) {
            const bool touched = i >= off && i < off + used;
            if (touched) {
                ASSERT_EQ(out.codes[i] & ~mask, s.codes[i] & ~mask);
            } else {
                ASSERT_EQ(out.codes[i], s.codes[i]);
            }
        }
    }
}

TEST(StegoEmbed, ParseNames) {
    EXPECT_EQ(parse_algorithm("lsb1"), EmbedAlgorithm::Lsb1);
    EXPECT_EQ(parse_algorithm("MSB"), EmbedAlgorithm::Msb);
    EXPECT_THROW(parse_algorithm("lsb3"), ArgumentError);
    EXPECT_EQ(parse_placement("chained"), PlacementMode::Chained);
    EXPECT_THROW(parse_placement("random"), ArgumentError);
}
