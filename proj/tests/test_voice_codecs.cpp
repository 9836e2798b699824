#include "mpstego/errors.hpp"
#include "mpstego/voice_codecs.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace mpstego;

namespace {

// Segment-table G.711 mu-law coder, written independently as a reference.
std::uint8_t ref_ulaw(int pcm) {
    static const int seg_end[8] = {0x3F, 0x7F, 0xFF, 0x1FF, 0x3FF, 0x7FF, 0xFFF, 0x1FFF};
    int mask = 0xFF;
    int v = pcm;
    if (v < 0) {
        v = -v;
        mask = 0x7F;
    }
    v >>= 2;
    if (v > 8159) v = 8159;
    v += 33;
    int seg = 0;
    while (seg < 8 && v > seg_end[seg]) ++seg;
    if (seg >= 8) return static_cast<std::uint8_t>(0x7F ^ mask);
    return static_cast<std::uint8_t>(((seg << 4) | ((v >> (seg + 1)) & 0x0F)) ^ mask);
}

PcmClip sine(std::size_t n, double amp, double freq, std::uint32_t rate) {
    PcmClip c;
    c.sample_rate_hz = rate;
    for (std::size_t i = 0; i < n; ++i) {
        c.samples.push_back(static_cast<std::int16_t>(
            std::lround(amp * std::sin(2 * std::numbers::pi * freq * static_cast<double>(i) / rate))));
    }
    return c;
}

double snr(const PcmClip& ref, const PcmClip& deg) {
    double s = 0, n = 0;
    for (std::size_t i = 0; i < ref.samples.size(); ++i) {
        const double d = ref.samples[i] - deg.samples[i];
        s += double(ref.samples[i]) * ref.samples[i];
        n += d * d;
    }
    return 10 * std::log10(s / n);
}

} // namespace

TEST(Ulaw, ZeroAndSilenceCodes) {
    EXPECT_EQ(ulaw_encode_sample(0), 0xFF);
    EXPECT_EQ(ulaw_decode_code(0xFF), 0);
    EXPECT_EQ(silence_code(CodecId::Ulaw), 0xFF);
}

TEST(Ulaw, MatchesReferenceOnNonNegativeRange) {
    for (int x = 0; x <= 32767; ++x) {
        ASSERT_EQ(ulaw_encode_sample(static_cast<std::int16_t>(x)), ref_ulaw(x)) << x;
    }
}

TEST(Ulaw, SignSymmetry) {
    for (int x = 1; x <= 32767; ++x) {
        const auto pos = ulaw_encode_sample(static_cast<std::int16_t>(x));
        const auto neg = ulaw_encode_sample(static_cast<std::int16_t>(-x));
        ASSERT_EQ(pos ^ neg, 0x80) << x;
    }
}

TEST(Ulaw, DecodeEncodeIsIdempotentOnAllCodes) {
    for (int c = 0; c < 256; ++c) {
        const auto d = ulaw_decode_code(static_cast<std::uint8_t>(c));
        EXPECT_EQ(ulaw_decode_code(ulaw_encode_sample(d)), d) << c;
    }
}

TEST(Ulaw, DecodeIsMonotoneWithinEachSign) {
    // Codes 0x80..0xFF run from the largest positive magnitude down to 0.
    for (int c = 0x81; c <= 0xFF; ++c) {
        EXPECT_LT(ulaw_decode_code(static_cast<std::uint8_t>(c)),
                  ulaw_decode_code(static_cast<std::uint8_t>(c - 1)));
    }
    EXPECT_EQ(ulaw_decode_code(0x80), 32124);
    EXPECT_EQ(ulaw_decode_code(0x00), -32124);
}

TEST(Ulaw, ClipAndStreamApi) {
    PcmClip c;
    c.samples = {0, 1000, -1000, 32767, -32768};
    const auto s = ulaw_encode(c);
    EXPECT_EQ(s.codec, CodecId::Ulaw);
    ASSERT_EQ(s.codes.size(), 5u);
    const auto back = ulaw_decode(s);
    EXPECT_EQ(back.sample_rate_hz, 8000u);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(back.samples[i], ulaw_decode_code(s.codes[i]));
    EXPECT_THROW(ulaw_decode(EncodedStream{CodecId::Dvi, {1}}), ArgumentError);
}

TEST(Dvi, SilenceEncodesToZeroCodes) {
    PcmClip c;
    c.sample_rate_hz = 11025;
    c.samples.assign(500, 0);
    const auto [s, st] = dvi_encode(c);
    for (auto code : s.codes) EXPECT_EQ(code, 0);
    EXPECT_EQ(st.predictor, 0);
    EXPECT_EQ(st.step_index, 0);
}

TEST(Dvi, ZeroCodesDecodeNearSilence) {
    const EncodedStream s{CodecId::Dvi, std::vector<std::uint8_t>(200, 0)};
    const auto [pcm, st] = dvi_decode(s);
    EXPECT_EQ(pcm.sample_rate_hz, 11025u);
    for (auto v : pcm.samples) EXPECT_LE(std::abs(v), 7);
    (void)st;
}

TEST(Dvi, SineSnrAbove20dB) {
    const auto clip = sine(11025, 8000, 440, 11025);
    const auto [s, st] = dvi_encode(clip);
    s.validate();
    const auto [pcm, st2] = dvi_decode(s);
    EXPECT_EQ(st, st2);
    EXPECT_GT(snr(clip, pcm), 20.0);
}

TEST(Dvi, ChainedHalvesEqualSingleCall) {
    std::mt19937 rng(5);
    PcmClip clip = sine(4000, 6000, 300, 11025);
    for (auto& v : clip.samples) v = static_cast<std::int16_t>(v + static_cast<int>(rng() % 401) - 200);
    const auto [whole, wst] = dvi_encode(clip);

    PcmClip a = clip, b = clip;
    a.samples.resize(1777);
    b.samples.erase(b.samples.begin(), b.samples.begin() + 1777);
    const auto [sa, st_a] = dvi_encode(a);
    const auto [sb, st_b] = dvi_encode(b, st_a);
    auto joined = sa.codes;
    joined.insert(joined.end(), sb.codes.begin(), sb.codes.end());
    EXPECT_EQ(joined, whole.codes);
    EXPECT_EQ(st_b, wst);

    EncodedStream da{CodecId::Dvi, sa.codes}, db{CodecId::Dvi, sb.codes};
    const auto [pa, dst_a] = dvi_decode(da);
    const auto [pb, dst_b] = dvi_decode(db, dst_a);
    auto pj = pa.samples;
    pj.insert(pj.end(), pb.samples.begin(), pb.samples.end());
    EXPECT_EQ(pj, dvi_decode(whole).first.samples);
    EXPECT_EQ(dst_b, wst);
}

TEST(Dvi, ExtremeInputStaysInRange) {
    PcmClip clip;
    clip.sample_rate_hz = 11025;
    for (int i = 0; i < 2000; ++i) clip.samples.push_back(i % 2 ? 32767 : -32768);
    const auto [s, st] = dvi_encode(clip);
    EXPECT_NO_THROW(s.validate());
    EXPECT_LE(st.step_index, 88);
}

TEST(Codecs, Descriptors) {
    EXPECT_EQ(bits_per_code(CodecId::Ulaw), 8u);
    EXPECT_EQ(bits_per_code(CodecId::Dvi), 4u);
    EXPECT_EQ(nominal_rate_hz(CodecId::Dvi), 11025u);
    EXPECT_EQ(rtp_payload_type(CodecId::Ulaw), 0);
    EXPECT_EQ(rtp_payload_type(CodecId::Dvi), 5);
    EXPECT_EQ(parse_codec("ulaw"), CodecId::Ulaw);
    EXPECT_EQ(parse_codec("DVI"), CodecId::Dvi);
    EXPECT_THROW(parse_codec("opus"), ArgumentError);
    EXPECT_THROW((EncodedStream{CodecId::Dvi, {16}}).validate(), ArgumentError);
}

TEST(Codecs, EncodeForResamples) {
    const auto clip = sine(8000, 3000, 200, 8000);
    const auto s = encode_for(CodecId::Dvi, clip);
    EXPECT_EQ(s.codec, CodecId::Dvi);
    EXPECT_EQ(s.codes.size(), 11025u);
    EXPECT_EQ(encode_for(CodecId::Ulaw, clip).codes.size(), 8000u);
    EXPECT_EQ(decode_any(s).sample_rate_hz, 11025u);
}
