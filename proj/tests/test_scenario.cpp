#include "mpstego/errors.hpp"
#include "mpstego/scenario.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace mpstego;

namespace {

EncodedStream cover(CodecId codec, double seconds) {
    PcmClip c;
    c.sample_rate_hz = nominal_rate_hz(codec);
    std::mt19937 rng(17);
    std::normal_distribution<double> noise(0.0, 300.0);
    const auto n = static_cast<std::size_t>(seconds * c.sample_rate_hz);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / c.sample_rate_hz;
        const double v = 5000 * std::sin(2 * M_PI * 220 * t) * (0.6 + 0.4 * std::sin(2 * M_PI * 3 * t));
        c.samples.push_back(static_cast<std::int16_t>(std::clamp(v + noise(rng), -32768.0, 32767.0)));
    }
    return encode_for(codec, c);
}

} // namespace

TEST(Scenario, DefaultTimeoutIs200ms) {
    EXPECT_EQ(default_timeout_ticks(CodecId::Ulaw, 160), 10u);
    EXPECT_EQ(default_timeout_ticks(CodecId::Dvi, 160), 14u);
    EXPECT_EQ(default_timeout_ticks(CodecId::Ulaw, 8000), 1u);
}

TEST(Scenario, DummyTrafficCost) {
    const auto cv = cover(CodecId::Ulaw, 2.0);
    for (auto design : {HeaderDesign::Static, HeaderDesign::Dynamic}) {
        SessionConfig cfg;
        cfg.header_design = design;
        const auto r = run_scenario(1, cfg, cv);
        EXPECT_EQ(r.packets_sent, 100u);
        EXPECT_EQ(r.hidden_bits_total, r.packets_sent * (design == HeaderDesign::Static ? 16u : 12u));
        EXPECT_EQ(r.requests_completed, 0u);
        EXPECT_EQ(r.cover.codes.size(), 16000u);
        EXPECT_EQ(r.stego.codes.size(), 16000u);
    }
}

TEST(Scenario, FiveHundredCodeCadence) {
    SessionConfig cfg;
    cfg.frame_codes = 480;
    const auto r = run_scenario(1, cfg, cover(CodecId::Ulaw, 3.0));
    EXPECT_NEAR(r.hidden_fraction * 100.0, 0.417, 0.0005);
}

TEST(Scenario, SmallRequestsBetweenDummies) {
    const auto cv = cover(CodecId::Ulaw, 5.0);
    for (auto design : {HeaderDesign::Static, HeaderDesign::Dynamic}) {
        SessionConfig cfg;
        cfg.header_design = design;
        ScenarioOptions opt;
        opt.keep_records = true;
        const auto r = run_scenario(2, cfg, cv, opt);
        EXPECT_GE(r.requests_completed, 2u) << to_string(design);
        EXPECT_EQ(r.bytes_delivered % 180, 0u);
        EXPECT_GE(r.bytes_delivered, r.requests_completed * 180);
        EXPECT_EQ(r.records.size(), 2 * r.ticks);
        EXPECT_EQ(r.to_text().rfind("# scenario=2", 0), 0u);
    }
}

TEST(Scenario, BulkTransferBeatsDummies) {
    const auto cv = cover(CodecId::Ulaw, 5.0);
    SessionConfig cfg;
    const auto idle = run_scenario(1, cfg, cv);
    const auto bulk = run_scenario(3, cfg, cv);
    EXPECT_GT(bulk.bytes_delivered, 0u);
    EXPECT_GT(bulk.hidden_fraction, idle.hidden_fraction);
}

TEST(Scenario, DviCover) {
    SessionConfig cfg;
    cfg.codec = CodecId::Dvi;
    cfg.alg = EmbedAlgorithm::Lsb2;
    const auto r = run_scenario(3, cfg, cover(CodecId::Dvi, 3.0));
    EXPECT_GT(r.bytes_delivered, 0u);
    EXPECT_NO_THROW(r.stego.validate());
}

TEST(Scenario, TooShortForARequest) {
    SessionConfig cfg;
    EXPECT_THROW(run_scenario(3, cfg, cover(CodecId::Ulaw, 0.05)), CapacityError);
    EXPECT_THROW(run_scenario(1, cfg, cover(CodecId::Ulaw, 0.01)), CapacityError);
    EXPECT_THROW(run_scenario(4, cfg, cover(CodecId::Ulaw, 1.0)), ArgumentError);
}

TEST(Transfer, ExactDeliveryUnderLoss) {
    const auto cv = cover(CodecId::Ulaw, 2.0);
    for (auto design : {HeaderDesign::Static, HeaderDesign::Dynamic}) {
        SessionConfig cfg;
        cfg.header_design = design;
        cfg.ack_every_n = 5;
        cfg.resend_limit = 100;
        std::vector<std::uint8_t> data(4000);
        std::mt19937 rng(1);
        for (auto& b : data) b = static_cast<std::uint8_t>(rng());
        LinkOptions lo;
        lo.forward = {0.1, 0.0, 3};
        lo.backward = {0.1, 0.0, 4};
        const auto res = run_transfer(cfg, data, cv, lo, 100000);
        EXPECT_TRUE(res.success) << to_string(design);
        EXPECT_EQ(res.delivered, data);
        EXPECT_GT(res.receiver.resends_sent, 0u);
    }
}

TEST(SimulatedLink, RejectsMismatchedCover) {
    SessionConfig cfg;
    EXPECT_THROW(SimulatedLink(cfg, cover(CodecId::Dvi, 0.1), cover(CodecId::Ulaw, 0.1)),
                 ArgumentError);
}
