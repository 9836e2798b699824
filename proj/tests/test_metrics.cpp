#include "mpstego/errors.hpp"
#include "mpstego/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace mpstego;

namespace {

EncodedStream ulaw(std::vector<std::uint8_t> c) { return {CodecId::Ulaw, std::move(c)}; }

} // namespace

TEST(Metrics, MseExample) {
    EXPECT_DOUBLE_EQ(mse(ulaw({0, 2}), ulaw({1, 2})), 0.5);
}

TEST(Metrics, SnrExample) {
    // 10 log10(200 / 1)
    EXPECT_NEAR(snr_db(ulaw({10, 10}), ulaw({11, 10})), 23.0103, 1e-4);
}

TEST(Metrics, DoublingNoiseCosts3dB) {
    std::mt19937 rng(3);
    PcmClip cover, a, b;
    for (int i = 0; i < 4000; ++i) {
        const auto s = static_cast<std::int16_t>(static_cast<int>(rng() % 20000) - 10000);
        const int e = static_cast<int>(rng() % 201) - 100;
        cover.samples.push_back(s);
        a.samples.push_back(static_cast<std::int16_t>(s + e));
        // Scaling the error by sqrt(2) doubles the noise power.
        b.samples.push_back(static_cast<std::int16_t>(s + std::lround(e * std::sqrt(2.0))));
    }
    EXPECT_NEAR(snr_db(cover, b) - snr_db(cover, a), -3.0103, 0.02);
}

TEST(Metrics, PsnrFromMse) {
    EXPECT_NEAR(psnr_from_mse(0.017, 255.0), 65.8259, 1e-3);
    EXPECT_TRUE(is_identical(psnr_from_mse(0.0, 255.0)));
    EXPECT_THROW(psnr_from_mse(-1.0, 255.0), ArgumentError);
}

TEST(Metrics, PeaksPerCodec) {
    EXPECT_EQ(code_peak(CodecId::Ulaw), 255.0);
    EXPECT_EQ(code_peak(CodecId::Dvi), 15.0);
    EXPECT_EQ(kPcmPeak, 32767.0);
    const EncodedStream c{CodecId::Dvi, {8, 8}}, s{CodecId::Dvi, {9, 8}};
    EXPECT_NEAR(psnr_db(c, s), 10 * std::log10(225.0 / 0.5), 1e-12);
}

TEST(Metrics, PsnrMinusSnrDependsOnlyOnCover) {
    std::mt19937 rng(9);
    EncodedStream cover = ulaw(std::vector<std::uint8_t>(5000));
    for (auto& c : cover.codes) c = static_cast<std::uint8_t>(rng());
    std::vector<double> spreads;
    for (int k = 1; k <= 6; ++k) {
        auto stego = cover;
        for (std::size_t i = 0; i < stego.codes.size(); i += static_cast<std::size_t>(k)) {
            stego.codes[i] ^= 1;
        }
        spreads.push_back(psnr_db(cover, stego) - snr_db(cover, stego));
    }
    for (double d : spreads) EXPECT_NEAR(d, spreads.front(), 1e-9);
}

TEST(Metrics, IdenticalAndInvalidInputs) {
    EXPECT_TRUE(is_identical(snr_db(ulaw({1, 2}), ulaw({1, 2}))));
    EXPECT_EQ(mse(ulaw({1, 2}), ulaw({1, 2})), 0.0);
    EXPECT_THROW(mse(ulaw({1}), ulaw({1, 2})), ArgumentError);
    EXPECT_THROW(mse(ulaw({}), ulaw({})), ArgumentError);
    EXPECT_THROW(snr_db(ulaw({0, 0}), ulaw({1, 0})), ArgumentError);
    EXPECT_THROW(mse(ulaw({1}), EncodedStream{CodecId::Dvi, {1}}), ArgumentError);
}

TEST(Metrics, ReportAndCsv) {
    SessionConfig cfg;
    const auto cover = ulaw(std::vector<std::uint8_t>(160, 0x80));
    auto stego = cover;
    stego.codes[0] = 0x81;
    auto r = build_report(cfg, cover, stego, 16, 1);
    EXPECT_NEAR(r.hidden_fraction, 16.0 / 1280.0, 1e-12);
    EXPECT_EQ(csv_header(), "codec,algorithm,hidden_bits,mse,snr_db,psnr_db,mos_lqo,header,scenario");
    const auto row = to_csv_row(r);
    EXPECT_EQ(row.substr(0, 21), "ULAW,LSB1,1.250%,0.00");
    EXPECT_NE(row.find(",n/a,static,1"), std::string::npos) << row;
    r.mos_lqo = 4.5;
    EXPECT_NE(to_csv_row(r).find(",4.500,"), std::string::npos);
    const auto same = build_report(cfg, cover, cover, 0, 1);
    EXPECT_NE(to_csv_row(same).find(",inf,inf,"), std::string::npos);
}

TEST(Metrics, PcmDomain) {
    SessionConfig cfg;
    const auto cover = ulaw(std::vector<std::uint8_t>(100, 0x90));
    auto stego = cover;
    stego.codes[5] = 0x91;
    const auto r = build_report(cfg, cover, stego, 0, 1, MetricDomain::Pcm);
    const double d = ulaw_decode_code(0x90) - ulaw_decode_code(0x91);
    EXPECT_NEAR(r.mse, d * d / 100.0, 1e-9);
    EXPECT_EQ(parse_metric_domain("pcm"), MetricDomain::Pcm);
    EXPECT_THROW(parse_metric_domain("db"), ArgumentError);
}

TEST(Metrics, ExternalScorer) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "mpstego_pesq_test";
    fs::create_directories(dir);
    const fs::path tool = dir / "score.sh";
    {
        std::ofstream f(tool);
        f << "#!/bin/sh\n[ -f \"$1\" ] && [ -f \"$2\" ] || exit 1\necho \"P.862 Prediction: MOS-LQO = 4.123\"\n";
    }
    fs::permissions(tool, fs::perms::owner_all);
    const auto cover = ulaw(std::vector<std::uint8_t>(800, 0x90));
    MetricsReport r;
    attach_mos(r, tool, cover, cover);
    ASSERT_TRUE(r.mos_lqo);
    EXPECT_NEAR(*r.mos_lqo, 4.123, 1e-12);

    {
        std::ofstream f(tool);
        f << "#!/bin/sh\nprintf 'Raw MOS, MOS-LQO:\\t= 3.1\\t3.75\\n'\n";
    }
    EXPECT_NEAR(run_pesq_tool(tool, "a", "b"), 3.75, 1e-12);
    {
        std::ofstream f(tool);
        f << "#!/bin/sh\nexit 3\n";
    }
    EXPECT_THROW(run_pesq_tool(tool, "a", "b"), IoError);
    fs::remove_all(dir);
}
