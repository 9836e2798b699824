#include "mpstego/cli.hpp"
#include "mpstego/transport.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>
#include <sys/wait.h>

using namespace mpstego;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args) {
    args.insert(args.begin(), "mpstego");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("mpstego_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string wav(double seconds, std::uint32_t rate = 8000) {
        PcmClip c;
        c.sample_rate_hz = rate;
        std::mt19937 rng(5);
        std::normal_distribution<double> noise(0.0, 200.0);
        for (std::size_t i = 0; i < static_cast<std::size_t>(seconds * rate); ++i) {
            const double t = static_cast<double>(i) / rate;
            c.samples.push_back(static_cast<std::int16_t>(4000 * std::sin(2 * M_PI * 300 * t) + noise(rng)));
        }
        const auto p = dir_ / "cover.wav";
        write_wav(c, p);
        return p.string();
    }

    std::string file(const std::string& name, const std::string& text) {
        const auto p = dir_ / name;
        std::ofstream(p, std::ios::binary) << text;
        return p.string();
    }

    fs::path dir_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t data_rows(const std::string& csv) {
    std::istringstream is(csv);
    std::string line;
    std::size_t n = 0;
    std::getline(is, line); // header
    while (std::getline(is, line)) n += !line.empty() && line[0] != '#';
    return n;
}

} // namespace

TEST_F(CliTest, CapacityDefaults) {
    const auto r = cli({"capacity"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("gross_bits_per_packet=160\n"), std::string::npos);
    EXPECT_NE(r.out.find("header_bits_per_packet=15\n"), std::string::npos);
    EXPECT_NE(r.out.find("net_bits_per_packet=145\n"), std::string::npos);
    EXPECT_NE(r.out.find("packets_per_second=50.00\n"), std::string::npos);
    EXPECT_NE(r.out.find("net_bits_per_second=7250\n"), std::string::npos);
}

TEST_F(CliTest, CapacityDviLsb2AndInvalidCombination) {
    const auto r = cli({"--codec", "dvi", "--alg", "lsb2", "capacity"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("gross_bits_per_packet=320\n"), std::string::npos);
    const auto bad = cli({"--codec", "dvi", "--alg", "lsb6", "capacity"});
    EXPECT_EQ(bad.code, kExitConfig);
    EXPECT_NE(bad.err.find("LSB6"), std::string::npos);
}

TEST_F(CliTest, ParseAndConfigErrors) {
    EXPECT_EQ(cli({}).code, kExitConfig);
    EXPECT_EQ(cli({"capacity", "--bogus"}).code, kExitConfig);
    EXPECT_EQ(cli({"--codec", "gsm", "capacity"}).code, kExitConfig);
    EXPECT_EQ(cli({"--loss", "1.5", "capacity"}).code, kExitConfig);
    EXPECT_EQ(cli({"simulate"}).code, kExitConfig); // no --input
    EXPECT_EQ(cli({"--input", wav(0.5), "simulate", "--scenario", "7"}).code, kExitConfig);
    EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST_F(CliTest, ConfigFilePrecedence) {
    const auto cfg = file("run.toml", "codec = \"dvi\"\nalg = \"lsb2\"\n");
    const auto from_file = cli({"--config", cfg, "capacity"});
    ASSERT_EQ(from_file.code, kExitOk) << from_file.err;
    EXPECT_NE(from_file.out.find("codec=DVI alg=LSB2"), std::string::npos) << from_file.out;
    const auto flag_wins = cli({"--config", cfg, "--alg", "msb", "capacity"});
    ASSERT_EQ(flag_wins.code, kExitOk) << flag_wins.err;
    EXPECT_NE(flag_wins.out.find("codec=DVI alg=MSB"), std::string::npos) << flag_wins.out;
}

TEST_F(CliTest, SweepRowsAndDeterminism) {
    const auto in = wav(10.0);
    const auto a = cli({"--input", in, "simulate", "--scenario", "1"});
    ASSERT_EQ(a.code, kExitOk) << a.err;
    EXPECT_GE(data_rows(a.out), 12u);
    EXPECT_NE(a.out.find("# skipped DVI/LSB6"), std::string::npos);
    const auto b = cli({"--input", in, "simulate", "--scenario", "1"});
    EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, SweepRestrictedAndReportFile) {
    const auto in = wav(4.0);
    const auto report = (dir_ / "r.csv").string();
    const auto trans = (dir_ / "t.txt").string();
    const auto r = cli({"--input", in, "--codec", "ulaw", "--alg", "lsb1", "--header", "static",
                        "--report", report, "simulate", "--transcript", trans});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(r.out.empty());
    const auto csv = slurp(report);
    EXPECT_EQ(data_rows(csv), 3u);
    EXPECT_NE(slurp(trans).find("dir=S>R"), std::string::npos);
}

TEST_F(CliTest, PesqStubFillsMosColumn) {
    const auto tool = file("pesq.sh", "#!/bin/sh\necho 4.321\n");
    fs::permissions(tool, fs::perms::owner_all);
    const auto r = cli({"--input", wav(2.0), "--codec", "ulaw", "--alg", "lsb1", "--header",
                        "static", "--pesq-tool", tool, "simulate", "--scenario", "1"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find(",4.321,static,1"), std::string::npos) << r.out;
}

TEST_F(CliTest, AnalyzePair) {
    const auto in = wav(1.0);
    const auto same = cli({"--input", in, "analyze", "--stego", in, "--hidden-bits", "100"});
    ASSERT_EQ(same.code, kExitOk) << same.err;
    EXPECT_NE(same.out.find("ULAW,LSB1,0.156%,0.000000,inf,inf,n/a"), std::string::npos) << same.out;
    EXPECT_EQ(cli({"--input", in, "analyze", "--stego", (dir_ / "none.wav").string()}).code,
              kExitTransport);
}

TEST_F(CliTest, LoopbackSendReceive) {
    const auto in = wav(10.0);
    std::string payload(1024, '\0');
    std::mt19937 rng(12);
    for (auto& ch : payload) ch = static_cast<char>(rng());
    const auto pay = file("secret.bin", payload);
    const auto outp = (dir_ / "got.bin").string();
    const auto got_wav = (dir_ / "got.wav").string();

    std::uint16_t port = 0;
    {
        UdpChannel probe("127.0.0.1", 0, "", 0);
        port = probe.local_port();
    }
    CliRun rx{};
    std::thread t([&] {
        rx = cli({"--input", in, "recv", "--listen", std::to_string(port), "--bind", "127.0.0.1",
                  "--output", outp, "--wav", got_wav});
    });
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    const auto tx = cli({"--input", in, "send", "--payload", pay, "--peer",
                         "127.0.0.1:" + std::to_string(port), "--bind", "127.0.0.1"});
    t.join();
    ASSERT_EQ(tx.code, kExitOk) << tx.err << tx.out;
    ASSERT_EQ(rx.code, kExitOk) << rx.err << rx.out;
    EXPECT_EQ(slurp(outp), payload);
    EXPECT_GT(read_wav(got_wav).samples.size(), 0u);
    EXPECT_NE(tx.out.find("success=1"), std::string::npos);
}

TEST_F(CliTest, SendRefusesOversizedPayload) {
    const auto in = wav(0.5);
    const auto pay = file("big.bin", std::string(5000, 'x'));
    const auto r = cli({"--input", in, "send", "--payload", pay, "--peer", "127.0.0.1:9"});
    EXPECT_EQ(r.code, kExitCapacity);
    EXPECT_NE(r.err.find("short by"), std::string::npos);
}

TEST_F(CliTest, BinaryExitCodes) {
    const std::string bin = MPSTEGO_BINARY;
    auto status = [&](const std::string& args) {
        const int s = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    EXPECT_EQ(status("capacity"), 0);
    EXPECT_EQ(status("--codec dvi --alg lsb6 capacity"), 2);
    EXPECT_EQ(status("--input " + wav(0.1) + " send --payload " + file("p", std::string(4000, 'a')) +
                     " --peer 127.0.0.1:9"),
              3);
}
