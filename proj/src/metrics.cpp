#include "mpstego/metrics.hpp"

#include "mpstego/errors.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sys/wait.h>

namespace mpstego {

namespace {

template <typename T>
void check_aligned(const std::vector<T>& a, const std::vector<T>& b) {
    if (a.size() != b.size()) {
        throw ArgumentError("length mismatch: " + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()));
    }
    if (a.empty()) throw ArgumentError("empty streams");
}

void check_streams(const EncodedStream& cover, const EncodedStream& stego) {
    if (cover.codec != stego.codec) throw ArgumentError("codec mismatch");
    check_aligned(cover.codes, stego.codes);
}

struct Sums {
    double signal = 0.0;
    double noise = 0.0;
    std::size_t n = 0;
};

template <typename T>
Sums sums(const std::vector<T>& cover, const std::vector<T>& stego) {
    Sums s;
    s.n = cover.size();
    for (std::size_t i = 0; i < cover.size(); ++i) {
        const double c = cover[i];
        const double d = c - static_cast<double>(stego[i]);
        s.signal += c * c;
        s.noise += d * d;
    }
    return s;
}

double snr_from(const Sums& s) {
    if (s.signal == 0.0) throw ArgumentError("cover signal is all zero");
    if (s.noise == 0.0) return kIdentical;
    return 10.0 * std::log10(s.signal / s.noise);
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "'\\''";
        else out += c;
    }
    return out + "'";
}

std::string fmt_db(double v) {
    if (is_identical(v)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

} // namespace

std::string to_string(MetricDomain d) { return d == MetricDomain::Code ? "code" : "pcm"; }

MetricDomain parse_metric_domain(std::string_view name) {
    if (name == "code") return MetricDomain::Code;
    if (name == "pcm") return MetricDomain::Pcm;
    throw ArgumentError("unknown metric domain: " + std::string(name));
}

double code_peak(CodecId codec) noexcept {
    return static_cast<double>((1u << bits_per_code(codec)) - 1u);
}

double mse(const EncodedStream& cover, const EncodedStream& stego) {
    check_streams(cover, stego);
    const Sums s = sums(cover.codes, stego.codes);
    return s.noise / static_cast<double>(s.n);
}

double snr_db(const EncodedStream& cover, const EncodedStream& stego) {
    check_streams(cover, stego);
    return snr_from(sums(cover.codes, stego.codes));
}

double psnr_db(const EncodedStream& cover, const EncodedStream& stego) {
    return psnr_from_mse(mse(cover, stego), code_peak(cover.codec));
}

double mse(const PcmClip& cover, const PcmClip& stego) {
    check_aligned(cover.samples, stego.samples);
    const Sums s = sums(cover.samples, stego.samples);
    return s.noise / static_cast<double>(s.n);
}

double snr_db(const PcmClip& cover, const PcmClip& stego) {
    check_aligned(cover.samples, stego.samples);
    return snr_from(sums(cover.samples, stego.samples));
}

double psnr_db(const PcmClip& cover, const PcmClip& stego) {
    return psnr_from_mse(mse(cover, stego), kPcmPeak);
}

double psnr_from_mse(double m, double peak) {
    if (m < 0.0) throw ArgumentError("negative MSE");
    if (m == 0.0) return kIdentical;
    return 10.0 * std::log10(peak * peak / m);
}

MetricsReport build_report(const SessionConfig& cfg, const EncodedStream& cover,
                           const EncodedStream& stego, std::size_t hidden_bits_total,
                           int scenario, MetricDomain domain) {
    check_streams(cover, stego);
    MetricsReport r;
    r.codec = cover.codec;
    r.alg = cfg.alg;
    r.header_design = cfg.header_design;
    r.scenario = scenario;
    r.domain = domain;
    r.hidden_fraction = hidden_fraction(hidden_bits_total, cover);
    if (domain == MetricDomain::Code) {
        r.mse = mse(cover, stego);
        r.snr_db = snr_db(cover, stego);
        r.psnr_db = psnr_db(cover, stego);
    } else {
        const PcmClip a = decode_any(cover);
        const PcmClip b = decode_any(stego);
        r.mse = mse(a, b);
        r.snr_db = snr_db(a, b);
        r.psnr_db = psnr_db(a, b);
    }
    return r;
}

std::string csv_header() {
    return "codec,algorithm,hidden_bits,mse,snr_db,psnr_db,mos_lqo,header,scenario";
}

std::string to_csv_row(const MetricsReport& r) {
    char frac[32], m[32];
    std::snprintf(frac, sizeof frac, "%.3f%%", r.hidden_fraction * 100.0);
    std::snprintf(m, sizeof m, "%.6f", r.mse);
    std::string mos = "n/a";
    if (r.mos_lqo) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", *r.mos_lqo);
        mos = buf;
    }
    return to_string(r.codec) + "," + to_string(r.alg) + "," + frac + "," + m + "," +
           fmt_db(r.snr_db) + "," + fmt_db(r.psnr_db) + "," + mos + "," +
           to_string(r.header_design) + "," + std::to_string(r.scenario);
}

double run_pesq_tool(const std::filesystem::path& tool, const std::filesystem::path& reference,
                     const std::filesystem::path& degraded) {
    const std::string cmd = shell_quote(tool.string()) + " " + shell_quote(reference.string()) +
                            " " + shell_quote(degraded.string()) + " 2>/dev/null";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) throw IoError("cannot run " + tool.string());
    std::string out;
    std::array<char, 256> buf{};
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe)) out += buf.data();
    const int status = ::pclose(pipe);
    if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        throw IoError(tool.string() + " failed");
    }
    // Last standalone number; scorers print MOS-LQO after any raw MOS and labels.
    std::optional<double> score;
    const char* p = out.c_str();
    const char* const begin = p;
    while (*p) {
        const bool boundary = p == begin || std::isspace(static_cast<unsigned char>(p[-1])) ||
                              p[-1] == '=' || p[-1] == ':' || p[-1] == ',';
        char* end = nullptr;
        const double v = boundary ? std::strtod(p, &end) : 0.0;
        if (boundary && end != p && std::isfinite(v) &&
            (*end == '\0' || std::isspace(static_cast<unsigned char>(*end)) || *end == ',')) {
            score = v;
            p = end;
        } else {
            ++p;
        }
    }
    if (!score) throw IoError(tool.string() + " printed no score");
    return *score;
}

void attach_mos(MetricsReport& r, const std::filesystem::path& tool, const EncodedStream& cover,
                const EncodedStream& stego) {
    namespace fs = std::filesystem;
    std::random_device rd;
    const fs::path dir = fs::temp_directory_path() / ("mpstego-mos-" + std::to_string(rd()));
    fs::create_directories(dir);
    const fs::path ref = dir / "reference.wav";
    const fs::path deg = dir / "degraded.wav";
    try {
        write_wav(decode_any(cover), ref);
        write_wav(decode_any(stego), deg);
        r.mos_lqo = run_pesq_tool(tool, ref, deg);
    } catch (...) {
        std::error_code ec;
        fs::remove_all(dir, ec);
        throw;
    }
    std::error_code ec;
    fs::remove_all(dir, ec);
}

} // namespace mpstego
