#pragma once

#include "mpstego/engine.hpp"
#include "mpstego/voice_codecs.hpp"

#include <filesystem>
#include <limits>
#include <optional>
#include <string>

namespace mpstego {

/// Value reported for SNR/PSNR when the two streams are identical.
inline constexpr double kIdentical = std::numeric_limits<double>::infinity();
inline bool is_identical(double db) noexcept { return db == kIdentical; }

/// Code streams are compared as code values; Pcm decodes both first.
enum class MetricDomain { Code, Pcm };
std::string to_string(MetricDomain d);
MetricDomain parse_metric_domain(std::string_view name);

/// Largest code value: 255 for ULAW, 15 for DVI.
double code_peak(CodecId codec) noexcept;
inline constexpr double kPcmPeak = 32767.0;

// Code domain. Streams must share codec and length (ArgumentError otherwise).
double mse(const EncodedStream& cover, const EncodedStream& stego);
double snr_db(const EncodedStream& cover, const EncodedStream& stego);
double psnr_db(const EncodedStream& cover, const EncodedStream& stego);

// Decoded PCM domain.
double mse(const PcmClip& cover, const PcmClip& stego);
double snr_db(const PcmClip& cover, const PcmClip& stego);
double psnr_db(const PcmClip& cover, const PcmClip& stego);

/// 10·log10(peak² / mse); kIdentical for mse == 0.
double psnr_from_mse(double mse, double peak);

struct MetricsReport {
    CodecId codec = CodecId::Ulaw;
    EmbedAlgorithm alg = EmbedAlgorithm::Lsb1;
    HeaderDesign header_design = HeaderDesign::Static;
    int scenario = 0;
    MetricDomain domain = MetricDomain::Code;
    double hidden_fraction = 0.0;
    double mse = 0.0;
    double snr_db = kIdentical;
    double psnr_db = kIdentical;
    std::optional<double> mos_lqo;
};

MetricsReport build_report(const SessionConfig& cfg, const EncodedStream& cover,
                           const EncodedStream& stego, std::size_t hidden_bits_total,
                           int scenario = 0, MetricDomain domain = MetricDomain::Code);

std::string csv_header();
/// codec, algorithm, hidden %, MSE, SNR dB, PSNR dB, MOS-LQO, header, scenario.
std::string to_csv_row(const MetricsReport& r);

/// Runs `tool ref.wav deg.wav` and parses the first number it prints.
/// Throws IoError if the tool fails or prints no number.
double run_pesq_tool(const std::filesystem::path& tool, const std::filesystem::path& reference,
                     const std::filesystem::path& degraded);

/// Decodes both streams to WAV files in a temporary directory and fills
/// r.mos_lqo from the external tool.
void attach_mos(MetricsReport& r, const std::filesystem::path& tool, const EncodedStream& cover,
                const EncodedStream& stego);

} // namespace mpstego
