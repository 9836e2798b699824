#pragma once

#include "mpstego/engine.hpp"
#include "mpstego/metrics.hpp"
#include "mpstego/transport.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mpstego {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitCapacity = 3,
    kExitTransport = 4,
};

struct CapacityReport {
    std::size_t gross_bits = 0;  // per packet, at the worst offset
    std::size_t header_bits = 0; // header cost of a steady-state data packet
    std::size_t net_bits = 0;
    double packets_per_second = 0.0;
    double net_bits_per_second = 0.0;
};

/// Throws ArgumentError for invalid combinations.
CapacityReport plan_capacity(const SessionConfig& cfg);
std::string to_text(const SessionConfig& cfg, const CapacityReport& r);

struct SweepOptions {
    /// Unset fields sweep every value.
    std::optional<CodecId> codec;
    std::optional<EmbedAlgorithm> alg;
    std::optional<HeaderDesign> header;
    std::vector<int> scenarios{1, 2, 3};
    SessionConfig base;
    double loss = 0.0;
    MetricDomain domain = MetricDomain::Code;
    std::optional<std::filesystem::path> pesq_tool;
    /// Appends each run's packet transcript here when set.
    std::ostream* transcript = nullptr;
};

/// CSV report (header + one row per configuration). Invalid combinations and
/// runs that cannot complete become "# skipped" comment rows.
std::string run_sweep(const PcmClip& cover, const SweepOptions& options);

/// Entry point of the mpstego executable.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace mpstego
