#pragma once

#include "mpstego/engine.hpp"
#include "mpstego/transport.hpp"

#include <chrono>
#include <span>
#include <string>
#include <vector>

namespace mpstego {

struct LiveOptions {
    /// Delay between outgoing packets; zero streams as fast as replies allow.
    std::chrono::milliseconds pace{0};
    /// How long the sender waits for the answer to each packet.
    std::chrono::milliseconds reply_timeout{100};
    /// Receiver gives up after this long without traffic.
    std::chrono::milliseconds idle_timeout{3000};
    /// Receiver gives up if no sender shows up in time; zero waits forever.
    std::chrono::milliseconds startup_timeout{0};
    /// Packets without an answer before the sender's retransmission timer
    /// fires; 0 selects default_timeout_ticks().
    unsigned timeout_packets = 0;
};

struct LiveSenderResult {
    bool success = false;
    std::size_t packets = 0;
    std::size_t replies = 0;
    SessionStats stats;
    std::vector<std::string> errors;
};

struct LiveReceiverResult {
    std::vector<std::uint8_t> payload;
    std::size_t messages = 0;
    std::size_t packets = 0;
    /// Cover stream as received, gaps filled with silence.
    EncodedStream stream;
    GapReport gaps;
    SessionStats stats;
};

/// Packets a lossless transfer of `payload_bytes` needs, used for the
/// pre-flight capacity check.
std::size_t packets_needed(const SessionConfig& cfg, std::size_t payload_bytes);

/// Streams `cover` frame by frame to the peer, hiding `payload`. Each packet
/// waits for the receiver's answer (or reply_timeout) before the next one.
/// The last packet carries the RTP marker bit. Throws CapacityError up front
/// or when the cover runs out, ChannelClosedError/IoError from the channel.
LiveSenderResult run_live_sender(Channel& channel, const SessionConfig& cfg,
                                 const EncodedStream& cover, std::span<const std::uint8_t> payload,
                                 const LiveOptions& options = {});

/// Answers every packet with one frame of `cover` (looped) until the marker
/// packet arrives or the idle timeout expires after traffic started.
LiveReceiverResult run_live_receiver(Channel& channel, const SessionConfig& cfg,
                                     const EncodedStream& cover, const LiveOptions& options = {});

} // namespace mpstego
