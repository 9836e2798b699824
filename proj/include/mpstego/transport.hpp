#pragma once

#include "mpstego/voice_codecs.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace mpstego {

/// RFC 3550 fixed header (no CSRC, no extension) plus payload.
struct RtpPacket {
    std::uint8_t payload_type = 0;
    bool marker = false;
    std::uint16_t sequence = 0;
    std::uint32_t timestamp = 0;
    std::uint32_t ssrc = 0;
    std::vector<std::uint8_t> payload;

    static constexpr std::size_t kHeaderBytes = 12;

    std::vector<std::uint8_t> serialize() const;
    /// Throws FormatError on short input or a version other than 2.
    static RtpPacket parse(std::span<const std::uint8_t> datagram);

    friend bool operator==(const RtpPacket&, const RtpPacket&) = default;
};

/// Packs codes into an RTP payload: one byte per code for 8-bit codecs, two
/// codes per byte (first code in the high nibble) for 4-bit codecs.
std::vector<std::uint8_t> pack_codes(CodecId codec, std::span<const std::uint8_t> codes);
std::vector<std::uint8_t> unpack_codes(CodecId codec, std::span<const std::uint8_t> payload,
                                       std::size_t code_count);

struct StreamIdentity {
    std::uint16_t initial_sequence = 0;
    std::uint32_t initial_timestamp = 0;
    std::uint32_t ssrc = 0;

    /// Derives all three fields from a seed and a direction tag.
    static StreamIdentity from_seed(std::uint64_t seed, unsigned direction);
};

std::vector<RtpPacket> packetize(const EncodedStream& stream, std::size_t frame_codes,
                                 const StreamIdentity& id = {});

struct GapReport {
    /// Packet indices (relative to the first received sequence) that were missing.
    std::vector<std::uint64_t> missing;
    std::size_t received = 0;
};

/// Reorders by (unwrapped) sequence, fills missing frames with silence codes.
/// `total_codes`, when known, trims the padding of a short final frame.
std::pair<EncodedStream, GapReport> depacketize(const std::vector<RtpPacket>& packets,
                                                CodecId codec, std::size_t frame_codes,
                                                std::optional<std::size_t> total_codes = {});

/// Maps wrapping 16-bit sequence numbers to a monotone 64-bit packet index
/// relative to a known initial sequence.
class SequenceUnwrapper {
public:
    explicit SequenceUnwrapper(std::uint16_t initial_sequence) : initial_(initial_sequence) {}
    std::uint64_t unwrap(std::uint16_t sequence);

private:
    std::uint16_t initial_;
    std::uint64_t highest_ = 0;
    bool seen_ = false;
};

struct LossModel {
    double loss_probability = 0.0;
    double reorder_probability = 0.0;
    std::uint64_t seed = 0;

    /// Throws ArgumentError unless both probabilities are in [0, 1).
    void validate() const;
};

/// Applies a LossModel to a sequence of datagrams. Each datagram is dropped
/// independently; a surviving datagram is held back and swapped with the next
/// survivor with the reorder probability.
class LossyLink {
public:
    explicit LossyLink(LossModel model);

    /// Datagrams delivered as a result of sending `datagram` (0, 1 or 2).
    std::vector<std::vector<std::uint8_t>> transmit(std::vector<std::uint8_t> datagram);
    /// Releases a held-back datagram, if any.
    std::vector<std::vector<std::uint8_t>> flush();

    std::size_t sent() const noexcept { return sent_; }
    std::size_t dropped() const noexcept { return dropped_; }

private:
    LossModel model_;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    std::optional<std::vector<std::uint8_t>> held_;
    std::size_t sent_ = 0;
    std::size_t dropped_ = 0;
};

class Channel {
public:
    virtual ~Channel() = default;
    virtual void send(std::vector<std::uint8_t> datagram) = 0;
    /// Returns nullopt when nothing arrives within `timeout`.
    virtual std::optional<std::vector<std::uint8_t>> recv(std::chrono::milliseconds timeout) = 0;
    virtual void close() = 0;
};

/// One direction of an in-process link. Thread-safe.
class InMemoryChannel : public Channel {
public:
    explicit InMemoryChannel(LossModel model = {});

    void send(std::vector<std::uint8_t> datagram) override;
    std::optional<std::vector<std::uint8_t>> recv(std::chrono::milliseconds timeout) override;
    /// Non-blocking receive.
    std::optional<std::vector<std::uint8_t>> try_recv();
    void close() override;

    std::size_t dropped() const;

private:
    mutable std::mutex mu_;
    std::condition_variable cv_;
    LossyLink link_;
    std::deque<std::vector<std::uint8_t>> queue_;
    bool closed_ = false;
};

/// UDP socket bound to a local port and aimed at one peer. With an empty
/// peer host the peer is learned from the source of the latest datagram.
/// Loss is applied at send time. Socket errors raise IoError.
class UdpChannel : public Channel {
public:
    UdpChannel(const std::string& bind_host, std::uint16_t bind_port, const std::string& peer_host,
               std::uint16_t peer_port, LossModel model = {});
    ~UdpChannel() override;
    UdpChannel(const UdpChannel&) = delete;
    UdpChannel& operator=(const UdpChannel&) = delete;

    void send(std::vector<std::uint8_t> datagram) override;
    std::optional<std::vector<std::uint8_t>> recv(std::chrono::milliseconds timeout) override;
    void close() override;

    std::uint16_t local_port() const noexcept { return local_port_; }
    std::size_t dropped() const;

private:
    int fd_ = -1;
    std::uint16_t local_port_ = 0;
    bool connected_ = false;
    bool has_peer_ = false;
    alignas(8) unsigned char peer_[16] = {};
    mutable std::mutex mu_;
    LossyLink link_;
};

/// Splits "host:port". Throws ArgumentError on malformed input.
std::pair<std::string, std::uint16_t> parse_host_port(const std::string& text);

} // namespace mpstego
