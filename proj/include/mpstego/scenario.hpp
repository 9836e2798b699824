#pragma once

#include "mpstego/engine.hpp"
#include "mpstego/transport.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mpstego {

/// Retransmission timeout of 200 ms expressed in packets of `frame_codes`.
unsigned default_timeout_ticks(CodecId codec, unsigned frame_codes);

struct TranscriptRecord {
    std::uint64_t tick = 0;
    bool from_sender = true;
    std::uint64_t index = 0;
    unsigned offset = 0;
    std::size_t hidden_bits = 0;
    std::string summary;
    bool lost = false;
};

struct TranscriptReport {
    int scenario = 0;
    std::size_t ticks = 0;
    std::size_t packets_sent = 0;      // sender direction
    std::size_t hidden_bits_total = 0; // sender direction
    double hidden_fraction = 0.0;
    std::size_t retransmissions = 0;
    std::size_t responses = 0;
    std::size_t resends = 0;
    std::size_t requests_completed = 0;
    std::size_t bytes_delivered = 0;
    EncodedStream cover; // sender direction, as streamed
    EncodedStream stego;
    std::vector<TranscriptRecord> records;

    /// One line per packet: tick, direction, index, offset, hidden bits, header summary.
    std::string to_text() const;
};

struct LinkOptions {
    LossModel forward;  // sender -> receiver
    LossModel backward; // receiver -> sender
    /// 0 selects default_timeout_ticks().
    unsigned timeout_ticks = 0;
    bool keep_records = false;
};

/// Two sessions joined by an in-memory RTP link, advanced in lockstep: each
/// tick the sender emits one packet, the receiver handles it and answers
/// with one packet, and the sender handles the answer.
class SimulatedLink {
public:
    /// Covers are streamed frame by frame and wrap around when exhausted.
    SimulatedLink(const SessionConfig& cfg, EncodedStream sender_cover,
                  EncodedStream receiver_cover, LinkOptions options = {});

    void tick();

    Session& sender() noexcept { return sender_; }
    Session& receiver() noexcept { return receiver_; }
    std::size_t ticks() const noexcept { return tick_; }

    /// Payloads delivered at the receiver, in order.
    const std::vector<Deliver>& deliveries() const noexcept { return delivered_; }
    const std::vector<NotifyError>& errors() const noexcept { return errors_; }
    const std::vector<TranscriptRecord>& records() const noexcept { return records_; }

    /// Stego codes streamed by the sender so far, and the matching cover codes.
    const EncodedStream& sender_stego() const noexcept { return stego_out_; }
    const EncodedStream& sender_cover_sent() const noexcept { return cover_out_; }

private:
    struct Direction {
        EncodedStream cover;
        StreamIdentity id;
        LossyLink link;
        SequenceUnwrapper unwrap;
        std::size_t next_frame = 0;
    };

    std::vector<std::uint8_t> build_packet(Direction& d, Session& from, std::uint64_t index,
                                           bool from_sender);
    void deliver(Direction& d, Session& to, std::vector<std::uint8_t> datagram);
    void collect(std::vector<EngineAction> actions);

    SessionConfig cfg_;
    Session sender_;
    Session receiver_;
    Direction fwd_;
    Direction back_;
    LinkOptions opts_;
    unsigned timeout_ticks_;
    std::size_t tick_ = 0;
    std::uint64_t last_activity_ = 0;
    unsigned stall_ = 0;
    std::vector<Deliver> delivered_;
    std::vector<NotifyError> errors_;
    std::vector<TranscriptRecord> records_;
    EncodedStream stego_out_;
    EncodedStream cover_out_;
};

struct TransferResult {
    bool success = false;
    std::vector<std::uint8_t> delivered;
    std::size_t ticks = 0;
    std::size_t requests = 0;
    SessionStats sender;
    SessionStats receiver;
    std::vector<std::string> errors;
};

/// Sends `payload` (split into as many requests as needed) over a simulated
/// link until everything is acknowledged, a fatal error occurs, or
/// `max_ticks` elapse.
TransferResult run_transfer(const SessionConfig& cfg, std::span<const std::uint8_t> payload,
                            const EncodedStream& cover, LinkOptions options,
                            std::size_t max_ticks);

struct ScenarioOptions {
    /// Dummy packets between requests in scenario 2.
    unsigned dummies_between = 10;
    /// Payload of one scenario-2 request and its forced segment size.
    std::size_t request_bytes = 180;
    std::size_t request_segment = 60;
    std::uint64_t payload_seed = 7;
    bool keep_records = false;
    LossModel forward;
    LossModel backward;
};

/// Runs scenario 1 (dummy traffic only), 2 (dummies + small requests) or 3
/// (back-to-back bulk requests) over one pass of `cover`. Both ends stream the
/// same cover. Throws CapacityError when scenario 2 or 3 completes no request.
TranscriptReport run_scenario(int id, const SessionConfig& cfg, const EncodedStream& cover,
                              const ScenarioOptions& options = {});

} // namespace mpstego
