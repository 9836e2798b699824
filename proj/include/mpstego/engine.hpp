#pragma once

#include "mpstego/mp_dynamic.hpp"
#include "mpstego/mp_static.hpp"
#include "mpstego/offset_schedule.hpp"
#include "mpstego/stego_embed.hpp"
#include "mpstego/voice_codecs.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace mpstego {

enum class HeaderDesign { Static, Dynamic };
std::string to_string(HeaderDesign d);
HeaderDesign parse_header_design(std::string_view name);

enum class Role { Sender, Receiver };
enum class Phase { Idle, RequestSent, Receiving, AwaitingAck, Done };
std::string to_string(Role r);
std::string to_string(Phase p);

struct SessionConfig {
    HeaderDesign header_design = HeaderDesign::Static;
    CodecId codec = CodecId::Ulaw;
    EmbedAlgorithm alg = EmbedAlgorithm::Lsb1;
    Placement placement;
    unsigned frame_codes = 160;
    unsigned ack_every_n = 1;
    /// Retransmission rounds (RESENDs and probes) tolerated without progress.
    unsigned resend_limit = 32;
    std::uint64_t seed = 1;
    /// Upper bound on bytes per DAT; 0 means limited by capacity only.
    std::size_t segment_bytes = 0;
    std::uint8_t version = 1;

    /// Throws ArgumentError / CapacityError for unusable configurations.
    void validate() const;
    /// Hidden bits available in a packet whose header starts at `offset`.
    std::size_t capacity_at(unsigned offset) const;
    /// Capacity guaranteed for every packet under the offset schedule.
    std::size_t min_capacity() const;
    /// Bytes carried by one full DAT segment.
    std::size_t segment_size() const;
    /// Largest payload accepted by a single start_request().
    std::size_t max_request_bytes() const;
};

struct EmitHidden {
    BitString bits;
    unsigned offset_codes = 0;
    std::string summary;
};

struct Deliver {
    std::vector<std::uint8_t> payload;
    DataFormat fmt = DataFormat::Binary;
};

struct NotifyError {
    std::string reason;
    bool fatal = false;
};

using EngineAction = std::variant<std::monostate, EmitHidden, Deliver, NotifyError>;

struct SessionStats {
    std::size_t packets_emitted = 0;
    std::size_t hidden_bits_emitted = 0;
    std::size_t responses_sent = 0; // RES packets (OK + RESEND)
    std::size_t oks_sent = 0;
    std::size_t resends_sent = 0;
    std::size_t resends_received = 0;
    std::size_t probes_sent = 0;
    std::size_t retransmitted_dat = 0;
    std::size_t requests_completed = 0;
    std::size_t deliveries = 0;
    std::size_t suppressed_duplicates = 0;
    std::size_t decode_errors = 0;
};

/// One end of a covert session.
///
/// The driver calls next_outgoing() exactly once per packet it sends, and
/// handle_incoming() for every packet it receives from the peer, passing the
/// peer's packet index (unwrapped RTP sequence relative to the peer's initial
/// sequence). Responses are emitted by the next next_outgoing() call, so a
/// response to peer packet p travels in the packet the driver sends right
/// after handling p. handle_timeout() is called by the driver's
/// retransmission timer while awaiting_response() holds.
class Session {
public:
    Session(SessionConfig config, Role role);

    const SessionConfig& config() const noexcept { return cfg_; }
    Role role() const noexcept { return role_; }
    Phase phase() const noexcept { return phase_; }
    const SessionStats& stats() const noexcept { return stats_; }
    const DecodeContext& decode_context() const noexcept { return rx_ctx_; }

    /// Sender only. Accepted in IDLE or DONE. Throws SegmentationError when a
    /// static request would need more than 63 DAT packets.
    std::vector<EngineAction> start_request(std::span<const std::uint8_t> payload,
                                            DataFormat fmt = DataFormat::Binary);

    /// Next packet's hidden content: queued element, else a dummy.
    EmitHidden next_outgoing();

    /// Offset at which the header of peer packet `peer_index` starts.
    unsigned incoming_offset(std::uint64_t peer_index) const;
    /// Bits to extract from peer packet `peer_index` (capacity from its offset).
    std::size_t incoming_capacity(std::uint64_t peer_index) const;

    std::vector<EngineAction> handle_incoming(const BitString& bits, std::uint64_t peer_index);
    std::vector<EngineAction> handle_timeout();

    bool awaiting_response() const noexcept;
    /// Changes whenever the sender makes progress or hears from the peer.
    std::uint64_t activity() const noexcept { return activity_; }
    /// True after a fatal error (resend limit exceeded).
    bool failed() const noexcept { return failed_; }

private:
    struct Outgoing {
        enum class Kind { Req, Dat, Res, Bom, Eom, Len, Ver, Fmt, Nho } kind;
        std::uint8_t a = 0; // cnt / len / cmd / version / fmt / nho
        std::uint32_t index = 0; // DAT segment index or RES index
    };

    // Framing of outgoing elements.
    BitString encode_outgoing(const Outgoing& o, std::uint64_t packet_index, std::string& summary);
    BitString dummy_bits(std::uint64_t packet_index, std::string& summary);

    // Sender helpers.
    std::size_t window_end(std::size_t from) const;
    bool final_window() const;
    void queue_static_run(bool with_request);
    void queue_dynamic_run(bool with_bom);
    void queue_response(Command cmd, std::uint32_t index);
    bool count_attempt(std::vector<EngineAction>& out);
    void sender_on_ok(std::optional<std::uint32_t> index, std::vector<EngineAction>& out);
    void sender_on_resend(std::optional<std::uint32_t> index, std::vector<EngineAction>& out);

    // Receiver helpers.
    void static_receive(const StaticHeader& h, const BitString& bits, std::size_t consumed,
                        std::uint64_t p, std::vector<EngineAction>& out);
    void static_check_run(std::uint64_t p, std::vector<EngineAction>& out);
    void static_new_request(const static_hdr::Request& r, std::uint64_t p,
                            std::vector<EngineAction>& out);
    void dynamic_receive(const BitString& bits, std::uint64_t p, std::vector<EngineAction>& out);
    void dynamic_probe(Command cmd, std::vector<EngineAction>& out);
    void dynamic_begin(std::uint64_t p);
    void receiver_resend(std::uint32_t index);
    void complete(std::vector<EngineAction>& out);
    bool is_resent_tail() const;

    SessionConfig cfg_;
    Role role_;
    Phase phase_ = Phase::Idle;
    OffsetSchedule out_schedule_;
    OffsetSchedule in_schedule_;
    std::mt19937_64 rng_;
    std::deque<Outgoing> queue_;
    std::uint64_t out_index_ = 0;
    std::uint64_t activity_ = 0;
    bool failed_ = false;
    SessionStats stats_;

    // Announced offsets: peer packet index -> offset carried by its predecessor.
    std::optional<std::pair<std::uint64_t, unsigned>> announced_;

    // Message being sent or received.
    std::vector<std::vector<std::uint8_t>> segments_;
    DataFormat fmt_ = DataFormat::Binary;
    std::size_t seg_count_ = 0;

    // Sender state.
    std::size_t acked_ = 0; // a_s: segments known to be received
    bool got_ok_ = false;
    unsigned attempts_ = 0;
    std::size_t next_dat_ = 0; // next DAT in the contiguous stream
    std::size_t highest_sent_ = 0;
    bool hdrs_in_flight_ = false;
    std::optional<std::uint8_t> confirmed_version_;
    std::optional<DataFormat> confirmed_fmt_;
    bool confirmed_nho_ = false;

    // Receiver state (both designs).
    std::vector<bool> have_;
    std::size_t window_start_ = 0;
    struct Anchor {
        std::uint64_t first_packet;
        std::size_t first_segment;
        std::size_t end_segment;
    };
    std::optional<Anchor> anchor_;
    bool dirty_ = false;
    bool stopped_ = false;
    std::uint64_t last_packet_ = 0;
    std::optional<std::uint32_t> last_resend_index_;
    DecodeContext rx_ctx_;

    // Duplicate suppression for a message re-sent after a lost final OK.
    std::vector<std::vector<std::uint8_t>> last_segments_;
    DataFormat last_fmt_ = DataFormat::Binary;
    bool dedupe_armed_ = false;
};

/// Splits a payload into requests that each fit one start_request() call.
std::vector<std::vector<std::uint8_t>> split_requests(const SessionConfig& cfg,
                                                      std::span<const std::uint8_t> payload);

} // namespace mpstego
