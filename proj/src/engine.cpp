#include "mpstego/engine.hpp"

#include "mpstego/errors.hpp"

#include <algorithm>
#include <stdexcept>

namespace mpstego {

namespace sh = static_hdr;

namespace {

constexpr std::uint64_t kReturnStreamSalt = 0xD1B54A32D192ED03ull;
// RES{cmd} + LEN{2} + DAT{16-bit index}
constexpr std::size_t kDynamicResponseBits = 5 + 11 + 19;

std::uint64_t schedule_seed(std::uint64_t seed, unsigned direction) {
    return direction == 0 ? seed : seed ^ kReturnStreamSalt;
}

unsigned direction_out(Role r) { return r == Role::Sender ? 0 : 1; }

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace

std::string to_string(HeaderDesign d) { return d == HeaderDesign::Static ? "static" : "dynamic"; }

HeaderDesign parse_header_design(std::string_view name) {
    const auto s = lower(name);
    if (s == "static") return HeaderDesign::Static;
    if (s == "dynamic") return HeaderDesign::Dynamic;
    throw ArgumentError("unknown header design '" + std::string(name) + "'");
}

std::string to_string(Role r) { return r == Role::Sender ? "sender" : "receiver"; }

std::string to_string(Phase p) {
    switch (p) {
    case Phase::Idle: return "IDLE";
    case Phase::RequestSent: return "REQUEST_SENT";
    case Phase::Receiving: return "RECEIVING";
    case Phase::AwaitingAck: return "AWAITING_ACK";
    case Phase::Done: return "DONE";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// SessionConfig

void SessionConfig::validate() const {
    if (ack_every_n == 0) throw ArgumentError("ack_every_n must be at least 1");
    if (frame_codes == 0) throw ArgumentError("frame size must be positive");
    if (version == 0 || version > 3) throw ArgumentError("version must be 1, 2 or 3");
    check_combination(codec, alg);
    OffsetSchedule probe(placement, frame_codes, seed);
    const std::size_t need =
        header_design == HeaderDesign::Static ? sh::kDataBits + 8 : kDynamicResponseBits;
    const std::size_t have = min_capacity();
    if (have < need) {
        throw CapacityError("per-packet capacity " + std::to_string(have) + " bits is below the " +
                                std::to_string(need) + " bits the " + to_string(header_design) +
                                " design needs",
                            need - have);
    }
}

std::size_t SessionConfig::capacity_at(unsigned offset) const {
    if (offset >= frame_codes) return 0;
    return std::size_t{frame_codes - offset} * bits_targeted(alg);
}

std::size_t SessionConfig::min_capacity() const {
    OffsetSchedule s(placement, frame_codes, seed);
    return capacity_at(s.max_offset());
}

std::size_t SessionConfig::segment_size() const {
    return header_design == HeaderDesign::Static
               ? max_static_segment(min_capacity(), segment_bytes)
               : max_dynamic_segment(min_capacity(), segment_bytes);
}

std::size_t SessionConfig::max_request_bytes() const {
    const std::size_t seg = segment_size();
    return header_design == HeaderDesign::Static ? seg * sh::kMaxCount : seg * 65534;
}

std::vector<std::vector<std::uint8_t>> split_requests(const SessionConfig& cfg,
                                                      std::span<const std::uint8_t> payload) {
    const std::size_t max = cfg.max_request_bytes();
    if (max == 0) throw CapacityError("no payload fits a packet", 8);
    std::vector<std::vector<std::uint8_t>> out;
    for (std::size_t off = 0; off < payload.size(); off += max) {
        const std::size_t n = std::min(max, payload.size() - off);
        out.emplace_back(payload.begin() + static_cast<std::ptrdiff_t>(off),
                         payload.begin() + static_cast<std::ptrdiff_t>(off + n));
    }
    if (out.empty()) out.emplace_back();
    return out;
}

// ---------------------------------------------------------------------------
// Session basics

Session::Session(SessionConfig config, Role role)
    : cfg_(config), role_(role),
      out_schedule_(config.placement, config.frame_codes,
                    schedule_seed(config.seed, direction_out(role))),
      in_schedule_(config.placement, config.frame_codes,
                   schedule_seed(config.seed, 1 - direction_out(role))),
      rng_(config.seed * 0x9E3779B97F4A7C15ull + (role == Role::Sender ? 1 : 2)) {
    cfg_.validate();
}

bool Session::awaiting_response() const noexcept {
    return role_ == Role::Sender && !failed_ &&
           (phase_ == Phase::AwaitingAck || (phase_ == Phase::RequestSent && queue_.empty()));
}

unsigned Session::incoming_offset(std::uint64_t peer_index) const {
    if (announced_ && announced_->first == peer_index) return announced_->second;
    return in_schedule_.offset_at(peer_index);
}

std::size_t Session::incoming_capacity(std::uint64_t peer_index) const {
    return cfg_.capacity_at(incoming_offset(peer_index));
}

std::size_t Session::window_end(std::size_t from) const {
    const std::size_t n = cfg_.ack_every_n;
    return std::min((from / n + 1) * n, seg_count_);
}

bool Session::final_window() const { return window_end(acked_) == seg_count_; }

// ---------------------------------------------------------------------------
// Outgoing

BitString Session::dummy_bits(std::uint64_t packet_index, std::string& summary) {
    const auto rnd = static_cast<std::uint16_t>(rng_() & 0x1FF);
    if (cfg_.header_design == HeaderDesign::Static) {
        sh::Dummy d{static_cast<std::uint8_t>(out_schedule_.offset_at(packet_index + 1)), rnd};
        summary = describe(StaticHeader{d});
        return encode_static(d);
    }
    summary = "DMY";
    return encode_chunk(DynChunk::dmy(rnd));
}

BitString Session::encode_outgoing(const Outgoing& o, std::uint64_t packet_index,
                                   std::string& summary) {
    const auto nho = static_cast<std::uint8_t>(out_schedule_.offset_at(packet_index + 1));
    using K = Outgoing::Kind;
    if (cfg_.header_design == HeaderDesign::Static) {
        StaticHeader h;
        BitString bits;
        switch (o.kind) {
        case K::Req:
            h = sh::Request{nho, fmt_, o.a, cfg_.version};
            bits = encode_static(h);
            break;
        case K::Dat: {
            const auto& seg = segments_[o.index];
            h = sh::Data{nho, static_cast<std::uint8_t>(seg.size())};
            bits = encode_static(h);
            bits.append_bytes(seg);
            break;
        }
        case K::Res:
            h = sh::Response{nho, static_cast<Command>(o.a)};
            bits = encode_static(h);
            break;
        default:
            throw std::logic_error("element not part of the static design");
        }
        summary = describe(h);
        if (o.kind == K::Dat) summary += "#" + std::to_string(o.index);
        return bits;
    }

    DynChunk c;
    switch (o.kind) {
    case K::Bom: c = DynChunk::bom(); break;
    case K::Eom: c = DynChunk::eom(); break;
    case K::Len: c = DynChunk::len(o.a); break;
    case K::Ver: c = DynChunk::ver(o.a); break;
    case K::Fmt: c = DynChunk::fmt(static_cast<DataFormat>(o.a)); break;
    case K::Nho: c = DynChunk::nho(nho); break;
    case K::Dat: c = DynChunk::dat(segments_[o.index]); break;
    case K::Res: {
        BitString bits = encode_chunk(DynChunk::res(static_cast<Command>(o.a)));
        bits.append(encode_chunk(DynChunk::len(2)));
        const std::uint8_t idx[2] = {static_cast<std::uint8_t>(o.index >> 8),
                                     static_cast<std::uint8_t>(o.index)};
        bits.append(encode_chunk(DynChunk::dat(idx)));
        summary = "RES{" + to_string(static_cast<Command>(o.a)) + "," + std::to_string(o.index) + "}";
        return bits;
    }
    case K::Req: throw std::logic_error("element not part of the dynamic design");
    }
    summary = describe(c);
    if (o.kind == K::Dat) summary += "#" + std::to_string(o.index);
    return encode_chunk(c);
}

EmitHidden Session::next_outgoing() {
    const std::uint64_t p = out_index_++;
    EmitHidden e;
    e.offset_codes = out_schedule_.offset_at(p);
    if (queue_.empty()) {
        e.bits = dummy_bits(p, e.summary);
    } else {
        const Outgoing o = queue_.front();
        queue_.pop_front();
        e.bits = encode_outgoing(o, p, e.summary);
        using K = Outgoing::Kind;
        if (o.kind == K::Dat) {
            if (o.index < highest_sent_) ++stats_.retransmitted_dat;
            highest_sent_ = std::max(highest_sent_, std::size_t{o.index} + 1);
            next_dat_ = o.index + 1;
        } else if (o.kind == K::Bom) {
            next_dat_ = o.index;
        } else if (o.kind == K::Res) {
            if (role_ == Role::Receiver) {
                ++stats_.responses_sent;
                if (static_cast<Command>(o.a) == Command::Ok) ++stats_.oks_sent;
                else ++stats_.resends_sent;
            } else {
                ++stats_.probes_sent;
            }
        }
        if (role_ == Role::Sender && phase_ == Phase::RequestSent && queue_.empty()) {
            phase_ = Phase::AwaitingAck;
        }
    }
    if (e.bits.size() > cfg_.capacity_at(e.offset_codes)) {
        throw std::logic_error("element of " + std::to_string(e.bits.size()) +
                               " bits exceeds packet capacity");
    }
    ++stats_.packets_emitted;
    stats_.hidden_bits_emitted += e.bits.size();
    return e;
}

// ---------------------------------------------------------------------------
// Sender

std::vector<EngineAction> Session::start_request(std::span<const std::uint8_t> payload,
                                                 DataFormat fmt) {
    if (role_ != Role::Sender) throw ArgumentError("start_request on a receiving session");
    if (phase_ != Phase::Idle && phase_ != Phase::Done) {
        throw ArgumentError("a request is already in progress (" + to_string(phase_) + ")");
    }
    const std::size_t seg = cfg_.segment_size();
    const std::size_t count = (payload.size() + seg - 1) / seg;
    if (cfg_.header_design == HeaderDesign::Static && count > sh::kMaxCount) {
        throw SegmentationError("payload of " + std::to_string(payload.size()) + " bytes needs " +
                                std::to_string(count) + " DAT packets; a static request carries " +
                                "at most 63, split it into several requests");
    }
    if (count > 65534) {
        throw SegmentationError("payload needs more than 65534 segments");
    }
    segments_.clear();
    for (std::size_t off = 0; off < payload.size(); off += seg) {
        const std::size_t n = std::min(seg, payload.size() - off);
        segments_.emplace_back(payload.begin() + static_cast<std::ptrdiff_t>(off),
                               payload.begin() + static_cast<std::ptrdiff_t>(off + n));
    }
    seg_count_ = segments_.size();
    fmt_ = fmt;
    acked_ = 0;
    got_ok_ = false;
    attempts_ = 0;
    failed_ = false;
    highest_sent_ = 0;
    next_dat_ = 0;
    queue_.clear();
    if (cfg_.header_design == HeaderDesign::Static) {
        queue_static_run(true);
    } else {
        queue_dynamic_run(true);
    }
    phase_ = Phase::RequestSent;
    ++activity_;
    return {};
}

void Session::queue_static_run(bool with_request) {
    using K = Outgoing::Kind;
    if (with_request) {
        queue_.push_back({K::Req, static_cast<std::uint8_t>(seg_count_ - acked_), 0});
    }
    for (std::size_t k = acked_; k < window_end(acked_); ++k) {
        queue_.push_back({K::Dat, 0, static_cast<std::uint32_t>(k)});
    }
}

void Session::queue_dynamic_run(bool with_bom) {
    using K = Outgoing::Kind;
    if (with_bom) {
        queue_.push_back({K::Bom, 0, static_cast<std::uint32_t>(acked_)});
        hdrs_in_flight_ = false;
        if (!confirmed_version_ || *confirmed_version_ != cfg_.version) {
            queue_.push_back({K::Ver, cfg_.version, 0});
            hdrs_in_flight_ = true;
        }
        if (!confirmed_fmt_ || *confirmed_fmt_ != fmt_) {
            queue_.push_back({K::Fmt, static_cast<std::uint8_t>(fmt_), 0});
            hdrs_in_flight_ = true;
        }
        if (cfg_.placement.mode == PlacementMode::Chained && !confirmed_nho_) {
            queue_.push_back({K::Nho, 0, 0});
            hdrs_in_flight_ = true;
        }
    }
    const std::size_t end = window_end(acked_);
    for (std::size_t k = acked_; k < end; ++k) {
        const auto n = static_cast<std::uint8_t>(segments_[k].size());
        queue_.push_back({K::Len, n, 0});
        queue_.push_back({K::Dat, 0, static_cast<std::uint32_t>(k)});
    }
    if (end == seg_count_) {
        queue_.push_back({K::Eom, 0, 0});
    }
}

void Session::queue_response(Command cmd, std::uint32_t index) {
    queue_.push_back({Outgoing::Kind::Res, static_cast<std::uint8_t>(cmd), index});
}

bool Session::count_attempt(std::vector<EngineAction>& out) {
    if (++attempts_ > cfg_.resend_limit) {
        failed_ = true;
        phase_ = Phase::Idle;
        queue_.clear();
        out.emplace_back(NotifyError{"resend limit of " + std::to_string(cfg_.resend_limit) +
                                         " exceeded; request aborted",
                                     true});
        return false;
    }
    return true;
}

void Session::sender_on_ok(std::optional<std::uint32_t> index, std::vector<EngineAction>& out) {
    (void)out;
    if (phase_ != Phase::RequestSent && phase_ != Phase::AwaitingAck) return;
    std::size_t new_acked;
    bool final;
    if (cfg_.header_design == HeaderDesign::Static) {
        new_acked = window_end(acked_);
        final = new_acked == seg_count_;
    } else {
        const std::size_t i = *index;
        if (i <= acked_ || i > seg_count_ + 1) return;
        final = i == seg_count_ + 1;
        new_acked = std::min(i, seg_count_);
        if (hdrs_in_flight_) {
            confirmed_version_ = cfg_.version;
            confirmed_fmt_ = fmt_;
            if (cfg_.placement.mode == PlacementMode::Chained) confirmed_nho_ = true;
            hdrs_in_flight_ = false;
        }
    }
    got_ok_ = true;
    attempts_ = 0;
    acked_ = new_acked;
    ++activity_;
    if (final) {
        queue_.clear();
        phase_ = Phase::Done;
        ++stats_.requests_completed;
        return;
    }
    if (cfg_.header_design == HeaderDesign::Static) {
        const bool mid_run = std::any_of(queue_.begin(), queue_.end(), [](const Outgoing& o) {
            return o.kind == Outgoing::Kind::Dat;
        });
        queue_.clear();
        queue_static_run(mid_run);
    } else if (queue_.empty()) {
        if (next_dat_ != acked_) return; // stream position unknown; the probe will resync
        queue_dynamic_run(false);
    }
    phase_ = queue_.empty() ? Phase::AwaitingAck : Phase::RequestSent;
}

void Session::sender_on_resend(std::optional<std::uint32_t> index, std::vector<EngineAction>& out) {
    if (phase_ != Phase::RequestSent && phase_ != Phase::AwaitingAck) return;
    ++stats_.resends_received;
    if (cfg_.header_design == HeaderDesign::Dynamic) {
        const std::size_t i = *index;
        if (i < acked_ || i > seg_count_) return;
        if (i > acked_) {
            acked_ = i;
            attempts_ = 0;
            if (hdrs_in_flight_) {
                confirmed_version_ = cfg_.version;
                confirmed_fmt_ = fmt_;
                if (cfg_.placement.mode == PlacementMode::Chained) confirmed_nho_ = true;
                hdrs_in_flight_ = false;
            }
        }
    }
    if (!count_attempt(out)) return;
    ++activity_;
    queue_.clear();
    if (cfg_.header_design == HeaderDesign::Static) {
        queue_static_run(true);
    } else {
        queue_dynamic_run(true);
    }
    phase_ = Phase::RequestSent;
}

std::vector<EngineAction> Session::handle_timeout() {
    std::vector<EngineAction> out;
    if (!awaiting_response()) return out;
    if (!count_attempt(out)) return out;
    ++activity_;
    // Any confirmed progress means the receiver holds this message, so in the
    // final window an OK probe cannot be mistaken for a previous one.
    const Command cmd = final_window() && (got_ok_ || acked_ > 0) ? Command::Ok : Command::Resend;
    queue_response(cmd, static_cast<std::uint32_t>(acked_));
    phase_ = Phase::AwaitingAck;
    return out;
}

// ---------------------------------------------------------------------------
// Receiver

void Session::receiver_resend(std::uint32_t index) {
    queue_response(Command::Resend, index);
    last_resend_index_ = index;
}

void Session::complete(std::vector<EngineAction>& out) {
    std::vector<std::uint8_t> payload;
    for (const auto& s : segments_) payload.insert(payload.end(), s.begin(), s.end());
    const DataFormat fmt = cfg_.header_design == HeaderDesign::Static
                               ? fmt_
                               : rx_ctx_.format.value_or(DataFormat::Binary);
    if (dedupe_armed_ && last_fmt_ == fmt && is_resent_tail()) {
        ++stats_.suppressed_duplicates;
    } else {
        ++stats_.deliveries;
        out.emplace_back(Deliver{payload, fmt});
    }
    dedupe_armed_ = false;
    dirty_ = false;
    last_segments_ = segments_;
    last_fmt_ = fmt;
    ++stats_.requests_completed;
    phase_ = Phase::Done;
    anchor_.reset();
}

bool Session::is_resent_tail() const {
    // A sender that missed the final OK resends from the start of its last
    // unacknowledged window, so a duplicate is a window-aligned tail.
    if (segments_.empty() || segments_.size() > last_segments_.size()) return false;
    const std::size_t k0 = last_segments_.size() - segments_.size();
    if (k0 % cfg_.ack_every_n != 0) return false;
    return std::equal(segments_.begin(), segments_.end(), last_segments_.begin() + static_cast<std::ptrdiff_t>(k0));
}

void Session::static_new_request(const sh::Request& r, std::uint64_t p,
                                 std::vector<EngineAction>& out) {
    seg_count_ = r.cnt;
    fmt_ = r.fmt;
    segments_.assign(seg_count_, {});
    have_.assign(seg_count_, false);
    window_start_ = 0;
    dirty_ = false;
    phase_ = Phase::Receiving;
    if (seg_count_ == 0) {
        queue_response(Command::Ok, 0);
        complete(out);
        return;
    }
    anchor_ = Anchor{p + 1, 0, window_end(0)};
}

void Session::static_check_run(std::uint64_t p, std::vector<EngineAction>& out) {
    if (!anchor_ || p < anchor_->first_packet) return;
    const std::size_t ws = window_start_;
    const std::size_t we = window_end(ws);
    bool complete_window = true;
    for (std::size_t k = ws; k < we; ++k) complete_window = complete_window && have_[k];
    const std::uint64_t last =
        anchor_->first_packet + (anchor_->end_segment - anchor_->first_segment) - 1;
    if (complete_window) {
        queue_response(Command::Ok, 0);
        window_start_ = we;
        if (window_start_ == seg_count_) {
            complete(out);
        } else if (p >= last) {
            // The sender starts the next window right after hearing this OK.
            anchor_ = Anchor{p + 1, we, window_end(we)};
        } else {
            // Completed before the run ended: if the OK is lost the sender keeps
            // sending the old run, so only a fresh REQ anchors the next window.
            anchor_.reset();
            dirty_ = false;
        }
        return;
    }
    if (p >= last) {
        receiver_resend(0);
        anchor_.reset();
        dirty_ = false;
    }
}

void Session::static_receive(const StaticHeader& h, const BitString& bits, std::size_t consumed,
                             std::uint64_t p, std::vector<EngineAction>& out) {
    std::visit([&](const auto& v) { announced_ = std::make_pair(p + 1, unsigned{v.nho}); }, h);

    if (const auto* r = std::get_if<sh::Request>(&h)) {
        if (phase_ == Phase::Receiving && r->cnt <= seg_count_ && r->fmt == fmt_) {
            const std::size_t k0 = seg_count_ - r->cnt;
            if (k0 <= window_start_ && k0 % cfg_.ack_every_n == 0 && k0 < seg_count_) {
                window_start_ = k0;
                anchor_ = Anchor{p + 1, k0, window_end(k0)};
                dirty_ = false;
                return;
            }
        }
        static_new_request(*r, p, out);
        return;
    }

    if (const auto* d = std::get_if<sh::Data>(&h)) {
        if (phase_ != Phase::Receiving || !anchor_ || p < anchor_->first_packet) {
            if (!dirty_) {
                dirty_ = true;
                receiver_resend(0);
            }
            if (phase_ == Phase::Done) dedupe_armed_ = true;
            return;
        }
        const std::size_t k = anchor_->first_segment + (p - anchor_->first_packet);
        if (k < anchor_->end_segment) {
            if (consumed + std::size_t{d->len} * 8 > bits.size()) {
                ++stats_.decode_errors;
                out.emplace_back(NotifyError{"DAT payload exceeds packet capacity", false});
                return;
            }
            segments_[k] = bits.read_bytes(consumed, d->len);
            have_[k] = true;
        }
        static_check_run(p, out);
        return;
    }

    if (const auto* r = std::get_if<sh::Response>(&h)) {
        // Status probe from the sender.
        if (phase_ == Phase::Receiving) {
            receiver_resend(0);
            anchor_.reset();
            dirty_ = false;
        } else if (phase_ == Phase::Done && r->cmd == Command::Ok) {
            queue_response(Command::Ok, 0);
        } else {
            receiver_resend(0);
            if (phase_ == Phase::Done) dedupe_armed_ = true;
        }
        return;
    }

    // Dummy: inside an anchored run it means the run is broken or over.
    if (phase_ == Phase::Receiving && anchor_ && p >= anchor_->first_packet) {
        receiver_resend(0);
        anchor_.reset();
        dirty_ = false;
    }
}

void Session::dynamic_begin(std::uint64_t p) {
    phase_ = Phase::Receiving;
    segments_.clear();
    stopped_ = false;
    dirty_ = false;
    last_packet_ = p;
    last_resend_index_.reset();
}

void Session::dynamic_probe(Command cmd, std::vector<EngineAction>& out) {
    (void)out;
    if (phase_ == Phase::Receiving) {
        stopped_ = true;
        receiver_resend(static_cast<std::uint32_t>(segments_.size()));
    } else if (phase_ == Phase::Done && cmd == Command::Ok) {
        queue_response(Command::Ok, static_cast<std::uint32_t>(seg_count_ + 1));
    } else {
        receiver_resend(0);
        if (phase_ == Phase::Done) dedupe_armed_ = true;
    }
}

void Session::dynamic_receive(const BitString& bits, std::uint64_t p,
                              std::vector<EngineAction>& out) {
    const DecodedChunk dc = decode_chunk(bits, rx_ctx_);
    const DynChunk& c = dc.chunk;

    if (c.ht == ChunkType::Res) {
        const auto cmd = c.val.read_uint(0, 2);
        if (cmd > 1) throw ProtocolError("undefined RES command " + std::to_string(cmd));
        dynamic_probe(static_cast<Command>(cmd), out);
        return;
    }
    if (c.is_bom()) {
        if (phase_ == Phase::Receiving && last_resend_index_) {
            segments_.resize(std::min<std::size_t>(*last_resend_index_, segments_.size()));
            stopped_ = false;
            dirty_ = false;
            last_packet_ = p;
        } else {
            dynamic_begin(p);
        }
        return;
    }
    if (phase_ != Phase::Receiving) {
        if (c.ht != ChunkType::Dmy && !dirty_) {
            dirty_ = true;
            receiver_resend(0);
        }
        if (c.ht != ChunkType::Dmy && phase_ == Phase::Done) dedupe_armed_ = true;
        return;
    }
    if (stopped_ || p <= last_packet_) return;
    if (p != last_packet_ + 1) {
        stopped_ = true;
        receiver_resend(static_cast<std::uint32_t>(segments_.size()));
        return;
    }
    last_packet_ = p;
    rx_ctx_ = dc.context;
    switch (c.ht) {
    case ChunkType::Nho:
        announced_ = std::make_pair(p + 1, unsigned{*rx_ctx_.next_offset_codes});
        break;
    case ChunkType::Dat:
        segments_.push_back(c.val.read_bytes(0, c.val.size() / 8));
        if (segments_.size() % cfg_.ack_every_n == 0) {
            queue_response(Command::Ok, static_cast<std::uint32_t>(segments_.size()));
        }
        break;
    case ChunkType::Req: // EOM
        seg_count_ = segments_.size();
        queue_response(Command::Ok, static_cast<std::uint32_t>(seg_count_ + 1));
        complete(out);
        break;
    default:
        break;
    }
}

std::vector<EngineAction> Session::handle_incoming(const BitString& bits, std::uint64_t p) {
    std::vector<EngineAction> out;
    try {
        if (cfg_.header_design == HeaderDesign::Static) {
            const auto [h, consumed] = decode_static(bits);
            if (role_ == Role::Sender) {
                std::visit([&](const auto& v) { announced_ = std::make_pair(p + 1, unsigned{v.nho}); },
                           h);
                if (const auto* r = std::get_if<sh::Response>(&h)) {
                    if (r->cmd == Command::Ok) sender_on_ok(std::nullopt, out);
                    else sender_on_resend(std::nullopt, out);
                }
            } else {
                static_receive(h, bits, consumed, p, out);
            }
        } else if (role_ == Role::Sender) {
            const DecodedChunk first = decode_chunk(bits, DecodeContext{});
            if (first.chunk.ht == ChunkType::Res) {
                const auto cmd = first.chunk.val.read_uint(0, 2);
                const DecodedChunk len = decode_chunk(bits, first.context, first.consumed);
                if (len.chunk.ht != ChunkType::Len || len.context.active_len_bytes != 2) {
                    throw ProtocolError("RES without a 2-byte index");
                }
                const DecodedChunk idx =
                    decode_chunk(bits, len.context, first.consumed + len.consumed);
                if (idx.chunk.ht != ChunkType::Dat) throw ProtocolError("RES without index DAT");
                const auto index = static_cast<std::uint32_t>(idx.chunk.val.read_uint(0, 16));
                if (cmd == 0) sender_on_ok(index, out);
                else if (cmd == 1) sender_on_resend(index, out);
                else throw ProtocolError("undefined RES command " + std::to_string(cmd));
            }
        } else {
            dynamic_receive(bits, p, out);
        }
    } catch (const Error& e) {
        ++stats_.decode_errors;
        out.emplace_back(NotifyError{std::string("undecodable header: ") + e.what(), false});
    }
    return out;
}

} // namespace mpstego
