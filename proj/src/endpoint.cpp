#include "mpstego/endpoint.hpp"

#include "mpstego/errors.hpp"
#include "mpstego/scenario.hpp"

#include <thread>

namespace mpstego {

namespace {

std::vector<std::uint8_t> frame_of(const EncodedStream& cover, std::size_t frame,
                                   unsigned frame_codes) {
    const std::size_t start = frame * frame_codes;
    return {cover.codes.begin() + static_cast<std::ptrdiff_t>(start),
            cover.codes.begin() + static_cast<std::ptrdiff_t>(start + frame_codes)};
}

RtpPacket make_packet(const SessionConfig& cfg, const StreamIdentity& id, std::uint64_t index,
                      Session& from, std::vector<std::uint8_t> codes) {
    const EmitHidden e = from.next_outgoing();
    embed_bits_into(codes, bits_per_code(cfg.codec), cfg.alg, e.offset_codes, e.bits);
    RtpPacket pkt;
    pkt.payload_type = rtp_payload_type(cfg.codec);
    pkt.sequence = static_cast<std::uint16_t>(id.initial_sequence + index);
    pkt.timestamp = static_cast<std::uint32_t>(id.initial_timestamp + index * cfg.frame_codes);
    pkt.ssrc = id.ssrc;
    pkt.payload = pack_codes(cfg.codec, codes);
    return pkt;
}

// Feeds one packet to `to`; returns false for datagrams of another stream.
bool accept(const SessionConfig& cfg, const StreamIdentity& id, SequenceUnwrapper& unwrap,
            Session& to, const RtpPacket& pkt, std::vector<EngineAction>& actions) {
    if (pkt.ssrc != id.ssrc || pkt.payload_type != rtp_payload_type(cfg.codec)) return false;
    const std::uint64_t index = unwrap.unwrap(pkt.sequence);
    const auto codes = unpack_codes(cfg.codec, pkt.payload, cfg.frame_codes);
    const BitString bits = extract_bits_from(codes, bits_per_code(cfg.codec), cfg.alg,
                                             to.incoming_offset(index), to.incoming_capacity(index));
    auto a = to.handle_incoming(bits, index);
    actions.insert(actions.end(), std::make_move_iterator(a.begin()),
                   std::make_move_iterator(a.end()));
    return true;
}

} // namespace

std::size_t packets_needed(const SessionConfig& cfg, std::size_t payload_bytes) {
    const std::size_t seg = cfg.segment_size();
    const std::size_t max = cfg.max_request_bytes();
    if (seg == 0 || max == 0) throw CapacityError("no payload fits a packet", 8);
    std::size_t total = 0;
    std::size_t left = payload_bytes;
    do {
        const std::size_t n = std::min(left, max);
        total += (n + seg - 1) / seg + 2;
        left -= n;
    } while (left > 0);
    return total;
}

LiveSenderResult run_live_sender(Channel& channel, const SessionConfig& cfg,
                                 const EncodedStream& cover, std::span<const std::uint8_t> payload,
                                 const LiveOptions& options) {
    cfg.validate();
    if (cover.codec != cfg.codec) throw ArgumentError("cover codec does not match --codec");
    const std::size_t frames = cover.codes.size() / cfg.frame_codes;
    const std::size_t needed = packets_needed(cfg, payload.size());
    if (needed > frames) {
        throw CapacityError("payload needs at least " + std::to_string(needed) +
                                " packets but the cover holds " + std::to_string(frames),
                            (needed - frames) * cfg.min_capacity());
    }

    const StreamIdentity out_id = StreamIdentity::from_seed(cfg.seed, 0);
    const StreamIdentity in_id = StreamIdentity::from_seed(cfg.seed, 1);
    SequenceUnwrapper unwrap(in_id.initial_sequence);
    Session s(cfg, Role::Sender);
    const unsigned timeout_ticks =
        options.timeout_packets ? options.timeout_packets
                                : default_timeout_ticks(cfg.codec, cfg.frame_codes);

    const auto requests = split_requests(cfg, payload);
    std::size_t next = 0;
    LiveSenderResult res;
    std::uint64_t last_activity = s.activity();
    unsigned stall = 0;
    std::vector<EngineAction> actions;

    auto finished = [&] {
        return (s.phase() == Phase::Idle || s.phase() == Phase::Done) && next == requests.size();
    };

    for (std::size_t t = 0; !s.failed(); ++t) {
        if (s.phase() == Phase::Idle || s.phase() == Phase::Done) {
            if (next < requests.size()) s.start_request(requests[next++]);
        }
        const bool done = finished();
        if (!done && t >= frames) {
            throw CapacityError("cover exhausted after " + std::to_string(frames) +
                                    " packets with " + std::to_string(s.stats().requests_completed) +
                                    " of " + std::to_string(requests.size()) + " requests done",
                                cfg.min_capacity());
        }
        if (done && t >= frames) break;

        if (s.awaiting_response()) {
            if (s.activity() != last_activity) {
                last_activity = s.activity();
                stall = 0;
            } else if (++stall >= timeout_ticks) {
                auto a = s.handle_timeout();
                actions.insert(actions.end(), a.begin(), a.end());
                last_activity = s.activity();
                stall = 0;
            }
        } else {
            last_activity = s.activity();
            stall = 0;
        }

        RtpPacket pkt = make_packet(cfg, out_id, t, s, frame_of(cover, t, cfg.frame_codes));
        pkt.marker = done;
        channel.send(pkt.serialize());
        ++res.packets;
        if (done) break;

        const auto deadline = std::chrono::steady_clock::now() + options.reply_timeout;
        while (true) {
            const auto now = std::chrono::steady_clock::now();
            if (now >= deadline) break;
            auto dg = channel.recv(std::chrono::duration_cast<std::chrono::milliseconds>(
                deadline - now + std::chrono::milliseconds(1)));
            if (!dg) break;
            RtpPacket reply;
            try {
                reply = RtpPacket::parse(*dg);
            } catch (const FormatError&) {
                continue;
            }
            if (accept(cfg, in_id, unwrap, s, reply, actions)) {
                ++res.replies;
                break;
            }
        }
        if (options.pace.count() > 0) std::this_thread::sleep_for(options.pace);
    }

    for (const auto& a : actions) {
        if (const auto* e = std::get_if<NotifyError>(&a)) res.errors.push_back(e->reason);
    }
    res.stats = s.stats();
    res.success = !s.failed() && next == requests.size() &&
                  res.stats.requests_completed == requests.size();
    return res;
}

LiveReceiverResult run_live_receiver(Channel& channel, const SessionConfig& cfg,
                                     const EncodedStream& cover, const LiveOptions& options) {
    cfg.validate();
    if (cover.codec != cfg.codec) throw ArgumentError("cover codec does not match --codec");
    const std::size_t frames = cover.codes.size() / cfg.frame_codes;
    if (frames == 0) throw CapacityError("reply cover holds no complete frame", cfg.frame_codes);

    const StreamIdentity in_id = StreamIdentity::from_seed(cfg.seed, 0);
    const StreamIdentity out_id = StreamIdentity::from_seed(cfg.seed, 1);
    SequenceUnwrapper unwrap(in_id.initial_sequence);
    Session r(cfg, Role::Receiver);

    LiveReceiverResult res;
    std::vector<RtpPacket> received;
    std::vector<EngineAction> actions;
    std::uint64_t out_index = 0;
    bool started = false;
    const auto first_wait = std::chrono::milliseconds(250);
    const auto opened = std::chrono::steady_clock::now();

    while (true) {
        auto dg = channel.recv(started ? options.idle_timeout : first_wait);
        if (!dg) {
            if (started) break;
            if (options.startup_timeout.count() > 0 &&
                std::chrono::steady_clock::now() - opened >= options.startup_timeout) {
                throw IoError("no sender traffic within the startup timeout");
            }
            continue;
        }
        RtpPacket pkt;
        try {
            pkt = RtpPacket::parse(*dg);
        } catch (const FormatError&) {
            continue;
        }
        if (!accept(cfg, in_id, unwrap, r, pkt, actions)) continue;
        started = true;
        ++res.packets;
        received.push_back(pkt);
        if (pkt.marker) break;
        RtpPacket reply = make_packet(cfg, out_id, out_index, r,
                                      frame_of(cover, out_index % frames, cfg.frame_codes));
        ++out_index;
        channel.send(reply.serialize());
    }

    for (auto& a : actions) {
        if (auto* d = std::get_if<Deliver>(&a)) {
            res.payload.insert(res.payload.end(), d->payload.begin(), d->payload.end());
            ++res.messages;
        }
    }
    if (!received.empty()) {
        auto [stream, gaps] = depacketize(received, cfg.codec, cfg.frame_codes);
        res.stream = std::move(stream);
        res.gaps = std::move(gaps);
    } else {
        res.stream.codec = cfg.codec;
    }
    res.stats = r.stats();
    return res;
}

} // namespace mpstego
