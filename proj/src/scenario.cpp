#include "mpstego/scenario.hpp"

#include "mpstego/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace mpstego {

unsigned default_timeout_ticks(CodecId codec, unsigned frame_codes) {
    const double frame_seconds = static_cast<double>(frame_codes) / nominal_rate_hz(codec);
    return std::max(1u, static_cast<unsigned>(std::ceil(0.2 / frame_seconds - 1e-9)));
}

std::string TranscriptReport::to_text() const {
    std::ostringstream os;
    char frac[32];
    std::snprintf(frac, sizeof frac, "%.3f%%", hidden_fraction * 100.0);
    os << "# scenario=" << scenario << " ticks=" << ticks << " packets=" << packets_sent
       << " hidden_bits=" << hidden_bits_total << " hidden_fraction=" << frac
       << " retransmissions=" << retransmissions << " responses=" << responses
       << " resends=" << resends << " requests=" << requests_completed
       << " bytes=" << bytes_delivered << "\n";
    for (const auto& r : records) {
        os << "t=" << r.tick << " dir=" << (r.from_sender ? "S>R" : "R>S") << " idx=" << r.index
           << " off=" << r.offset << " bits=" << r.hidden_bits << " lost=" << (r.lost ? 1 : 0)
           << " hdr=" << r.summary << "\n";
    }
    return os.str();
}

SimulatedLink::SimulatedLink(const SessionConfig& cfg, EncodedStream sender_cover,
                             EncodedStream receiver_cover, LinkOptions options)
    : cfg_(cfg), sender_(cfg, Role::Sender), receiver_(cfg, Role::Receiver),
      fwd_{std::move(sender_cover), StreamIdentity::from_seed(cfg.seed, 0), LossyLink(options.forward),
           SequenceUnwrapper(StreamIdentity::from_seed(cfg.seed, 0).initial_sequence)},
      back_{std::move(receiver_cover), StreamIdentity::from_seed(cfg.seed, 1),
            LossyLink(options.backward),
            SequenceUnwrapper(StreamIdentity::from_seed(cfg.seed, 1).initial_sequence)},
      opts_(options),
      timeout_ticks_(options.timeout_ticks ? options.timeout_ticks
                                           : default_timeout_ticks(cfg.codec, cfg.frame_codes)) {
    for (const Direction* d : {&fwd_, &back_}) {
        if (d->cover.codec != cfg.codec) {
            throw ArgumentError("cover codec does not match the session codec");
        }
        if (d->cover.codes.size() < cfg.frame_codes) {
            throw CapacityError("cover is shorter than one frame",
                                (cfg.frame_codes - d->cover.codes.size()) * bits_targeted(cfg.alg));
        }
    }
    stego_out_.codec = cover_out_.codec = cfg.codec;
}

std::vector<std::uint8_t> SimulatedLink::build_packet(Direction& d, Session& from,
                                                      std::uint64_t index, bool from_sender) {
    const EmitHidden e = from.next_outgoing();
    const std::size_t frames = d.cover.codes.size() / cfg_.frame_codes;
    const std::size_t start = (d.next_frame++ % frames) * cfg_.frame_codes;
    std::vector<std::uint8_t> codes(d.cover.codes.begin() + static_cast<std::ptrdiff_t>(start),
                                    d.cover.codes.begin() +
                                        static_cast<std::ptrdiff_t>(start + cfg_.frame_codes));
    if (from_sender) {
        cover_out_.codes.insert(cover_out_.codes.end(), codes.begin(), codes.end());
    }
    embed_bits_into(codes, bits_per_code(cfg_.codec), cfg_.alg, e.offset_codes, e.bits);
    if (from_sender) {
        stego_out_.codes.insert(stego_out_.codes.end(), codes.begin(), codes.end());
    }
    if (opts_.keep_records) {
        records_.push_back({tick_, from_sender, index, e.offset_codes, e.bits.size(), e.summary, false});
    }
    RtpPacket pkt;
    pkt.payload_type = rtp_payload_type(cfg_.codec);
    pkt.sequence = static_cast<std::uint16_t>(d.id.initial_sequence + index);
    pkt.timestamp = static_cast<std::uint32_t>(d.id.initial_timestamp + index * cfg_.frame_codes);
    pkt.ssrc = d.id.ssrc;
    pkt.payload = pack_codes(cfg_.codec, codes);
    return pkt.serialize();
}

void SimulatedLink::deliver(Direction& d, Session& to, std::vector<std::uint8_t> datagram) {
    const RtpPacket pkt = RtpPacket::parse(datagram);
    if (pkt.ssrc != d.id.ssrc) {
        throw StreamConfusionError("unexpected SSRC on simulated link");
    }
    const std::uint64_t index = d.unwrap.unwrap(pkt.sequence);
    const auto codes = unpack_codes(cfg_.codec, pkt.payload, cfg_.frame_codes);
    const BitString bits = extract_bits_from(codes, bits_per_code(cfg_.codec), cfg_.alg,
                                             to.incoming_offset(index), to.incoming_capacity(index));
    collect(to.handle_incoming(bits, index));
}

void SimulatedLink::collect(std::vector<EngineAction> actions) {
    for (auto& a : actions) {
        if (auto* d = std::get_if<Deliver>(&a)) delivered_.push_back(std::move(*d));
        else if (auto* e = std::get_if<NotifyError>(&a)) errors_.push_back(std::move(*e));
    }
}

void SimulatedLink::tick() {
    if (sender_.awaiting_response()) {
        if (sender_.activity() != last_activity_) {
            last_activity_ = sender_.activity();
            stall_ = 0;
        } else if (++stall_ >= timeout_ticks_) {
            collect(sender_.handle_timeout());
            last_activity_ = sender_.activity();
            stall_ = 0;
        }
    } else {
        last_activity_ = sender_.activity();
        stall_ = 0;
    }

    const std::size_t fwd_dropped = fwd_.link.dropped();
    auto out = build_packet(fwd_, sender_, tick_, true);
    for (auto& dg : fwd_.link.transmit(std::move(out))) deliver(fwd_, receiver_, std::move(dg));
    if (opts_.keep_records && fwd_.link.dropped() != fwd_dropped) records_.back().lost = true;

    const std::size_t back_dropped = back_.link.dropped();
    auto reply = build_packet(back_, receiver_, tick_, false);
    for (auto& dg : back_.link.transmit(std::move(reply))) deliver(back_, sender_, std::move(dg));
    if (opts_.keep_records && back_.link.dropped() != back_dropped) records_.back().lost = true;

    ++tick_;
}

TransferResult run_transfer(const SessionConfig& cfg, std::span<const std::uint8_t> payload,
                            const EncodedStream& cover, LinkOptions options,
                            std::size_t max_ticks) {
    SimulatedLink link(cfg, cover, cover, options);
    const auto requests = split_requests(cfg, payload);
    TransferResult res;
    std::size_t next = 0;
    while (link.ticks() < max_ticks) {
        Session& s = link.sender();
        if (s.failed()) break;
        if (s.phase() == Phase::Idle || s.phase() == Phase::Done) {
            if (next == requests.size()) break;
            s.start_request(requests[next++]);
        }
        link.tick();
    }
    res.requests = requests.size();
    res.ticks = link.ticks();
    res.sender = link.sender().stats();
    res.receiver = link.receiver().stats();
    for (const auto& d : link.deliveries()) {
        res.delivered.insert(res.delivered.end(), d.payload.begin(), d.payload.end());
    }
    for (const auto& e : link.errors()) res.errors.push_back(e.reason);
    res.success = !link.sender().failed() && next == requests.size() &&
                  res.sender.requests_completed == requests.size();
    return res;
}

TranscriptReport run_scenario(int id, const SessionConfig& base, const EncodedStream& cover,
                              const ScenarioOptions& options) {
    if (id < 1 || id > 3) throw ArgumentError("scenario must be 1, 2 or 3");
    SessionConfig cfg = base;
    if (id == 2 && cfg.segment_bytes == 0) cfg.segment_bytes = options.request_segment;
    cfg.validate();

    const std::size_t frames = cover.codes.size() / cfg.frame_codes;
    if (frames == 0) {
        throw CapacityError("cover holds no complete frame",
                            (cfg.frame_codes - cover.codes.size()) * bits_targeted(cfg.alg));
    }
    LinkOptions lo;
    lo.forward = options.forward;
    lo.backward = options.backward;
    lo.keep_records = options.keep_records;
    SimulatedLink link(cfg, cover, cover, lo);

    std::mt19937_64 rng(options.payload_seed);
    auto random_bytes = [&](std::size_t n) {
        std::vector<std::uint8_t> v(n);
        for (auto& b : v) b = static_cast<std::uint8_t>(rng());
        return v;
    };

    const std::size_t seg = cfg.segment_size();
    unsigned idle = 0;
    std::size_t needed = 0;
    for (std::size_t t = 0; t < frames; ++t) {
        Session& s = link.sender();
        const bool ready = !s.failed() && (s.phase() == Phase::Idle || s.phase() == Phase::Done);
        if (ready && id == 2) {
            if (idle >= options.dummies_between) {
                s.start_request(random_bytes(options.request_bytes));
                needed = (options.request_bytes + seg - 1) / seg + 2;
                idle = 0;
            } else {
                ++idle;
            }
        } else if (ready && id == 3) {
            const std::size_t remaining = frames - t;
            std::size_t segs = cfg.header_design == HeaderDesign::Static
                                   ? std::size_t{static_hdr::kMaxCount}
                                   : std::size_t{65534};
            const std::size_t margin = cfg.header_design == HeaderDesign::Static ? 4 : 8;
            // Dynamic segments each cost a LEN packet and a DAT packet.
            const std::size_t per_seg = cfg.header_design == HeaderDesign::Static ? 1 : 2;
            segs = std::min(segs, remaining > margin ? (remaining - margin) / per_seg : 0);
            if (segs > 0) {
                s.start_request(random_bytes(segs * seg));
            } else if (needed == 0) {
                needed = margin + 1;
            }
            if (needed == 0) needed = segs * per_seg + margin;
        }
        link.tick();
    }

    TranscriptReport r;
    r.scenario = id;
    r.ticks = link.ticks();
    r.packets_sent = link.sender().stats().packets_emitted;
    r.hidden_bits_total = link.sender().stats().hidden_bits_emitted;
    r.cover = link.sender_cover_sent();
    r.stego = link.sender_stego();
    r.hidden_fraction = hidden_fraction(r.hidden_bits_total, r.cover);
    r.retransmissions = link.sender().stats().retransmitted_dat;
    r.responses = link.receiver().stats().responses_sent;
    r.resends = link.receiver().stats().resends_sent;
    r.requests_completed = link.sender().stats().requests_completed;
    for (const auto& d : link.deliveries()) r.bytes_delivered += d.payload.size();
    r.records = link.records();

    if (id != 1 && r.requests_completed == 0) {
        const std::size_t short_packets = needed > frames ? needed - frames : 1;
        throw CapacityError("scenario " + std::to_string(id) + " completed no request in " +
                                std::to_string(frames) + " packets (" +
                                std::to_string(r.hidden_bits_total) + " hidden bits sent)",
                            short_packets * cfg.min_capacity());
    }
    return r;
}

} // namespace mpstego
