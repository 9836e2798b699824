#include "mpstego/transport.hpp"

#include "mpstego/errors.hpp"

#include <algorithm>
#include <map>

namespace mpstego {

std::vector<std::uint8_t> RtpPacket::serialize() const {
    std::vector<std::uint8_t> out(kHeaderBytes + payload.size());
    out[0] = 0x80; // V=2, P=0, X=0, CC=0
    out[1] = static_cast<std::uint8_t>((marker ? 0x80 : 0x00) | (payload_type & 0x7F));
    out[2] = static_cast<std::uint8_t>(sequence >> 8);
    out[3] = static_cast<std::uint8_t>(sequence);
    for (int i = 0; i < 4; ++i) {
        out[4 + i] = static_cast<std::uint8_t>(timestamp >> (24 - 8 * i));
        out[8 + i] = static_cast<std::uint8_t>(ssrc >> (24 - 8 * i));
    }
    std::copy(payload.begin(), payload.end(), out.begin() + kHeaderBytes);
    return out;
}

RtpPacket RtpPacket::parse(std::span<const std::uint8_t> d) {
    if (d.size() < kHeaderBytes) {
        throw FormatError("RTP datagram shorter than 12 bytes");
    }
    if ((d[0] >> 6) != 2) {
        throw FormatError("RTP version " + std::to_string(d[0] >> 6) + " is not 2");
    }
    const std::size_t csrc = d[0] & 0x0F;
    const std::size_t start = kHeaderBytes + 4 * csrc;
    if (d.size() < start) {
        throw FormatError("RTP datagram truncated inside CSRC list");
    }
    RtpPacket p;
    p.marker = (d[1] & 0x80) != 0;
    p.payload_type = d[1] & 0x7F;
    p.sequence = static_cast<std::uint16_t>((d[2] << 8) | d[3]);
    for (int i = 0; i < 4; ++i) {
        p.timestamp = (p.timestamp << 8) | d[4 + i];
        p.ssrc = (p.ssrc << 8) | d[8 + i];
    }
    p.payload.assign(d.begin() + static_cast<std::ptrdiff_t>(start), d.end());
    return p;
}

std::vector<std::uint8_t> pack_codes(CodecId codec, std::span<const std::uint8_t> codes) {
    if (bits_per_code(codec) == 8) {
        return {codes.begin(), codes.end()};
    }
    std::vector<std::uint8_t> out((codes.size() + 1) / 2, 0);
    for (std::size_t i = 0; i < codes.size(); ++i) {
        const auto nib = static_cast<std::uint8_t>(codes[i] & 0x0F);
        out[i / 2] |= (i % 2 == 0) ? static_cast<std::uint8_t>(nib << 4) : nib;
    }
    return out;
}

std::vector<std::uint8_t> unpack_codes(CodecId codec, std::span<const std::uint8_t> payload,
                                       std::size_t code_count) {
    if (bits_per_code(codec) == 8) {
        if (payload.size() < code_count) {
            throw FormatError("payload holds fewer codes than expected");
        }
        return {payload.begin(), payload.begin() + static_cast<std::ptrdiff_t>(code_count)};
    }
    if (payload.size() * 2 < code_count) {
        throw FormatError("payload holds fewer codes than expected");
    }
    std::vector<std::uint8_t> out(code_count);
    for (std::size_t i = 0; i < code_count; ++i) {
        out[i] = (i % 2 == 0) ? static_cast<std::uint8_t>(payload[i / 2] >> 4)
                              : static_cast<std::uint8_t>(payload[i / 2] & 0x0F);
    }
    return out;
}

StreamIdentity StreamIdentity::from_seed(std::uint64_t seed, unsigned direction) {
    std::mt19937_64 rng(seed * 2 + direction + 0x9E3779B97F4A7C15ull);
    StreamIdentity id;
    id.initial_sequence = static_cast<std::uint16_t>(rng());
    id.initial_timestamp = static_cast<std::uint32_t>(rng());
    id.ssrc = static_cast<std::uint32_t>(rng());
    return id;
}

std::vector<RtpPacket> packetize(const EncodedStream& stream, std::size_t frame_codes,
                                 const StreamIdentity& id) {
    if (stream.codes.empty()) {
        throw ArgumentError("packetize: empty stream");
    }
    if (frame_codes == 0) {
        throw ArgumentError("packetize: frame size must be positive");
    }
    std::vector<RtpPacket> out;
    std::uint16_t seq = id.initial_sequence;
    std::uint32_t ts = id.initial_timestamp;
    const std::span<const std::uint8_t> codes(stream.codes);
    for (std::size_t off = 0; off < codes.size(); off += frame_codes) {
        const std::size_t n = std::min(frame_codes, codes.size() - off);
        RtpPacket p;
        p.payload_type = rtp_payload_type(stream.codec);
        p.sequence = seq++;
        p.timestamp = ts;
        p.ssrc = id.ssrc;
        p.payload = pack_codes(stream.codec, codes.subspan(off, n));
        ts += static_cast<std::uint32_t>(frame_codes);
        out.push_back(std::move(p));
    }
    return out;
}

std::uint64_t SequenceUnwrapper::unwrap(std::uint16_t sequence) {
    const auto rel = static_cast<std::uint16_t>(sequence - initial_);
    if (!seen_) {
        seen_ = true;
        highest_ = rel;
        return rel;
    }
    // Pick the candidate in the 2^16 window closest to the highest index seen.
    const std::uint64_t epoch = highest_ & ~0xFFFFull;
    std::uint64_t best = epoch + rel;
    for (std::int64_t shift : {-1, 1}) {
        const std::int64_t cand = static_cast<std::int64_t>(epoch) + shift * 0x10000 + rel;
        if (cand < 0) continue;
        const auto c = static_cast<std::uint64_t>(cand);
        const auto dist = [&](std::uint64_t v) {
            return v > highest_ ? v - highest_ : highest_ - v;
        };
        if (dist(c) < dist(best)) best = c;
    }
    highest_ = std::max(highest_, best);
    return best;
}

std::pair<EncodedStream, GapReport> depacketize(const std::vector<RtpPacket>& packets,
                                                CodecId codec, std::size_t frame_codes,
                                                std::optional<std::size_t> total_codes) {
    EncodedStream out;
    out.codec = codec;
    GapReport report;
    if (packets.empty()) {
        return {out, report};
    }
    const std::uint32_t ssrc = packets.front().ssrc;
    for (const auto& p : packets) {
        if (p.ssrc != ssrc) {
            throw StreamConfusionError("packets from more than one SSRC");
        }
        if (p.payload_type != rtp_payload_type(codec)) {
            throw StreamConfusionError("payload type " + std::to_string(p.payload_type) +
                                       " does not match " + to_string(codec));
        }
    }

    // The lowest sequence (with wrap handling) anchors index 0.
    std::uint16_t base = packets.front().sequence;
    for (const auto& p : packets) {
        if (static_cast<std::int16_t>(p.sequence - base) < 0) base = p.sequence;
    }
    SequenceUnwrapper unwrap(base);
    std::map<std::uint64_t, const RtpPacket*> by_index;
    for (const auto& p : packets) {
        by_index.emplace(unwrap.unwrap(p.sequence), &p);
    }
    report.received = by_index.size();

    const std::uint64_t last = by_index.rbegin()->first;
    const std::uint8_t silence = silence_code(codec);
    const unsigned bpc = bits_per_code(codec);
    for (std::uint64_t i = 0; i <= last; ++i) {
        auto it = by_index.find(i);
        if (it == by_index.end()) {
            report.missing.push_back(i);
            out.codes.insert(out.codes.end(), frame_codes, silence);
            continue;
        }
        const auto& pl = it->second->payload;
        std::size_t n = bpc == 8 ? pl.size() : pl.size() * 2;
        if (i < last) n = std::min(n, frame_codes);
        auto codes = unpack_codes(codec, pl, n);
        out.codes.insert(out.codes.end(), codes.begin(), codes.end());
    }
    if (total_codes && out.codes.size() > *total_codes) {
        out.codes.resize(*total_codes);
    }
    return {out, report};
}

void LossModel::validate() const {
    if (!(loss_probability >= 0.0 && loss_probability < 1.0)) {
        throw ArgumentError("loss probability must be in [0, 1)");
    }
    if (!(reorder_probability >= 0.0 && reorder_probability < 1.0)) {
        throw ArgumentError("reorder probability must be in [0, 1)");
    }
}

LossyLink::LossyLink(LossModel model) : model_(model), rng_(model.seed) {
    model_.validate();
}

std::vector<std::vector<std::uint8_t>> LossyLink::transmit(std::vector<std::uint8_t> datagram) {
    ++sent_;
    std::vector<std::vector<std::uint8_t>> out;
    // Always draw both numbers so decisions depend only on the send index.
    const double drop_draw = unit_(rng_);
    const double reorder_draw = unit_(rng_);
    if (drop_draw < model_.loss_probability) {
        ++dropped_;
        return out;
    }
    if (held_) {
        out.push_back(std::move(datagram));
        out.push_back(std::move(*held_));
        held_.reset();
        return out;
    }
    if (reorder_draw < model_.reorder_probability) {
        held_ = std::move(datagram);
        return out;
    }
    out.push_back(std::move(datagram));
    return out;
}

std::vector<std::vector<std::uint8_t>> LossyLink::flush() {
    std::vector<std::vector<std::uint8_t>> out;
    if (held_) {
        out.push_back(std::move(*held_));
        held_.reset();
    }
    return out;
}

InMemoryChannel::InMemoryChannel(LossModel model) : link_(model) {}

void InMemoryChannel::send(std::vector<std::uint8_t> datagram) {
    std::lock_guard lock(mu_);
    if (closed_) {
        throw ChannelClosedError("send on closed channel");
    }
    for (auto& d : link_.transmit(std::move(datagram))) {
        queue_.push_back(std::move(d));
    }
    cv_.notify_all();
}

std::optional<std::vector<std::uint8_t>> InMemoryChannel::recv(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, timeout, [&] { return !queue_.empty() || closed_; });
    if (queue_.empty()) {
        if (closed_) throw ChannelClosedError("receive on closed, drained channel");
        return std::nullopt;
    }
    auto d = std::move(queue_.front());
    queue_.pop_front();
    return d;
}

std::optional<std::vector<std::uint8_t>> InMemoryChannel::try_recv() {
    std::lock_guard lock(mu_);
    if (queue_.empty()) {
        if (closed_) throw ChannelClosedError("receive on closed, drained channel");
        return std::nullopt;
    }
    auto d = std::move(queue_.front());
    queue_.pop_front();
    return d;
}

void InMemoryChannel::close() {
    std::lock_guard lock(mu_);
    if (!closed_) {
        for (auto& d : link_.flush()) queue_.push_back(std::move(d));
    }
    closed_ = true;
    cv_.notify_all();
}

std::size_t InMemoryChannel::dropped() const {
    std::lock_guard lock(mu_);
    return link_.dropped();
}

std::pair<std::string, std::uint16_t> parse_host_port(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
        throw ArgumentError("expected HOST:PORT, got '" + text + "'");
    }
    const std::string port_text = text.substr(colon + 1);
    unsigned long port = 0;
    try {
        std::size_t used = 0;
        port = std::stoul(port_text, &used);
        if (used != port_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw ArgumentError("invalid port in '" + text + "'");
    }
    if (port > 65535) {
        throw ArgumentError("port out of range in '" + text + "'");
    }
    return {text.substr(0, colon), static_cast<std::uint16_t>(port)};
}

} // namespace mpstego
