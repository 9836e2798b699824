#include "mpstego/mp_dynamic.hpp"

#include "mpstego/errors.hpp"

#include <algorithm>
#include <sstream>

namespace mpstego {

namespace {

BitString uint_bits(std::uint64_t v, unsigned width) {
    BitString b;
    b.append_uint(v, width);
    return b;
}

} // namespace

std::string to_string(ChunkType t) {
    switch (t) {
    case ChunkType::Req: return "REQ";
    case ChunkType::Res: return "RES";
    case ChunkType::Dmy: return "DMY";
    case ChunkType::Dat: return "DAT";
    case ChunkType::Len: return "LEN";
    case ChunkType::Nho: return "NHO";
    case ChunkType::Fmt: return "FMT";
    case ChunkType::Ver: return "VER";
    }
    return "?";
}

unsigned fixed_val_width(ChunkType t) {
    switch (t) {
    case ChunkType::Req: return 1;
    case ChunkType::Res: return 2;
    case ChunkType::Dmy: return 9;
    case ChunkType::Len: return 8;
    case ChunkType::Nho: return 5;
    case ChunkType::Fmt: return 1;
    case ChunkType::Ver: return 2;
    case ChunkType::Dat: break;
    }
    throw ArgumentError("DAT has no fixed VAL width");
}

DynChunk DynChunk::bom() { return {ChunkType::Req, uint_bits(0, 1)}; }
DynChunk DynChunk::eom() { return {ChunkType::Req, uint_bits(1, 1)}; }
DynChunk DynChunk::res(Command cmd) {
    return {ChunkType::Res, uint_bits(static_cast<unsigned>(cmd), 2)};
}
DynChunk DynChunk::dmy(std::uint16_t bits9) { return {ChunkType::Dmy, uint_bits(bits9 & 0x1FF, 9)}; }
DynChunk DynChunk::len(std::uint8_t bytes) { return {ChunkType::Len, uint_bits(bytes, 8)}; }
DynChunk DynChunk::nho(std::uint8_t offset) {
    if (offset > 31) {
        throw EncodingError("NHO", "offset " + std::to_string(offset) + " does not fit 5 bits");
    }
    return {ChunkType::Nho, uint_bits(offset, 5)};
}
DynChunk DynChunk::fmt(DataFormat f) {
    return {ChunkType::Fmt, uint_bits(static_cast<unsigned>(f), 1)};
}
DynChunk DynChunk::ver(std::uint8_t v) {
    if (v > 3) {
        throw EncodingError("VER", "version " + std::to_string(v) + " does not fit 2 bits");
    }
    return {ChunkType::Ver, uint_bits(v, 2)};
}
DynChunk DynChunk::dat(std::span<const std::uint8_t> payload) {
    return {ChunkType::Dat, BitString::from_bytes(payload)};
}

bool DynChunk::is_bom() const { return ht == ChunkType::Req && val.size() == 1 && !val[0]; }
bool DynChunk::is_eom() const { return ht == ChunkType::Req && val.size() == 1 && val[0]; }

BitString encode_chunk(const DynChunk& c) {
    if (c.ht == ChunkType::Dat) {
        if (c.val.size() % 8 != 0 || c.val.size() / 8 > 255) {
            throw EncodingError("VAL", "DAT value must be a whole number of bytes (<= 255)");
        }
    } else if (c.val.size() != fixed_val_width(c.ht)) {
        throw EncodingError("VAL", to_string(c.ht) + " expects " +
                                       std::to_string(fixed_val_width(c.ht)) + " bits, got " +
                                       std::to_string(c.val.size()));
    }
    BitString out;
    out.append_uint(static_cast<unsigned>(c.ht), kChunkTypeBits);
    out.append(c.val);
    return out;
}

DecodedChunk decode_chunk(const BitString& bits, const DecodeContext& ctx, std::size_t pos) {
    if (pos + kChunkTypeBits > bits.size()) {
        throw TruncationError("dynamic chunk: fewer than 3 bits for HT");
    }
    const auto ht = static_cast<ChunkType>(bits.read_uint(pos, kChunkTypeBits));
    std::size_t width = 0;
    if (ht == ChunkType::Dat) {
        if (!ctx.active_len_bytes) {
            throw ProtocolError("DAT chunk without an active LEN");
        }
        width = std::size_t{*ctx.active_len_bytes} * 8;
    } else {
        width = fixed_val_width(ht);
    }
    const std::size_t start = pos + kChunkTypeBits;
    if (start + width > bits.size()) {
        throw TruncationError("dynamic chunk " + to_string(ht) + " needs " + std::to_string(width) +
                              " value bits, " + std::to_string(bits.size() - start) + " available");
    }

    DecodedChunk out;
    out.chunk.ht = ht;
    out.chunk.val = bits.slice(start, width);
    out.context = ctx;
    out.consumed = kChunkTypeBits + width;

    switch (ht) {
    case ChunkType::Len:
        out.context.active_len_bytes = static_cast<std::uint8_t>(out.chunk.val.read_uint(0, 8));
        break;
    case ChunkType::Ver:
        out.context.version = static_cast<std::uint8_t>(out.chunk.val.read_uint(0, 2));
        break;
    case ChunkType::Fmt:
        out.context.format = static_cast<DataFormat>(out.chunk.val.read_uint(0, 1));
        break;
    case ChunkType::Nho:
        out.context.next_offset_codes = static_cast<std::uint8_t>(out.chunk.val.read_uint(0, 5));
        break;
    default:
        break;
    }
    return out;
}

std::size_t max_dynamic_segment(std::size_t per_packet_capacity, std::size_t segment_bytes) {
    std::size_t fit = per_packet_capacity > kChunkTypeBits
                          ? (per_packet_capacity - kChunkTypeBits) / 8
                          : 0;
    fit = std::min<std::size_t>(fit, 255);
    if (segment_bytes > 0) {
        fit = std::min(fit, segment_bytes);
    }
    return fit;
}

std::vector<DynChunk> plan_request(std::span<const std::uint8_t> payload,
                                   std::size_t per_packet_capacity, const PlanOptions& opts) {
    // LEN (11 bits) is the widest mandatory non-data chunk; DMY needs 12.
    if (per_packet_capacity < 12) {
        throw CapacityError("per-packet capacity " + std::to_string(per_packet_capacity) +
                                " bits is below the 12-bit minimum",
                            12 - per_packet_capacity);
    }
    const std::size_t seg = max_dynamic_segment(per_packet_capacity, opts.segment_bytes);
    if (seg == 0 && !payload.empty()) {
        throw CapacityError("no room for a DAT chunk carrying one byte", 11 - per_packet_capacity);
    }

    std::vector<DynChunk> plan;
    plan.push_back(DynChunk::bom());
    if (opts.send_ver) plan.push_back(DynChunk::ver(opts.version));
    if (opts.send_fmt) plan.push_back(DynChunk::fmt(opts.format));
    if (opts.send_nho) plan.push_back(DynChunk::nho(opts.next_offset));

    for (std::size_t off = 0; off < payload.size(); off += seg) {
        const std::size_t n = std::min(seg, payload.size() - off);
        plan.push_back(DynChunk::len(static_cast<std::uint8_t>(n)));
        plan.push_back(DynChunk::dat(payload.subspan(off, n)));
    }
    plan.push_back(DynChunk::eom());
    return plan;
}

std::vector<BitString> plan_request_chunks(std::span<const std::uint8_t> payload,
                                           std::size_t per_packet_capacity,
                                           const PlanOptions& opts) {
    std::vector<BitString> out;
    for (const auto& c : plan_request(payload, per_packet_capacity, opts)) {
        out.push_back(encode_chunk(c));
    }
    return out;
}

std::size_t dynamic_header_bits(const std::vector<DynChunk>& plan) {
    std::size_t total = 0;
    for (const auto& c : plan) {
        total += c.ht == ChunkType::Dat ? kChunkTypeBits : chunk_width(c);
    }
    return total;
}

std::size_t max_static_segment(std::size_t per_packet_capacity, std::size_t segment_bytes) {
    std::size_t fit = per_packet_capacity > static_hdr::kDataBits
                          ? (per_packet_capacity - static_hdr::kDataBits) / 8
                          : 0;
    fit = std::min<std::size_t>(fit, 255);
    if (segment_bytes > 0) {
        fit = std::min(fit, segment_bytes);
    }
    return fit;
}

std::vector<StaticPlanEntry> plan_static_request(std::size_t payload_bytes,
                                                 std::size_t per_packet_capacity,
                                                 std::size_t segment_bytes) {
    if (per_packet_capacity < static_hdr::kRequestBits) {
        throw CapacityError("per-packet capacity below the 16-bit static request",
                            static_hdr::kRequestBits - per_packet_capacity);
    }
    const std::size_t seg = max_static_segment(per_packet_capacity, segment_bytes);
    if (seg == 0 && payload_bytes > 0) {
        throw CapacityError("no room for a DAT header plus one byte",
                            static_hdr::kDataBits + 8 - per_packet_capacity);
    }
    std::vector<StaticPlanEntry> plan;
    std::size_t remaining = payload_bytes;
    do {
        const std::size_t segments_left = seg == 0 ? 0 : (remaining + seg - 1) / seg;
        const std::size_t cnt = std::min<std::size_t>(segments_left, static_hdr::kMaxCount);
        plan.push_back({static_hdr::Request{0, DataFormat::Binary, static_cast<std::uint8_t>(cnt), 1}, 0});
        for (std::size_t i = 0; i < cnt; ++i) {
            const std::size_t n = std::min(seg, remaining);
            plan.push_back({static_hdr::Data{0, static_cast<std::uint8_t>(n)}, n});
            remaining -= n;
        }
    } while (remaining > 0);
    return plan;
}

std::size_t static_header_bits(const std::vector<StaticPlanEntry>& plan) {
    std::size_t total = 0;
    for (const auto& e : plan) {
        total += static_width(e.header);
    }
    return total;
}

std::string describe(const DynChunk& c) {
    std::ostringstream os;
    if (c.is_bom()) return "BOM";
    if (c.is_eom()) return "EOM";
    os << to_string(c.ht);
    if (c.ht == ChunkType::Dat) {
        os << "{" << c.val.size() / 8 << "B}";
    } else if (c.ht != ChunkType::Dmy) {
        os << "{" << c.val.read_uint(0, static_cast<unsigned>(c.val.size())) << "}";
    }
    return os.str();
}

} // namespace mpstego
