#pragma once

#include "mpstego/bit_string.hpp"
#include "mpstego/mp_static.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace mpstego {

/// Dynamic header chunk types (3-bit HT).
enum class ChunkType : std::uint8_t {
    Req = 0b000, // VAL 0 = begin of message, 1 = end of message
    Res = 0b001,
    Dmy = 0b010,
    Dat = 0b011,
    Len = 0b100,
    Nho = 0b101,
    Fmt = 0b110,
    Ver = 0b111,
};

std::string to_string(ChunkType t);

/// Register file carried across packets. Each chunk of type LEN/FMT/VER/NHO
/// overwrites one register; all other chunks leave it untouched.
struct DecodeContext {
    std::optional<std::uint8_t> active_len_bytes;
    std::optional<std::uint8_t> version;
    std::optional<DataFormat> format;
    std::optional<std::uint8_t> next_offset_codes;

    friend bool operator==(const DecodeContext&, const DecodeContext&) = default;
};

struct DynChunk {
    ChunkType ht = ChunkType::Dmy;
    BitString val;

    static DynChunk bom();
    static DynChunk eom();
    static DynChunk res(Command cmd);
    static DynChunk dmy(std::uint16_t bits9);
    static DynChunk len(std::uint8_t bytes);
    static DynChunk nho(std::uint8_t offset);
    static DynChunk fmt(DataFormat f);
    static DynChunk ver(std::uint8_t v);
    static DynChunk dat(std::span<const std::uint8_t> payload);

    bool is_bom() const;
    bool is_eom() const;

    friend bool operator==(const DynChunk&, const DynChunk&) = default;
};

constexpr unsigned kChunkTypeBits = 3;

/// VAL width for every type except DAT (whose width comes from the LEN register).
unsigned fixed_val_width(ChunkType t);

/// Total encoded width of a chunk in bits (HT + VAL).
inline std::size_t chunk_width(const DynChunk& c) { return kChunkTypeBits + c.val.size(); }

/// HT then VAL, MSB-first. Throws EncodingError on width mismatch.
BitString encode_chunk(const DynChunk& c);

struct DecodedChunk {
    DynChunk chunk;
    DecodeContext context;
    std::size_t consumed = 0;
};

/// Decodes one chunk at `pos` and returns the updated context.
/// DAT without an active LEN is a ProtocolError; short input a TruncationError.
DecodedChunk decode_chunk(const BitString& bits, const DecodeContext& ctx, std::size_t pos = 0);

struct PlanOptions {
    bool send_ver = false;
    bool send_fmt = false;
    bool send_nho = false;
    std::uint8_t version = 1;
    DataFormat format = DataFormat::Binary;
    std::uint8_t next_offset = 0;
    /// Upper bound on bytes per DAT; 0 means capacity-limited only.
    std::size_t segment_bytes = 0;
};

/// Largest DAT segment (bytes) that fits one packet on its own.
std::size_t max_dynamic_segment(std::size_t per_packet_capacity, std::size_t segment_bytes = 0);

/// One chunk per packet: BOM, optional VER/FMT/NHO, (LEN, DAT)+, EOM.
std::vector<DynChunk> plan_request(std::span<const std::uint8_t> payload,
                                   std::size_t per_packet_capacity, const PlanOptions& opts);

std::vector<BitString> plan_request_chunks(std::span<const std::uint8_t> payload,
                                           std::size_t per_packet_capacity,
                                           const PlanOptions& opts);

/// Header bits of a plan: everything except DAT values.
std::size_t dynamic_header_bits(const std::vector<DynChunk>& plan);

/// Packet plan of the static design for a payload of `payload_bytes`:
/// REQ{cnt} followed by its DATs, repeated when more than 63 segments are needed.
struct StaticPlanEntry {
    StaticHeader header;
    std::size_t payload_bytes = 0;
};

std::size_t max_static_segment(std::size_t per_packet_capacity, std::size_t segment_bytes = 0);

std::vector<StaticPlanEntry> plan_static_request(std::size_t payload_bytes,
                                                 std::size_t per_packet_capacity,
                                                 std::size_t segment_bytes = 0);

std::size_t static_header_bits(const std::vector<StaticPlanEntry>& plan);

std::string describe(const DynChunk& c);

} // namespace mpstego
