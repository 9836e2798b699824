#pragma once

#include "mpstego/bit_string.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>

namespace mpstego {

enum class DataFormat : std::uint8_t { Text = 0, Binary = 1 };
enum class Command : std::uint8_t { Ok = 0, Resend = 1 };

std::string to_string(DataFormat fmt);
std::string to_string(Command cmd);

/// Static micro-protocol header variants. Wire layout, MSB-first:
///
///   Request   HT=00 | NHO:5 | FMT:1 | CNT:6 | VER:2   (16 bits)
///   Data      HT=01 | NHO:5 | LEN:8                   (15 bits)
///   Response  HT=10 | NHO:5 | CMD:2                   ( 9 bits)
///   Dummy     HT=11 | NHO:5 | DMY:9                   (16 bits)
///
/// A Data header is followed on the wire by LEN payload bytes, which are not
/// part of the header codec.
namespace static_hdr {

struct Request {
    std::uint8_t nho = 0;
    DataFormat fmt = DataFormat::Binary;
    std::uint8_t cnt = 0;
    std::uint8_t ver = 1;
    friend bool operator==(const Request&, const Request&) = default;
};

struct Data {
    std::uint8_t nho = 0;
    std::uint8_t len = 0;
    friend bool operator==(const Data&, const Data&) = default;
};

struct Response {
    std::uint8_t nho = 0;
    Command cmd = Command::Ok;
    friend bool operator==(const Response&, const Response&) = default;
};

struct Dummy {
    std::uint8_t nho = 0;
    std::uint16_t dmy = 0;
    friend bool operator==(const Dummy&, const Dummy&) = default;
};

constexpr unsigned kTypeBits = 2;
constexpr unsigned kNhoBits = 5;
constexpr unsigned kCntBits = 6;
constexpr unsigned kVerBits = 2;
constexpr unsigned kLenBits = 8;
constexpr unsigned kCmdBits = 2;
constexpr unsigned kDmyBits = 9;

constexpr unsigned kRequestBits = 16;
constexpr unsigned kDataBits = 15;
constexpr unsigned kResponseBits = 9;
constexpr unsigned kDummyBits = 16;

constexpr unsigned kMaxCount = (1u << kCntBits) - 1;

} // namespace static_hdr

using StaticHeader =
    std::variant<static_hdr::Request, static_hdr::Data, static_hdr::Response, static_hdr::Dummy>;

/// Encoded width of the header variant in bits.
unsigned static_width(const StaticHeader& h) noexcept;

/// Throws EncodingError naming the offending field.
BitString encode_static(const StaticHeader& h);

/// Decodes the header at `pos`. Returns the header and the bits consumed.
/// Never reads beyond the variant's width.
std::pair<StaticHeader, std::size_t> decode_static(const BitString& bits, std::size_t pos = 0);

std::string describe(const StaticHeader& h);

} // namespace mpstego
