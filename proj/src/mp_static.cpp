#include "mpstego/mp_static.hpp"

#include "mpstego/errors.hpp"

#include <sstream>

namespace mpstego {

namespace sh = static_hdr;

namespace {

void check_field(const char* name, std::uint64_t value, unsigned width) {
    if (value >= (1ull << width)) {
        throw EncodingError(name, "value " + std::to_string(value) + " does not fit " +
                                      std::to_string(width) + " bits");
    }
}

struct Encoder {
    BitString out;

    void operator()(const sh::Request& r) {
        check_field("NHO", r.nho, sh::kNhoBits);
        check_field("FMT", static_cast<unsigned>(r.fmt), 1);
        check_field("CNT", r.cnt, sh::kCntBits);
        check_field("VER", r.ver, sh::kVerBits);
        if (r.ver == 0) {
            throw EncodingError("VER", "version 00 is reserved");
        }
        out.append_uint(0b00, sh::kTypeBits);
        out.append_uint(r.nho, sh::kNhoBits);
        out.append_uint(static_cast<unsigned>(r.fmt), 1);
        out.append_uint(r.cnt, sh::kCntBits);
        out.append_uint(r.ver, sh::kVerBits);
    }
    void operator()(const sh::Data& d) {
        check_field("NHO", d.nho, sh::kNhoBits);
        out.append_uint(0b01, sh::kTypeBits);
        out.append_uint(d.nho, sh::kNhoBits);
        out.append_uint(d.len, sh::kLenBits);
    }
    void operator()(const sh::Response& r) {
        check_field("NHO", r.nho, sh::kNhoBits);
        check_field("CMD", static_cast<unsigned>(r.cmd), 1);
        out.append_uint(0b10, sh::kTypeBits);
        out.append_uint(r.nho, sh::kNhoBits);
        out.append_uint(static_cast<unsigned>(r.cmd), sh::kCmdBits);
    }
    void operator()(const sh::Dummy& d) {
        check_field("NHO", d.nho, sh::kNhoBits);
        check_field("DMY", d.dmy, sh::kDmyBits);
        out.append_uint(0b11, sh::kTypeBits);
        out.append_uint(d.nho, sh::kNhoBits);
        out.append_uint(d.dmy, sh::kDmyBits);
    }
};

} // namespace

std::string to_string(DataFormat fmt) {
    return fmt == DataFormat::Text ? "TEXT" : "BINARY";
}

std::string to_string(Command cmd) {
    return cmd == Command::Ok ? "OK" : "RESEND";
}

unsigned static_width(const StaticHeader& h) noexcept {
    switch (h.index()) {
    case 0: return sh::kRequestBits;
    case 1: return sh::kDataBits;
    case 2: return sh::kResponseBits;
    default: return sh::kDummyBits;
    }
}

BitString encode_static(const StaticHeader& h) {
    Encoder enc;
    std::visit(enc, h);
    return std::move(enc.out);
}

std::pair<StaticHeader, std::size_t> decode_static(const BitString& bits, std::size_t pos) {
    if (pos + sh::kTypeBits > bits.size()) {
        throw TruncationError("static header: fewer than 2 bits for HT");
    }
    const auto type = bits.read_uint(pos, sh::kTypeBits);
    const unsigned widths[] = {sh::kRequestBits, sh::kDataBits, sh::kResponseBits, sh::kDummyBits};
    const unsigned width = widths[type];
    if (pos + width > bits.size()) {
        throw TruncationError("static header: type " + std::to_string(type) + " needs " +
                              std::to_string(width) + " bits, " +
                              std::to_string(bits.size() - pos) + " available");
    }
    std::size_t p = pos + sh::kTypeBits;
    const auto nho = static_cast<std::uint8_t>(bits.read_uint(p, sh::kNhoBits));
    p += sh::kNhoBits;

    switch (type) {
    case 0: {
        sh::Request r;
        r.nho = nho;
        r.fmt = static_cast<DataFormat>(bits.read_uint(p, 1));
        r.cnt = static_cast<std::uint8_t>(bits.read_uint(p + 1, sh::kCntBits));
        r.ver = static_cast<std::uint8_t>(bits.read_uint(p + 1 + sh::kCntBits, sh::kVerBits));
        if (r.ver == 0) {
            throw ProtocolError("static request carries reserved version 00");
        }
        return {r, width};
    }
    case 1:
        return {sh::Data{nho, static_cast<std::uint8_t>(bits.read_uint(p, sh::kLenBits))}, width};
    case 2: {
        const auto cmd = bits.read_uint(p, sh::kCmdBits);
        if (cmd > 1) {
            throw ProtocolError("static response carries undefined command " + std::to_string(cmd));
        }
        return {sh::Response{nho, static_cast<Command>(cmd)}, width};
    }
    default:
        return {sh::Dummy{nho, static_cast<std::uint16_t>(bits.read_uint(p, sh::kDmyBits))}, width};
    }
}

std::string describe(const StaticHeader& h) {
    std::ostringstream os;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, sh::Request>) {
                os << "REQ{nho=" << int(v.nho) << ",fmt=" << to_string(v.fmt)
                   << ",cnt=" << int(v.cnt) << ",ver=" << int(v.ver) << "}";
            } else if constexpr (std::is_same_v<T, sh::Data>) {
                os << "DAT{nho=" << int(v.nho) << ",len=" << int(v.len) << "}";
            } else if constexpr (std::is_same_v<T, sh::Response>) {
                os << "RES{nho=" << int(v.nho) << ",cmd=" << to_string(v.cmd) << "}";
            } else {
                os << "DMY{nho=" << int(v.nho) << "}";
            }
        },
        h);
    return os.str();
}

} // namespace mpstego
