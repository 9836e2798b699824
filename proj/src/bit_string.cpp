#include "mpstego/bit_string.hpp"

#include "mpstego/errors.hpp"

namespace mpstego {

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes) {
    BitString out;
    out.append_bytes(bytes);
    return out;
}

BitString BitString::from_text(std::string_view text) {
    BitString out;
    for (char c : text) {
        if (c == '0' || c == '1') {
            out.push_back(c == '1');
        } else if (c != '.' && c != ' ' && c != '_') {
            throw ArgumentError(std::string("invalid bit character '") + c + "'");
        }
    }
    return out;
}

void BitString::append(const BitString& other) {
    bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

void BitString::append_uint(std::uint64_t value, unsigned width) {
    if (width > 64) {
        throw ArgumentError("append_uint: width exceeds 64");
    }
    for (unsigned i = width; i-- > 0;) {
        bits_.push_back(static_cast<std::uint8_t>((value >> i) & 1u));
    }
}

void BitString::append_bytes(std::span<const std::uint8_t> bytes) {
    bits_.reserve(bits_.size() + bytes.size() * 8);
    for (std::uint8_t b : bytes) {
        append_uint(b, 8);
    }
}

std::uint64_t BitString::read_uint(std::size_t pos, unsigned width) const {
    if (width > 64 || pos + width > bits_.size()) {
        throw TruncationError("read_uint: " + std::to_string(width) + " bits at " +
                              std::to_string(pos) + " exceed length " +
                              std::to_string(bits_.size()));
    }
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) {
        v = (v << 1) | bits_[pos + i];
    }
    return v;
}

BitString BitString::slice(std::size_t pos, std::size_t count) const {
    if (pos + count > bits_.size()) {
        throw TruncationError("slice beyond end of bit string");
    }
    BitString out;
    out.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(pos),
                     bits_.begin() + static_cast<std::ptrdiff_t>(pos + count));
    return out;
}

std::vector<std::uint8_t> BitString::read_bytes(std::size_t pos, std::size_t count_bytes) const {
    std::vector<std::uint8_t> out;
    out.reserve(count_bytes);
    for (std::size_t i = 0; i < count_bytes; ++i) {
        out.push_back(static_cast<std::uint8_t>(read_uint(pos + i * 8, 8)));
    }
    return out;
}

std::string BitString::to_text() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_) {
        s.push_back(b ? '1' : '0');
    }
    return s;
}

} // namespace mpstego
