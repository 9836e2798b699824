#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mpstego {

/// Ordered bit sequence. Multi-bit values are written and read MSB-first.
class BitString {
public:
    BitString() = default;

    static BitString from_bytes(std::span<const std::uint8_t> bytes);
    /// Parses "0"/"1" characters; '.', ' ' and '_' are ignored as separators.
    static BitString from_text(std::string_view text);

    std::size_t size() const noexcept { return bits_.size(); }
    bool empty() const noexcept { return bits_.empty(); }
    bool operator[](std::size_t i) const { return bits_[i] != 0; }

    void push_back(bool bit) { bits_.push_back(bit ? 1 : 0); }
    void append(const BitString& other);
    /// Appends the low `width` bits of `value`, most significant first.
    void append_uint(std::uint64_t value, unsigned width);
    void append_bytes(std::span<const std::uint8_t> bytes);

    /// Reads `width` bits starting at `pos` as an unsigned integer.
    std::uint64_t read_uint(std::size_t pos, unsigned width) const;
    BitString slice(std::size_t pos, std::size_t count) const;
    /// Packs whole bytes starting at `pos`; `count_bytes * 8` bits must be available.
    std::vector<std::uint8_t> read_bytes(std::size_t pos, std::size_t count_bytes) const;

    std::string to_text() const;

    friend bool operator==(const BitString&, const BitString&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

} // namespace mpstego
