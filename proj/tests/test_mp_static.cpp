#include "mpstego/errors.hpp"
#include "mpstego/mp_static.hpp"

#include <gtest/gtest.h>

using namespace mpstego;
using namespace mpstego::static_hdr;

TEST(StaticHeader, RequestExample) {
    const auto bits = encode_static(Request{0, DataFormat::Binary, 5, 1});
    EXPECT_EQ(bits.to_text(), "0000000100010101");
    EXPECT_EQ(bits.read_uint(0, 16), 0x0115u);
    const auto [h, used] = decode_static(bits);
    EXPECT_EQ(used, 16u);
    EXPECT_EQ(std::get<Request>(h), (Request{0, DataFormat::Binary, 5, 1}));
}

TEST(StaticHeader, DummyIsTypeThenZeros) {
    const auto bits = encode_static(Dummy{});
    EXPECT_EQ(bits.to_text(), "1100000000000000");
}

TEST(StaticHeader, ResponseExample) {
    EXPECT_EQ(encode_static(Response{3, Command::Ok}).to_text(), "100001100");
    EXPECT_EQ(encode_static(Response{0, Command::Resend}).to_text(), "100000001");
}

TEST(StaticHeader, DataExample) {
    EXPECT_EQ(encode_static(Data{1, 60}).to_text(), "010000100111100");
}

TEST(StaticHeader, Widths) {
    EXPECT_EQ(static_width(Request{}), 16u);
    EXPECT_EQ(static_width(Data{}), 15u);
    EXPECT_EQ(static_width(Response{}), 9u);
    EXPECT_EQ(static_width(Dummy{}), 16u);
    EXPECT_EQ(kMaxCount, 63u);
}

TEST(StaticHeader, TruncatedInput) {
    EXPECT_THROW(decode_static(BitString::from_text("00000000")), TruncationError);
    EXPECT_THROW(decode_static(BitString::from_text("1")), TruncationError);
    // A response fits in 9 bits even if a request would not.
    EXPECT_NO_THROW(decode_static(BitString::from_text("100000000")));
}

TEST(StaticHeader, ReservedValues) {
    EXPECT_THROW(decode_static(BitString::from_text("0000000000010100")), ProtocolError);
    EXPECT_THROW(decode_static(BitString::from_text("100000011")), ProtocolError);
    EXPECT_THROW(encode_static(Request{0, DataFormat::Binary, 1, 0}), EncodingError);
    EXPECT_THROW(encode_static(Request{32, DataFormat::Binary, 1, 1}), EncodingError);
    EXPECT_THROW(encode_static(Request{0, DataFormat::Binary, 64, 1}), EncodingError);
    EXPECT_THROW(encode_static(Dummy{0, 512}), EncodingError);
}

TEST(StaticHeader, DecodeAtOffsetConsumesOnlyItsWidth) {
    BitString b = BitString::from_text("111");
    b.append(encode_static(Data{7, 200}));
    b.append(BitString::from_text("0101"));
    const auto [h, used] = decode_static(b, 3);
    EXPECT_EQ(used, 15u);
    EXPECT_EQ(std::get<Data>(h), (Data{7, 200}));
}

TEST(StaticHeader, ExhaustiveRoundTrip) {
    std::size_t n = 0;
    auto check = [&](const StaticHeader& h) {
        const auto bits = encode_static(h);
        ASSERT_EQ(bits.size(), static_width(h));
        const auto [back, used] = decode_static(bits);
        ASSERT_EQ(used, bits.size());
        ASSERT_EQ(back, h) << describe(h);
        ++n;
    };
    for (unsigned nho = 0; nho < 32; ++nho) {
        const auto o = static_cast<std::uint8_t>(nho);
        for (unsigned f = 0; f < 2; ++f)
            for (unsigned c = 0; c < 64; ++c)
                for (unsigned v = 1; v < 4; ++v)
                    check(Request{o, static_cast<DataFormat>(f), static_cast<std::uint8_t>(c),
                                  static_cast<std::uint8_t>(v)});
        for (unsigned len = 0; len < 256; ++len) check(Data{o, static_cast<std::uint8_t>(len)});
        check(Response{o, Command::Ok});
        check(Response{o, Command::Resend});
        for (unsigned d = 0; d < 512; ++d) check(Dummy{o, static_cast<std::uint16_t>(d)});
    }
    EXPECT_EQ(n, 32u * (2 * 64 * 3 + 256 + 2 + 512));
}
