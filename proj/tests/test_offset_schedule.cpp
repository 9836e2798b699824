#include "mpstego/offset_schedule.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace mpstego;

TEST(OffsetSchedule, FixedIsConstant) {
    OffsetSchedule s({PlacementMode::Fixed, 7}, 160, 123);
    for (std::uint64_t i : {0ull, 1ull, 2ull, 1000ull, 1ull << 40}) EXPECT_EQ(s.offset_at(i), 7u);
    EXPECT_EQ(s.max_offset(), 7u);
}

TEST(OffsetSchedule, ChainedStartsAtInitialAndStaysInRange) {
    OffsetSchedule s({PlacementMode::Chained, 3}, 160, 42);
    EXPECT_EQ(s.offset_at(0), 3u);
    std::set<unsigned> seen;
    for (std::uint64_t i = 1; i < 5000; ++i) {
        const auto o = s.offset_at(i);
        ASSERT_LT(o, 32u);
        seen.insert(o);
    }
    EXPECT_GT(seen.size(), 20u);
    EXPECT_EQ(s.max_offset(), 31u);
}

TEST(OffsetSchedule, ChainedIsDeterministicAndRandomAccess) {
    OffsetSchedule a({PlacementMode::Chained, 0}, 160, 5);
    OffsetSchedule b({PlacementMode::Chained, 0}, 160, 5);
    OffsetSchedule c({PlacementMode::Chained, 0}, 160, 6);
    std::size_t differ = 0;
    // Query in reverse to exercise the jump-ahead path.
    for (std::uint64_t i = 2000; i-- > 0;) {
        ASSERT_EQ(a.offset_at(i), b.offset_at(i));
        differ += a.offset_at(i) != c.offset_at(i);
    }
    EXPECT_GT(differ, 1000u);
    EXPECT_EQ(a.offset_at(1ull << 50), b.offset_at(1ull << 50));
}

TEST(OffsetSchedule, SmallFrameLimitsModulus) {
    OffsetSchedule s({PlacementMode::Chained, 0}, 8, 9);
    for (std::uint64_t i = 1; i < 500; ++i) ASSERT_LT(s.offset_at(i), 8u);
}
