#include "mpstego/offset_schedule.hpp"

#include "mpstego/errors.hpp"

#include <algorithm>

namespace mpstego {

namespace {

constexpr std::uint64_t kMul = 6364136223846793005ull;
constexpr std::uint64_t kInc = 1442695040888963407ull;

// State after n steps of x -> a*x + c (mod 2^64), by repeated squaring of the
// affine map.
std::uint64_t lcg_jump(std::uint64_t x, std::uint64_t n) {
    std::uint64_t acc_mul = 1, acc_inc = 0;
    std::uint64_t cur_mul = kMul, cur_inc = kInc;
    while (n > 0) {
        if (n & 1u) {
            acc_mul *= cur_mul;
            acc_inc = acc_inc * cur_mul + cur_inc;
        }
        cur_inc = (cur_mul + 1) * cur_inc;
        cur_mul *= cur_mul;
        n >>= 1;
    }
    return acc_mul * x + acc_inc;
}

} // namespace

OffsetSchedule::OffsetSchedule(Placement placement, unsigned frame_codes, std::uint64_t seed)
    : placement_(placement), modulus_(std::min(32u, frame_codes)), seed_(seed) {
    if (frame_codes == 0) {
        throw ArgumentError("frame size must be positive");
    }
    if (placement.initial_offset_codes >= frame_codes || placement.initial_offset_codes > 31) {
        throw ArgumentError("initial offset " + std::to_string(placement.initial_offset_codes) +
                            " must be below the frame size and fit 5 bits");
    }
}

unsigned OffsetSchedule::offset_at(std::uint64_t index) const {
    if (placement_.mode == PlacementMode::Fixed || index == 0) {
        return placement_.initial_offset_codes;
    }
    const std::uint64_t x = lcg_jump(seed_, index);
    return static_cast<unsigned>((x >> 33) % modulus_);
}

unsigned OffsetSchedule::max_offset() const noexcept {
    if (placement_.mode == PlacementMode::Fixed) {
        return placement_.initial_offset_codes;
    }
    return std::max(placement_.initial_offset_codes, modulus_ - 1);
}

} // namespace mpstego
