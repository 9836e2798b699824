#pragma once

#include "mpstego/stego_embed.hpp"

#include <cstdint>

namespace mpstego {

/// Header start offsets (in code units) for each packet of one direction.
///
/// FIXED returns the initial offset for every packet. CHAINED returns the
/// initial offset for packet 0 and a seeded 64-bit LCG value reduced modulo
/// min(32, frame) for every later packet. offset_at() jumps ahead in
/// O(log index), so lost packets never desynchronize the two ends.
class OffsetSchedule {
public:
    OffsetSchedule(Placement placement, unsigned frame_codes, std::uint64_t seed);

    unsigned offset_at(std::uint64_t index) const;

    /// Largest offset the schedule can produce.
    unsigned max_offset() const noexcept;

    const Placement& placement() const noexcept { return placement_; }

private:
    Placement placement_;
    unsigned modulus_;
    std::uint64_t seed_;
};

} // namespace mpstego
