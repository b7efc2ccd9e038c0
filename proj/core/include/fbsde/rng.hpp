#pragma once

#include <cstdint>
#include <random>

namespace fbsde {

// Seeded RNG stream with cheap derived substreams. One root seed drives a whole
// experiment; each trajectory draws from substream(trajectory_index), so rollouts
// are reproducible independent of generation order.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(mix(seed ^ kPhi)) {}

    [[nodiscard]] RngStream substream(std::uint64_t index) const {
        return RngStream(mix(state_ + kPhi * (index + 1)), Raw{});
    }

    [[nodiscard]] std::mt19937_64 engine() const { return std::mt19937_64(state_); }

    [[nodiscard]] std::uint64_t state() const { return state_; }

private:
    struct Raw {};
    RngStream(std::uint64_t mixed, Raw) : state_(mixed) {}

    // splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static constexpr std::uint64_t kPhi = 0x9e3779b97f4a7c15ULL;

    std::uint64_t state_;
};

} // namespace fbsde
