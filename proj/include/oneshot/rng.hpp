#pragma once

#include <cstdint>

namespace oneshot {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based splittable generator (splitmix64 core). A master seed plus a
// stream id fully determine the sequence, so sweeps can hand stream k to
// worker k and get results that do not depend on the thread schedule.
class RngStream {
  public:
    explicit RngStream(std::uint64_t master_seed, std::uint64_t stream_id = 0) noexcept
        : state_(mix64(master_seed ^ mix64(stream_id * 0xda3e39cb94b95bdbULL + 1))) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1), 53 random bits.
    double next_unit() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0,bound) without modulo bias.
    std::uint64_t next_below(std::uint64_t bound) noexcept {
        if (bound <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t r;
        do {
            r = next_u64();
        } while (r >= limit);
        return r % bound;
    }

  private:
    std::uint64_t state_;
};

} // namespace oneshot
