#pragma once

// Philox4x32-10 counter-based generator. Every (seed, stream) pair names an
// independent sequence, so trajectory i can be simulated on any thread and
// always sees the same random numbers.

#include <array>
#include <cstdint>
#include <limits>

namespace qreset {

class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          ctr_{0u, 0u, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)}
    {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        if (used_ == 4) {
            buffer_ = block(ctr_, key_);
            if (++ctr_[0] == 0)
                ++ctr_[1];
            used_ = 0;
        }
        return buffer_[used_++];
    }

    /// 53-bit uniform on (0, 1].
    double uniform() noexcept
    {
        const std::uint64_t hi = (*this)() >> 5;
        const std::uint64_t lo = (*this)() >> 6;
        return (static_cast<double>(hi * 67108864u + lo) + 1.0) * 0x1.0p-53;
    }

    /// Ten Philox rounds on one counter block.
    static Counter block(Counter ctr, Key key) noexcept
    {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    Key key_;
    Counter ctr_;
    Counter buffer_{};
    int used_ = 4;
};

} // namespace qreset
