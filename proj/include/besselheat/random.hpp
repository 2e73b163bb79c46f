#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace besselheat {

/// Philox4x32-10 counter-based generator (Salmon et al.), usable as a
/// UniformRandomBitGenerator.  A stream is fixed by (seed, stream, path);
/// the remaining counter word enumerates blocks of four outputs.
class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Block = std::array<std::uint32_t, 4>;

    Philox4x32(std::uint64_t seed, std::uint32_t stream, std::uint64_t path)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          counter_{0u, stream, static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)}
    {
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        if (index_ == 4) {
            buffer_ = generate(counter_, key_);
            ++counter_[0];
            index_ = 0;
        }
        return buffer_[index_++];
    }

    /// Uniform on (0, 1), never 0 or 1.
    double uniform()
    {
        const std::uint64_t hi = (*this)();
        const std::uint64_t lo = (*this)();
        const std::uint64_t bits = ((hi << 32) | lo) >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    static Block generate(Block ctr, std::array<std::uint32_t, 2> key)
    {
        constexpr std::uint32_t m0 = 0xD2511F53u;
        constexpr std::uint32_t m1 = 0xCD9E8D57u;
        constexpr std::uint32_t w0 = 0x9E3779B9u;
        constexpr std::uint32_t w1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
            key[0] += w0;
            key[1] += w1;
        }
        return ctr;
    }

private:
    std::array<std::uint32_t, 2> key_;
    Block counter_;
    Block buffer_{};
    int index_ = 4;
};

}  // namespace besselheat
