#pragma once

#include <array>
#include <cstdint>

namespace awalk {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85;
};

/// (seed, stream) addresses an independent sequence of 128-bit blocks.
struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

/// Block b of stream (seed, stream): counter (b_lo, b_hi, stream_lo, stream_hi), key = seed.
inline Philox4x32::Counter random_block(const RngSpec& rng, std::uint64_t block) {
    return Philox4x32::generate(
        {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
         static_cast<std::uint32_t>(rng.stream), static_cast<std::uint32_t>(rng.stream >> 32)},
        {static_cast<std::uint32_t>(rng.seed), static_cast<std::uint32_t>(rng.seed >> 32)});
}

/// Sequential 64-bit draws from one stream.
class RandomStream {
public:
    explicit RandomStream(RngSpec rng) : rng_(rng) {}

    std::uint64_t next_u64() {
        if (pos_ == 0) buf_ = random_block(rng_, block_++);
        const std::uint64_t v = (static_cast<std::uint64_t>(buf_[pos_]) << 32) | buf_[pos_ + 1];
        pos_ = (pos_ + 2) % 4;
        return v;
    }

    /// Uniform integer in [0, bound) by multiply-shift.
    std::uint64_t below(std::uint64_t bound) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

private:
    RngSpec rng_;
    std::uint64_t block_ = 0;
    int pos_ = 0;
    Philox4x32::Counter buf_{};
};

}  // namespace awalk
