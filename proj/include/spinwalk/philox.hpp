#pragma once

#include <array>
#include <cstdint>

namespace spinwalk {

/**
 * Counter-based random stream (Philox4x64-10).
 *
 * Each stream is addressed by (seed, cell, trajectory): the seed and a fixed
 * tweak form the key, the cell and trajectory indices live in the counter.
 * Draw number k therefore depends only on the address and on k, never on
 * what other streams consumed. That is what makes ensembles reproducible
 * under any work partitioning: a trajectory gets the same randomness whether
 * it runs first, last, or on another thread.
 *
 * Counter layout: (block, trajectory, cell, 0). The block index increments
 * once per 4-word batch, so a stream yields 2^66 words before wrapping.
 */
class PhiloxStream {
public:
    using result_type = std::uint64_t;

    PhiloxStream(std::uint64_t seed, std::uint64_t cell, std::uint64_t trajectory)
        : counter_{0, trajectory, cell, 0}, key_{seed, kKeyTweak} {}

    /// Next 64-bit word of the stream.
    std::uint64_t next_u64() {
        if (buffer_pos_ == 4) refill();
        return buffer_[buffer_pos_++];
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Fair bit. Bits are served LSB-first from a word reserved for bits only,
    /// so interleaving bit draws with word or double draws stays well defined.
    bool next_bit() {
        if (bits_left_ == 0) {
            bit_word_ = next_u64();
            bits_left_ = 64;
        }
        bool b = bit_word_ & 1u;
        bit_word_ >>= 1;
        --bits_left_;
        return b;
    }

    /// Number of buffered fair bits remaining before next_bit() pulls a word.
    int bits_available() const { return bits_left_; }

    /// Bernoulli(p) via one double draw. p outside [0,1] saturates.
    bool bernoulli(double p) { return next_double() < p; }

    // UniformRandomBitGenerator interface.
    std::uint64_t operator()() { return next_u64(); }
    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

private:
    static constexpr std::uint64_t kKeyTweak = 0x9E3779B97F4A7C15ull;
    static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ull;
    static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ull;
    static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
    static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

    static void mulhilo(std::uint64_t a, std::uint64_t b,
                        std::uint64_t& hi, std::uint64_t& lo) {
        unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
        hi = static_cast<std::uint64_t>(p >> 64);
        lo = static_cast<std::uint64_t>(p);
    }

    void refill() {
        std::array<std::uint64_t, 4> c = counter_;
        std::uint64_t k0 = key_[0];
        std::uint64_t k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            std::uint64_t hi0, lo0, hi1, lo1;
            mulhilo(kMul0, c[0], hi0, lo0);
            mulhilo(kMul1, c[2], hi1, lo1);
            c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
            if (round < 9) {
                k0 += kWeyl0;
                k1 += kWeyl1;
            }
        }
        buffer_ = c;
        buffer_pos_ = 0;
        ++counter_[0]; // block index; carries are impossible within one stream's lifetime
    }

    std::array<std::uint64_t, 4> counter_;
    std::array<std::uint64_t, 2> key_;
    std::array<std::uint64_t, 4> buffer_{};
    int buffer_pos_ = 4;
    std::uint64_t bit_word_ = 0;
    int bits_left_ = 0;
};

} // namespace spinwalk
