#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace sinai {

// Philox4x32-10 block function.
inline std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr, std::array<uint32_t, 2> key) {
    constexpr uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int r = 0; r < 10; ++r) {
        uint64_t p0 = uint64_t(M0) * ctr[0];
        uint64_t p1 = uint64_t(M1) * ctr[2];
        uint32_t hi0 = uint32_t(p0 >> 32), lo0 = uint32_t(p0);
        uint32_t hi1 = uint32_t(p1 >> 32), lo1 = uint32_t(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += W0;
        key[1] += W1;
    }
    return ctr;
}

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Counter-based stream keyed by (seed, stream, index). Two streams with the
// same triple produce the same draws no matter when or where they are made.
class Rng {
public:
    Rng(uint64_t seed = 0, uint64_t stream = 0, uint64_t index = 0)
        : seed_(seed), stream_(stream), index_(index) {
        uint64_t k = splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ull));
        key_ = {uint32_t(k), uint32_t(k >> 32)};
    }

    uint64_t seed() const { return seed_; }
    uint64_t stream() const { return stream_; }
    uint64_t index() const { return index_; }

    // independent sub-stream for sample i of this stream
    Rng child(uint64_t i) const { return Rng(seed_, stream_ * 0x100000001B3ull + 1, index_ * 0x9E3779B1ull + i); }

    uint32_t next_u32() {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

    uint64_t next_u64() {
        uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // uniform on the open interval (0,1)
    double uniform() { return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double th = 2.0 * M_PI * u2;
        spare_ = r * std::sin(th);
        has_spare_ = true;
        return r * std::cos(th);
    }

    uint64_t below(uint64_t n) { return uint64_t(uniform() * double(n)) % n; }

private:
    void refill() {
        std::array<uint32_t, 4> ctr = {uint32_t(block_), uint32_t(block_ >> 32), uint32_t(index_),
                                       uint32_t(index_ >> 32)};
        buf_ = philox4x32(ctr, key_);
        ++block_;
        pos_ = 0;
    }

    uint64_t seed_, stream_, index_;
    std::array<uint32_t, 2> key_{};
    std::array<uint32_t, 4> buf_{};
    uint64_t block_ = 0;
    int pos_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace sinai
