#pragma once

#include <cstdint>
#include <random>

namespace tabhash {

// splitmix64 step; used to derive independent seed streams from one master
// seed. mt19937_64 itself is fully specified by the standard, so seeded
// streams are reproducible across platforms and compilers.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for the sub-stream identified by (salt, index). Distinct (salt, index)
// pairs give statistically unrelated streams from the same master seed.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t salt,
                                 std::uint64_t index = 0) {
    return splitmix64(splitmix64(master ^ splitmix64(salt)) + index);
}

inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t salt,
                                   std::uint64_t index = 0) {
    return std::mt19937_64(stream_seed(master, salt, index));
}

// Low `bits` bits of one engine draw. Raw mt19937_64 output is uniform over
// 64-bit words, so masking keeps the result uniform (unlike
// uniform_int_distribution this is also bit-identical everywhere).
inline std::uint32_t draw_bits(std::mt19937_64& eng, int bits) {
    if (bits >= 32) return static_cast<std::uint32_t>(eng());
    return static_cast<std::uint32_t>(eng() & ((1ULL << bits) - 1));
}

} // namespace tabhash
