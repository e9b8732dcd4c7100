#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace asrlab {

// All randomness in a run flows from one root seed. Named sub-streams keep
// draws independent: adding a consumer never perturbs another's sequence.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_name(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::mt19937_64 substream(std::uint64_t root_seed, std::string_view name) {
    return std::mt19937_64(splitmix64(root_seed ^ hash_name(name)));
}

}  // namespace asrlab
