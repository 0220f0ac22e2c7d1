#pragma once

// Deterministic seed derivation. Every randomized stage (model draw, each
// realization, each CI test, each surrogate) gets its own seed derived from
// the master seed and a structural path, so results never depend on thread
// scheduling or evaluation order.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace tscausal {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Hash-chain the path components into the master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = splitmix64(master);
    for (std::uint64_t v : path) h = splitmix64(h ^ splitmix64(v));
    return h;
}

inline std::mt19937_64 make_engine(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    return std::mt19937_64(derive_seed(master, path));
}

// for call sites that already hold a fully derived seed
inline std::mt19937_64 make_engine(std::uint64_t derived) { return std::mt19937_64(derived); }

// stream tags so unrelated stages cannot collide
namespace seed_stream {
inline constexpr std::uint64_t model_draw = 0x01;
inline constexpr std::uint64_t simulate = 0x02;
inline constexpr std::uint64_t obs_noise = 0x03;
inline constexpr std::uint64_t cmi_noise = 0x04;
inline constexpr std::uint64_t cmi_surrogate = 0x05;
inline constexpr std::uint64_t null_table = 0x06;
inline constexpr std::uint64_t bench_cell = 0x07;
}  // namespace seed_stream

}  // namespace tscausal
