#ifndef MTLAB_RNG_HPP
#define MTLAB_RNG_HPP

#include <cstdint>
#include <random>

namespace mtlab {

// splitmix64 finalizer; decorrelates nearby seeds before they reach mt19937_64.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Named per-purpose streams. A trial's initialization, training inputs and
// test inputs draw from separate generators, so changing the number of test
// inputs never perturbs the training sequence.
enum class Stream : std::uint64_t {
    init = 0,
    train = 1,
    test = 2,
    oracle = 3,
};

inline std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t trial, Stream purpose) {
    return mix64(base_seed ^ mix64(trial * 4 + static_cast<std::uint64_t>(purpose) + 1));
}

// Sequences are reproducible per (seed, trial, purpose) for a fixed standard
// library; std::normal_distribution's algorithm is implementation-defined.
inline std::mt19937_64 make_stream(std::uint64_t base_seed, std::uint64_t trial, Stream purpose) {
    return std::mt19937_64(stream_seed(base_seed, trial, purpose));
}

} // namespace mtlab

#endif // MTLAB_RNG_HPP
