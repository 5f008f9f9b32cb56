#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace mhpm {

// Seed splitting: one top-level seed fans out to independent component streams
// keyed by a stable name, so component evaluation order never perturbs another
// component's randomness.
//
//   stream seed = splitmix64(root ^ fnv1a64(name))
std::uint64_t fnv1a64(std::string_view s);
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t root, std::string_view name);

// mt19937_64 with distribution code written out here rather than taken from
// <random>, whose distributions are implementation-defined. Results depend only
// on the seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    // [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Standard normal via Box-Muller; consumes exactly two draws.
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }
    // Uniform integer in [0, n), n > 0, unbiased.
    std::uint64_t below(std::uint64_t n);
    bool bernoulli(double p) { return uniform() < p; }

    std::string save_state() const;
    void load_state(const std::string& state);

    friend bool operator==(const Rng&, const Rng&) = default;

private:
    std::mt19937_64 engine_;
};

}  // namespace mhpm
