#pragma once

#include <cstdint>
#include <random>

namespace omania {

/// Seeded random stream used everywhere in the simulator.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard distributions are not (their algorithms are left to
/// the library vendor), so all conversions to doubles, bounded integers and
/// normals are done here with fixed formulas. Together this makes a seeded
/// stream reproducible across compilers and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    void reseed(std::uint64_t seed) { engine_.seed(seed); }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n); unbiased (rejection on the top range).
    std::uint64_t below(std::uint64_t n);

    /// Standard normal via the Box-Muller transform (two uniforms per draw).
    double normal();

    bool operator==(const Rng&) const = default;

private:
    std::mt19937_64 engine_;
};

/// Mixes a master seed with a stream tag into an independent seed
/// (splitmix64 finalizer applied to both words).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Stream tags for seeds derived from a master seed.
inline constexpr std::uint64_t kStartStream = 0x5354415254ULL;   // start pose sampling
inline constexpr std::uint64_t kPolicyStream = 0x504f4c4943ULL;  // policy noise

}  // namespace omania
