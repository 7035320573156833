#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ensbound {

/// SplitMix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Child seed for stream `index` of `master`. Parallel and serial runs that use
/// the same (master, index) pairs see identical streams.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// Seedable generator with platform-independent output. The engine is
/// std::mt19937_64 (its sequence is fixed by the standard); the mapping to
/// doubles and bounded integers is done here because the standard
/// distributions are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on {0, ..., bound - 1}; unbiased (rejection sampling).
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % bound;
    }

    /// Rademacher sign.
    int sign() { return (engine_() >> 63) ? 1 : -1; }

    /// Standard normal via Box-Muller (portable, unlike std::normal_distribution).
    double normal();

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Categorical sampler over nonnegative weights (Walker alias table), O(1) per draw.
class AliasTable {
public:
    AliasTable() = default;
    explicit AliasTable(std::span<const double> weights);

    std::size_t size() const { return prob_.size(); }
    std::size_t sample(Rng& rng) const;

private:
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
};

}  // namespace ensbound
