#pragma once

#include <cstdint>
#include <random>

namespace tissue {

/// The single deterministic generator a compartment draws every stochastic
/// choice from.
class Rng {
public:
    using engine_type = std::mt19937_64;

    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    /// Uniform integer in [0, bound). bound must be > 0.
    std::size_t index(std::size_t bound) {
        return std::uniform_int_distribution<std::size_t>(0, bound - 1)(engine_);
    }

    std::uint32_t below(std::uint32_t bound) {
        return std::uniform_int_distribution<std::uint32_t>(0, bound - 1)(engine_);
    }

    double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

    bool chance(double p) { return unit() < p; }

    engine_type& engine() noexcept { return engine_; }

    friend bool operator==(const Rng&, const Rng&) = default;

private:
    engine_type engine_;
};

/// splitmix64 finaliser; used to derive independent per-run seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace tissue
