#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace lemsim {

// std::mt19937_64's output sequence is fixed by the standard, but the
// <random> distributions are not, so every transform below is written out
// explicitly. Equal seeds give equal streams on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi);
    /// Uniform index in [0, n); n must be positive.
    std::size_t index(std::size_t n);
    /// Exponential with the given rate (mean 1/rate).
    double exponential(double rate);
    /// Standard normal (Box-Muller, one value per call).
    double normal();

private:
    std::mt19937_64 engine_;
};

/// splitmix64 finaliser; used to derive independent sub-stream seeds.
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

}  // namespace lemsim
