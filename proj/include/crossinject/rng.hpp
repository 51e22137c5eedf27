#pragma once

#include <cstdint>

namespace crossinject {

/// Counter-based random stream (SplitMix64 over a keyed counter).
///
/// Every stream is fully determined by its 64-bit key, and child streams are
/// derived by hashing (seed, a, b), so the draws of one (target, attempt)
/// never depend on how many draws other workers made. Distributions are
/// implemented here rather than through <random> so the sequence is the same
/// on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t key) : key_(key) {}

    static Rng child(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

    std::uint64_t next();

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t uniform_index(std::uint64_t n);

    /// Uniform real in [lo, hi).
    double uniform_real(double lo, double hi);

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace crossinject
