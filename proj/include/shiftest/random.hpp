#pragma once

#include <cstdint>

namespace shiftest {

/// Counter-based generator: draw k of stream (seed, replicate, stream) is a
/// pure function of those four numbers (SplitMix64 output function applied
/// to key + k * golden gamma). Normal deviates use the inverse CDF.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream);

    std::uint64_t at(std::uint64_t counter) const;
    std::uint64_t next_u64() { return at(counter_++); }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();

    std::uint64_t position() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace shiftest
