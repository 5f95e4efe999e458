#include "shiftest/random.hpp"

#include "shiftest/inference.hpp"

namespace shiftest {
namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream)
    : key_(mix64(mix64(seed + kGolden) ^ mix64(replicate * 0xD1B54A32D192ED03ULL + 1) ^
                 mix64(stream * 0xABC98388FB8FAC03ULL + 2))) {}

std::uint64_t CounterRng::at(std::uint64_t counter) const {
    return mix64(key_ + (counter + 1) * kGolden);
}

double CounterRng::uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() { return normal_quantile(uniform()); }

}  // namespace shiftest
