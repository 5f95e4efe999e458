#pragma once

#include <string>
#include <vector>

namespace shiftest {

/// Frequency weights delta_l for |l| <= L. delta_0 is always 0 and the
/// sequence is symmetric, so only l = 0..L is stored.
class WeightScheme {
public:
    enum class Kind { Power, Unit, Custom };

    /// delta_l = |l|^-beta for l != 0.
    static WeightScheme power(double beta, int cutoff);
    /// delta_l = 1 for l != 0.
    static WeightScheme unit(int cutoff);
    /// Explicit values for l = 0, 1, ..., at least cutoff + 1 of them; extra
    /// entries are ignored. values[0] must be 0.
    static WeightScheme custom(const std::vector<double>& values, int cutoff);

    Kind kind() const { return kind_; }
    double beta() const { return beta_; }
    int cutoff() const { return static_cast<int>(values_.size()) - 1; }

    double delta(int l) const { return values_[static_cast<std::size_t>(l < 0 ? -l : l)]; }
    double delta_squared(int l) const { return delta(l) * delta(l); }
    const std::vector<double>& values() const { return values_; }

    /// Same family rebuilt for another cutoff. Custom schemes must already
    /// cover it.
    WeightScheme with_cutoff(int cutoff) const;

    bool all_zero() const;

    /// Human-readable problems with the fluctuation assumptions, empty when
    /// the scheme is accepted without reservation.
    std::vector<std::string> warnings() const;

    /// "power:1.3", "unit" or "custom".
    std::string describe() const;

private:
    WeightScheme(Kind kind, double beta, std::vector<double> values)
        : kind_(kind), beta_(beta), values_(std::move(values)) {}

    Kind kind_;
    double beta_;
    std::vector<double> values_;
};

}  // namespace shiftest
