#include "shiftest/weights.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "shiftest/error.hpp"

namespace shiftest {
namespace {

// Power weights with an exponent above this value keep the criterion's
// fluctuation terms summable for square-integrable patterns.
constexpr double kMinRegularExponent = 1.25;

void require_cutoff(int cutoff) {
    if (cutoff < 1) throw InputError("weight cutoff must be at least 1");
}

}  // namespace

WeightScheme WeightScheme::power(double beta, int cutoff) {
    require_cutoff(cutoff);
    if (!std::isfinite(beta) || beta < 0.0)
        throw InputError("power weight exponent must be finite and non-negative");
    std::vector<double> v(static_cast<std::size_t>(cutoff) + 1, 0.0);
    for (int l = 1; l <= cutoff; ++l) v[l] = std::pow(static_cast<double>(l), -beta);
    return WeightScheme(Kind::Power, beta, std::move(v));
}

WeightScheme WeightScheme::unit(int cutoff) {
    require_cutoff(cutoff);
    std::vector<double> v(static_cast<std::size_t>(cutoff) + 1, 1.0);
    v[0] = 0.0;
    return WeightScheme(Kind::Unit, 0.0, std::move(v));
}

WeightScheme WeightScheme::custom(const std::vector<double>& values, int cutoff) {
    require_cutoff(cutoff);
    if (values.size() < static_cast<std::size_t>(cutoff) + 1)
        throw InputError(fmt::format("custom weights cover |l| <= {} but the data needs |l| <= {}",
                                     static_cast<int>(values.size()) - 1, cutoff));
    if (values[0] != 0.0) throw InputError("custom weights must have delta_0 = 0");
    for (double v : values)
        if (!std::isfinite(v) || v < 0.0)
            throw InputError("custom weights must be finite and non-negative");
    return WeightScheme(Kind::Custom, 0.0,
                        std::vector<double>(values.begin(), values.begin() + cutoff + 1));
}

WeightScheme WeightScheme::with_cutoff(int cutoff) const {
    switch (kind_) {
        case Kind::Power:
            return power(beta_, cutoff);
        case Kind::Unit:
            return unit(cutoff);
        case Kind::Custom:
            break;
    }
    return custom(values_, cutoff);
}

bool WeightScheme::all_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

std::vector<std::string> WeightScheme::warnings() const {
    std::vector<std::string> out;
    if (kind_ == Kind::Unit)
        out.emplace_back(
            "unit weights violate the fluctuation assumptions; confidence intervals are not "
            "asymptotically valid");
    if (kind_ == Kind::Power && beta_ <= kMinRegularExponent)
        out.push_back(fmt::format(
            "power weight exponent {} <= {}; asymptotic normality is not guaranteed", beta_,
            kMinRegularExponent));
    if (all_zero()) out.emplace_back("all weights are zero");
    return out;
}

std::string WeightScheme::describe() const {
    switch (kind_) {
        case Kind::Power:
            return fmt::format("power:{}", beta_);
        case Kind::Unit:
            return "unit";
        case Kind::Custom:
            break;
    }
    return "custom";
}

}  // namespace shiftest
