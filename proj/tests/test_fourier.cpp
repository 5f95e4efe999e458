#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "shiftest/criterion.hpp"
#include "shiftest/error.hpp"
#include "shiftest/fourier.hpp"
#include "shiftest/random.hpp"

using namespace shiftest;

namespace {

std::vector<double> random_curve(int n, std::uint64_t seed) {
    CounterRng rng(seed, 0, 7);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    return x;
}

}  // namespace

TEST_CASE("constant curve has only a mean coefficient") {
    const std::vector<double> x(9, 7.0);
    const auto c = forward_dft(x);
    REQUIRE(c.size() == 9);
    CHECK(std::abs(c[4] - Complex(7.0, 0.0)) < 1e-12);
    for (int k = 0; k < 9; ++k)
        if (k != 4) CHECK(std::abs(c[k]) < 1e-12);
}

TEST_CASE("sampled cosine gives one half at l = +-1") {
    const int n = 5;
    std::vector<double> x(n);
    for (int m = 0; m < n; ++m) x[m] = std::cos(2.0 * kPi * m / n);
    const auto c = forward_dft(x);
    CHECK(std::abs(c[1] - 0.5) < 1e-12);
    CHECK(std::abs(c[3] - 0.5) < 1e-12);
    CHECK(std::abs(c[0]) < 1e-12);
    CHECK(std::abs(c[2]) < 1e-12);
    CHECK(std::abs(c[4]) < 1e-12);
}

TEST_CASE("one-step circular delay multiplies by exp(-2 pi i l / n)") {
    const int n = 5;
    std::vector<double> x(n), y(n);
    for (int m = 0; m < n; ++m) x[m] = std::cos(2.0 * kPi * m / n) + 0.3 * m;
    for (int m = 0; m < n; ++m) y[m] = x[(m + n - 1) % n];
    const auto cx = forward_dft(x);
    const auto cy = forward_dft(y);
    for (int l = -2; l <= 2; ++l) {
        const Complex phase = std::exp(Complex(0.0, -2.0 * kPi * l / n));
        CHECK(std::abs(cy[l + 2] - phase * cx[l + 2]) < 1e-12);
    }
}

TEST_CASE("even length is rejected with a truncation hint") {
    const std::vector<double> x(8, 1.0);
    CHECK_THROWS_AS(forward_dft(x), InputError);
    try {
        forward_dft(x);
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("drop") != std::string::npos);
        CHECK(e.stage() == Stage::Input);
    }
}

TEST_CASE("transform matches the direct sum and is invertible") {
    for (int n : {3, 5, 11, 31, 101, 257}) {
        const auto x = random_curve(n, 100 + n);
        const auto fast = forward_dft(x);
        const auto slow = oracle::dft(x);
        double worst = 0.0;
        for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(fast[k] - slow[k]));
        CHECK(worst < 1e-12);

        const auto back = inverse_dft(fast);
        double max_x = 0.0, diff = 0.0;
        for (int m = 0; m < n; ++m) {
            max_x = std::max(max_x, std::abs(x[m]));
            diff = std::max(diff, std::abs(back[m] - x[m]));
        }
        CHECK(diff / max_x < 1e-10);

        const int L = (n - 1) / 2;
        for (int l = 1; l <= L; ++l)
            CHECK(std::abs(fast[L - l] - std::conj(fast[L + l])) < 1e-12);
    }
}

TEST_CASE("circular shift covariance holds for arbitrary lags") {
    const int n = 41;
    const auto x = random_curve(n, 5);
    for (int k : {1, 7, 20, 40}) {
        std::vector<double> y(n);
        for (int m = 0; m < n; ++m) y[m] = x[(m - k + n) % n];
        const auto cx = forward_dft(x);
        const auto cy = forward_dft(y);
        for (int l = -20; l <= 20; ++l) {
            const Complex phase = std::exp(Complex(0.0, -2.0 * kPi * k * l / n));
            CHECK(std::abs(cy[l + 20] - phase * cx[l + 20]) < 1e-12);
        }
    }
}

TEST_CASE("curve set validation") {
    CHECK_THROWS_AS(CurveSet(Eigen::MatrixXd::Zero(1, 5), 1.0), InputError);
    CHECK_THROWS_AS(CurveSet(Eigen::MatrixXd::Zero(2, 5), 0.0), InputError);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 5);
    bad(1, 2) = std::nan("");
    CHECK_THROWS_AS(CurveSet(bad, 1.0), InputError);
    CHECK_NOTHROW(CurveSet(Eigen::MatrixXd::Zero(2, 5), 1.0));
}

TEST_CASE("rephasing") {
    SUBCASE("zero phases are the identity") {
        const SpectralTable t(oracle::dft_table(oracle::gaussian(3, 11, 3)));
        const auto r = rephase(t, Eigen::VectorXd::Zero(3));
        CHECK((r.coeffs() - t.coeffs()).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("single coefficient at l = 2 rotated by pi/2") {
        Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(2, 5);
        c(1, 4) = 1.0;
        Eigen::VectorXd a(2);
        a << 0.0, kPi / 2.0;
        const auto r = rephase(SpectralTable(c), a);
        CHECK(std::abs(r.at(1, 2) - Complex(-1.0, 0.0)) < 1e-15);
    }
    SUBCASE("noiseless shifted copies are brought to a common row") {
        const int n = 21;
        const int J = 4;
        const auto base = random_curve(n, 9);
        const auto c = forward_dft(base);
        Eigen::VectorXd a(J);
        a << 0.0, 0.4, -1.1, 2.5;
        Eigen::MatrixXcd d(J, n);
        for (int j = 0; j < J; ++j)
            for (int l = -10; l <= 10; ++l)
                d(j, l + 10) = std::exp(Complex(0.0, -l * a[j])) * c[l + 10];
        const SpectralTable table(d);
        const auto r = rephase(table, a);
        for (int j = 0; j < J; ++j)
            for (int k = 0; k < n; ++k) CHECK(std::abs(r.coeffs()(j, k) - c[k]) < 1e-12);
        const auto mean = mean_rephased(table, a);
        for (int k = 0; k < n; ++k) CHECK(std::abs(mean[k] - c[k]) < 1e-12);

        // Moduli are preserved and the inverse phase undoes the rotation.
        CHECK((r.coeffs().cwiseAbs() - d.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-12);
        const auto back = rephase(r, -a);
        CHECK((back.coeffs() - d).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("antipodal rows cancel in the mean") {
        Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(2, 3);
        c(0, 2) = 1.0;
        c(1, 2) = -1.0;
        c(0, 0) = 1.0;
        c(1, 0) = -1.0;
        const auto mean = mean_rephased(SpectralTable(c), Eigen::VectorXd::Zero(2));
        CHECK(mean.cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("rephased mean is unbiased under noise") {
    const int n = 11;
    const int J = 3;
    const double sigma = 1.0;
    const int draws = 10000;
    std::vector<double> base(n);
    for (int m = 0; m < n; ++m) base[m] = std::cos(2.0 * kPi * m / n) + 0.5 * std::sin(4.0 * kPi * m / n);
    const auto c = forward_dft(base);
    Eigen::VectorXd a(J);
    a << 0.0, 0.7, -0.3;

    Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(n);
    for (int r = 0; r < draws; ++r) {
        CounterRng rng(42, static_cast<std::uint64_t>(r), 1);
        Eigen::MatrixXd y(J, n);
        for (int j = 0; j < J; ++j) {
            for (int m = 0; m < n; ++m) {
                // Build the shifted curve from its trigonometric interpolant.
                double v = 0.0;
                for (int l = -5; l <= 5; ++l)
                    v += (std::exp(Complex(0.0, -l * a[j] + 2.0 * kPi * l * m / n)) * c[l + 5]).real();
                y(j, m) = v + sigma * rng.normal();
            }
        }
        sum += mean_rephased(transform(CurveSet(y, 2.0 * kPi)), a);
    }
    sum /= static_cast<double>(draws);
    const double se = std::sqrt(sigma * sigma / (2.0 * n * J) / draws);
    for (int l = 1; l <= 5; ++l) {
        CHECK(std::abs(sum[l + 5].real() - c[l + 5].real()) < 3.5 * se);
        CHECK(std::abs(sum[l + 5].imag() - c[l + 5].imag()) < 3.5 * se);
    }
}

TEST_CASE("realign recovers the unshifted pattern from grid shifts") {
    const int n = 15;
    const auto base = random_curve(n, 21);
    Eigen::MatrixXd y(3, n);
    const int lags[3] = {0, 2, -4};
    for (int j = 0; j < 3; ++j)
        for (int m = 0; m < n; ++m) y(j, m) = base[((m - lags[j]) % n + n) % n];
    Eigen::VectorXd a(3);
    for (int j = 0; j < 3; ++j) a[j] = 2.0 * kPi * lags[j] / n;
    const auto aligned = realign(transform(CurveSet(y, 1.0)), a);
    for (int j = 0; j < 3; ++j)
        for (int m = 0; m < n; ++m) CHECK(std::abs(aligned(j, m) - base[m]) < 1e-12);
}
