#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "shiftest/error.hpp"
#include "shiftest/random.hpp"
#include "shiftest/simulate.hpp"

using namespace shiftest;

TEST_CASE("counter generator is a pure function of its key and counter") {
    CounterRng a(7, 3, 1), b(7, 3, 1), c(7, 4, 1), d(8, 3, 1), e(7, 3, 0);
    for (int k = 0; k < 50; ++k) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        CHECK(x != c.next_u64());
        CHECK(x != d.next_u64());
        CHECK(x != e.next_u64());
    }
    CHECK(a.position() == 50);
    CHECK(CounterRng(7, 3, 1).at(10) == CounterRng(7, 3, 1).at(10));
    CounterRng u(1, 0, 0);
    for (int k = 0; k < 1000; ++k) {
        const double v = u.uniform();
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("noise has the requested mean and variance") {
    SimulationSpec spec;
    spec.pattern = Pattern::cosine();
    spec.sigma = 2.0;
    spec.samples = 1001;
    spec.shifts = Eigen::VectorXd::Zero(spec.curves);
    const auto data = generate(spec, 0);
    Eigen::MatrixXd noise = data.curves.samples();
    for (int j = 0; j < spec.curves; ++j)
        for (int i = 0; i < spec.samples; ++i)
            noise(j, i) -= spec.pattern.value(data.curves.time(i) - spec.period / 2.0, spec.period);
    const double N = static_cast<double>(noise.size());
    const double mean = noise.mean();
    const double var = (noise.array() - mean).square().sum() / (N - 1.0);
    CHECK(std::abs(mean) < 3.0 * spec.sigma / std::sqrt(N));
    // Var of the sample variance is about 2 sigma^4 / N for Gaussian noise.
    CHECK(std::abs(var - 4.0) < 3.0 * std::sqrt(2.0 * 16.0 / N));
}

TEST_CASE("noiseless unshifted curves equal the sampled pattern") {
    SimulationSpec spec;
    spec.sigma = 0.0;
    spec.shifts = Eigen::VectorXd::Zero(spec.curves);
    const auto data = generate(spec, 0);
    for (int j = 0; j < spec.curves; ++j)
        for (int i = 0; i < spec.samples; ++i)
            CHECK(data.curves.samples()(j, i) ==
                  spec.pattern.value(-spec.period / 2.0 + spec.period * i / spec.samples, spec.period));
}

TEST_CASE("generation is deterministic per replicate") {
    SimulationSpec spec;
    const auto a = generate(spec, 17);
    const auto b = generate(spec, 17);
    const auto c = generate(spec, 18);
    CHECK(a.curves.samples() == b.curves.samples());
    CHECK(a.theta == b.theta);
    CHECK(a.curves.samples() != c.curves.samples());
    for (int j = 1; j < spec.curves; ++j) CHECK(std::abs(a.alpha[j]) <= kPi / 4.0);
    CHECK(a.alpha[0] == 0.0);
}

TEST_CASE("sinc pattern coefficients") {
    // Reference values from adaptive quadrature of (1/2pi) int 15 sinc(4t) cos(lt).
    const double want[6] = {1.7811362620637063, 1.9747507533929634, 1.7524066580397892,
                            2.069823505048854,  0.9138266719834122, -0.14673697424828658};
    const auto c = Pattern::sinc15().true_coefficients(10, 2.0 * kPi);
    for (int l = 0; l <= 5; ++l) {
        CHECK(c[10 + l].real() == doctest::Approx(want[l]).epsilon(1e-9));
        CHECK(std::abs(c[10 + l].imag()) < 1e-12);
        CHECK(std::abs(c[10 - l] - std::conj(c[10 + l])) < 1e-14);
    }
}

TEST_CASE("sinc coefficients agree with a fine DFT of the pattern") {
    const int fine = 20001;
    std::vector<double> x(fine);
    const auto p = Pattern::sinc15();
    for (int i = 0; i < fine; ++i) x[i] = p.value(-kPi + 2.0 * kPi * i / fine, 2.0 * kPi);
    const auto d = forward_dft(x);
    const auto c = p.true_coefficients(20, 2.0 * kPi);
    // The sampling grid starts at -T/2, which multiplies coefficient l by (-1)^l.
    for (int l = -20; l <= 20; ++l) {
        const double sign = (l % 2 == 0) ? 1.0 : -1.0;
        CHECK(std::abs(sign * d[(fine - 1) / 2 + l] - c[20 + l]) < 1e-6);
    }
}

TEST_CASE("cosine pattern coefficients") {
    const auto c = Pattern::cosine().true_coefficients(3, 2.0 * kPi);
    CHECK(std::abs(std::abs(c[4]) - 0.5) < 1e-12);
    CHECK(std::abs(std::abs(c[2]) - 0.5) < 1e-12);
    CHECK(std::abs(c[3]) < 1e-12);
    CHECK(std::abs(c[6]) < 1e-12);
}

TEST_CASE("specification validation") {
    SimulationSpec spec;
    spec.samples = 100;
    CHECK_THROWS_AS(spec.validate(), InputError);
    spec = {};
    spec.curves = 1;
    CHECK_THROWS_AS(spec.validate(), InputError);
    spec = {};
    spec.sigma = -1.0;
    CHECK_THROWS_AS(spec.validate(), InputError);
    spec = {};
    spec.shifts = Eigen::VectorXd::Ones(spec.curves);
    CHECK_THROWS_AS(spec.validate(), InputError);
}

TEST_CASE("noiseless cosine study has zero bias") {
    SimulationSpec spec;
    spec.pattern = Pattern::cosine();
    spec.sigma = 0.0;
    spec.replicates = 1;
    spec.with_inference = false;
    const auto s = run_study(spec);
    CHECK(s.bias.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("two-cosine study matches the asymptotic variance") {
    SimulationSpec spec;
    spec.pattern = Pattern::cosine();
    spec.curves = 2;
    spec.sigma = 0.1;
    spec.replicates = 500;
    spec.with_landmark = false;
    std::vector<double> w(51, 0.0);
    w[1] = 1.0;
    spec.weights = WeightScheme::custom(w, 50);
    spec.seed = 5;
    const auto s = run_study(spec);
    // sigma^2 * Gamma = 0.01 * 2 * (1 + 1)
    CHECK(s.theoretical_covariance(0, 0) == doctest::Approx(0.04).epsilon(1e-9));
    const double ratio = s.empirical_covariance(0, 0) / 0.04;
    MESSAGE("empirical / theoretical variance: " << ratio);
    CHECK(std::abs(ratio - 1.0) <= 0.25);
}

TEST_CASE("doubling sigma doubles the standard deviation") {
    SimulationSpec spec;
    spec.samples = 401;
    spec.replicates = 200;
    spec.with_landmark = false;
    spec.with_inference = false;
    spec.seed = 9;
    spec.sigma = 0.5;
    const auto lo = run_study(spec);
    spec.sigma = 1.0;
    const auto hi = run_study(spec);
    const double ratio = hi.std_dev.mean() / lo.std_dev.mean();
    MESSAGE("sd ratio for doubled sigma: " << ratio);
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("studies are reproducible and thread-count independent") {
    SimulationSpec spec;
    spec.replicates = 8;
    spec.threads = 1;
    const auto a = run_study(spec);
    spec.threads = 3;
    const auto b = run_study(spec);
    CHECK(a.bias == b.bias);
    CHECK(a.empirical_covariance == b.empirical_covariance);
    CHECK(a.coverage == b.coverage);
    REQUIRE(a.rmse_landmark.has_value());
    CHECK(*a.rmse_landmark == *b.rmse_landmark);
}

TEST_CASE("grid minimum and weight sweep") {
    CHECK(grid_minimum({{-1.0, 3.0}, {0.5, 1.0}, {2.0, 1.0}}) == 0.5);
    SimulationSpec spec;
    spec.curves = 2;
    const auto grids = weight_sweep(spec, kPi / 3.0, {1.0, 3.0, 5.0, 7.0},
                                    {WeightScheme::unit(1), WeightScheme::power(1.3, 1),
                                     WeightScheme::power(2.0, 1)},
                                    629);
    REQUIRE(grids.size() == 12);
    for (const auto& g : grids) CHECK(g.points.size() == 629);
    CHECK(std::abs(grid_minimum(grids[1].points) - kPi / 3.0) < 0.1);
}
