#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "shiftest/criterion.hpp"
#include "shiftest/error.hpp"

using namespace shiftest;

namespace {

// Rows cos(t - theta_j) on the grid t_i = 2 pi i / n.
Eigen::MatrixXd cosine_rows(const Eigen::VectorXd& theta, int n, int harmonic = 1) {
    Eigen::MatrixXd y(theta.size(), n);
    for (Eigen::Index j = 0; j < theta.size(); ++j)
        for (int i = 0; i < n; ++i)
            y(j, i) = std::cos(harmonic * (2.0 * kPi * i / n - theta[j]));
    return y;
}

CriterionContext context_for(const Eigen::MatrixXd& y, const WeightScheme& w) {
    const SpectralTable t = transform(CurveSet(y, 2.0 * kPi));
    return CriterionContext(t, w.with_cutoff(t.cutoff()));
}

std::vector<double> weights_squared(const WeightScheme& w) {
    const int L = w.cutoff();
    std::vector<double> out(2 * L + 1);
    for (int l = -L; l <= L; ++l) out[l + L] = w.delta_squared(l);
    return out;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index k = 0;
    for (double x : v) out[k++] = x;
    return out;
}

}  // namespace

TEST_CASE("angle wrapping") {
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK(wrap_angle(kPi) == doctest::Approx(-kPi));
    CHECK(wrap_angle(3.0 * kPi / 2.0) == doctest::Approx(-kPi / 2.0));
    CHECK(wrap_angle(-7.0) == doctest::Approx(-7.0 + 2.0 * kPi));
    CHECK_THROWS_AS(ConstrainedShift(vec({4.0})), InputError);
    CHECK(ConstrainedShift::wrapped(vec({4.0})).free()[0] == doctest::Approx(4.0 - 2.0 * kPi));
}

TEST_CASE("mismatched weight cutoff is rejected") {
    const SpectralTable t(oracle::dft_table(oracle::gaussian(2, 9, 1)));
    CHECK_THROWS_AS(CriterionContext(t, WeightScheme::unit(3)), InputError);
}

TEST_CASE("criterion agrees with the brute-force double sum") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const int J = 2 + static_cast<int>(seed % 4);
        const int n = 9 + 4 * static_cast<int>(seed);
        const Eigen::MatrixXd y = oracle::gaussian(J, n, seed);
        for (const auto& w : {WeightScheme::unit(1), WeightScheme::power(1.3, 1),
                              WeightScheme::power(2.0, 1)}) {
            const auto ctx = context_for(y, w);
            const auto d = oracle::dft_table(y);
            shiftest::CounterRng rng(seed, 3, 3);
            Eigen::VectorXd free(J - 1);
            for (int k = 0; k < J - 1; ++k) free[k] = rng.uniform(-kPi, kPi);
            const ConstrainedShift a(free);
            const double want = oracle::criterion(d, weights_squared(ctx.weights()), a.full());
            const double got = evaluate(ctx, a);
            CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
            CHECK(std::abs(evaluate_decomposed(ctx, a) - want) <= 1e-10 * std::max(1.0, want));
            CHECK(got >= 0.0);
        }
    }
}

TEST_CASE("identical curves give zero criterion at zero shift") {
    const Eigen::MatrixXd row = oracle::gaussian(1, 21, 8);
    Eigen::MatrixXd y(3, 21);
    for (int j = 0; j < 3; ++j) y.row(j) = row.row(0);
    const auto ctx = context_for(y, WeightScheme::power(1.3, 1));
    CHECK(evaluate(ctx, ConstrainedShift::zero(3)) < 1e-25);
}

TEST_CASE("two cosines: closed form value, slope and curvature") {
    // c_{+-1} = 1/2, unit weight: M = sin^2(D/2) / 2, M' = sin(D) / 4, M'' = cos(D) / 4
    // where D = alpha_2 - alpha_2*.
    const double target = kPi / 3.0;
    const auto ctx = context_for(cosine_rows(vec({0.0, target}), 11), WeightScheme::unit(1));
    for (double d : {-2.0, -0.5, 0.0, 0.3, 1.0, kPi / 2.0, 2.5}) {
        const ConstrainedShift a = ConstrainedShift::wrapped(vec({target + d}));
        CHECK(evaluate(ctx, a) == doctest::Approx(std::pow(std::sin(d / 2.0), 2) / 2.0).epsilon(1e-12));
        CHECK(std::abs(gradient(ctx, a)[0] - std::sin(d) / 4.0) < 1e-12);
        CHECK(std::abs(hessian(ctx, a)(0, 0) - std::cos(d) / 4.0) < 1e-12);
    }
    const auto half = context_for(cosine_rows(vec({0.0, kPi}), 11), WeightScheme::unit(1));
    CHECK(evaluate(half, ConstrainedShift::zero(2)) == doctest::Approx(0.5));
    const auto quarter = context_for(cosine_rows(vec({0.0, 0.0}), 11), WeightScheme::unit(1));
    CHECK(gradient(quarter, ConstrainedShift(vec({kPi / 2.0})))[0] == doctest::Approx(0.25));
}

TEST_CASE("noiseless curvature at the truth has the (J I - U) pattern") {
    const int J = 4;
    const Eigen::VectorXd theta = vec({0.0, 0.3, -0.8, 1.9});
    const auto ctx = context_for(cosine_rows(theta, 13), WeightScheme::unit(1));
    const ConstrainedShift truth(theta.tail(J - 1));
    const Eigen::MatrixXd h = hessian(ctx, truth);
    // (2/J^2) * (sum l^2 |c_l|^2 = 1/2) * (J I - U) on the free block.
    const Eigen::MatrixXd want =
        (2.0 / (J * J)) * 0.5 *
        (J * Eigen::MatrixXd::Identity(J - 1, J - 1) - Eigen::MatrixXd::Ones(J - 1, J - 1));
    CHECK(oracle::relative_error(h, want) < 1e-12);
    CHECK(gradient(ctx, truth).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("analytic derivatives match finite differences") {
    for (std::uint64_t seed = 11; seed <= 16; ++seed) {
        const int J = 2 + static_cast<int>(seed % 5);
        const Eigen::MatrixXd y = oracle::gaussian(J, 31, seed);
        const auto ctx = context_for(y, WeightScheme::power(1.3, 1));
        shiftest::CounterRng rng(seed, 1, 1);
        Eigen::VectorXd x(J - 1);
        for (int k = 0; k < J - 1; ++k) x[k] = rng.uniform(-2.5, 2.5);

        auto f = [&](const Eigen::VectorXd& v) { return evaluate(ctx, ConstrainedShift(v)); };
        auto g = [&](const Eigen::VectorXd& v) { return gradient(ctx, ConstrainedShift(v)); };
        const Eigen::VectorXd ga = gradient(ctx, ConstrainedShift(x));
        const Eigen::MatrixXd ha = hessian(ctx, ConstrainedShift(x));
        CHECK(oracle::relative_error(ga, oracle::central_gradient(f, x, 1e-5)) < 1e-6);
        CHECK(oracle::relative_error(ha, oracle::central_jacobian(g, x, 1e-5)) < 1e-6);
        CHECK((ha - ha.transpose()).cwiseAbs().maxCoeff() < 1e-14);

        const auto vg = value_and_gradient(ctx, ConstrainedShift(x));
        CHECK(vg.value == doctest::Approx(f(x)).epsilon(1e-13));
        CHECK((vg.gradient - ga).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("a common phase on every curve leaves the criterion unchanged") {
    const Eigen::MatrixXd y = oracle::gaussian(5, 25, 77);
    const auto ctx = context_for(y, WeightScheme::power(1.3, 1));
    const Eigen::VectorXd phases = vec({0.0, 0.4, -1.2, 2.0, 0.9});
    const double base = evaluate_full(ctx, phases);
    for (double c : {0.3, -1.7, 2.9}) {
        const Eigen::VectorXd shifted = phases.array() + c;
        CHECK(evaluate_full(ctx, shifted) == doctest::Approx(base).epsilon(1e-12));
    }
    CHECK(evaluate(ctx, ConstrainedShift(phases.tail(4))) == doctest::Approx(base).epsilon(1e-13));
}

TEST_CASE("a single active frequency l0 makes the criterion 2 pi / l0 periodic") {
    const int n = 21;
    const Eigen::MatrixXd y = oracle::gaussian(3, n, 5);
    for (int l0 : {2, 3}) {
        std::vector<double> values(11, 0.0);
        values[l0] = 1.0;
        const auto ctx = context_for(y, WeightScheme::custom(values, 10));
        const Eigen::VectorXd x = vec({0.2, -0.9});
        const double base = evaluate_full(ctx, vec({0.0, x[0], x[1]}));
        for (int coord = 1; coord <= 2; ++coord) {
            Eigen::VectorXd p = vec({0.0, x[0], x[1]});
            p[coord] += 2.0 * kPi / l0;
            CHECK(evaluate_full(ctx, p) == doctest::Approx(base).epsilon(1e-12));
        }
    }
}

TEST_CASE("profile covers [-pi, pi] on the requested grid") {
    const auto ctx = context_for(cosine_rows(vec({0.0, 1.0}), 11), WeightScheme::unit(1));
    const auto prof = profile(ctx, ConstrainedShift::zero(2), 0, 629);
    REQUIRE(prof.size() == 629);
    CHECK(prof.front().first == doctest::Approx(-kPi));
    CHECK(prof.back().first == doctest::Approx(kPi));
    for (const auto& [a, v] : prof) CHECK(v == doctest::Approx(std::pow(std::sin((a - 1.0) / 2.0), 2) / 2.0));
}

TEST_CASE("identifiability of the active frequency set") {
    SUBCASE("fundamental present") {
        const auto ctx = context_for(cosine_rows(vec({0.0, 0.5}), 21), WeightScheme::unit(1));
        const auto check = check_identifiability(ctx, 0.01);
        CHECK(check.satisfied);
        REQUIRE(check.witness.has_value());
    }
    SUBCASE("only the second harmonic carries signal") {
        const auto ctx = context_for(cosine_rows(vec({0.0, 0.5}), 21, 2), WeightScheme::unit(1));
        const auto check = check_identifiability(ctx, 0.01);
        CHECK_FALSE(check.satisfied);
        CHECK(check.active == std::vector<int>{2});
    }
    SUBCASE("harmonics 2 and 3 are coprime") {
        Eigen::MatrixXd y = cosine_rows(vec({0.0, 0.5}), 21, 2) + cosine_rows(vec({0.0, 0.5}), 21, 3);
        const auto ctx = context_for(y, WeightScheme::unit(1));
        const auto check = check_identifiability(ctx, 0.01);
        CHECK(check.satisfied);
    }
}
