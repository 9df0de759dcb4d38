#include <doctest.h>

#include <cmath>

#include "bookmaker/rng.hpp"
#include "bookmaker/wealth.hpp"
#include "oracles.hpp"

using namespace bookmaker;

namespace {

double margin_objective(const IntensityModel& m, double p, double u) {
    return rate(m, p, u) * (u - p);
}

}  // namespace

TEST_CASE("sqrt prices and their oracle") {
    CHECK(optimal_price_ratio(0.25) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(optimal_price_ratio(0.81) == doctest::Approx(0.9).epsilon(1e-14));
    CHECK(optimal_price_ratio(0.999999) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK_THROWS_AS(optimal_price_ratio(0.0), domain_error);
    CHECK_THROWS_AS(optimal_price_ratio(1.0), domain_error);

    auto m = IntensityModel::ratio();
    for (double p : {0.25, 0.81}) {
        const double ref = oracle::grid_maximize(
            [&](double u) { return margin_objective(m, p, u); }, 1e-6, 1.0 - 1e-9);
        CHECK(std::abs(optimal_price_ratio(p) - ref) < 1e-6);
    }
}

TEST_CASE("sqrt price curve is increasing and concave") {
    double prev = optimal_price_ratio(0.01);
    double prev_diff = 0.0;
    bool first = true;
    for (double p = 0.02; p <= 0.99; p += 0.01) {
        const double cur = optimal_price_ratio(p);
        CHECK(cur > prev);
        const double diff = cur - prev;
        if (!first) CHECK(diff < prev_diff + 1e-12);
        prev_diff = diff;
        prev = cur;
        first = false;
    }
}

TEST_CASE("logratio root: residual, bracket and oracle") {
    for (double p = 0.01; p <= 0.99; p += 0.007) {
        const double r = optimal_price_logratio(p);
        CHECK(r > std::exp(-1.0));
        CHECK(r < 1.0);
        CHECK(std::abs(r * (1.0 + std::log(r)) - p) <= 1e-12);
    }
    const double r5 = optimal_price_logratio(0.5);
    CHECK(r5 == doctest::Approx(0.7299).epsilon(2e-4));
    const double ref = oracle::bisect(
        [](double r) { return r * (1.0 + std::log(r)) - 0.5; }, std::exp(-1.0), 1.0);
    CHECK(std::abs(r5 - ref) < 1e-10);
    // Limits: p -> 1 gives r -> 1, p -> 0 gives r -> 1/e.
    CHECK(optimal_price_logratio(1.0 - 1e-9) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(optimal_price_logratio(1e-9) == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
}

TEST_CASE("logratio price map has slope in (1/2, 1)") {
    const double h = 1e-6;
    for (double p = 0.05; p <= 0.95; p += 0.05) {
        const double slope =
            (optimal_price_logratio(p + h) - optimal_price_logratio(p - h)) / (2.0 * h);
        CHECK(slope > 0.5);
        CHECK(slope < 1.0);
    }
}

TEST_CASE("pointwise optimizer matches closed forms and the grid oracle") {
    auto ratio = IntensityModel::ratio();
    auto logratio = IntensityModel::logratio();
    auto expo = IntensityModel::exponential(1.0, 10.0);

    auto u = pointwise_optimize(ratio, std::vector<double>{0.5, 0.5});
    CHECK(u[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    CHECK(u[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));

    CHECK(pointwise_optimize(expo, 0.6) == doctest::Approx(0.7).epsilon(1e-12));
    const double ref = oracle::grid_maximize(
        [&](double v) { return margin_objective(expo, 0.6, v); }, 1e-6, 1.0);
    CHECK(std::abs(pointwise_optimize(expo, 0.6) - ref) < 1e-5);
    // Shallow demand decay pushes the stationary point past 1; the box binds.
    CHECK(pointwise_optimize(IntensityModel::exponential(1.0, 2.0), 0.8) == 1.0);

    for (double p = 0.05; p < 1.0; p += 0.05) {
        CHECK(std::abs(pointwise_optimize(ratio, p) - std::sqrt(p)) < 1e-9);
        CHECK(std::abs(pointwise_optimize(logratio, p) - optimal_price_logratio(p)) < 1e-9);
    }

    // A fair quote contributes nothing.
    CHECK(margin_objective(ratio, 0.3, 0.3) == doctest::Approx(0.0));
}

TEST_CASE("three solution methods agree to 1e-8") {
    auto ratio = IntensityModel::ratio();
    auto logratio = IntensityModel::logratio();
    for (double p = 0.01; p <= 0.99; p += 0.01) {
        const double closed_r = optimal_price_ratio(p);
        CHECK(std::abs(pointwise_optimize(ratio, p) - closed_r) < 1e-8);
        CHECK(std::abs(method3_consistency(ratio, p).u_star - closed_r) < 1e-8);
        const double closed_l = optimal_price_logratio(p);
        CHECK(std::abs(pointwise_optimize(logratio, p) - closed_l) < 1e-8);
        CHECK(std::abs(method3_consistency(logratio, p).u_star - closed_l) < 1e-8);
    }
}

TEST_CASE("method3 rate and price pair") {
    auto m = IntensityModel::ratio();
    auto r = method3_consistency(m, 0.25);
    CHECK(r.lambda_star == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(r.u_star == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(inverse_rate(m, 0.25, r.lambda_star) == doctest::Approx(0.5).epsilon(1e-12));

    auto l = method3_consistency(IntensityModel::logratio(), 0.5);
    CHECK(l.u_star == doctest::Approx(0.7299).epsilon(2e-4));

    // Symmetric probabilities give identical rates coordinatewise.
    auto a = method3_consistency(m, 0.4);
    auto b = method3_consistency(m, 0.4);
    CHECK(a.lambda_star == b.lambda_star);
}

TEST_CASE("closed-form value function") {
    CHECK(wealth_value_constantp(1.0, 3.0, {0.4, 0.6}, {1.0, 2.0}, 1.0) ==
          doctest::Approx(3.0 - 0.4 - 1.2).epsilon(1e-13));
    const double coin = wealth_value_constantp(0.0, 0.0, {0.5, 0.5}, {0.0, 0.0}, 1.0);
    CHECK(coin == doctest::Approx(0.1715729).epsilon(1e-6));
    const double skew = wealth_value_constantp(0.0, 0.0, {0.25, 0.75}, {0.0, 0.0}, 1.0);
    CHECK(skew == doctest::Approx(0.13718).epsilon(1e-4));
}

TEST_CASE("value function derivative signs") {
    const std::vector<double> p{0.3, 0.7}, q{1.0, 2.0};
    const double h = 1e-6;
    auto v = [&](double t, double x, std::vector<double> qq) {
        return wealth_value_constantp(t, x, p, qq, 2.0);
    };
    CHECK((v(0.5, 1.0 + h, q) - v(0.5, 1.0 - h, q)) / (2.0 * h) ==
          doctest::Approx(1.0).epsilon(1e-9));
    for (std::size_t i = 0; i < q.size(); ++i) {
        auto up = q, dn = q;
        up[i] += h;
        dn[i] -= h;
        CHECK((v(0.5, 1.0, up) - v(0.5, 1.0, dn)) / (2.0 * h) ==
              doctest::Approx(-p[i]).epsilon(1e-9));
    }
    CHECK(v(0.5 + h, 1.0, q) < v(0.5 - h, 1.0, q));
}

TEST_CASE("value function agrees with Monte Carlo under the sqrt policy") {
    // Continuous-arrival wealth is deterministic given the winning outcome:
    // E Y = x - p.q + tau * sum p_i(1-sqrt p_i)^2/(1-p_i).
    const std::vector<double> p{0.25, 0.75};
    const double tau = 1.0;
    std::vector<double> u{std::sqrt(p[0]), std::sqrt(p[1])};
    auto m = IntensityModel::ratio();
    std::vector<double> lam(2), rev(2);
    for (int i = 0; i < 2; ++i) {
        lam[i] = rate(m, p[i], u[i]);
        rev[i] = lam[i] * u[i];
    }
    Rng rng(12345);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int k = 0; k < n; ++k) {
        const int winner = rng.uniform() < p[0] ? 0 : 1;
        const double y = tau * (rev[0] + rev[1]) - tau * lam[winner];
        sum += y;
        sumsq += y * y;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    const double closed = wealth_value_constantp(0.0, 0.0, p, {0.0, 0.0}, tau);
    CHECK(std::abs(mean - closed) < 3.0 * se + 1e-12);
}
