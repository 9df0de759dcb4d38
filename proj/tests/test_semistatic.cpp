#include <doctest.h>

#include <cmath>
#include <random>

#include "bookmaker/semistatic.hpp"
#include "bookmaker/wealth.hpp"
#include "oracles.hpp"

using namespace bookmaker;

namespace {

SemiStaticProblem coin_identity(double tau = 1.0, double x = 0.0,
                                std::vector<double> q = {0.0, 0.0}) {
    return SemiStaticProblem(OutcomeStructure::partition({0.5, 0.5}),
                             {IntensityModel::ratio(), IntensityModel::ratio()}, tau,
                             Utility::identity(), x, std::move(q));
}

}  // namespace

TEST_CASE("static objective reduces to the known closed forms") {
    // Identity utility under the ratio family: the objective is
    // x - p.q + tau * sum lambda_i(u_i)(u_i - p_i) for any interior u.
    SemiStaticProblem prob(OutcomeStructure::partition({0.3, 0.7}),
                           {IntensityModel::ratio(), IntensityModel::ratio()}, 2.0,
                           Utility::identity(), 1.5, {0.5, 1.0});
    for (double u1 = 0.35; u1 < 1.0; u1 += 0.2) {
        for (double u2 = 0.72; u2 < 1.0; u2 += 0.1) {
            double expected = 1.5 - (0.3 * 0.5 + 0.7 * 1.0);
            const double l1 = rate(prob.intensity[0], 0.3, u1);
            const double l2 = rate(prob.intensity[1], 0.7, u2);
            expected += 2.0 * (l1 * (u1 - 0.3) + l2 * (u2 - 0.7));
            CHECK(vhat_objective(prob, {u1, u2}) ==
                  doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("vanishing horizon leaves only the settlement exposure") {
    SemiStaticProblem prob(OutcomeStructure::partition({0.5, 0.5}),
                           {IntensityModel::ratio(), IntensityModel::ratio()}, 1e-12,
                           Utility::identity(), 2.0, {1.0, 3.0});
    const double got = vhat_objective(prob, {0.7, 0.7});
    CHECK(got == doctest::Approx(2.0 - 0.5 * 1.0 - 0.5 * 3.0).epsilon(1e-9));
}

TEST_CASE("coin objective at the sqrt prices matches the wealth value function") {
    auto prob = coin_identity(3.0, 0.25, {0.5, 0.5});
    const double s = std::sqrt(0.5);
    const double got = vhat_objective(prob, {s, s});
    const double expected =
        wealth_value_constantp(0.0, 0.25, {0.5, 0.5}, {0.5, 0.5}, 3.0);
    CHECK(got == doctest::Approx(expected).epsilon(1e-12));
    CHECK(got == doctest::Approx(0.1715729 * 3.0 + 0.25 - 0.5).epsilon(1e-6));
}

TEST_CASE("identity-utility optimum is the sqrt rule") {
    SemiStaticProblem prob(OutcomeStructure::partition({0.25, 0.75}),
                           {IntensityModel::ratio(), IntensityModel::ratio()}, 1.0);
    auto sol = optimize_semistatic(prob);
    CHECK(sol.converged);
    CHECK(std::abs(sol.u[0] - 0.5) < 1e-6);
    CHECK(std::abs(sol.u[1] - std::sqrt(0.75)) < 1e-6);
}

TEST_CASE("symmetric exponential-utility partition gives symmetric prices") {
    SemiStaticProblem prob(OutcomeStructure::partition({0.5, 0.5}),
                           {IntensityModel::ratio(), IntensityModel::ratio()}, 1.0,
                           Utility::exponential(2.0));
    auto sol = optimize_semistatic(prob);
    CHECK(std::abs(sol.u[0] - sol.u[1]) < 1e-7);
}

TEST_CASE("independent-case root equation") {
    // gamma=2, tau=1, p=0.5 lands near 0.792.
    const double u = solve_exp_independent(0.5, 2.0, 1.0);
    CHECK(u == doctest::Approx(0.792).epsilon(2e-3));
    // Residual of the defining equation.
    auto residual = [](double p, double g, double tau, double v) {
        return p * (1.0 / (v * v) - 1.0) *
                   std::exp(g * tau * (p / (1.0 - p)) * (1.0 / v - 1.0)) -
               (1.0 - p);
    };
    for (double p = 0.1; p <= 0.9; p += 0.1) {
        const double v = solve_exp_independent(p, 2.0, 1.0);
        CHECK(std::abs(residual(p, 2.0, 1.0, v)) <= 1e-10);
        const double ref = oracle::bisect(
            [&](double w) { return residual(p, 2.0, 1.0, w); }, 1e-6, 1.0 - 1e-9);
        CHECK(std::abs(v - ref) < 1e-9);
    }
}

TEST_CASE("independent-case root approaches sqrt(p) as gamma*tau vanishes") {
    for (double p : {0.2, 0.5, 0.8}) {
        const double u = solve_exp_independent(p, 1e-9, 1.0);
        CHECK(u == doctest::Approx(std::sqrt(p)).epsilon(1e-6));
    }
}

TEST_CASE("independent-case price curve is increasing and concave in p") {
    std::vector<double> us;
    for (double p = 0.05; p <= 0.951; p += 0.05)
        us.push_back(solve_exp_independent(p, 2.0, 1.0));
    for (std::size_t i = 1; i < us.size(); ++i) CHECK(us[i] > us[i - 1]);
    for (std::size_t i = 2; i < us.size(); ++i)
        CHECK(us[i] - us[i - 1] < us[i - 1] - us[i - 2] + 1e-12);
}

TEST_CASE("independent root maximizes the one-event static objective") {
    for (double p : {0.2, 0.5, 0.8}) {
        SemiStaticProblem prob(OutcomeStructure::independent({p}),
                               {IntensityModel::ratio()}, 1.0, Utility::exponential(2.0));
        const double root = solve_exp_independent(p, 2.0, 1.0);
        const double ref = oracle::grid_maximize(
            [&](double u) { return vhat_objective(prob, {u}); }, 1e-4, 1.0 - 1e-6, 10000);
        CHECK(std::abs(root - ref) < 1e-3);
    }
}

TEST_CASE("partition system: symmetry") {
    auto sol = solve_exp_partition({1.0 / 3, 1.0 / 3, 1.0 / 3}, {0.0, 0.0, 0.0}, 2.0, 1.0);
    CHECK(sol.converged);
    CHECK(std::abs(sol.u[0] - sol.u[1]) < 1e-9);
    CHECK(std::abs(sol.u[1] - sol.u[2]) < 1e-9);
    CHECK(sol.residual <= 1e-8);
}

TEST_CASE("partition system: book monotonicity and positive worst case") {
    // p = (1/2, 1/3, 1/6), gamma = 2, tau = 1, growing inventory on outcome 1.
    const std::vector<double> p{0.5, 1.0 / 3, 1.0 / 6};
    std::vector<double> prev;
    for (double q1 : {0.0, 0.5, 1.0, 1.5, 2.0}) {
        auto sol = solve_exp_partition(p, {q1, 0.0, 0.0}, 2.0, 1.0);
        CHECK(sol.converged);
        CHECK(sol.residual <= 1e-8);
        if (!prev.empty()) {
            CHECK(sol.u[0] > prev[0]);
            CHECK(sol.u[1] < prev[1]);
            CHECK(sol.u[2] < prev[2]);
        }
        // Worst-case settlement across the three outcomes stays profitable,
        // with the whole book valued at the quoted prices.
        auto wealth = partition_settlement_profile(p, {q1, 0.0, 0.0}, sol.u, 1.0);
        double worst = kInf;
        int worst_outcome = -1;
        for (int i = 0; i < 3; ++i)
            if (wealth[i] < worst) {
                worst = wealth[i];
                worst_outcome = i;
            }
        CHECK(worst > 0.0);
        CHECK(worst_outcome == 0);  // the loaded outcome carries the risk
        prev = sol.u;
    }
}

TEST_CASE("partition system: price surface rises and flattens in own probability") {
    // Three-outcome partition, gamma = 2, tau = 5, empty book: at fixed p2
    // the first price is increasing and concave in p1.
    const double p2 = 0.3;
    std::vector<double> u1;
    for (int i = 1; i <= 9; ++i) {
        const double p1 = 0.05 * i;
        auto sol = solve_exp_partition({p1, p2, 1.0 - p1 - p2}, {0.0, 0.0, 0.0}, 2.0, 5.0);
        CHECK(sol.converged);
        u1.push_back(sol.u[0]);
    }
    for (std::size_t i = 1; i < u1.size(); ++i) CHECK(u1[i] > u1[i - 1]);
    for (std::size_t i = 2; i < u1.size(); ++i)
        CHECK(u1[i] - u1[i - 1] < u1[i - 1] - u1[i - 2] + 1e-9);
}

TEST_CASE("partition system agrees with the coordinate-ascent optimizer") {
    const std::vector<double> p{0.5, 1.0 / 3, 1.0 / 6};
    auto sol = solve_exp_partition(p, {1.0, 0.0, 0.0}, 2.0, 1.0);
    SemiStaticProblem prob(OutcomeStructure::partition(p),
                           std::vector<IntensityModel>(3, IntensityModel::ratio()), 1.0,
                           Utility::exponential(2.0), 0.0, {1.0, 0.0, 0.0});
    auto grid = optimize_semistatic(prob);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(sol.u[i] - grid.u[i]) < 1e-3);
    CHECK(sol.unique);
}

TEST_CASE("partition solver matches coordinate ascent on random instances") {
    std::mt19937 gen(20240812);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 6; ++trial) {
        const std::size_t n = 2 + trial % 2;
        std::vector<double> p(n);
        double total = 0.0;
        for (auto& v : p) total += (v = 0.15 + unif(gen));
        for (auto& v : p) v /= total;
        std::vector<double> q(n);
        for (auto& v : q) v = 1.5 * unif(gen);
        const double gamma = 0.5 + 2.5 * unif(gen);
        const double tau = 0.5 + 2.0 * unif(gen);
        const double kappa = 0.5 + unif(gen);
        auto sol = solve_exp_partition(p, q, gamma, tau, kappa);
        CHECK(sol.converged);
        SemiStaticProblem prob(OutcomeStructure::partition(p),
                               std::vector<IntensityModel>(n, IntensityModel::ratio(kappa)),
                               tau, Utility::exponential(gamma), 0.0, q);
        auto grid = optimize_semistatic(prob);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(sol.u[i] - grid.u[i]) < 2e-3);
        // The first-order root should not lose objective value to the
        // coordinate-ascent point.
        CHECK(vhat_objective(prob, sol.u) >= grid.value - 1e-9);
    }
}

TEST_CASE("partition solution dominates a dense price grid") {
    const std::vector<double> p{0.5, 1.0 / 3, 1.0 / 6};
    SemiStaticProblem prob(OutcomeStructure::partition(p),
                           std::vector<IntensityModel>(3, IntensityModel::ratio()), 1.0,
                           Utility::exponential(2.0), 0.0, {0.5, 0.0, 0.0});
    auto sol = solve_exp_partition(p, {0.5, 0.0, 0.0}, 2.0, 1.0);
    const double best = vhat_objective(prob, sol.u);
    const int g = 50;
    bool dominated = true;
    for (int a = 1; a < g && dominated; ++a)
        for (int b = 1; b < g && dominated; ++b)
            for (int c = 1; c < g; ++c) {
                const double v = vhat_objective(
                    prob, {a / double(g), b / double(g), c / double(g)});
                if (v > best + 1e-10) {
                    dominated = false;
                    break;
                }
            }
    CHECK(dominated);
}

TEST_CASE("two-piece policy degenerates for concave revenue") {
    auto prob = coin_identity();
    auto tp = epsilon_policy(prob, {0.7, 0.8}, 0.01);
    CHECK(tp.v == std::vector<double>{0.7, 0.8});
    CHECK(tp.w == std::vector<double>{0.7, 0.8});
    CHECK(tp.rho == std::vector<double>{1.0, 1.0});
}

TEST_CASE("two-piece policy mixes across the logratio convex gap") {
    const double p = std::exp(-1.0);
    SemiStaticProblem prob(OutcomeStructure::independent({p}),
                           {IntensityModel::logratio()}, 1.0, Utility::identity());
    // Price whose rate falls in the non-concave stretch (x > 2 for this p).
    const double u = inverse_rate(IntensityModel::logratio(), p, 3.0);
    auto tp = epsilon_policy(prob, {u}, 1e-3);
    CHECK(tp.rho[0] > 0.0);
    CHECK(tp.rho[0] < 1.0);
    const double xv = rate(prob.intensity[0], p, tp.v[0]);
    const double xw = rate(prob.intensity[0], p, tp.w[0]);
    CHECK(xv < 3.0);
    CHECK(xw > 3.0);
    // The mixture reproduces the target arrival rate exactly.
    CHECK(tp.rho[0] * xv + (1.0 - tp.rho[0]) * xw == doctest::Approx(3.0).epsilon(1e-10));
    // Realized static wealth dominates the envelope wealth minus delta.
    const double mix_rev = tp.rho[0] * revenue(prob.intensity[0], p, xv) +
                           (1.0 - tp.rho[0]) * revenue(prob.intensity[0], p, xw);
    const double env_rev = prob.envelope_revenue(0, 3.0);
    CHECK(mix_rev >= env_rev - 1e-3);
    for (const Atom& atom : prob.outcomes.atom_distribution()) {
        const double direct = two_piece_static_wealth(prob, tp, atom);
        double envelope_wealth = prob.tau * env_rev;
        if (atom.members[0]) envelope_wealth -= prob.q0[0] + prob.tau * 3.0;
        CHECK(direct >= envelope_wealth - 1e-3);
    }
}

TEST_CASE("huge tolerance accepts any mixture") {
    const double p = std::exp(-1.0);
    SemiStaticProblem prob(OutcomeStructure::independent({p}),
                           {IntensityModel::logratio()}, 1.0);
    const double u = inverse_rate(IntensityModel::logratio(), p, 2.5);
    CHECK_NOTHROW(epsilon_policy(prob, {u}, 1e9));
}

TEST_CASE("reduction consistency: identity utility matches the pointwise rule") {
    for (double p1 : {0.2, 0.5, 0.7}) {
        SemiStaticProblem prob(OutcomeStructure::partition({p1, 1.0 - p1}),
                               {IntensityModel::ratio(), IntensityModel::ratio()}, 1.0);
        auto sol = optimize_semistatic(prob);
        CHECK(std::abs(sol.u[0] - std::sqrt(p1)) < 1e-6);
        CHECK(std::abs(sol.u[1] - std::sqrt(1.0 - p1)) < 1e-6);
    }
}
