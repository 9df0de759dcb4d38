#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bookmaker/market.hpp"

using namespace bookmaker;

namespace {

double atom_prob_sum(const std::vector<Atom>& atoms) {
    double s = 0.0;
    for (const auto& a : atoms) s += a.prob;
    return s;
}

bool contains_atom(const std::vector<Atom>& atoms, double prob,
                   std::vector<std::uint8_t> members, double tol = 1e-12) {
    return std::any_of(atoms.begin(), atoms.end(), [&](const Atom& a) {
        return a.members == members && std::abs(a.prob - prob) <= tol;
    });
}

}  // namespace

TEST_CASE("two-outcome partition atoms") {
    auto s = OutcomeStructure::partition({0.5, 0.5});
    auto atoms = s.atom_distribution();
    REQUIRE(atoms.size() == 2);
    CHECK(contains_atom(atoms, 0.5, {1, 0}));
    CHECK(contains_atom(atoms, 0.5, {0, 1}));
    CHECK(atom_prob_sum(atoms) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("single independent event splits into event and complement") {
    auto s = OutcomeStructure::independent({0.6});
    auto atoms = s.atom_distribution();
    REQUIRE(atoms.size() == 2);
    CHECK(contains_atom(atoms, 0.6, {1}));
    CHECK(contains_atom(atoms, 0.4, {0}));
}

TEST_CASE("three-way partition keeps its probabilities") {
    auto s = OutcomeStructure::partition({1.0 / 2, 1.0 / 3, 1.0 / 6});
    auto atoms = s.atom_distribution();
    REQUIRE(atoms.size() == 3);
    CHECK(contains_atom(atoms, 1.0 / 2, {1, 0, 0}));
    CHECK(contains_atom(atoms, 1.0 / 3, {0, 1, 0}));
    CHECK(contains_atom(atoms, 1.0 / 6, {0, 0, 1}));
}

TEST_CASE("atom probabilities sum to one for every variant") {
    auto p = OutcomeStructure::partition({0.2, 0.5, 0.3});
    auto i = OutcomeStructure::independent({0.1, 0.7, 0.4, 0.9});
    auto a = OutcomeStructure::explicit_atoms(
        2, {{0.3, {1, 0}}, {0.25, {0, 1}}, {0.15, {1, 1}}});  // residual added
    for (const auto& s : {p, i, a})
        CHECK(atom_prob_sum(s.atom_distribution()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.atom_distribution().size() == 4);
    CHECK(contains_atom(a.atom_distribution(), 0.3, {0, 0}));
}

TEST_CASE("structure validation") {
    CHECK_THROWS_AS(OutcomeStructure::partition({}), validation_error);
    CHECK_THROWS_AS(OutcomeStructure::partition({0.4, 0.4}), validation_error);
    CHECK_THROWS_AS(OutcomeStructure::independent({0.0, 0.5}), validation_error);
    CHECK_THROWS_AS(OutcomeStructure::independent({1.2}), validation_error);
    CHECK_THROWS_AS(OutcomeStructure::explicit_atoms(1, {{1.4, {1}}}), validation_error);
    // Atoms must keep every marginal strictly inside (0,1).
    CHECK_THROWS_AS(OutcomeStructure::explicit_atoms(1, {{1.0, {1}}}), validation_error);
    auto big = std::vector<double>(21, 0.5);
    CHECK_THROWS_AS(OutcomeStructure::independent(big).atom_distribution(),
                    validation_error);
}

TEST_CASE("exponential payout moment: closed values") {
    auto part = OutcomeStructure::partition({0.6, 0.4});
    CHECK(part.exp_payout_moment({0.0, 0.0}, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
    const double expected = 0.6 * std::exp(2.0) + 0.4;
    CHECK(part.exp_payout_moment({1.0, 0.0}, 2.0) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(part.exp_payout_moment({1.0, 0.0}, 2.0) == doctest::Approx(4.8334336).epsilon(1e-6));

    auto ind = OutcomeStructure::independent({0.6});
    CHECK(ind.exp_payout_moment({1.0}, 2.0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("exponential payout moment: cross-encoding equality and monotonicity") {
    auto part = OutcomeStructure::partition({0.2, 0.3, 0.5});
    auto as_atoms = OutcomeStructure::explicit_atoms(
        3, {{0.2, {1, 0, 0}}, {0.3, {0, 1, 0}}, {0.5, {0, 0, 1}}});
    auto ind = OutcomeStructure::independent({0.35, 0.8});
    auto ind_atoms = OutcomeStructure::explicit_atoms(
        2, {{0.35 * 0.8, {1, 1}},
            {0.35 * 0.2, {1, 0}},
            {0.65 * 0.8, {0, 1}},
            {0.65 * 0.2, {0, 0}}});
    const std::vector<double> q3{0.7, 1.3, 0.1};
    const std::vector<double> q2{2.0, 0.4};
    CHECK(part.log_exp_payout_moment(q3, 1.7) ==
          doctest::Approx(as_atoms.log_exp_payout_moment(q3, 1.7)).epsilon(1e-13));
    CHECK(ind.log_exp_payout_moment(q2, 0.9) ==
          doctest::Approx(ind_atoms.log_exp_payout_moment(q2, 0.9)).epsilon(1e-13));

    double prev = part.exp_payout_moment({0.0, 0.0, 0.0}, 2.0);
    CHECK(prev >= 1.0);
    for (double q1 : {0.5, 1.0, 2.0, 4.0}) {
        const double cur = part.exp_payout_moment({q1, 0.0, 0.0}, 2.0);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("large books stay finite in log space") {
    auto part = OutcomeStructure::partition({0.6, 0.4});
    const double lg = part.log_exp_payout_moment({400.0, 10.0}, 2.0);
    CHECK(std::isfinite(lg));
    CHECK(lg == doctest::Approx(std::log(0.6) + 800.0).epsilon(1e-12));
}

TEST_CASE("settlement accounting") {
    CHECK(settle(5471.0, {2356.0, 2032.0, 4323.0}, {0, 0, 1}) == doctest::Approx(1148.0));
    CHECK(settle(0.0, {0.0, 0.0}, {1, 0}) == doctest::Approx(0.0));
    CHECK(settle(10.0, {3.0, 4.0}, {1, 0}) == doctest::Approx(7.0));
}

TEST_CASE("settlement is linear in revenue and monotone in winning counts") {
    const std::vector<std::uint8_t> w{1, 0};
    const double base = settle(10.0, {3.0, 4.0}, w);
    CHECK(settle(12.5, {3.0, 4.0}, w) == doctest::Approx(base + 2.5));
    CHECK(settle(10.0, {4.0, 4.0}, w) == doctest::Approx(base - 1.0));
    CHECK(settle(10.0, {3.0, 9.0}, w) == doctest::Approx(base));  // losing side free
    CHECK(settle(20.0, {6.0, 8.0}, w) == doctest::Approx(2.0 * base));
}

TEST_CASE("ledger accumulates bets and accruals") {
    BetLedger ledger(2, 5.0, {1.0, 0.0});
    ledger.add_bet(0, 0.7);
    ledger.accrue(1, 2.0, 0.5);
    CHECK(ledger.total_revenue() == doctest::Approx(5.0 + 0.7 + 1.0));
    CHECK(ledger.counts()[0] == doctest::Approx(2.0));
    CHECK(ledger.counts()[1] == doctest::Approx(2.0));
}

TEST_CASE("market state validation") {
    MarketState s{0.5, 0.0, {0.4, 0.6}, {0.0, 1.0}};
    CHECK_NOTHROW(s.validate(1.0));
    s.t = 2.0;
    CHECK_THROWS_AS(s.validate(1.0), validation_error);
    s.t = 0.5;
    s.q[0] = -1.0;
    CHECK_THROWS_AS(s.validate(1.0), validation_error);
}
