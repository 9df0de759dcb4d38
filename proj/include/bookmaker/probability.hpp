#pragma once

// Conditional-probability processes for the bet-able outcome sets.  Two
// concrete in-game models are provided -- a Poisson goal count and a Brownian
// point spread -- plus the constant vector used by the static analyses.
// Paths are produced by simulating the underlying state exactly (exponential
// goal clocks, Gaussian spread increments) and recomputing the conditional
// probabilities from it, so the probability processes are martingales by
// construction.

#include <cmath>
#include <cstdint>
#include <variant>
#include <vector>

#include "bookmaker/common.hpp"
#include "bookmaker/numerics.hpp"
#include "bookmaker/rng.hpp"

namespace bookmaker {

// ------------------------------------------------------------- constant

struct ConstantProbability {
    std::vector<double> p;

    void validate() const {
        require(!p.empty(), "constant probability vector must be nonempty");
        for (double v : p) require(is_probability(v), "probabilities must lie in (0,1)");
    }
};

// ----------------------------------------------------------- goal model

struct GoalBet {
    enum class Kind { exactly, at_least };
    Kind kind = Kind::at_least;
    int count = 1;
};

/// Goals scored follow a Poisson process with intensity mu; the single
/// bet-able set is "exactly i goals" or "at least i goals" by the horizon.
struct PoissonGoalModel {
    double mu = 1.0;
    double horizon = 1.0;
    GoalBet bet;

    void validate() const {
        require(mu >= 0.0, "goal intensity must be nonnegative");
        require(horizon > 0.0, "horizon must be positive");
        require(bet.count >= 0, "goal threshold must be a nonnegative integer");
    }

    struct State {
        std::uint64_t goals = 0;
    };

    double conditional_prob(const State& s, double t) const {
        if (t > horizon) throw domain_error("conditional_prob: t > T");
        const double tau = horizon - t;
        const auto goals = s.goals;
        if (bet.kind == GoalBet::Kind::exactly) {
            const auto target = std::uint64_t(bet.count);
            if (goals > target) return 0.0;
            if (tau == 0.0) return goals == target ? 1.0 : 0.0;
            return poisson_pmf(target - goals, mu * tau);
        }
        // at least i goals
        if (goals >= std::uint64_t(bet.count)) return 1.0;
        if (tau == 0.0) return 0.0;
        const std::uint64_t need = std::uint64_t(bet.count) - goals;
        double cdf = 0.0;  // P(fewer than `need` further goals)
        for (std::uint64_t k = 0; k < need; ++k) cdf += poisson_pmf(k, mu * tau);
        return 1.0 - std::min(1.0, cdf);
    }

    void step(State& s, double dt, Rng& rng) const {
        if (!(dt > 0.0)) throw validation_error("step: dt must be positive");
        if (mu > 0.0) s.goals += rng.poisson(mu * dt);
    }

    bool terminal_hit(const State& s) const {
        return bet.kind == GoalBet::Kind::exactly ? s.goals == std::uint64_t(bet.count)
                                                  : s.goals >= std::uint64_t(bet.count);
    }

    static double poisson_pmf(std::uint64_t k, double mean) {
        if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
        return std::exp(double(k) * std::log(mean) - mean - std::lgamma(double(k) + 1.0));
    }
};

// --------------------------------------------------------- spread model

/// Point differential modeled as arithmetic Brownian motion.  Sorted
/// thresholds c_1 < ... < c_m define m+1 band outcomes ordered from the top:
/// {spread >= c_m}, {c_{m-1} <= spread < c_m}, ..., {spread < c_1}.
struct BrownianSpreadModel {
    double mu = 0.0;
    double sigma = 1.0;
    double horizon = 1.0;
    std::vector<double> thresholds;

    void validate() const {
        require(sigma > 0.0, "spread volatility must be positive");
        require(horizon > 0.0, "horizon must be positive");
        require(!thresholds.empty(), "at least one threshold required");
        for (std::size_t i = 1; i < thresholds.size(); ++i)
            require(thresholds[i] > thresholds[i - 1],
                    "thresholds must be strictly increasing");
    }

    struct State {
        double delta = 0.0;
    };

    std::size_t n_outcomes() const { return thresholds.size() + 1; }

    /// P(spread at the horizon >= c | current spread).
    double prob_at_least(double c, const State& s, double t) const {
        if (t > horizon) throw domain_error("prob_at_least: t > T");
        const double tau = horizon - t;
        if (tau == 0.0) return s.delta >= c ? 1.0 : 0.0;
        return num::normal_cdf((s.delta + mu * tau - c) / (sigma * std::sqrt(tau)));
    }

    /// Band probabilities, top band first.
    std::vector<double> outcome_probs(const State& s, double t) const {
        const std::size_t m = thresholds.size();
        std::vector<double> tail(m);
        for (std::size_t j = 0; j < m; ++j) tail[j] = prob_at_least(thresholds[j], s, t);
        std::vector<double> p(m + 1);
        p[0] = tail[m - 1];
        for (std::size_t j = 1; j < m; ++j) p[j] = tail[m - 1 - j] - tail[m - j];
        p[m] = 1.0 - tail[0];
        for (double& v : p) v = std::min(1.0, std::max(0.0, v));
        return p;
    }

    void step(State& s, double dt, Rng& rng) const {
        if (!(dt > 0.0)) throw validation_error("step: dt must be positive");
        s.delta += mu * dt + sigma * std::sqrt(dt) * rng.normal();
    }

    /// Membership vector of the realized band at the horizon.
    std::vector<std::uint8_t> terminal_membership(const State& s) const {
        const std::size_t m = thresholds.size();
        std::vector<std::uint8_t> members(m + 1, 0);
        std::size_t band = m;  // bottom band by default
        for (std::size_t j = m; j-- > 0;) {
            if (s.delta >= thresholds[j]) {
                band = m - 1 - j;
                break;
            }
        }
        members[band] = 1;
        return members;
    }
};

// ---------------------------------------------------------------- variant

using ProbabilityModel =
    std::variant<ConstantProbability, PoissonGoalModel, BrownianSpreadModel>;

struct ModelState {
    PoissonGoalModel::State goal;
    BrownianSpreadModel::State spread;
};

inline std::size_t n_outcomes(const ProbabilityModel& m) {
    if (const auto* c = std::get_if<ConstantProbability>(&m)) return c->p.size();
    if (std::holds_alternative<PoissonGoalModel>(m)) return 1;
    return std::get<BrownianSpreadModel>(m).n_outcomes();
}

inline double model_horizon(const ProbabilityModel& m, double fallback) {
    if (const auto* g = std::get_if<PoissonGoalModel>(&m)) return g->horizon;
    if (const auto* b = std::get_if<BrownianSpreadModel>(&m)) return b->horizon;
    return fallback;
}

inline std::vector<double> conditional_probs(const ProbabilityModel& m, const ModelState& s,
                                             double t) {
    if (const auto* c = std::get_if<ConstantProbability>(&m)) return c->p;
    if (const auto* g = std::get_if<PoissonGoalModel>(&m))
        return {g->conditional_prob(s.goal, t)};
    return std::get<BrownianSpreadModel>(m).outcome_probs(s.spread, t);
}

inline void step_model(const ProbabilityModel& m, ModelState& s, double dt, Rng& rng) {
    if (std::holds_alternative<ConstantProbability>(m)) return;  // nothing to advance
    if (const auto* g = std::get_if<PoissonGoalModel>(&m)) {
        g->step(s.goal, dt, rng);
        return;
    }
    std::get<BrownianSpreadModel>(m).step(s.spread, dt, rng);
}

}  // namespace bookmaker
