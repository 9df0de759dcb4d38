#pragma once

// Path simulation of the controlled betting market under both arrival
// models, the exact coin analytics, and the point-spread experiment.
//
// Continuous arrivals integrate the rate on a left-endpoint grid.  Poisson
// arrivals use exact exponential clocks when the intensities are constant
// between events, and thinning against a per-step majorant when the
// probabilities move.  Every path draws from its own substream of the master
// seed, so results are identical no matter how paths are scheduled across
// threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "bookmaker/common.hpp"
#include "bookmaker/intensity.hpp"
#include "bookmaker/market.hpp"
#include "bookmaker/policy.hpp"
#include "bookmaker/probability.hpp"
#include "bookmaker/rng.hpp"

namespace bookmaker {

enum class ArrivalKind { continuous, poisson };

struct SimulationConfig {
    ArrivalKind arrivals = ArrivalKind::poisson;
    ProbabilityModel prob_model;
    std::optional<OutcomeStructure> outcomes;  // joint law; required for constant models
    std::vector<IntensityModel> intensity;
    PricingPolicy policy;
    double horizon = 1.0;
    double dt = 0.0;  // 0: horizon/500 for diffusion grids
    std::size_t paths = 1;
    std::uint64_t seed = 1;
    double x0 = 0.0;
    std::vector<double> q0;
    std::optional<BookVector> caps;
    unsigned threads = 1;

    std::size_t dimension() const { return n_outcomes(prob_model); }

    void validate() const {
        const std::size_t n = dimension();
        require(n > 0, "no outcomes");
        require(intensity.size() == n, "one intensity model per outcome");
        for (const auto& m : intensity) m.validate();
        require(horizon > 0.0, "horizon must be positive");
        require(paths >= 1, "need at least one path");
        require(dt >= 0.0, "dt must be nonnegative");
        if (!q0.empty()) require(q0.size() == n, "initial book dimension mismatch");
        if (caps) {
            require(caps->size() == n, "caps dimension mismatch");
            for (std::size_t i = 0; i < n; ++i) {
                require((*caps)[i] >= 0, "caps must be nonnegative");
                if (!q0.empty())
                    require(q0[i] <= double((*caps)[i]), "initial book exceeds the caps");
            }
        }
        if (std::holds_alternative<ConstantProbability>(prob_model))
            require(outcomes.has_value(),
                    "constant-probability simulations need an outcome structure");
        if (std::holds_alternative<ExpUtilitySeriesPolicy>(policy) &&
            arrivals != ArrivalKind::poisson)
            throw validation_error("series policy requires Poisson arrivals");
        validate_policy(policy);
        const std::size_t hint = policy_dimension_hint(policy);
        if (hint) require(hint == n, "policy dimension mismatch");
    }
};

struct PathRecord {
    double profit = 0.0;                 // Y_T
    std::vector<double> final_counts;    // Q_T per outcome
    int winning_outcome = -1;            // first outcome the realized atom belongs to, -1 if none
};

struct SimulationSummary {
    std::size_t paths = 0;
    double mean = 0.0, sd = 0.0;
    double min = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, max = 0.0;
    double win_prob = 0.0, win_prob_se = 0.0;
    std::vector<double> mean_final_counts;
    std::uint64_t majorant_breaches = 0;
    std::vector<PathRecord> records;
};

namespace detail {

/// Quantile by linear interpolation on the order statistics.
inline double quantile_sorted(const std::vector<double>& sorted, double alpha) {
    if (sorted.size() == 1) return sorted[0];
    const double h = alpha * double(sorted.size() - 1);
    const std::size_t lo = std::size_t(std::floor(h));
    const std::size_t hi = std::min(sorted.size() - 1, lo + 1);
    const double w = h - double(lo);
    return sorted[lo] + w * (sorted[hi] - sorted[lo]);
}

inline SimulationSummary summarize(std::vector<PathRecord> records, std::size_t n_outcomes,
                                   std::uint64_t breaches) {
    SimulationSummary s;
    s.paths = records.size();
    s.majorant_breaches = breaches;
    s.mean_final_counts.assign(n_outcomes, 0.0);
    std::vector<double> y;
    y.reserve(records.size());
    std::size_t wins = 0;
    for (const auto& r : records) {
        y.push_back(r.profit);
        if (r.profit > 0.0) ++wins;
        for (std::size_t i = 0; i < n_outcomes; ++i)
            s.mean_final_counts[i] += r.final_counts[i];
    }
    for (double& c : s.mean_final_counts) c /= double(records.size());
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= double(y.size());
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    var = y.size() > 1 ? var / double(y.size() - 1) : 0.0;
    std::sort(y.begin(), y.end());
    s.mean = mean;
    s.sd = std::sqrt(var);
    s.min = y.front();
    s.max = y.back();
    s.q25 = quantile_sorted(y, 0.25);
    s.median = quantile_sorted(y, 0.50);
    s.q75 = quantile_sorted(y, 0.75);
    s.win_prob = double(wins) / double(y.size());
    s.win_prob_se = std::sqrt(std::max(0.0, s.win_prob * (1.0 - s.win_prob)) /
                              double(y.size()));
    s.records = std::move(records);
    return s;
}

/// Arrival rate with stable closed forms for the feedback pairs that admit
/// them, so probabilities pinned at 0 or 1 by a decided event do not blow up
/// spuriously.  A static price below 1 on a decided outcome genuinely has
/// unbounded demand under the ratio/logratio families and is rejected.
inline double policy_rate(const IntensityModel& m, const PricingPolicy& policy, double p,
                          double u) {
    if (std::holds_alternative<SqrtFeedbackPolicy>(policy) &&
        m.family == RateFamily::ratio) {
        const double s = std::sqrt(std::min(1.0, std::max(0.0, p)));
        return m.kappa * s / (1.0 + s);  // kappa p/(1-p) (1-sqrt p)/sqrt p, simplified
    }
    if (std::holds_alternative<LogRatioRootFeedbackPolicy>(policy) &&
        m.family == RateFamily::logratio) {
        // log u / log p stays in [0, 1/2] along the root curve; pin p away
        // from the endpoints where the quotient degenerates to 0/0.
        const double pc = std::min(1.0 - 1e-12, std::max(1e-12, p));
        return rate(m, pc, std::min(1.0 - 1e-16, std::max(u, std::exp(-1.0))));
    }
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) {
        if (m.family == RateFamily::exponential) return rate(m, 1.0 - 1e-12, u);
        throw policy_error("arrival rate unbounded: probability reached 1");
    }
    const double lam = rate(m, p, u);
    if (!std::isfinite(lam))
        throw policy_error("arrival rate unbounded: price reached 0");
    return lam;
}

inline std::vector<std::uint8_t> draw_membership(const ProbabilityModel& model,
                                                 const std::optional<OutcomeStructure>& oc,
                                                 const ModelState& state, Rng& rng) {
    if (std::holds_alternative<ConstantProbability>(model)) {
        const auto atoms = oc->atom_distribution();
        std::vector<double> w(atoms.size());
        for (std::size_t i = 0; i < atoms.size(); ++i) w[i] = atoms[i].prob;
        return atoms[rng.categorical(w)].members;
    }
    if (const auto* g = std::get_if<PoissonGoalModel>(&model))
        return {std::uint8_t(g->terminal_hit(state.goal) ? 1 : 0)};
    return std::get<BrownianSpreadModel>(model).terminal_membership(state.spread);
}

inline int first_member(const std::vector<std::uint8_t>& members) {
    for (std::size_t i = 0; i < members.size(); ++i)
        if (members[i]) return int(i);
    return -1;
}

struct PathResult {
    PathRecord record;
    std::uint64_t breaches = 0;
};

// ------------------------------------------------- continuous arrivals

inline PathResult run_continuous_path(const SimulationConfig& cfg, std::uint64_t path) {
    Rng rng = Rng::substream(cfg.seed, path);
    const std::size_t n = cfg.dimension();
    ModelState state;
    BetLedger ledger(n, cfg.x0, cfg.q0);
    const double dt = cfg.dt > 0.0 ? cfg.dt : cfg.horizon / 500.0;
    double t = 0.0;
    while (t < cfg.horizon) {
        const double step = std::min(dt, cfg.horizon - t);
        const auto p = conditional_probs(cfg.prob_model, state, t);
        const auto u = quote_prices(cfg.policy, t, 0.0, cfg.horizon, p, ledger.counts());
        for (std::size_t i = 0; i < n; ++i) {
            const double lam = policy_rate(cfg.intensity[i], cfg.policy, p[i], u[i]);
            if (lam > 0.0) ledger.accrue(i, lam * step, u[i]);
        }
        if (!std::holds_alternative<ConstantProbability>(cfg.prob_model))
            step_model(cfg.prob_model, state, step, rng);
        t += step;
    }
    PathResult out;
    const auto members = draw_membership(cfg.prob_model, cfg.outcomes, state, rng);
    out.record.profit = settle(ledger.total_revenue(), ledger.counts(), members);
    out.record.final_counts = ledger.counts();
    out.record.winning_outcome = first_member(members);
    return out;
}

// --------------------------------------- Poisson arrivals, constant p

inline PathResult run_poisson_constant_path(const SimulationConfig& cfg, std::uint64_t path) {
    Rng rng = Rng::substream(cfg.seed, path);
    const auto& constant = std::get<ConstantProbability>(cfg.prob_model);
    const std::vector<double>& p = constant.p;
    const std::size_t n = p.size();
    BetLedger ledger(n, cfg.x0, cfg.q0);
    ModelState state;  // unused for constant models

    const bool series = std::holds_alternative<ExpUtilitySeriesPolicy>(cfg.policy);
    auto capped_out = [&](std::size_t i) {
        return cfg.caps && ledger.counts()[i] >= double((*cfg.caps)[i]);
    };

    double t = 0.0;
    if (series) {
        // Thinning against the exact per-outcome bound kappa e^{beta p_i}
        // (prices stay in [0,1], so the exponential intensity never exceeds it).
        std::vector<double> majorant(n);
        for (std::size_t i = 0; i < n; ++i) {
            require(cfg.intensity[i].family == RateFamily::exponential,
                    "series policy requires the exponential intensity family");
            majorant[i] = cfg.intensity[i].kappa * std::exp(cfg.intensity[i].beta * p[i]);
        }
        while (t < cfg.horizon) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (!capped_out(i)) total += majorant[i];
            if (total <= 0.0) break;
            t += rng.exponential(total);
            if (t >= cfg.horizon) break;
            std::vector<double> w(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                if (!capped_out(i)) w[i] = majorant[i];
            const std::size_t i = rng.categorical(w);
            const auto u = quote_prices(cfg.policy, t, 0.0, cfg.horizon, p, ledger.counts());
            const double lam = rate(cfg.intensity[i], p[i], u[i]);
            if (rng.uniform() < lam / majorant[i]) ledger.add_bet(i, u[i]);
        }
    } else {
        // Exponential clocks segment by segment: rates are constant between
        // events and two-piece switch times.
        std::vector<double> switches;
        if (const auto* tp = std::get_if<TwoPiecePolicy>(&cfg.policy))
            for (double r : tp->rho) switches.push_back(r * cfg.horizon);
        switches.push_back(cfg.horizon);
        std::sort(switches.begin(), switches.end());
        while (t < cfg.horizon) {
            const auto u = quote_prices(cfg.policy, t, 0.0, cfg.horizon, p, ledger.counts());
            std::vector<double> lam(n, 0.0);
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (capped_out(i)) continue;
                lam[i] = policy_rate(cfg.intensity[i], cfg.policy, p[i], u[i]);
                total += lam[i];
            }
            double segment_end = cfg.horizon;
            for (double s : switches)
                if (s > t + 1e-15) {
                    segment_end = std::min(segment_end, s);
                    break;
                }
            if (total <= 0.0) {
                t = segment_end;
                continue;
            }
            const double wait = rng.exponential(total);
            if (t + wait >= segment_end) {
                t = segment_end;
                continue;
            }
            t += wait;
            const std::size_t i = rng.categorical(lam);
            ledger.add_bet(i, u[i]);
        }
    }

    PathResult out;
    const auto members = draw_membership(cfg.prob_model, cfg.outcomes, state, rng);
    out.record.profit = settle(ledger.total_revenue(), ledger.counts(), members);
    out.record.final_counts = ledger.counts();
    out.record.winning_outcome = first_member(members);
    return out;
}

// ------------------------------------- Poisson arrivals, stochastic p

struct Candidate {
    double time;
    std::size_t outcome;
};

inline PathResult run_poisson_thinning_path(const SimulationConfig& cfg, std::uint64_t path) {
    Rng rng = Rng::substream(cfg.seed, path);
    const std::size_t n = cfg.dimension();
    if (std::holds_alternative<ExpUtilitySeriesPolicy>(cfg.policy))
        throw policy_error("series policy assumes constant probabilities");
    ModelState state;
    BetLedger ledger(n, cfg.x0, cfg.q0);
    const double dt = cfg.dt > 0.0 ? cfg.dt : cfg.horizon / 500.0;
    const bool exact_bound = std::holds_alternative<SqrtFeedbackPolicy>(cfg.policy);
    std::uint64_t breaches = 0;

    double t0 = 0.0;
    std::vector<Candidate> cands;
    while (t0 < cfg.horizon) {
        const double step = std::min(dt, cfg.horizon - t0);
        const auto p0 = conditional_probs(cfg.prob_model, state, t0);
        const auto u0 = quote_prices(cfg.policy, t0, 0.0, cfg.horizon, p0, ledger.counts());

        // Per-step majorants.  For the sqrt policy under the ratio family the
        // intensity kappa sqrt(p)/(1+sqrt(p)) is globally bounded by kappa/2,
        // which keeps the thinning exact; otherwise a 1.5x start-state factor
        // is used and overshoots are counted rather than fatal.
        std::vector<double> majorant(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (exact_bound && cfg.intensity[i].family == RateFamily::ratio) {
                majorant[i] = 0.5 * cfg.intensity[i].kappa;
            } else {
                const double lam0 =
                    policy_rate(cfg.intensity[i], cfg.policy, p0[i], u0[i]);
                majorant[i] = std::max(1.5 * lam0, 1e-3 * cfg.intensity[i].kappa);
            }
        }

        cands.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t count = rng.poisson(majorant[i] * step);
            for (std::uint64_t k = 0; k < count; ++k)
                cands.push_back({t0 + rng.uniform() * step, i});
        }
        std::sort(cands.begin(), cands.end(),
                  [](const Candidate& a, const Candidate& b) { return a.time < b.time; });

        double t_cur = t0;
        for (const Candidate& c : cands) {
            if (c.time > t_cur) {
                step_model(cfg.prob_model, state, c.time - t_cur, rng);
                t_cur = c.time;
            }
            if (cfg.caps && ledger.counts()[c.outcome] >= double((*cfg.caps)[c.outcome]))
                continue;
            const auto p = conditional_probs(cfg.prob_model, state, t_cur);
            const auto u =
                quote_prices(cfg.policy, t_cur, 0.0, cfg.horizon, p, ledger.counts());
            const double lam =
                policy_rate(cfg.intensity[c.outcome], cfg.policy, p[c.outcome], u[c.outcome]);
            double accept = lam / majorant[c.outcome];
            if (accept > 1.0) {
                ++breaches;
                accept = 1.0;
            }
            if (rng.uniform() < accept) ledger.add_bet(c.outcome, u[c.outcome]);
        }
        if (t0 + step > t_cur)
            step_model(cfg.prob_model, state, t0 + step - t_cur, rng);
        t0 += step;
    }

    PathResult out;
    out.breaches = breaches;
    const auto members = draw_membership(cfg.prob_model, cfg.outcomes, state, rng);
    out.record.profit = settle(ledger.total_revenue(), ledger.counts(), members);
    out.record.final_counts = ledger.counts();
    out.record.winning_outcome = first_member(members);
    return out;
}

template <class PathFn>
SimulationSummary run_many(const SimulationConfig& cfg, PathFn&& one_path) {
    std::vector<PathRecord> records(cfg.paths);
    std::vector<std::uint64_t> breaches(cfg.paths, 0);
    const unsigned workers =
        std::max(1u, std::min<unsigned>(cfg.threads, std::thread::hardware_concurrency()));
    if (workers <= 1 || cfg.paths < 2) {
        for (std::size_t i = 0; i < cfg.paths; ++i) {
            auto r = one_path(cfg, i);
            records[i] = std::move(r.record);
            breaches[i] = r.breaches;
        }
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (cfg.paths + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(cfg.paths, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi] {
                for (std::size_t i = lo; i < hi; ++i) {
                    auto r = one_path(cfg, i);
                    records[i] = std::move(r.record);
                    breaches[i] = r.breaches;
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    std::uint64_t total_breaches = 0;
    for (auto b : breaches) total_breaches += b;
    return summarize(std::move(records), cfg.dimension(), total_breaches);
}

}  // namespace detail

/// Continuous-arrival simulation (deterministic bet flow, left-endpoint
/// quadrature on the time grid).
inline SimulationSummary run_continuous(const SimulationConfig& cfg) {
    cfg.validate();
    require(cfg.arrivals == ArrivalKind::continuous, "config is not a continuous run");
    return detail::run_many(cfg, detail::run_continuous_path);
}

/// Poisson-arrival simulation.  Constant-probability models use exact
/// event-driven clocks (or exact-majorant thinning for the series policy);
/// models with moving probabilities use per-step thinning.
inline SimulationSummary run_poisson(const SimulationConfig& cfg) {
    cfg.validate();
    require(cfg.arrivals == ArrivalKind::poisson, "config is not a Poisson run");
    if (std::holds_alternative<ConstantProbability>(cfg.prob_model))
        return detail::run_many(cfg, detail::run_poisson_constant_path);
    return detail::run_many(cfg, detail::run_poisson_thinning_path);
}

inline SimulationSummary run(const SimulationConfig& cfg) {
    return cfg.arrivals == ArrivalKind::continuous ? run_continuous(cfg) : run_poisson(cfg);
}

// ------------------------------------------------------- coin analytics

/// Arrival rate of the sqrt-price policy under the ratio family:
/// lambda(p, sqrt p) = sqrt(p)(1 - sqrt(p)) / (1 - p).
inline double coin_optimal_rate(double p, double kappa = 1.0) {
    if (!is_probability(p)) throw domain_error("coin_optimal_rate: p must lie in (0,1)");
    const double s = std::sqrt(p);
    return kappa * s * (1.0 - s) / (1.0 - p);
}

/// Deterministic profit rate of the continuous-arrival coin market under the
/// optimal prices; terminal profit is psi1(p) * T on Heads and
/// psi1(1-p) * T on Tails.  Decreasing on (0,1) with limits 1/2 and 0.
inline double psi1(double p_hat) {
    if (!is_probability(p_hat)) throw domain_error("psi1: p must lie in (0,1)");
    const double s = std::sqrt(p_hat);
    const double sc = std::sqrt(1.0 - p_hat);
    return (p_hat / (1.0 - p_hat)) * (2.0 - s - 1.0 / s) +
           ((1.0 - p_hat) / p_hat) * (1.0 - sc);
}

namespace detail {

/// Largest integer strictly less than x (ties at integers step down).
inline long strictly_below(double x) {
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-12 * std::max(1.0, std::abs(x))) return long(r) - 1;
    return long(std::floor(x));
}

}  // namespace detail

/// Exact probability that the Poisson-arrival coin market ends profitable
/// under the optimal constant prices: two nested Poisson series, truncated
/// when the outer tail is negligible.
inline double coin_profit_prob_exact(double p_hat, double horizon) {
    if (!is_probability(p_hat)) throw domain_error("coin_profit_prob_exact: p in (0,1)");
    require(horizon > 0.0, "coin_profit_prob_exact: horizon must be positive");
    const double l1 = coin_optimal_rate(p_hat) * horizon;
    const double l2 = coin_optimal_rate(1.0 - p_hat) * horizon;
    const double c1 = std::sqrt(1.0 - p_hat) / (1.0 - std::sqrt(p_hat));
    const double c2 = std::sqrt(p_hat) / (1.0 - std::sqrt(1.0 - p_hat));

    // sum_{j>=1} P(N_a = j) P(N_b <= strictly_below(c j)).
    auto nested = [](double a, double b, double c) {
        std::vector<double> cdf_b{std::exp(-b)};  // running CDF of Poisson(b)
        auto cdf_upto = [&](long m) {
            if (m < 0) return 0.0;
            while (long(cdf_b.size()) <= m) {
                const long k = long(cdf_b.size());
                cdf_b.push_back(cdf_b.back() +
                                std::exp(double(k) * std::log(b) - b -
                                         std::lgamma(double(k) + 1.0)));
            }
            return std::min(1.0, cdf_b[std::size_t(m)]);
        };
        double total = 0.0;
        double pmf = std::exp(-a);  // P(N_a = 0)
        for (long j = 1;; ++j) {
            pmf *= a / double(j);
            total += pmf * cdf_upto(detail::strictly_below(c * double(j)));
            if (double(j) > a && pmf < 1e-18) break;
        }
        return total;
    };

    return p_hat * nested(l2, l1, c1) + (1.0 - p_hat) * nested(l1, l2, c2);
}

// ------------------------------------------------------ spread experiment

struct SpreadExperimentParams {
    double mu = 2.33;
    double sigma = 10.0;
    double kappa = 10000.0;
    double horizon = 1.0;
    double dt = 0.0;  // default horizon/500
    std::vector<double> thresholds = {0.0, 3.0};
    double x0 = 0.0;
};

inline SimulationConfig spread_experiment_config(const SpreadExperimentParams& p,
                                                 std::size_t paths, std::uint64_t seed,
                                                 unsigned threads = 1) {
    BrownianSpreadModel model;
    model.mu = p.mu;
    model.sigma = p.sigma;
    model.horizon = p.horizon;
    model.thresholds = p.thresholds;
    model.validate();
    SimulationConfig cfg;
    cfg.arrivals = ArrivalKind::poisson;
    cfg.prob_model = model;
    cfg.intensity.assign(model.n_outcomes(), IntensityModel::ratio(p.kappa));
    cfg.policy = SqrtFeedbackPolicy{};
    cfg.horizon = p.horizon;
    cfg.dt = p.dt;
    cfg.paths = paths;
    cfg.seed = seed;
    cfg.x0 = p.x0;
    cfg.threads = threads;
    return cfg;
}

/// Monte Carlo study of spreads betting with the sqrt-price policy and a
/// home-advantage drift; returns the profit summary with per-path records.
inline SimulationSummary nba_experiment(const SpreadExperimentParams& params,
                                        std::size_t paths, std::uint64_t seed,
                                        unsigned threads = 1) {
    return run_poisson(spread_experiment_config(params, paths, seed, threads));
}

}  // namespace bookmaker
