#pragma once

// Risk-neutral optimal pricing.  The dynamic wealth-maximization problem
// reduces to maximizing lambda(p,u)(u - p) pointwise in each coordinate;
// for the ratio family the maximizer is sqrt(p) in closed form, for the
// log-ratio family it is the root of r(1 + log r) = p on (1/e, 1).

#include <cmath>
#include <vector>

#include "bookmaker/common.hpp"
#include "bookmaker/intensity.hpp"
#include "bookmaker/numerics.hpp"

namespace bookmaker {

/// Closed-form optimal price under the ratio family: u* = sqrt(p).
inline double optimal_price_ratio(double p) {
    if (!is_probability(p)) throw domain_error("optimal_price_ratio: p must lie in (0,1)");
    return std::sqrt(p);
}

inline std::vector<double> optimal_price_ratio(const std::vector<double>& p) {
    std::vector<double> u(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) u[i] = optimal_price_ratio(p[i]);
    return u;
}

/// Optimal price under the log-ratio family: the unique root of
/// r(1 + log r) = p on (1/e, 1).  Residual is driven below 1e-13.
inline double optimal_price_logratio(double p) {
    if (!is_probability(p)) throw domain_error("optimal_price_logratio: p must lie in (0,1)");
    const double lo = std::exp(-1.0);
    auto f = [p](double r) { return r * (1.0 + std::log(r)) - p; };
    auto df = [](double r) { return 2.0 + std::log(r); };
    auto res = num::find_root(f, {lo, 1.0}, 1e-14, 200, df);
    return res.x;
}

/// Pointwise maximizer of lambda(p,u)(u - p) over prices in [0,1], one
/// coordinate at a time.  Golden-section search refined by Newton where the
/// stationarity condition is available; ties break toward the larger price.
inline double pointwise_optimize(const IntensityModel& m, double p) {
    if (!is_probability(p)) throw domain_error("pointwise_optimize: p must lie in (0,1)");
    const double delta = 1e-9;
    auto objective = [&](double u) { return rate(m, p, u) * (u - p); };
    double u = num::maximize_golden(objective, delta, 1.0 - delta, 1e-12);

    // Newton polish on the stationarity condition of each family.
    switch (m.family) {
        case RateFamily::ratio: {
            // d/du [(1-u)(u-p)/u] = p/u^2 - 1
            for (int it = 0; it < 40; ++it) {
                const double g = p / (u * u) - 1.0;
                const double dg = -2.0 * p / (u * u * u);
                const double next = u - g / dg;
                if (!(next > 0.0 && next < 1.0)) break;
                if (std::abs(next - u) < 1e-16) { u = next; break; }
                u = next;
            }
            break;
        }
        case RateFamily::logratio: {
            // d/du [log(u)(u-p)] = 1 - p/u + log u
            for (int it = 0; it < 40; ++it) {
                const double g = 1.0 - p / u + std::log(u);
                const double dg = p / (u * u) + 1.0 / u;
                const double next = u - g / dg;
                if (!(next > 0.0 && next < 1.0)) break;
                if (std::abs(next - u) < 1e-16) { u = next; break; }
                u = next;
            }
            break;
        }
        case RateFamily::exponential: {
            // Stationary point u = p + 1/beta; boundary u = 1 when that exceeds 1.
            u = p + 1.0 / m.beta;
            break;
        }
    }
    u = std::min(u, 1.0);
    if (objective(1.0) >= objective(u)) u = 1.0;  // tie toward the larger price
    return u;
}

inline std::vector<double> pointwise_optimize(const IntensityModel& m,
                                              const std::vector<double>& p) {
    std::vector<double> u(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) u[i] = pointwise_optimize(m, p[i]);
    return u;
}

/// Value function of the risk-neutral problem under the ratio family with
/// constant probabilities:
///   V(t,x,p,q) = x - p.q + kappa (T-t) sum_i p_i (1-sqrt(p_i))^2 / (1-p_i).
inline double wealth_value_constantp(double t, double x, const std::vector<double>& p,
                                     const std::vector<double>& q, double horizon,
                                     double kappa = 1.0) {
    require(p.size() == q.size(), "wealth_value_constantp: dimension mismatch");
    require(t <= horizon, "wealth_value_constantp: t must not exceed T");
    require(kappa > 0.0, "wealth_value_constantp: kappa must be positive");
    double margin = 0.0;
    for (double pi : p) {
        if (!is_probability(pi))
            throw domain_error("wealth_value_constantp: p must lie in (0,1)");
        const double r = 1.0 - std::sqrt(pi);
        margin += pi * r * r / (1.0 - pi);
    }
    return x - dot(p, q) + kappa * (horizon - t) * margin;
}

struct Method3Result {
    double lambda_star = 0.0;  // optimal arrival rate
    double u_star = 0.0;       // optimal price
};

/// Optimal (rate, price) pair from the static-reduction route: the rate where
/// the envelope slope equals p, mapped back through the inverse rate.  Agrees
/// with the closed forms on both solved families.
inline Method3Result method3_consistency(const IntensityModel& m, double p) {
    if (!is_probability(p)) throw domain_error("method3_consistency: p must lie in (0,1)");
    Method3Result out;
    switch (m.family) {
        case RateFamily::ratio:
            out.lambda_star = m.kappa * (p / (1.0 - p)) * (1.0 / std::sqrt(p) - 1.0);
            out.u_star = inverse_rate(m, p, out.lambda_star);
            return out;
        case RateFamily::logratio:
            out.u_star = optimal_price_logratio(p);
            out.lambda_star = rate(m, p, out.u_star);
            return out;
        case RateFamily::exponential: {
            out.u_star = std::min(1.0, p + 1.0 / m.beta);
            out.lambda_star = rate(m, p, out.u_star);
            return out;
        }
    }
    throw domain_error("method3_consistency: unknown family");
}

}  // namespace bookmaker
