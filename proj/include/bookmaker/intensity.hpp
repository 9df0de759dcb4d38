#pragma once

// Bet arrival rate/intensity families, their inverses, the revenue function
// f(x) = x * rate^{-1}(x) and its concave envelope.  All three families are
// decreasing in the quoted price and increasing in the outcome probability;
// the scale kappa multiplies every family.

#include <cmath>
#include <string>
#include <vector>

#include "bookmaker/common.hpp"
#include "bookmaker/numerics.hpp"

namespace bookmaker {

enum class RateFamily { ratio, logratio, exponential };

inline const char* family_name(RateFamily f) {
    switch (f) {
        case RateFamily::ratio: return "ratio";
        case RateFamily::logratio: return "logratio";
        case RateFamily::exponential: return "exponential";
    }
    return "?";
}

struct IntensityModel {
    RateFamily family = RateFamily::ratio;
    double kappa = 1.0;
    double beta = 0.0;  // exponential family only

    static IntensityModel ratio(double kappa = 1.0) { return make(RateFamily::ratio, kappa, 0.0); }
    static IntensityModel logratio(double kappa = 1.0) {
        return make(RateFamily::logratio, kappa, 0.0);
    }
    static IntensityModel exponential(double kappa, double beta) {
        return make(RateFamily::exponential, kappa, beta);
    }

    void validate() const {
        require(kappa > 0.0, "intensity scale kappa must be positive");
        if (family == RateFamily::exponential)
            require(beta > 0.0, "exponential intensity requires beta > 0");
    }

  private:
    static IntensityModel make(RateFamily f, double kappa, double beta) {
        IntensityModel m{f, kappa, beta};
        m.validate();
        return m;
    }
};

/// Arrival rate at probability p and price u.  The ratio and log-ratio
/// families blow up to +inf as the price approaches zero and vanish at
/// price one; the exponential family is finite everywhere on [0,1].
inline double rate(const IntensityModel& m, double p, double u) {
    m.validate();
    if (!is_probability(p)) throw domain_error("rate: p must lie in (0,1)");
    if (u < 0.0 || u > 1.0) throw domain_error("rate: u must lie in [0,1]");
    switch (m.family) {
        case RateFamily::ratio:
            if (u == 0.0) return kInf;
            return m.kappa * (p / (1.0 - p)) * ((1.0 - u) / u);
        case RateFamily::logratio:
            if (u == 0.0) return kInf;
            return m.kappa * std::log(u) / std::log(p);
        case RateFamily::exponential:
            return m.kappa * std::exp(-m.beta * (u - p));
    }
    throw domain_error("rate: unknown family");
}

/// Price at which the arrival rate equals x; the inverse of rate(m, p, .) on
/// (0,1].  x must lie in the range of the family at this p.
inline double inverse_rate(const IntensityModel& m, double p, double x) {
    m.validate();
    if (!is_probability(p)) throw domain_error("inverse_rate: p must lie in (0,1)");
    if (!(x >= 0.0) || !std::isfinite(x)) throw domain_error("inverse_rate: x must be finite and >= 0");
    switch (m.family) {
        case RateFamily::ratio:
            return m.kappa * p / (m.kappa * p + x * (1.0 - p));
        case RateFamily::logratio:
            return std::exp((x / m.kappa) * std::log(p));
        case RateFamily::exponential: {
            const double lo = m.kappa * std::exp(-m.beta * (1.0 - p));  // rate at u = 1
            const double hi = m.kappa * std::exp(m.beta * p);           // rate at u = 0
            if (x < lo || x >= hi)
                throw domain_error("inverse_rate: x outside the exponential family range");
            const double u = p - std::log(x / m.kappa) / m.beta;
            return std::min(1.0, std::max(u, 0.0));
        }
    }
    throw domain_error("inverse_rate: unknown family");
}

/// Revenue per unit time when bets arrive at rate x:  f(x) = x * u(x).
inline double revenue(const IntensityModel& m, double p, double x) {
    if (x == 0.0 && m.family != RateFamily::exponential) return 0.0;
    return x * inverse_rate(m, p, x);
}

/// Piecewise-linear concave envelope of the revenue function sampled on the
/// given rate grid.  Exact for the sampled points; accuracy between grid
/// nodes is grid-limited.
inline num::PiecewiseLinear concave_envelope(const IntensityModel& m, double p,
                                             const std::vector<double>& x_grid) {
    if (x_grid.size() < 3)
        throw validation_error("concave_envelope: grid needs at least 3 points");
    std::vector<double> y(x_grid.size());
    for (std::size_t i = 0; i < x_grid.size(); ++i) y[i] = revenue(m, p, x_grid[i]);
    return num::upper_concave_envelope(x_grid, y);
}

/// Uniform grid helper for envelope construction.
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
    require(points >= 2 && hi > lo, "uniform_grid: bad range");
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i)
        g[i] = lo + (hi - lo) * double(i) / double(points - 1);
    return g;
}

}  // namespace bookmaker
