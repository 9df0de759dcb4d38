#pragma once

// Pricing policies a simulator can follow.  Static vectors and the two-piece
// time split quote fixed prices; the feedback policies recompute prices from
// the current conditional probabilities or from the series value function.

#include <cmath>
#include <memory>
#include <variant>
#include <vector>

#include "bookmaker/common.hpp"
#include "bookmaker/expdynamic.hpp"
#include "bookmaker/wealth.hpp"

namespace bookmaker {

struct StaticVectorPolicy {
    std::vector<double> u;
};

/// u_i = sqrt(P_t^i): the risk-neutral optimum under the ratio family.
struct SqrtFeedbackPolicy {};

/// u_i solves r(1+log r) = P_t^i: the risk-neutral optimum under the
/// log-ratio family.
struct LogRatioRootFeedbackPolicy {};

/// Price v_i for the first rho_i fraction of the run, then w_i.
struct TwoPiecePolicy {
    std::vector<double> v, w, rho;
};

/// Exponential-utility feedback prices from the series value function.
struct ExpUtilitySeriesPolicy {
    std::shared_ptr<const ExpDynamicModel> model;
    double tol = 1e-10;
};

using PricingPolicy = std::variant<StaticVectorPolicy, SqrtFeedbackPolicy,
                                   LogRatioRootFeedbackPolicy, TwoPiecePolicy,
                                   ExpUtilitySeriesPolicy>;

/// Prices quoted at absolute time t on [t0, T] given probabilities p and the
/// current integer book q (only the series policy reads q).
inline std::vector<double> quote_prices(const PricingPolicy& policy, double t, double t0,
                                        double horizon, const std::vector<double>& p,
                                        const std::vector<double>& q) {
    if (const auto* s = std::get_if<StaticVectorPolicy>(&policy)) {
        require(s->u.size() == p.size(), "static policy dimension mismatch");
        return s->u;
    }
    if (std::holds_alternative<SqrtFeedbackPolicy>(policy)) {
        std::vector<double> u(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) u[i] = std::sqrt(std::max(0.0, p[i]));
        return u;
    }
    if (std::holds_alternative<LogRatioRootFeedbackPolicy>(policy)) {
        std::vector<double> u(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double pi = std::min(1.0 - 1e-12, std::max(1e-12, p[i]));
            u[i] = optimal_price_logratio(pi);
        }
        return u;
    }
    if (const auto* tp = std::get_if<TwoPiecePolicy>(&policy)) {
        require(tp->v.size() == p.size(), "two-piece policy dimension mismatch");
        std::vector<double> u(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double split = t0 + tp->rho[i] * (horizon - t0);
            u[i] = t < split ? tp->v[i] : tp->w[i];
        }
        return u;
    }
    const auto& series = std::get<ExpUtilitySeriesPolicy>(policy);
    BookVector qi(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) qi[i] = long(std::llround(q[i]));
    return series.model->optimal_quote(t, qi, series.tol).u;
}

inline void validate_policy(const PricingPolicy& policy) {
    auto check_box = [](const std::vector<double>& u, const char* what) {
        for (double v : u)
            require(v >= 0.0 && v <= 1.0, std::string(what) + " must lie in [0,1]");
    };
    if (const auto* s = std::get_if<StaticVectorPolicy>(&policy)) {
        check_box(s->u, "static prices");
    } else if (const auto* tp = std::get_if<TwoPiecePolicy>(&policy)) {
        require(tp->v.size() == tp->w.size() && tp->v.size() == tp->rho.size(),
                "two-piece policy pieces must share a dimension");
        check_box(tp->v, "two-piece prices");
        check_box(tp->w, "two-piece prices");
        check_box(tp->rho, "two-piece time fractions");
    } else if (const auto* e = std::get_if<ExpUtilitySeriesPolicy>(&policy)) {
        require(e->model != nullptr, "series policy needs a value-function model");
        require(e->tol > 0.0, "series policy tolerance must be positive");
    }
}

inline std::size_t policy_dimension_hint(const PricingPolicy& policy) {
    if (const auto* s = std::get_if<StaticVectorPolicy>(&policy)) return s->u.size();
    if (const auto* tp = std::get_if<TwoPiecePolicy>(&policy)) return tp->v.size();
    if (const auto* e = std::get_if<ExpUtilitySeriesPolicy>(&policy))
        return e->model->size();
    return 0;  // feedback policies adapt to the model dimension
}

}  // namespace bookmaker
