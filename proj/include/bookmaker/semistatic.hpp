#pragma once

// Semi-static analysis: with constant probabilities and continuous arrivals,
// the dynamic pricing problem collapses to a static optimization over one
// constant price per outcome, with the revenue function replaced by its
// concave envelope.  This header carries the static objective, numeric
// optimizers for it, the closed first-order systems for exponential utility
// (independent and partition cases), and the two-piece policy that realizes
// an envelope point up to epsilon.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "bookmaker/common.hpp"
#include "bookmaker/intensity.hpp"
#include "bookmaker/market.hpp"
#include "bookmaker/numerics.hpp"

namespace bookmaker {

// ---------------------------------------------------------------- utility

enum class UtilityKind { identity, exponential };

struct Utility {
    UtilityKind kind = UtilityKind::identity;
    double gamma = 0.0;

    static Utility identity() { return {UtilityKind::identity, 0.0}; }
    static Utility exponential(double gamma) {
        require(gamma > 0.0, "exponential utility requires gamma > 0");
        return {UtilityKind::exponential, gamma};
    }

    double operator()(double y) const {
        return kind == UtilityKind::identity ? y : -std::exp(-gamma * y);
    }
};

// ---------------------------------------------------------------- problem

struct SemiStaticProblem {
    OutcomeStructure outcomes;
    std::vector<IntensityModel> intensity;  // one per outcome
    double tau = 1.0;                       // remaining horizon T - t
    double x0 = 0.0;
    std::vector<double> q0;
    Utility utility = Utility::identity();
    std::size_t envelope_points = 512;

    SemiStaticProblem(OutcomeStructure oc, std::vector<IntensityModel> im, double tau_,
                      Utility u = Utility::identity(), double x = 0.0,
                      std::vector<double> q = {})
        : outcomes(std::move(oc)), intensity(std::move(im)), tau(tau_), x0(x),
          q0(std::move(q)), utility(u) {
        require(tau > 0.0, "remaining horizon must be positive");
        require(intensity.size() == outcomes.size(), "one intensity model per outcome");
        if (q0.empty()) q0.assign(outcomes.size(), 0.0);
        require(q0.size() == outcomes.size(), "initial book dimension mismatch");
        for (double v : q0) require(v >= 0.0, "initial book must be nonnegative");
        build_envelopes();
    }

    std::size_t size() const { return outcomes.size(); }

    /// Envelope revenue at arrival rate x for outcome i (f itself when the
    /// family's revenue is concave).
    double envelope_revenue(std::size_t i, double x) const {
        if (!envelopes_[i].has_value()) return revenue(intensity[i], marginal(i), x);
        const auto& env = *envelopes_[i];
        if (x < env.min_x() || x > env.max_x())
            throw configuration_error("envelope grid does not cover the requested rate");
        return env(x);
    }

    bool has_envelope(std::size_t i) const { return envelopes_[i].has_value(); }
    const num::PiecewiseLinear& envelope(std::size_t i) const {
        if (!envelopes_[i])
            throw configuration_error("no envelope built for a concave revenue family");
        return *envelopes_[i];
    }

    double marginal(std::size_t i) const { return outcomes.marginals()[i]; }

  private:
    // The log-ratio revenue is the only supplied family with a convex branch;
    // ratio and exponential revenues are concave, so f-hat = f there.
    void build_envelopes() {
        envelopes_.assign(size(), std::nullopt);
        for (std::size_t i = 0; i < size(); ++i) {
            if (intensity[i].family != RateFamily::logratio) continue;
            const double p = marginal(i);
            const double x_max = rate(intensity[i], p, 1e-6);
            auto grid = uniform_grid(0.0, x_max, std::max<std::size_t>(envelope_points, 64));
            envelopes_[i] = concave_envelope(intensity[i], p, grid);
        }
    }

    std::vector<std::optional<num::PiecewiseLinear>> envelopes_;
};

// -------------------------------------------------------------- objective

/// Static objective: expected utility of the envelope wealth at constant
/// prices u, computed by exact atom enumeration.
inline double vhat_objective(const SemiStaticProblem& prob, const std::vector<double>& u) {
    require(u.size() == prob.size(), "price vector dimension mismatch");
    const std::size_t n = prob.size();
    std::vector<double> lam(n), rev(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(u[i] > 0.0 && u[i] < 1.0))
            throw domain_error("vhat_objective: prices must lie strictly in (0,1)");
        lam[i] = rate(prob.intensity[i], prob.marginal(i), u[i]);
        rev[i] = prob.envelope_revenue(i, lam[i]);
    }
    double base = prob.x0;
    for (std::size_t i = 0; i < n; ++i) base += prob.tau * rev[i];
    double expected = 0.0;
    for (const Atom& a : prob.outcomes.atom_distribution()) {
        if (a.prob <= 0.0) continue;
        double y = base;
        for (std::size_t i = 0; i < n; ++i)
            if (a.members[i]) y -= prob.q0[i] + prob.tau * lam[i];
        expected += a.prob * prob.utility(y);
    }
    return expected;
}

// -------------------------------------------- independent / partition roots

/// Optimal price for one independent outcome under the ratio family and
/// exponential utility: the root of
///   p (1/u^2 - 1) exp(gamma tau p/(1-p) (1/u - 1)) = 1 - p
/// on (0,1).  The left side decreases from +inf to 0, so bisection plus
/// Newton acceleration on the log form always lands the root.
inline double solve_exp_independent(double p, double gamma, double tau) {
    if (!is_probability(p)) throw domain_error("solve_exp_independent: p must lie in (0,1)");
    require(gamma > 0.0 && tau > 0.0, "solve_exp_independent: gamma, tau must be positive");
    const double rho = p / (1.0 - p);
    auto g = [&](double v) {
        return std::log(p) + std::log1p(-v * v) - 2.0 * std::log(v) +
               gamma * tau * rho * (1.0 / v - 1.0) - std::log1p(-p);
    };
    auto dg = [&](double v) {
        return -2.0 * v / (1.0 - v * v) - 2.0 / v - gamma * tau * rho / (v * v);
    };
    auto res = num::find_root(g, {1e-12, 1.0 - 1e-12}, 1e-13, 300, dg);
    return res.x;
}

struct PartitionSolution {
    std::vector<double> u;         // optimal prices
    double residual = 0.0;         // largest componentwise residual of the system
    double value = 0.0;            // static objective at the solution
    bool converged = false;
    bool unique = true;            // false when multi-starts reach distinct optima
    std::vector<std::vector<double>> candidates;  // distinct converged roots
};

namespace detail {

// First-order system for the partition case, in log form:
//   F_i = log[p_i (1/u_i^2 - 1) g_i] - log[sum_{j != i} p_j g_j],
//   log g_j = gamma q_j + gamma tau rho_j (1/u_j - 1).
struct PartitionSystem {
    std::vector<double> p, q, rho;
    double gamma, tau;

    std::size_t n() const { return p.size(); }

    std::vector<double> log_g(const std::vector<double>& u) const {
        std::vector<double> lg(n());
        for (std::size_t j = 0; j < n(); ++j)
            lg[j] = gamma * q[j] + gamma * tau * rho[j] * (1.0 / u[j] - 1.0);
        return lg;
    }

    std::vector<double> residuals(const std::vector<double>& u) const {
        const auto lg = log_g(u);
        std::vector<double> F(n());
        for (std::size_t i = 0; i < n(); ++i) {
            num::LogAccumulator rhs;
            for (std::size_t j = 0; j < n(); ++j)
                if (j != i) rhs.add_log(std::log(p[j]) + lg[j]);
            F[i] = std::log(p[i]) + std::log1p(-u[i] * u[i]) - 2.0 * std::log(u[i]) +
                   lg[i] - rhs.log_total();
        }
        return F;
    }

    /// Jacobian of the residuals with respect to logit-transformed prices.
    std::vector<std::vector<double>> jacobian(const std::vector<double>& u) const {
        const auto lg = log_g(u);
        std::vector<std::vector<double>> J(n(), std::vector<double>(n(), 0.0));
        for (std::size_t i = 0; i < n(); ++i) {
            num::LogAccumulator rhs;
            for (std::size_t j = 0; j < n(); ++j)
                if (j != i) rhs.add_log(std::log(p[j]) + lg[j]);
            const double log_rhs = rhs.log_total();
            for (std::size_t j = 0; j < n(); ++j) {
                double dF_du;
                if (j == i) {
                    dF_du = -2.0 * u[i] / (1.0 - u[i] * u[i]) - 2.0 / u[i] -
                            gamma * tau * rho[i] / (u[i] * u[i]);
                } else {
                    const double w = std::exp(std::log(p[j]) + lg[j] - log_rhs);
                    dF_du = w * gamma * tau * rho[j] / (u[j] * u[j]);
                }
                J[i][j] = dF_du * u[j] * (1.0 - u[j]);  // chain rule through logit
            }
        }
        return J;
    }
};

inline bool solve_linear(std::vector<std::vector<double>> A, std::vector<double>& b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        if (std::abs(A[piv][c]) < 1e-300) return false;
        std::swap(A[piv], A[c]);
        std::swap(b[piv], b[c]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = A[r][c] / A[c][c];
            for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
            b[r] -= f * b[c];
        }
    }
    for (std::size_t c = n; c-- > 0;) {
        for (std::size_t k = c + 1; k < n; ++k) b[c] -= A[c][k] * b[k];
        b[c] /= A[c][c];
    }
    return true;
}

inline double sumsq(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

/// Damped Newton iteration on logit-transformed prices; returns the final
/// iterate and whether the residual dropped below tol.
inline bool newton_partition(const PartitionSystem& sys, std::vector<double>& u, double tol) {
    const std::size_t n = sys.n();
    auto clamp = [](double v) { return std::min(1.0 - 1e-12, std::max(1e-12, v)); };
    for (std::size_t i = 0; i < n; ++i) u[i] = clamp(u[i]);
    std::vector<double> theta(n);
    for (std::size_t i = 0; i < n; ++i) theta[i] = std::log(u[i] / (1.0 - u[i]));
    auto to_u = [&](const std::vector<double>& th) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = clamp(1.0 / (1.0 + std::exp(-th[i])));
        return v;
    };
    double err = sumsq(sys.residuals(u));
    for (int it = 0; it < 200; ++it) {
        auto F = sys.residuals(u);
        double fmax = 0.0;
        for (double f : F) fmax = std::max(fmax, std::abs(f));
        if (fmax <= tol) return true;
        auto J = sys.jacobian(u);
        std::vector<double> step = F;
        if (!solve_linear(J, step)) return false;
        double alpha = 1.0;
        bool advanced = false;
        for (int half = 0; half < 40; ++half, alpha *= 0.5) {
            std::vector<double> trial = theta;
            for (std::size_t i = 0; i < n; ++i) trial[i] -= alpha * step[i];
            auto ut = to_u(trial);
            const double e = sumsq(sys.residuals(ut));
            if (e < err) {
                theta = trial;
                u = ut;
                err = e;
                advanced = true;
                break;
            }
        }
        if (!advanced) return false;
    }
    return false;
}

/// Gauss-Seidel fallback: repeatedly re-solve each coordinate's scalar
/// equation with the others frozen.
inline bool fixed_point_partition(const PartitionSystem& sys, std::vector<double>& u,
                                  double tol, int sweeps = 400) {
    const std::size_t n = sys.n();
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        double moved = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto lg = sys.log_g(u);
            num::LogAccumulator rhs;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) rhs.add_log(std::log(sys.p[j]) + lg[j]);
            const double target = rhs.log_total();
            auto g1 = [&](double v) {
                return std::log(sys.p[i]) + std::log1p(-v * v) - 2.0 * std::log(v) +
                       sys.gamma * sys.q[i] +
                       sys.gamma * sys.tau * sys.rho[i] * (1.0 / v - 1.0) - target;
            };
            auto root = num::find_root(g1, {1e-12, 1.0 - 1e-12}, 1e-13, 300);
            moved = std::max(moved, std::abs(root.x - u[i]));
            u[i] = 0.5 * (u[i] + root.x);  // damping
        }
        if (moved < 1e-13) break;
    }
    double fmax = 0.0;
    for (double f : sys.residuals(u)) fmax = std::max(fmax, std::abs(f));
    return fmax <= tol;
}

}  // namespace detail

/// Solves the coupled partition system for exponential utility under the
/// ratio family.  Newton on logit-transformed unknowns with an analytic
/// Jacobian, multi-started from the independent-case roots and a few fixed
/// grids; a damped fixed-point sweep is the fallback.  Distinct converged
/// roots are reported and the solution flagged non-unique when their
/// objective values disagree beyond 1e-9.
inline PartitionSolution solve_exp_partition(const std::vector<double>& p,
                                             const std::vector<double>& q, double gamma,
                                             double tau, double kappa = 1.0) {
    const std::size_t n = p.size();
    require(n >= 2, "partition system needs at least two outcomes");
    require(q.size() == n, "book dimension mismatch");
    double total = 0.0;
    for (double v : p) {
        require(is_probability(v), "probabilities must lie in (0,1)");
        total += v;
    }
    require(std::abs(total - 1.0) <= 1e-9, "probabilities must sum to 1");
    for (double v : q) require(v >= 0.0, "book counts must be nonnegative");
    require(gamma > 0.0 && tau > 0.0, "gamma and tau must be positive");

    // kappa scales time: rates kappa*lambda over tau behave like lambda over
    // kappa*tau in both the revenue and the exposure terms.
    detail::PartitionSystem sys;
    sys.p = p;
    sys.q = q;
    sys.gamma = gamma;
    sys.tau = tau * kappa;
    sys.rho.resize(n);
    for (std::size_t i = 0; i < n; ++i) sys.rho[i] = p[i] / (1.0 - p[i]);

    std::vector<std::vector<double>> starts;
    {
        std::vector<double> ind(n);
        for (std::size_t i = 0; i < n; ++i)
            ind[i] = solve_exp_independent(p[i], gamma, sys.tau);
        starts.push_back(ind);
        std::vector<double> sq(n);
        for (std::size_t i = 0; i < n; ++i) sq[i] = std::sqrt(p[i]);
        starts.push_back(sq);
        for (double c : {0.3, 0.5, 0.7, 0.9})
            starts.emplace_back(std::vector<double>(n, c));
    }

    std::vector<IntensityModel> models(n, IntensityModel::ratio(kappa));
    SemiStaticProblem prob(OutcomeStructure::partition(p), models, tau,
                           Utility::exponential(gamma), 0.0, q);

    PartitionSolution best;
    std::vector<std::vector<double>> roots;
    for (auto u : starts) {
        bool ok = detail::newton_partition(sys, u, 1e-12);
        if (!ok) ok = detail::fixed_point_partition(sys, u, 1e-12);
        if (!ok) continue;
        bool fresh = true;
        for (const auto& r : roots) {
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(r[i] - u[i]));
            if (d < 1e-7) {
                fresh = false;
                break;
            }
        }
        if (fresh) roots.push_back(u);
    }
    if (roots.empty()) {
        // Last resort: damped fixed point from the independent start, keep
        // whatever residual it reaches.
        auto u = starts.front();
        detail::fixed_point_partition(sys, u, 1e-8);
        roots.push_back(u);
    }

    double best_value = -kInf;
    for (const auto& r : roots) {
        const double v = vhat_objective(prob, r);
        if (v > best_value + 1e-15 ||
            (std::abs(v - best_value) <= 1e-15 && (best.u.empty() || r > best.u))) {
            best_value = v;
            best.u = r;
            best.value = v;
        }
    }
    best.candidates = roots;
    if (roots.size() > 1) {
        for (const auto& r : roots) {
            if (std::abs(vhat_objective(prob, r) - best_value) > 1e-9) continue;
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(r[i] - best.u[i]));
            if (d > 1e-7) best.unique = false;
        }
    }
    // Natural-units residual of the first-order system.
    const auto lg = sys.log_g(best.u);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num::LogAccumulator rhs;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) rhs.add_log(std::log(p[j]) + lg[j]);
        const double lhs =
            p[i] * (1.0 / (best.u[i] * best.u[i]) - 1.0) * std::exp(lg[i]);
        res = std::max(res, std::abs(lhs - std::exp(rhs.log_total())));
    }
    best.residual = res;
    double fmax = 0.0;
    for (double f : sys.residuals(best.u)) fmax = std::max(fmax, std::abs(f));
    best.converged = fmax <= 1e-10;
    return best;
}

// ---------------------------------------------------------- grid optimizer

struct SemiStaticSolution {
    std::vector<double> u;
    double value = 0.0;
    double first_order_residual = 0.0;
    bool converged = false;
};

/// Maximizes the static objective by cyclic coordinate ascent (golden-section
/// line searches) from a small multi-start grid.  Candidates reduce
/// deterministically by (value, lexicographic price vector).
inline SemiStaticSolution optimize_semistatic(const SemiStaticProblem& prob) {
    const std::size_t n = prob.size();
    const double lo = 1e-6, hi = 1.0 - 1e-6;

    std::vector<std::vector<double>> starts;
    {
        std::vector<double> sq(n);
        for (std::size_t i = 0; i < n; ++i) sq[i] = std::sqrt(prob.marginal(i));
        starts.push_back(sq);
        for (double c : {0.25, 0.5, 0.75, 0.9}) starts.emplace_back(std::vector<double>(n, c));
        if (prob.utility.kind == UtilityKind::exponential &&
            prob.intensity.front().family == RateFamily::ratio) {
            std::vector<double> ind(n);
            for (std::size_t i = 0; i < n; ++i)
                ind[i] = solve_exp_independent(prob.marginal(i), prob.utility.gamma,
                                               prob.tau * prob.intensity[i].kappa);
            starts.push_back(ind);
        }
    }

    SemiStaticSolution best;
    best.value = -kInf;
    for (auto u : starts) {
        for (auto& v : u) v = std::min(hi, std::max(lo, v));
        double value = vhat_objective(prob, u);
        bool converged = false;
        for (int pass = 0; pass < 120; ++pass) {
            double moved = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                auto line = [&](double v) {
                    auto trial = u;
                    trial[i] = v;
                    return vhat_objective(prob, trial);
                };
                const double vi = num::maximize_golden(line, lo, hi, 1e-11);
                moved = std::max(moved, std::abs(vi - u[i]));
                u[i] = vi;
            }
            value = vhat_objective(prob, u);
            // Golden section resolves the argmax to about sqrt(eps); below
            // that the line searches dither on value ties.
            if (moved < 1e-7) {
                converged = true;
                break;
            }
        }
        if (value > best.value + 1e-15 ||
            (std::abs(value - best.value) <= 1e-15 && u > best.u)) {
            best.u = u;
            best.value = value;
            best.converged = converged;
        }
    }

    // First-order residual by central differences, respecting the box.
    double res = 0.0;
    const double h = 1e-6;
    for (std::size_t i = 0; i < n; ++i) {
        auto up = best.u, dn = best.u;
        up[i] = std::min(hi, best.u[i] + h);
        dn[i] = std::max(lo, best.u[i] - h);
        const double g =
            (vhat_objective(prob, up) - vhat_objective(prob, dn)) / (up[i] - dn[i]);
        res = std::max(res, std::abs(g));
    }
    best.first_order_residual = res;
    return best;
}

// ------------------------------------------------------------ two-piece

struct TwoPiece {
    std::vector<double> v, w, rho;  // price v for the first rho fraction of time, then w
    double envelope_gap = 0.0;      // achieved mixture revenue minus envelope revenue
};

/// Builds the two-piece policy that reproduces the arrival rates of the
/// static prices u while recovering the envelope revenue to within delta.
/// Where the revenue function is concave the mixture degenerates to the
/// static price itself.
inline TwoPiece epsilon_policy(const SemiStaticProblem& prob, const std::vector<double>& u,
                               double delta) {
    require(delta > 0.0, "epsilon_policy: delta must be positive");
    require(u.size() == prob.size(), "epsilon_policy: dimension mismatch");
    const std::size_t n = prob.size();
    TwoPiece out;
    out.v = out.w = u;
    out.rho.assign(n, 1.0);
    const double per_outcome_budget = delta / (double(n) * prob.tau);

    for (std::size_t i = 0; i < n; ++i) {
        const double p = prob.marginal(i);
        const auto& model = prob.intensity[i];
        const double target = rate(model, p, u[i]);
        const double direct = revenue(model, p, target);
        if (!prob.has_envelope(i)) continue;  // concave family: degenerate piece

        // Refine the grid until the hull value at the target rate settles.
        const double x_max = std::max(prob.envelope(i).max_x(), 2.0 * target);
        std::size_t points = std::max<std::size_t>(prob.envelope_points, 256);
        double hull_at_target = 0.0;
        num::PiecewiseLinear env;
        bool settled = false;
        for (int refinement = 0; refinement < 4; ++refinement) {
            env = concave_envelope(model, p, uniform_grid(0.0, x_max, points));
            const double value = env(target);
            if (refinement > 0 &&
                std::abs(value - hull_at_target) < 0.25 * per_outcome_budget) {
                hull_at_target = value;
                settled = true;
                break;
            }
            hull_at_target = value;
            points *= 2;
        }
        if (!settled)
            throw numerical_error("epsilon_policy: envelope grid failed to settle");

        if (hull_at_target - direct <= 0.25 * per_outcome_budget) continue;  // on the hull

        // Chord endpoints: the hull vertices bracketing the target rate.
        const auto& hx = env.knots_x();
        const auto& hy = env.knots_y();
        std::size_t seg = 0;
        while (seg + 2 < hx.size() && hx[seg + 1] <= target) ++seg;
        const double xl = hx[seg], xr = hx[seg + 1];
        if (!(xl <= target && target <= xr))
            throw numerical_error("epsilon_policy: chord endpoints not found on grid");
        const double rho_i = (xr - target) / (xr - xl);
        out.v[i] = inverse_rate(model, p, xl);
        out.w[i] = inverse_rate(model, p, xr);
        out.rho[i] = rho_i;
        const double mix = rho_i * hy[seg] + (1.0 - rho_i) * hy[seg + 1];
        out.envelope_gap = std::max(out.envelope_gap, hull_at_target - mix);
    }
    return out;
}

/// Settlement profile of a constant-price book under the ratio family: the
/// whole book (initial inventory included) is valued at the quoted prices,
/// and each outcome's terminal wealth nets the payout of its bets.  Returns
/// the per-outcome wealths; the minimum is the worst-case profit.
inline std::vector<double> partition_settlement_profile(const std::vector<double>& p,
                                                        const std::vector<double>& q,
                                                        const std::vector<double>& u,
                                                        double tau, double kappa = 1.0) {
    require(p.size() == q.size() && p.size() == u.size(),
            "settlement profile: dimension mismatch");
    const std::size_t n = p.size();
    std::vector<double> total(n);
    double revenue_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lam = rate(IntensityModel::ratio(kappa), p[i], u[i]);
        total[i] = q[i] + tau * lam;
        revenue_total += u[i] * total[i];
    }
    std::vector<double> wealth(n);
    for (std::size_t i = 0; i < n; ++i) wealth[i] = revenue_total - total[i];
    return wealth;
}

/// Static wealth of a two-piece policy in each outcome atom, for direct
/// domination checks against the envelope wealth.
inline double two_piece_static_wealth(const SemiStaticProblem& prob, const TwoPiece& tp,
                                      const Atom& atom) {
    double y = prob.x0;
    for (std::size_t i = 0; i < prob.size(); ++i) {
        const double p = prob.marginal(i);
        const double xv = rate(prob.intensity[i], p, tp.v[i]);
        const double xw = rate(prob.intensity[i], p, tp.w[i]);
        const double mix_rate = tp.rho[i] * xv + (1.0 - tp.rho[i]) * xw;
        const double mix_rev = tp.rho[i] * revenue(prob.intensity[i], p, xv) +
                               (1.0 - tp.rho[i]) * revenue(prob.intensity[i], p, xw);
        y += prob.tau * mix_rev;
        if (atom.members[i]) y -= prob.q0[i] + prob.tau * mix_rate;
    }
    return y;
}

}  // namespace bookmaker
