#pragma once

// Shared numerical kernels: bracketed root finding, golden-section
// maximization, normal CDF, log-space accumulation, upper concave
// envelopes and series tail bounds.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "bookmaker/common.hpp"

namespace bookmaker::num {

// ---------------------------------------------------------------- roots

struct Bracket {
    double lo;
    double hi;
};

struct RootResult {
    double x = 0.0;
    double f_x = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Bisection on a sign-changing bracket, accelerated by Newton steps when a
/// derivative is supplied.  Newton iterates are accepted only while they stay
/// inside the current bracket, so convergence is guaranteed.
template <class F>
RootResult find_root(F&& f, Bracket br, double tol = 1e-12, int max_iter = 200,
                     const std::function<double(double)>& dfdx = {}) {
    if (!(br.lo < br.hi)) throw validation_error("find_root: bracket must satisfy lo < hi");
    double flo = f(br.lo);
    double fhi = f(br.hi);
    if (flo == 0.0) return {br.lo, 0.0, 0, true};
    if (fhi == 0.0) return {br.hi, 0.0, 0, true};
    if (!(flo * fhi < 0.0)) throw validation_error("find_root: no sign change on bracket");

    double lo = br.lo, hi = br.hi;
    double x = 0.5 * (lo + hi);
    double fx = f(x);
    RootResult out;
    for (int it = 0; it < max_iter; ++it) {
        out.iterations = it + 1;
        if (std::abs(fx) <= tol) {
            out.x = x;
            out.f_x = fx;
            out.converged = true;
            return out;
        }
        if (fx * flo < 0.0) {
            hi = x;
            fhi = fx;
        } else {
            lo = x;
            flo = fx;
        }
        double next = 0.5 * (lo + hi);
        if (dfdx) {
            const double d = dfdx(x);
            if (std::isfinite(d) && d != 0.0) {
                const double newton = x - fx / d;
                if (newton > lo && newton < hi) next = newton;
            }
        }
        x = next;
        fx = f(x);
    }
    out.x = x;
    out.f_x = fx;
    out.converged = std::abs(fx) <= tol;
    if (!out.converged) throw numerical_error("find_root: max iterations exceeded");
    return out;
}

/// Golden-section search for the maximizer of a unimodal function on [a,b].
/// Ties are resolved toward the larger argument.
template <class F>
double maximize_golden(F&& f, double a, double b, double tol_x = 1e-12, int max_iter = 400) {
    if (!(a < b)) throw validation_error("maximize_golden: empty interval");
    constexpr double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < max_iter && (b - a) > tol_x; ++it) {
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

// ------------------------------------------------------------ normal cdf

/// Standard normal CDF.  Absolute error below 1e-12 on the whole line
/// (complementary-error-function evaluation).
inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

// --------------------------------------------------------- log-space sums

/// Accumulates a sum of positive terms supplied as logarithms, returning the
/// logarithm of the total.  Stable for terms spanning hundreds of orders of
/// magnitude.
class LogAccumulator {
  public:
    void add_log(double log_term) {
        if (log_term == -kInf) return;
        if (empty_) {
            max_ = log_term;
            sum_ = 1.0;
            empty_ = false;
            return;
        }
        if (log_term <= max_) {
            sum_ += std::exp(log_term - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
            max_ = log_term;
        }
    }
    bool empty() const { return empty_; }
    double log_total() const { return empty_ ? -kInf : max_ + std::log(sum_); }

  private:
    bool empty_ = true;
    double max_ = -kInf;
    double sum_ = 0.0;
};

inline double log_sum_exp(double la, double lb) {
    if (la == -kInf) return lb;
    if (lb == -kInf) return la;
    const double m = std::max(la, lb);
    return m + std::log(std::exp(la - m) + std::exp(lb - m));
}

// ----------------------------------------------------- piecewise linear

/// Piecewise-linear function on strictly increasing knots; evaluation clamps
/// nothing and refuses arguments outside the knot range.
class PiecewiseLinear {
  public:
    PiecewiseLinear() = default;
    PiecewiseLinear(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        require(x_.size() == y_.size() && x_.size() >= 2,
                "PiecewiseLinear: need at least two knots");
        for (std::size_t i = 1; i < x_.size(); ++i)
            require(x_[i] > x_[i - 1], "PiecewiseLinear: knots must be strictly increasing");
    }

    double operator()(double x) const {
        if (x < x_.front() || x > x_.back())
            throw domain_error("PiecewiseLinear: argument outside knot range");
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t hi = std::min<std::size_t>(x_.size() - 1, std::size_t(it - x_.begin()));
        if (hi == 0) hi = 1;
        const std::size_t lo = hi - 1;
        const double w = (x - x_[lo]) / (x_[hi] - x_[lo]);
        return y_[lo] + w * (y_[hi] - y_[lo]);
    }

    double min_x() const { return x_.front(); }
    double max_x() const { return x_.back(); }
    const std::vector<double>& knots_x() const { return x_; }
    const std::vector<double>& knots_y() const { return y_; }

  private:
    std::vector<double> x_, y_;
};

/// Minimal concave majorant of a sampled function: the upper convex hull of
/// the point set, built with a monotone chain.  Hull vertices are a subset of
/// the input points.
inline PiecewiseLinear upper_concave_envelope(const std::vector<double>& x,
                                              const std::vector<double>& y) {
    require(x.size() == y.size(), "upper_concave_envelope: size mismatch");
    require(x.size() >= 3, "upper_concave_envelope: need at least 3 points");
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (x[i] == x[i - 1]) throw validation_error("upper_concave_envelope: duplicate x");
        require(x[i] > x[i - 1], "upper_concave_envelope: x must be strictly increasing");
    }
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < x.size(); ++i) {
        while (hull.size() >= 2) {
            const std::size_t a = hull[hull.size() - 2];
            const std::size_t b = hull[hull.size() - 1];
            // Remove b when it lies on or below chord a--i.
            const double cross =
                (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]);
            if (cross >= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(i);
    }
    std::vector<double> hx, hy;
    hx.reserve(hull.size());
    hy.reserve(hull.size());
    for (std::size_t idx : hull) {
        hx.push_back(x[idx]);
        hy.push_back(y[idx]);
    }
    return PiecewiseLinear(std::move(hx), std::move(hy));
}

// -------------------------------------------------------- series bounds

/// log of sum_{k>K} x^k / k!  (the remainder of exp(x) after K terms).
inline double log_exp_series_remainder(double x, long K) {
    if (x <= 0.0) return -kInf;
    const double lx = std::log(x);
    LogAccumulator acc;
    double prev = -kInf;
    for (long k = K + 1;; ++k) {
        const double lt = double(k) * lx - std::lgamma(double(k) + 1.0);
        acc.add_log(lt);
        // Terms decay once k exceeds x; stop when negligible.
        if (double(k) > x && lt < acc.log_total() - 45.0 && lt < prev) break;
        prev = lt;
        if (k > K + 4000000) throw numerical_error("log_exp_series_remainder: no convergence");
    }
    return acc.log_total();
}

inline double exp_series_remainder(double x, long K) {
    return std::exp(log_exp_series_remainder(x, K));
}

/// Certified bound on the tail sum_{k>K} |alpha_k| tau^k of the book value
/// series, using |alpha_k| <= (n b)^k / k! with b the largest series constant
/// and the boundary factor bounded by one.  Finite, decreasing in K and
/// vanishing as K grows.
inline double series_tail_bound(std::size_t n, double b, long K, double tau) {
    require(b >= 0.0 && tau >= 0.0, "series_tail_bound: b and tau must be nonnegative");
    if (b == 0.0 || tau == 0.0) return 0.0;
    return exp_series_remainder(double(n) * b * tau, K);
}

}  // namespace bookmaker::num
