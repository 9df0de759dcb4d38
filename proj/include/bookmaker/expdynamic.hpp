#pragma once

// Exponential-utility dynamic solution under Poisson arrivals with the
// exponential intensity family and constant probabilities.  The value
// function is -exp(-gamma x) [G(t,q)]^{-1/c} where G solves the linear
// system  d/dt G(t,q) + sum_i h_i G(t,q+e_i) = 0,  G(T,q) = d(q) = a(q)^{-c}.
//
// Expanding in powers of the remaining time tau = T - t gives
//   G(t,q) = sum_k alpha_k(q) tau^k,
//   alpha_k(q) = sum_{|j|=k} prod_i (h_i^{j_i} / j_i!) d(q+j),
// the unique coefficients consistent with the recursion
//   (k+1) alpha_{k+1}(q) = sum_i h_i alpha_k(q+e_i).
// With per-outcome caps m the index set is restricted to q+j <= m and the
// series terminates: G is an exact polynomial of degree |m| - |q|.
//
// Everything is computed in log space: the constants h_i grow like
// kappa e^{beta p} and factorial-versus-power cancellations would otherwise
// overflow long before the series converges.

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "bookmaker/common.hpp"
#include "bookmaker/market.hpp"
#include "bookmaker/numerics.hpp"

namespace bookmaker {

using BookVector = std::vector<long>;

struct SeriesValue {
    double log_value = 0.0;          // log G(t,q)
    int order = 0;                   // truncation order K actually used
    double tail_bound = 0.0;         // certified bound on the dropped tail
    std::vector<double> log_alpha;   // log alpha_k(q), k = 0..order
};

struct QuoteResult {
    std::vector<double> u;           // feedback prices (1.0 for capped-out outcomes)
    std::vector<double> u_raw;       // prices before the clamp at 1
    std::vector<bool> active;        // false when q_i has reached its cap
    std::vector<bool> clamped;       // true where the formula exceeded 1 and was clamped
    bool any_clamped = false;
};

struct OdeResidual {
    double residual = 0.0;           // d/dt G + sum_i h_i G(., q+e_i)
    double relative = 0.0;           // residual over the magnitude of either side
    double certified_bound = 0.0;    // truncation-tail bound on |residual| (0 when capped)
};

class ExpDynamicModel {
  public:
    ExpDynamicModel(double gamma, double beta, double kappa, OutcomeStructure outcomes,
                    double horizon, std::optional<BookVector> caps = std::nullopt)
        : gamma_(gamma), beta_(beta), kappa_(kappa), outcomes_(std::move(outcomes)),
          horizon_(horizon), caps_(std::move(caps)) {
        require(gamma_ > 0.0, "gamma must be positive");
        require(beta_ > 0.0, "beta must be positive");
        require(kappa_ > 0.0, "kappa must be positive");
        require(horizon_ > 0.0, "horizon must be positive");
        const std::size_t n = outcomes_.size();
        if (caps_) {
            require(caps_->size() == n, "caps dimension mismatch");
            for (long m : *caps_) require(m >= 0, "caps must be nonnegative");
        }
        b_.resize(n);
        h_.resize(n);
        const double c = beta_ / gamma_;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = outcomes_.marginals()[i];
            b_[i] = kappa_ * std::exp(beta_ * p) * (gamma_ / (beta_ + gamma_)) *
                    std::pow(beta_ / (beta_ + gamma_), c);
            h_[i] = c * b_[i];
        }
        p_min_ = *std::min_element(outcomes_.marginals().begin(), outcomes_.marginals().end());
        if (caps_) build_capped_table();
    }

    std::size_t size() const { return outcomes_.size(); }
    double gamma() const { return gamma_; }
    double beta() const { return beta_; }
    double kappa() const { return kappa_; }
    double c() const { return beta_ / gamma_; }
    double horizon() const { return horizon_; }
    double b(std::size_t i) const { return b_[i]; }
    double h(std::size_t i) const { return h_[i]; }
    bool capped() const { return caps_.has_value(); }
    const BookVector& caps() const { return *caps_; }
    const OutcomeStructure& outcomes() const { return outcomes_; }

    /// log d(q) = -c log a(q), memoized per book.
    double log_d(const BookVector& q) const {
        validate_book(q);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = d_cache_.find(q);
            if (it != d_cache_.end()) return it->second;
        }
        std::vector<double> qd(q.begin(), q.end());
        const double value = -c() * outcomes_.log_exp_payout_moment(qd, gamma_);
        std::lock_guard<std::mutex> lock(mutex_);
        d_cache_.emplace(q, value);
        return value;
    }

    /// log alpha_k(q); with caps the index set is restricted to q+j <= m.
    double log_alpha(const BookVector& q, long k) const {
        require(k >= 0, "coefficient order must be nonnegative");
        validate_book(q);
        if (k == 0) return log_d(q);
        num::LogAccumulator acc;
        BookVector j(size(), 0);
        enumerate(q, k, 0, 0.0, j, acc);
        return acc.log_total();
    }

    double alpha(const BookVector& q, long k) const { return std::exp(log_alpha(q, k)); }

    /// Truncated series for G(t,q).  tol is relative to the boundary factor
    /// d(q), which bounds G from below (all terms are positive), so the value
    /// carries relative error at most tol.  The truncation order comes from
    /// the certified tail bound, found by bisection before any coefficient is
    /// enumerated.
    SeriesValue series_value(double t, const BookVector& q, double tol = 1e-10) const {
        check_time(t);
        validate_book(q);
        require(tol > 0.0, "tolerance must be positive");
        const double tau = horizon_ - t;
        const double log_target = std::log(tol) + log_d(q);
        const long k_max = 10000;

        long order = 0;
        if (log_tail_bound(q, 0, tau) > log_target) {
            if (log_tail_bound(q, k_max, tau) > log_target)
                throw numerical_error("series_value: tolerance unreachable at k_max");
            long lo = 0, hi = k_max;  // bound(lo) > target >= bound(hi)
            while (hi - lo > 1) {
                const long mid = lo + (hi - lo) / 2;
                if (log_tail_bound(q, mid, tau) > log_target)
                    lo = mid;
                else
                    hi = mid;
            }
            order = hi;
        }

        SeriesValue out;
        out.order = int(order);
        out.tail_bound = std::exp(log_tail_bound(q, order, tau));
        num::LogAccumulator acc;
        const double log_tau = tau > 0.0 ? std::log(tau) : -kInf;
        for (long k = 0; k <= order; ++k) {
            const double la = log_alpha(q, k);
            out.log_alpha.push_back(la);
            acc.add_log(tau > 0.0 ? la + double(k) * log_tau : (k == 0 ? la : -kInf));
        }
        out.log_value = acc.log_total();
        return out;
    }

    /// Exact polynomial value for a capped model.
    SeriesValue capped_value(double t, const BookVector& q) const {
        require(capped(), "capped_value: model has no caps");
        check_time(t);
        validate_book(q);
        const double tau = horizon_ - t;
        const auto& coeffs = capped_coeffs(q);
        SeriesValue out;
        out.log_alpha = coeffs;
        out.order = int(coeffs.size()) - 1;
        out.tail_bound = 0.0;
        num::LogAccumulator acc;
        const double log_tau = tau > 0.0 ? std::log(tau) : -kInf;
        for (std::size_t k = 0; k < coeffs.size(); ++k)
            acc.add_log(tau > 0.0 ? coeffs[k] + double(k) * log_tau
                                  : (k == 0 ? coeffs[k] : -kInf));
        out.log_value = acc.log_total();
        return out;
    }

    double log_G(double t, const BookVector& q, double tol = 1e-10) const {
        return capped() ? capped_value(t, q).log_value : series_value(t, q, tol).log_value;
    }

    /// log H(t,q) = -(1/c) log G(t,q);  H(T,q) = a(q).
    double log_H(double t, const BookVector& q, double tol = 1e-10) const {
        return -log_G(t, q, tol) / c();
    }

    /// Feedback prices u_i = (1/gamma) log((beta+gamma)/beta)
    ///                      + (1/beta) [log G(t,q) - log G(t,q+e_i)].
    /// Positive by construction; clamped at 1 with a diagnostic flag if the
    /// unconstrained formula exceeds 1.
    QuoteResult optimal_quote(double t, const BookVector& q, double tol = 1e-10) const {
        check_time(t);
        if (!(t < horizon_)) throw domain_error("optimal_quote: requires t < T");
        validate_book(q);
        const std::size_t n = size();
        QuoteResult out;
        out.u.assign(n, 1.0);
        out.u_raw.assign(n, 1.0);
        out.active.assign(n, true);
        out.clamped.assign(n, false);
        const double base = std::log1p(gamma_ / beta_) / gamma_;
        const double log_G0 = log_G(t, q, tol);
        for (std::size_t i = 0; i < n; ++i) {
            if (capped() && q[i] >= (*caps_)[i]) {
                out.active[i] = false;
                continue;
            }
            BookVector qe = q;
            ++qe[i];
            const double u = base + (log_G0 - log_G(t, qe, tol)) / beta_;
            out.u_raw[i] = u;
            if (u > 1.0) {
                out.u[i] = 1.0;
                out.clamped[i] = true;
                out.any_clamped = true;
            } else {
                out.u[i] = u;
            }
        }
        return out;
    }

    /// Residual of d/dt G + sum_{i active} h_i G(t, q+e_i) under the
    /// truncated (or exact, when capped) series.
    OdeResidual ode_residual(double t, const BookVector& q, double tol = 1e-12) const {
        check_time(t);
        if (!(t < horizon_)) throw domain_error("ode_residual: requires t < T");
        validate_book(q);
        const double tau = horizon_ - t;
        const double log_tau = std::log(tau);

        const SeriesValue sv = capped() ? capped_value(t, q) : series_value(t, q, tol);

        // -d/dt G = sum_{k>=1} k alpha_k(q) tau^{k-1}, termwise from the series.
        num::LogAccumulator ddt;
        for (std::size_t k = 1; k < sv.log_alpha.size(); ++k)
            ddt.add_log(std::log(double(k)) + sv.log_alpha[k] + double(k - 1) * log_tau);

        num::LogAccumulator shift;
        double shift_tail = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            if (capped() && q[i] >= (*caps_)[i]) continue;
            BookVector qe = q;
            ++qe[i];
            const SeriesValue gi = capped() ? capped_value(t, qe) : series_value(t, qe, tol);
            shift.add_log(std::log(h_[i]) + gi.log_value);
            shift_tail += h_[i] * gi.tail_bound;
        }

        const double la = shift.log_total();
        const double lb = ddt.log_total();
        OdeResidual out;
        const double lmax = std::max(la, lb);
        if (lmax == -kInf) return out;
        // residual = A - B evaluated stably as exp(lmax) (exp(la-lmax) - exp(lb-lmax))
        out.residual = std::exp(lmax) * (std::exp(la - lmax) - std::exp(lb - lmax));
        out.relative = std::exp(la - lmax) - std::exp(lb - lmax);
        if (!capped()) {
            // Dropped tail of -d/dt G:  sum_{k>K} k alpha_k tau^{k-1}.
            const double x = series_rate() * tau;
            const double dtail = std::exp(log_prefactor(q)) * series_rate() *
                                 num::exp_series_remainder(x, sv.order - 1);
            out.certified_bound = shift_tail + dtail + sv.tail_bound;
        }
        return out;
    }

  private:
    void validate_book(const BookVector& q) const {
        require(q.size() == size(), "book dimension mismatch");
        for (long v : q) require(v >= 0, "book counts must be nonnegative integers");
        if (caps_)
            for (std::size_t i = 0; i < size(); ++i)
                if (q[i] > (*caps_)[i]) throw domain_error("book exceeds the bet caps");
    }

    void check_time(double t) const {
        if (t < 0.0 || t > horizon_) throw domain_error("time outside [0,T]");
    }

    void enumerate(const BookVector& q, long remaining, std::size_t pos, double log_weight,
                   BookVector& j, num::LogAccumulator& acc) const {
        if (pos + 1 == size()) {
            if (caps_ && q[pos] + remaining > (*caps_)[pos]) return;
            j[pos] = remaining;
            BookVector qj = q;
            for (std::size_t i = 0; i < size(); ++i) qj[i] += j[i];
            const double lw = log_weight + double(remaining) * std::log(h_[pos]) -
                              std::lgamma(double(remaining) + 1.0);
            acc.add_log(lw + log_d(qj));
            j[pos] = 0;
            return;
        }
        long hi = remaining;
        if (caps_) hi = std::min(hi, (*caps_)[pos] - q[pos]);
        for (long v = 0; v <= hi; ++v) {
            j[pos] = v;
            enumerate(q, remaining - v, pos + 1,
                      log_weight + double(v) * std::log(h_[pos]) -
                          std::lgamma(double(v) + 1.0),
                      j, acc);
        }
        j[pos] = 0;
    }

    double series_rate() const {
        double s = 0.0;
        for (double hv : h_) s += hv;
        return s * std::exp(-beta_ / double(size()));
    }

    double log_prefactor(const BookVector& q) const {
        const long qmin = *std::min_element(q.begin(), q.end());
        return -c() * std::log(p_min_) - beta_ * double(qmin);
    }

    // Certified tail bound after order K at remaining time tau:
    //   alpha_k(q) tau^k <= pref * (S e^{-beta/n} tau)^k / k!
    // using sum_{|j|=k} prod h^j/j! = S^k/k!  (S = sum h_i) together with
    //   d(q+j) <= p_min^{-c} exp(-beta (min q + |j|/n)),
    // which follows from a(q+j) >= P(A_i*) exp(gamma (q+j)_{i*}) at the
    // largest-growth coordinate i*.
    double log_tail_bound(const BookVector& q, long K, double tau) const {
        if (tau <= 0.0) return -kInf;
        const double x = series_rate() * tau;
        return log_prefactor(q) + num::log_exp_series_remainder(x, K);
    }

    void build_capped_table() {
        const std::size_t n = size();
        std::size_t states = 1;
        strides_.assign(n, 0);
        for (std::size_t i = n; i-- > 0;) {
            strides_[i] = states;
            states *= std::size_t((*caps_)[i] + 1);
        }
        capped_log_alpha_.assign(states, {});
        BookVector q(n, 0);
        build_capped_rec(q, 0);
    }

    void build_capped_rec(BookVector& q, std::size_t pos) {
        if (pos == size()) {
            long budget = 0;
            for (std::size_t i = 0; i < size(); ++i) budget += (*caps_)[i] - q[i];
            std::vector<double> coeffs;
            coeffs.reserve(std::size_t(budget) + 1);
            for (long k = 0; k <= budget; ++k) coeffs.push_back(log_alpha(q, k));
            capped_log_alpha_[cap_index(q)] = std::move(coeffs);
            return;
        }
        for (long v = 0; v <= (*caps_)[pos]; ++v) {
            q[pos] = v;
            build_capped_rec(q, pos + 1);
        }
        q[pos] = 0;
    }

    std::size_t cap_index(const BookVector& q) const {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < size(); ++i) idx += strides_[i] * std::size_t(q[i]);
        return idx;
    }

    const std::vector<double>& capped_coeffs(const BookVector& q) const {
        return capped_log_alpha_[cap_index(q)];
    }

    double gamma_, beta_, kappa_;
    OutcomeStructure outcomes_;
    double horizon_;
    std::optional<BookVector> caps_;
    std::vector<double> b_, h_;
    double p_min_ = 0.0;
    std::vector<std::size_t> strides_;
    std::vector<std::vector<double>> capped_log_alpha_;
    mutable std::map<BookVector, double> d_cache_;
    mutable std::mutex mutex_;
};

}  // namespace bookmaker
