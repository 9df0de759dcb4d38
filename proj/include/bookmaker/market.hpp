#pragma once

// Outcome space, market state and settlement accounting shared by every
// policy and simulator.  An event offers n sets of outcomes A_1..A_n; a bet
// on A_i costs the quoted price and pays one unit if A_i occurs.  The sets
// need not be exclusive or exhaustive, so the joint law is carried as a list
// of atoms (probability, membership vector), with a zero-membership residual
// atom covering outcomes that belong to no A_i.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "bookmaker/common.hpp"
#include "bookmaker/numerics.hpp"

namespace bookmaker {

inline constexpr double kProbSumTol = 1e-12;

struct Atom {
    double prob = 0.0;
    std::vector<std::uint8_t> members;  // membership in each A_i, one flag per outcome
};

enum class OutcomeKind { partition, independent, atoms };

/// Joint probability structure of the bet-able outcome sets.
class OutcomeStructure {
  public:
    /// Mutually exclusive, exhaustive outcomes with probabilities summing to one.
    static OutcomeStructure partition(std::vector<double> p) {
        OutcomeStructure s;
        s.kind_ = OutcomeKind::partition;
        s.validate_marginals(p);
        double total = 0.0;
        for (double v : p) total += v;
        require(std::abs(total - 1.0) <= kProbSumTol,
                "partition probabilities must sum to 1");
        s.marginal_ = std::move(p);
        return s;
    }

    /// Independent events with the given marginal probabilities.
    static OutcomeStructure independent(std::vector<double> p) {
        OutcomeStructure s;
        s.kind_ = OutcomeKind::independent;
        s.validate_marginals(p);
        s.marginal_ = std::move(p);
        return s;
    }

    /// Explicit atoms.  If the supplied probabilities sum to less than one, a
    /// residual atom with empty membership absorbs the remaining mass so that
    /// the atom list is a complete probability space.
    static OutcomeStructure explicit_atoms(std::size_t n, std::vector<Atom> atoms) {
        require(n > 0, "outcome dimension must be positive");
        require(!atoms.empty(), "atom list must be nonempty");
        OutcomeStructure s;
        s.kind_ = OutcomeKind::atoms;
        double total = 0.0;
        for (const Atom& a : atoms) {
            require(a.prob >= 0.0, "atom probabilities must be nonnegative");
            require(a.members.size() == n, "atom membership dimension mismatch");
            total += a.prob;
        }
        require(total <= 1.0 + kProbSumTol, "atom probabilities exceed 1");
        if (1.0 - total > kProbSumTol)
            atoms.push_back(Atom{1.0 - total, std::vector<std::uint8_t>(n, 0)});
        s.atoms_ = std::move(atoms);
        // Marginals P(A_i) must land strictly inside (0,1).
        std::vector<double> marg(n, 0.0);
        for (const Atom& a : s.atoms_)
            for (std::size_t i = 0; i < n; ++i)
                if (a.members[i]) marg[i] += a.prob;
        for (double m : marg)
            require(is_probability(m), "each P(A_i) must lie strictly in (0,1)");
        s.marginal_ = std::move(marg);
        return s;
    }

    OutcomeKind kind() const { return kind_; }
    std::size_t size() const { return marginal_.size(); }

    /// Marginal probabilities P(A_i).
    const std::vector<double>& marginals() const { return marginal_; }

    /// Canonical atom decomposition.  Partitions yield n atoms, independent
    /// structures 2^n atoms (n capped at 20 to bound memory), explicit atoms
    /// are returned as stored.
    std::vector<Atom> atom_distribution() const {
        switch (kind_) {
            case OutcomeKind::partition: {
                std::vector<Atom> out;
                out.reserve(size());
                for (std::size_t i = 0; i < size(); ++i) {
                    Atom a;
                    a.prob = marginal_[i];
                    a.members.assign(size(), 0);
                    a.members[i] = 1;
                    out.push_back(std::move(a));
                }
                return out;
            }
            case OutcomeKind::independent: {
                const std::size_t n = size();
                require(n <= 20, "independent atom enumeration limited to n <= 20");
                std::vector<Atom> out;
                out.reserve(std::size_t(1) << n);
                for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << n); ++mask) {
                    Atom a;
                    a.prob = 1.0;
                    a.members.assign(n, 0);
                    for (std::size_t i = 0; i < n; ++i) {
                        if (mask & (std::uint32_t(1) << i)) {
                            a.members[i] = 1;
                            a.prob *= marginal_[i];
                        } else {
                            a.prob *= 1.0 - marginal_[i];
                        }
                    }
                    out.push_back(std::move(a));
                }
                return out;
            }
            case OutcomeKind::atoms:
                return atoms_;
        }
        throw validation_error("unreachable outcome kind");
    }

    /// log E exp(gamma * sum_i q_i 1_{A_i}).  Independent structures use the
    /// exact closed-form product, everything else enumerates atoms; computed
    /// in log space so large books do not overflow.
    double log_exp_payout_moment(const std::vector<double>& q, double gamma) const {
        require(q.size() == size(), "book dimension mismatch");
        require(gamma > 0.0, "risk aversion must be positive");
        for (double v : q) require(v >= 0.0, "book counts must be nonnegative");
        if (kind_ == OutcomeKind::independent) {
            double lg = 0.0;
            for (std::size_t i = 0; i < size(); ++i)
                lg += num::log_sum_exp(std::log(marginal_[i]) + gamma * q[i],
                                       std::log1p(-marginal_[i]));
            return lg;
        }
        num::LogAccumulator acc;
        for (const Atom& a : atom_distribution()) {
            if (a.prob <= 0.0) continue;
            double exponent = 0.0;
            for (std::size_t i = 0; i < size(); ++i)
                if (a.members[i]) exponent += gamma * q[i];
            acc.add_log(std::log(a.prob) + exponent);
        }
        return acc.log_total();
    }

    /// a(q) = E exp(gamma * payout exposure); at least 1 and nondecreasing in
    /// every coordinate of q.
    double exp_payout_moment(const std::vector<double>& q, double gamma) const {
        return std::exp(log_exp_payout_moment(q, gamma));
    }

  private:
    void validate_marginals(const std::vector<double>& p) const {
        require(!p.empty(), "outcome dimension must be positive");
        for (double v : p) require(is_probability(v), "probabilities must lie in (0,1)");
    }

    OutcomeKind kind_ = OutcomeKind::partition;
    std::vector<double> marginal_;
    std::vector<Atom> atoms_;
};

/// Snapshot of the controlled system: time, banked revenue, conditional
/// probabilities and the current book.
struct MarketState {
    double t = 0.0;
    double x = 0.0;
    std::vector<double> p;
    std::vector<double> q;

    void validate(double horizon) const {
        require(t >= 0.0 && t <= horizon, "time outside [0,T]");
        require(p.size() == q.size(), "state dimension mismatch");
        for (double v : p) require(v >= 0.0 && v <= 1.0, "probability outside [0,1]");
        for (double v : q) require(v >= 0.0, "book counts must be nonnegative");
    }
};

/// Running per-outcome revenue and bet counts.  Counts stay integral under
/// Poisson arrivals because they only grow through add_bet.
class BetLedger {
  public:
    BetLedger(std::size_t n, double x0 = 0.0, std::vector<double> q0 = {})
        : revenue_(n, 0.0), count_(q0.empty() ? std::vector<double>(n, 0.0) : std::move(q0)),
          x0_(x0) {
        require(count_.size() == n, "initial book dimension mismatch");
        for (double v : count_) require(v >= 0.0, "initial book must be nonnegative");
    }

    void add_bet(std::size_t i, double price) {
        require(price >= 0.0, "ledger: negative price");
        revenue_[i] += price;
        count_[i] += 1.0;
    }

    /// Continuous accrual of dq bets at the given price; the ledger only
    /// ever grows.
    void accrue(std::size_t i, double dq, double price) {
        require(dq >= 0.0 && price >= 0.0, "ledger: accruals must be nonnegative");
        revenue_[i] += price * dq;
        count_[i] += dq;
    }

    double total_revenue() const {
        double s = x0_;
        for (double r : revenue_) s += r;
        return s;
    }
    const std::vector<double>& counts() const { return count_; }

  private:
    std::vector<double> revenue_;
    std::vector<double> count_;
    double x0_;
};

/// Terminal accounting: revenue minus one unit per winning bet held.
inline double settle(double revenue_x, const std::vector<double>& book_q,
                     const std::vector<std::uint8_t>& membership) {
    require(book_q.size() == membership.size(), "settle: dimension mismatch");
    double payout = 0.0;
    for (std::size_t i = 0; i < book_q.size(); ++i) {
        require(book_q[i] >= 0.0, "settle: negative book");
        if (membership[i]) payout += book_q[i];
    }
    return revenue_x - payout;
}

}  // namespace bookmaker
