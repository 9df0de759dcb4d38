#pragma once

// Self-contained random number generation.  The simulators need results that
// do not depend on the standard library's distribution internals or on how
// paths are scheduled across threads, so the engine and the samplers are
// spelled out here.  Each path draws from its own stream derived from
// (master seed, path index).

#include <cmath>
#include <cstdint>

#include "bookmaker/common.hpp"

namespace bookmaker {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ engine with splitmix64 seeding.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    /// Stream for an independent replication: mixes the master seed with the
    /// stream index before seeding.
    static Rng substream(std::uint64_t master_seed, std::uint64_t index) {
        std::uint64_t sm = master_seed;
        const std::uint64_t a = splitmix64(sm);
        std::uint64_t mix = a ^ (0x9E3779B97F4A7C15ULL * (index + 1));
        return Rng(splitmix64(mix) ^ master_seed);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on [0,1).
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0,1].
    double uniform_pos() { return 1.0 - uniform(); }

    /// Standard normal via the polar (Marsaglia) method.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    /// Exponential with the given rate.
    double exponential(double rate) {
        if (!(rate > 0.0)) throw domain_error("Rng::exponential: rate must be positive");
        return -std::log(uniform_pos()) / rate;
    }

    /// Poisson count by exponential inter-arrival summation (exact; O(mean)).
    std::uint64_t poisson(double mean) {
        if (mean < 0.0) throw domain_error("Rng::poisson: negative mean");
        if (mean == 0.0) return 0;
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double prod = uniform_pos();
        while (prod > limit) {
            ++k;
            prod *= uniform_pos();
        }
        return k;
    }

    /// Index drawn from unnormalized nonnegative weights.
    std::size_t categorical(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) throw domain_error("Rng::categorical: zero total weight");
        double target = uniform() * total;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            target -= weights[i];
            if (target < 0.0) return i;
        }
        return weights.size() - 1;
    }

  private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::uint64_t s_[4] = {};
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace bookmaker
