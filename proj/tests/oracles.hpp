#pragma once

// Test-only reference implementations, kept deliberately independent of the
// library code paths they check: plain grid scans instead of golden section,
// bisection instead of Newton, Simpson quadrature instead of erfc, and an
// O(n^2) chord test instead of the monotone-chain hull.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

/// Maximizer by dense scan followed by trisection refinement.
inline double grid_maximize(const std::function<double(double)>& f, double lo, double hi,
                            int coarse = 20001, int refine_rounds = 200) {
    double best_x = lo, best_v = f(lo);
    for (int i = 0; i <= coarse; ++i) {
        const double x = lo + (hi - lo) * double(i) / double(coarse);
        const double v = f(x);
        if (v > best_v) {
            best_v = v;
            best_x = x;
        }
    }
    double a = std::max(lo, best_x - (hi - lo) / double(coarse));
    double b = std::min(hi, best_x + (hi - lo) / double(coarse));
    for (int r = 0; r < refine_rounds; ++r) {
        const double m1 = a + (b - a) / 3.0;
        const double m2 = b - (b - a) / 3.0;
        if (f(m1) < f(m2))
            a = m1;
        else
            b = m2;
    }
    return 0.5 * (a + b);
}

/// Plain bisection root finder.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     int iters = 200) {
    double flo = f(lo);
    if (flo == 0.0) return lo;
    if (f(hi) == 0.0) return hi;
    if (flo * f(hi) > 0.0) throw std::runtime_error("oracle::bisect: no sign change");
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0)
            hi = mid;
        else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

/// Standard normal CDF by composite Simpson integration of the density from 0
/// to |z| (absolute error well below 1e-13 at this resolution).
inline double normal_cdf_quadrature(double z) {
    const double a = std::abs(z);
    const int n = 4000;  // even
    const double h = a / n;
    auto phi = [](double x) {
        return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::acos(-1.0));
    };
    double s = phi(0.0) + phi(a);
    for (int i = 1; i < n; ++i) s += phi(i * h) * (i % 2 ? 4.0 : 2.0);
    const double integral = s * h / 3.0;
    return z >= 0.0 ? 0.5 + integral : 0.5 - integral;
}

/// True iff y_hat is pointwise >= every chord of the sampled points and
/// touches the data from above (brute-force upper-hull property).
inline bool is_upper_hull(const std::vector<double>& x, const std::vector<double>& y,
                          const std::function<double(double)>& y_hat, double tol = 1e-9) {
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i)
        if (y_hat(x[i]) < y[i] - tol) return false;  // must majorize the data
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = i; k <= j; ++k) {
                const double w = (x[k] - x[i]) / (x[j] - x[i]);
                const double chord = y[i] + w * (y[j] - y[i]);
                if (y_hat(x[k]) < chord - tol) return false;  // must majorize all chords
            }
    return true;
}

/// Central second difference.
inline double second_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

}  // namespace oracle
