// Fixtures and independent oracles shared by the unit and acceptance tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "ensbound/core.hpp"
#include "ensbound/random.hpp"

namespace testing_support {

using namespace ensbound;

inline Dataset one_d(std::vector<double> xs, std::vector<int> ys) { return Dataset(1, std::move(xs), std::move(ys)); }

inline Stump stump(std::size_t feature, double threshold, int polarity) { return Stump{feature, threshold, polarity}; }

/// Always +1 / always -1 on finite data.
inline Stump always_plus() { return Stump{0, -std::numeric_limits<double>::infinity(), 1}; }
inline Stump always_minus() { return Stump{0, -std::numeric_limits<double>::infinity(), -1}; }

inline Dataset random_dataset(std::size_t n, std::size_t p, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n * p);
    std::vector<int> y(n);
    for (auto& v : x) v = rng.normal();
    for (auto& v : y) v = rng.sign();
    return Dataset(p, std::move(x), std::move(y));
}

/// Normalized conv ensemble of T random stumps with random positive weights.
inline ConvexEnsemble random_ensemble(std::size_t T, std::size_t p, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Term> terms;
    double total = 0.0;
    for (std::size_t k = 0; k < T; ++k) {
        const double w = 0.05 + rng.uniform();
        total += w;
        terms.push_back({w, Stump{static_cast<std::size_t>(rng.below(p)), rng.normal(), rng.sign()}});
    }
    for (auto& t : terms) t.weight /= total;
    return normalize(ConvexEnsemble(std::move(terms)));
}

/// Two groups of duplicated-profile stumps on x in {-1, +1}: group A says sign(x),
/// group B says -sign(x); masses 0.6 and 0.4; labels sign(x).
struct TwoGroupFixture {
    Dataset data;
    ConvexEnsemble f;
};

inline TwoGroupFixture two_group_fixture(std::size_t n = 200) {
    std::vector<double> x(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = i % 2 == 0 ? 1.0 : -1.0;
        y[i] = i % 2 == 0 ? 1 : -1;
    }
    std::vector<Term> terms;
    for (double thr : {0.0, 0.1, 0.2}) terms.push_back({0.2, Stump{0, thr, 1}});
    for (double thr : {0.0, 0.1, 0.2}) terms.push_back({0.4 / 3.0, Stump{0, thr, -1}});
    return {one_d(std::move(x), std::move(y)), ConvexEnsemble(std::move(terms))};
}

// ---- oracles ------------------------------------------------------------

/// min_d (d + 2 gamma_d^2 / delta^2 log n) by direct re-summation of every tail.
inline std::pair<double, long long> brute_effective_dimension(std::vector<double> weights, double delta, double n) {
    for (auto& w : weights) w = std::abs(w);
    std::sort(weights.begin(), weights.end(), std::greater<>());
    double best = std::numeric_limits<double>::infinity();
    long long arg = -1;
    for (std::size_t d = 0; d <= weights.size(); ++d) {
        double tail = 0.0;
        for (std::size_t k = d; k < weights.size(); ++k) tail += weights[k];
        const double v = static_cast<double>(d) + 2.0 * tail * tail / (delta * delta) * std::log(n);
        if (v < best) {
            best = v;
            arg = static_cast<long long>(d);
        }
    }
    return {best, arg};
}

/// Minimum weighted error over every (feature, candidate threshold, polarity), by direct sums.
inline double brute_best_stump_error(const Dataset& data, const std::vector<double>& w) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < data.p(); ++j) {
        std::vector<double> vals;
        for (std::size_t i = 0; i < data.n(); ++i) vals.push_back(data.feature(i, j));
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        std::vector<double> cands{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        for (std::size_t k = 0; k + 1 < vals.size(); ++k) cands.push_back(0.5 * (vals[k] + vals[k + 1]));
        for (double thr : cands) {
            for (int pol : {-1, 1}) {
                double err = 0.0;
                for (std::size_t i = 0; i < data.n(); ++i) {
                    const int h = data.feature(i, j) > thr ? pol : -pol;
                    if (h != data.label(i)) err += w[i];
                }
                best = std::min(best, err);
            }
        }
    }
    return best;
}

/// Adaptive Simpson quadrature with a relative tolerance.
inline double adaptive_simpson(const std::function<double(double)>& g, double a, double b, double tol) {
    std::function<double(double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int depth) {
            const double mid = 0.5 * (lo + hi);
            const double lm = 0.5 * (lo + mid);
            const double rm = 0.5 * (mid + hi);
            const double flm = g(lm);
            const double frm = g(rm);
            const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
            const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
            if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol * std::abs(left + right)) {
                return left + right + (left + right - whole) / 15.0;
            }
            return rec(lo, mid, flo, flm, fmid, left, depth - 1) + rec(mid, hi, fmid, frm, fhi, right, depth - 1);
        };
    const double fa = g(a);
    const double fb = g(b);
    const double fm = g(0.5 * (a + b));
    return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), 60);
}

/// int_0^x sqrt(log(1/u)) du by quadrature. The substitution u = x e^{-s}
/// removes the endpoint singularity: int_0^inf x e^{-s} sqrt(log(1/x) + s) ds.
inline double quadrature_sqrt_log(double x) {
    if (x <= 0.0) return 0.0;
    const double L = std::log(1.0 / x);
    const auto g = [&](double s) { return x * std::exp(-s) * std::sqrt(std::max(0.0, L + s)); };
    double total = 0.0;
    for (double lo = 0.0; lo < 60.0; lo += 1.0) total += adaptive_simpson(g, lo, lo + 1.0, 1e-12);
    return total;
}

/// E |n^-1 sum of n Rademacher signs| = C(n, n/2) / 2^n for even n.
inline double rademacher_singleton_mean(int n) {
    const double log_c = std::lgamma(n + 1.0) - 2.0 * std::lgamma(n / 2.0 + 1.0);
    return std::exp(log_c - n * std::log(2.0));
}

}  // namespace testing_support
