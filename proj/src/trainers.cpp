#include "ensbound/trainers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ensbound/error.hpp"
#include "ensbound/random.hpp"

namespace ensbound {

namespace {

constexpr double kTieTolerance = 1e-12;

void check_weights(const Dataset& data, std::span<const double> weights) {
    require(weights.size() == data.n(), "best_stump: weight vector length must equal n");
    double s = 0.0;
    for (double w : weights) {
        require(w >= 0.0 && std::isfinite(w), "best_stump: weights must be finite and nonnegative");
        s += w;
    }
    require(std::abs(s - 1.0) <= 1e-9, "best_stump: weights must sum to 1");
}

}  // namespace

double weighted_error(const Stump& h, const Dataset& data, std::span<const double> weights) {
    double e = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        if (h(data.row(i)) != data.label(i)) e += weights[i];
    }
    return e;
}

StumpFit best_stump(const Dataset& data, std::span<const double> weights) {
    check_weights(data, weights);
    const double inf = std::numeric_limits<double>::infinity();
    const std::size_t n = data.n();

    double w_pos = 0.0, w_neg = 0.0;
    for (std::size_t i = 0; i < n; ++i) (data.label(i) > 0 ? w_pos : w_neg) += weights[i];

    StumpFit best{Stump{0, -inf, -1}, inf};
    auto consider = [&](std::size_t feature, double threshold, double below_pos, double below_neg) {
        // polarity -1 predicts +1 at or below the threshold; polarity +1 predicts +1 above it
        const double err_minus = below_neg + (w_pos - below_pos);
        const double err_plus = below_pos + (w_neg - below_neg);
        if (err_minus < best.error - kTieTolerance) best = {Stump{feature, threshold, -1}, err_minus};
        if (err_plus < best.error - kTieTolerance) best = {Stump{feature, threshold, 1}, err_plus};
    };

    std::vector<std::size_t> order(n);
    for (std::size_t j = 0; j < data.p(); ++j) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return data.feature(a, j) < data.feature(b, j); });

        consider(j, -inf, 0.0, 0.0);
        double below_pos = 0.0, below_neg = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const std::size_t i = order[r];
            (data.label(i) > 0 ? below_pos : below_neg) += weights[i];
            const double v = data.feature(i, j);
            if (r + 1 < n && data.feature(order[r + 1], j) > v) {
                consider(j, v + (data.feature(order[r + 1], j) - v) / 2.0, below_pos, below_neg);
            }
        }
        consider(j, inf, w_pos, w_neg);
    }
    // report the directly summed error of the winner
    best.error = weighted_error(best.stump, data, weights);
    return best;
}

AdaBoostState adaboost_trace(const Dataset& data, int rounds) {
    require(rounds >= 1, "adaboost: rounds must be >= 1");
    const std::size_t n = data.n();
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    AdaBoostState state;

    for (int k = 0; k < rounds; ++k) {
        AdaBoostRound round;
        const StumpFit fit = best_stump(data, w);
        round.stump = fit.stump;
        round.error = fit.error;
        round.weights_before = w;

        if (fit.error <= 0.0) {
            round.alpha = std::numeric_limits<double>::infinity();
            round.weights_after = w;
            state.history.push_back(std::move(round));
            state.perfect_stop = true;
            break;
        }
        round.alpha = fit.error >= 0.5 ? 0.0 : 0.5 * std::log((1.0 - fit.error) / fit.error);

        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] *= std::exp(-data.label(i) * round.alpha * fit.stump(data.row(i)));
            z += w[i];
        }
        for (double& wi : w) wi /= z;
        round.weights_after = w;
        state.history.push_back(std::move(round));

        if (state.history.back().alpha == 0.0) {
            // weights did not move, so every further round would repeat this one
            state.stalled = true;
            break;
        }
    }
    return state;
}

ConvexEnsemble ensemble_from_trace(const AdaBoostState& state) {
    require(!state.history.empty(), "adaboost: empty trace");
    if (state.perfect_stop) return ConvexEnsemble({{1.0, state.history.back().stump}});

    double total = 0.0;
    for (const auto& r : state.history) total += r.alpha;
    if (total <= 0.0) {
        // only error-1/2 rounds: the single stump is as good as any combination of them
        return ConvexEnsemble({{1.0, state.history.front().stump}});
    }
    std::vector<Term> terms;
    for (const auto& r : state.history) terms.push_back({r.alpha / total, r.stump});
    return normalize(ConvexEnsemble(std::move(terms)));
}

ConvexEnsemble adaboost(const Dataset& data, int rounds) { return ensemble_from_trace(adaboost_trace(data, rounds)); }

Dataset bootstrap_sample(const Dataset& data, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::size_t> idx(data.n());
    for (auto& i : idx) i = rng.below(data.n());
    return data.subset(idx);
}

ConvexEnsemble bagging(const Dataset& data, int rounds, std::uint64_t seed) {
    require(rounds >= 1, "bagging: rounds must be >= 1");
    std::vector<Term> terms;
    terms.reserve(static_cast<std::size_t>(rounds));
    for (int k = 0; k < rounds; ++k) {
        const Dataset boot = bootstrap_sample(data, derive_seed(seed, static_cast<std::uint64_t>(k)));
        const std::vector<double> uniform(boot.n(), 1.0 / static_cast<double>(boot.n()));
        terms.push_back({1.0 / rounds, best_stump(boot, uniform).stump});
    }
    return normalize(ConvexEnsemble(std::move(terms)));
}

}  // namespace ensbound
