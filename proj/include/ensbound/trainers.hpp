#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ensbound/core.hpp"

namespace ensbound {

struct StumpFit {
    Stump stump;
    double error = 0.0;  ///< weighted training error, always <= 1/2
};

/// Exhaustive weighted-error minimisation over all stumps. Candidate thresholds
/// are -inf, the midpoints between consecutive distinct feature values, and +inf.
/// Ties (within 1e-12) go to the lexicographically smallest (feature, threshold, polarity).
StumpFit best_stump(const Dataset& data, std::span<const double> weights);

/// Weighted error of a given stump (direct sum).
double weighted_error(const Stump& h, const Dataset& data, std::span<const double> weights);

struct AdaBoostRound {
    Stump stump;
    double error = 0.0;
    double alpha = 0.0;
    std::vector<double> weights_before;  ///< w^(k)
    std::vector<double> weights_after;   ///< w^(k+1), renormalised
};

struct AdaBoostState {
    std::vector<AdaBoostRound> history;
    bool perfect_stop = false;  ///< stopped on a zero-error stump
    bool stalled = false;       ///< stopped on alpha = 0
};

/// Runs AdaBoost and returns the per-round trace (weights, errors, alphas).
AdaBoostState adaboost_trace(const Dataset& data, int rounds);

/// Ensemble from a trace: lambda_k = alpha_k / sum alpha, normalised (identical
/// stumps merge). A zero-error round takes all the mass (infinite-vote limit).
ConvexEnsemble ensemble_from_trace(const AdaBoostState& state);

ConvexEnsemble adaboost(const Dataset& data, int rounds);

Dataset bootstrap_sample(const Dataset& data, std::uint64_t seed);

/// T bootstrap rounds, each contributing its best stump with weight 1/T.
ConvexEnsemble bagging(const Dataset& data, int rounds, std::uint64_t seed);

}  // namespace ensbound
