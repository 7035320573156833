#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ensbound/bounds.hpp"
#include "ensbound/core.hpp"
#include "ensbound/margins.hpp"

namespace ensbound {

/// sigma^2_lambda(x) = sum_k lambda_k (h_k(x) - f(x))^2.
double pointwise_variance(const ConvexEnsemble& f, std::span<const double> x);
std::vector<double> pointwise_variances(const ConvexEnsemble& f, const Dataset& data);

/// A hard-partition element of C^m(lambda): lambda = sum_k alpha_k lambda^k.
struct ClusterDecomposition {
    std::vector<double> alphas;                     ///< cluster masses, sum to 1
    std::vector<std::vector<std::size_t>> members;  ///< term indices per cluster
    std::vector<std::vector<double>> sub_measures;  ///< lambda^k, aligned with members

    std::size_t m() const { return alphas.size(); }

    /// Throws ValidationError unless the decomposition reconstructs f's weights
    /// (within 1e-12) and every term is covered exactly once.
    void check_consistent(const ConvexEnsemble& f) const;
};

/// alpha_k = total weight of cluster k, lambda^k = cluster weights / alpha_k.
/// `assignment[j]` is the cluster of term j; clusters are 0..m-1 and must be nonempty.
ClusterDecomposition partition_decomposition(const ConvexEnsemble& f, std::span<const std::size_t> assignment);

/// sigma^2(c; x) = sum_k alpha_k^2 sigma^2_{lambda^k}(x).
double cluster_variance(const ClusterDecomposition& c, const ConvexEnsemble& f, std::span<const double> x);
std::vector<double> cluster_variances(const ClusterDecomposition& c, const ConvexEnsemble& f, const Dataset& data);

/// Fraction of values >= gamma.
double variance_tail(std::span<const double> values, double gamma);

struct ClusterSearch {
    ClusterDecomposition decomposition;
    double objective = 0.0;              ///< P_n-average of sigma^2(c; .)
    std::vector<double> kmeans_trace;    ///< weighted k-means cost per Lloyd iteration (best restart)
    int requested_m = 0;
    bool reduced = false;                ///< m exceeded the number of distinct profiles
};

inline constexpr int kClusterRestarts = 8;

/// Seeded weighted k-means (k-means++ start, Lloyd updates) on the stumps' sample
/// output profiles; the best of kClusterRestarts restarts by objective.
ClusterSearch search_clusters(const ConvexEnsemble& f, const Dataset& data, int m, std::uint64_t seed);

struct ClusterCount {
    int m = 0;           ///< first m passing the test, or m_max + 1
    bool found = false;
    double tail = 0.0;   ///< P_n(sigma^2(c; x) >= gamma) at m (when found)
    double budget = 0.0; ///< V m gamma / (n delta^2) log^2(n/delta) at m
};

/// Upper estimate of the number of (gamma, delta)-clusters.
ClusterCount cluster_count(const ConvexEnsemble& f, const Dataset& data, const BoundParams& params, double gamma,
                           double delta, std::uint64_t seed);

/// Optimal gamma for the mean-variance relaxation at exponent p:
/// ((P_n sigma^2p) n delta^2 / (V log^2(n/delta)))^(1/(p+1)) capped at 1.
double variance_remark_gamma(double moment, double V, double n, double delta, double p);
/// 2 V^(p/(p+1)) m_p^(1/(p+1)) n^(-p/(p+1)) delta^(-2p/(p+1)) log^(2p/(p+1))(n/delta), min'd with V/(n delta^2) log^2.
double variance_remark_term(double moment, double V, double n, double delta, double p);
/// V max sigma^2 / (n delta^2) log^2(n/delta), the p -> infinity form.
double variance_pinf_term(double max_variance, double V, double n, double delta);

/// Infimum over the (delta, gamma) grid, delta <= gamma, of
/// K (P_n(yf <= delta) + P_n(var >= gamma) + V m gamma/(n delta^2) log^2(n/delta) + t/n).
BoundReport variance_grid_bound(std::span<const double> variances, const MarginProfile& profile,
                                const BoundParams& params, int m);

/// Variance bound: grid branch plus the three mean/max-variance relaxations.
BoundReport bound_variance(const ConvexEnsemble& f, const Dataset& data, const MarginProfile& profile,
                           const BoundParams& params);

/// Cluster bound over m = 1..m_max with searched decompositions.
BoundReport bound_cluster(const ConvexEnsemble& f, const Dataset& data, const MarginProfile& profile,
                          const BoundParams& params, std::uint64_t seed);

nlohmann::json decomposition_to_json(const ClusterDecomposition& c);

}  // namespace ensbound
