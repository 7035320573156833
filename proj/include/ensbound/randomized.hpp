#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ensbound/bounds.hpp"
#include "ensbound/core.hpp"
#include "ensbound/variance.hpp"

namespace ensbound {

/// g = sum_{k<d} lambda_k h_k + (gamma_d / N) sum_i xi_i, xi_i drawn from the
/// normalised tail lambda'_k = lambda_k / gamma_d.
struct MaureySample {
    long long d = 0;
    std::size_t N = 0;
    double gamma_d = 0.0;
    std::vector<Term> head;
    std::vector<std::size_t> draws;  ///< term indices into f, all >= d
    std::vector<Stump> drawn;        ///< the drawn stumps, aligned with draws
    bool head_only = false;          ///< gamma_d = 0: nothing to draw

    double operator()(std::span<const double> x) const;
};

/// Requires f in conv mode with weights sorted decreasingly (as after normalize).
MaureySample maurey_sample(const ConvexEnsemble& f, long long d, std::size_t N, std::uint64_t seed);

/// N = ceil(2 gamma_d^2 / delta^2 * log n).
std::size_t maurey_size(double gamma_d, double delta, double n);
/// N = ceil(4 gamma / delta^2 * log n).
std::size_t bernstein_size(double gamma, double delta, double n);

/// Frequency of an event over Monte Carlo draws, worst row, against a ceiling.
struct TailCheck {
    std::string event;
    std::size_t rows_checked = 0;
    double max_frequency = 0.0;
    std::size_t worst_row = 0;
    double ceiling = 0.0;
    double tolerance = 0.0;  ///< 3 binomial standard errors at the ceiling
    double wilson_lo = 0.0;  ///< z = 3 Wilson interval of the worst frequency
    double wilson_hi = 0.0;
    bool pass = true;
};

struct MaureyReport {
    long long d = 0;
    std::size_t N = 0;
    double gamma_d = 0.0;
    double delta = 0.0;
    std::size_t draws = 0;
    bool head_only = false;
    double target = 0.0;               ///< 1/n
    double max_mean_dev_stderr = 0.0;  ///< max_x |mean g(x) - f(x)| / stderr
    bool unbiased_pass = true;         ///< within 4 stderr at every row
    TailCheck two_sided;               ///< |yg - yf| >= delta
    TailCheck one_sided;               ///< yg - yf >= delta
    bool pass = true;
};

MaureyReport check_maurey_tail(const ConvexEnsemble& f, const Dataset& data, double delta, long long d,
                               const BoundParams& params, std::size_t draws, std::uint64_t seed);

/// N replicates of g_k = sum_j alpha_j xi_k^j with xi_k^j ~ lambda^j.
struct ClusterSample {
    std::size_t N = 0;
    std::vector<std::vector<std::size_t>> picks;  ///< picks[k][j]: term index drawn for cluster j in replicate k

    /// g_k(x) for replicate k.
    double replicate(const ClusterDecomposition& c, const ConvexEnsemble& f, std::size_t k,
                     std::span<const double> x) const;
    /// g(x) = N^-1 sum_k g_k(x).
    double operator()(const ClusterDecomposition& c, const ConvexEnsemble& f, std::span<const double> x) const;
};

ClusterSample cluster_sample(const ClusterDecomposition& c, std::size_t N, std::uint64_t seed);

struct ClusterVarianceReport {
    std::size_t draws = 0;
    std::size_t rows = 0;
    std::size_t rows_passing = 0;
    double fraction_passing = 0.0;
    double max_abs_diff = 0.0;
    double max_mean_dev_stderr = 0.0;
    std::vector<double> monte_carlo;  ///< per-row sample variance of g_1(x)
    std::vector<double> analytic;     ///< per-row sigma^2(c; x)
    bool pass = true;                 ///< >= 95% of rows within 3 stderr
};

ClusterVarianceReport check_cluster_variance(const ClusterDecomposition& c, const ConvexEnsemble& f,
                                             const Dataset& data, std::size_t draws, std::uint64_t seed);

struct SigmaHat {
    double value = 0.0;
    double max_summand = 0.0;  ///< never above 2
};

/// Paired-difference estimator (2N)^-1 sum_k (sum_j alpha_j (xi_k^{j,1} - xi_k^{j,2}))^2.
SigmaHat sigma_hat(const ClusterDecomposition& c, const ConvexEnsemble& f, std::span<const double> x,
                   std::size_t N, std::uint64_t seed);

struct SigmaHatReport {
    std::size_t draws = 0;
    std::size_t N = 0;
    std::size_t rows = 0;
    double max_relative_error = 0.0;  ///< over rows with positive sigma^2
    double max_summand = 0.0;
    std::vector<double> mean_estimate;
    std::vector<double> analytic;
    bool pass = true;  ///< 2% relative (or within 3 stderr) at every row; summands <= 2
};

SigmaHatReport check_sigma_hat(const ClusterDecomposition& c, const ConvexEnsemble& f, const Dataset& data,
                               std::size_t draws, std::size_t N, std::uint64_t seed);

inline constexpr double kDefaultStep4K = 16.0;

struct BernsteinReport {
    double gamma = 0.0;
    double delta = 0.0;
    std::size_t draws = 0;
    std::size_t N2 = 0;
    TailCheck step2;  ///< yg - yf >= delta on rows with sigma^2 <= gamma
    double K_user = kDefaultStep4K;
    std::size_t N4 = 0;
    TailCheck step4_low;   ///< sigma-hat^2 >= 2 gamma on rows with sigma^2 <= gamma
    TailCheck step4_high;  ///< sigma-hat^2 <= 3 gamma on rows with sigma^2 >= 4 gamma
    std::optional<double> smallest_K;  ///< smallest K in {2^0..2^12} passing both Step-4 gates
    bool pass = true;
};

BernsteinReport check_bernstein_tails(const ClusterDecomposition& c, const ConvexEnsemble& f, const Dataset& data,
                                      double gamma, double delta, const BoundParams& params, std::size_t draws,
                                      std::uint64_t seed, double K_user = kDefaultStep4K);

nlohmann::json to_json(const TailCheck& t);
nlohmann::json to_json(const MaureyReport& r);
nlohmann::json to_json(const ClusterVarianceReport& r);
nlohmann::json to_json(const SigmaHatReport& r);
nlohmann::json to_json(const BernsteinReport& r);

}  // namespace ensbound
