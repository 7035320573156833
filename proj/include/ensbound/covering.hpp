#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ensbound/bounds.hpp"
#include "ensbound/core.hpp"
#include "ensbound/margins.hpp"

namespace ensbound {

enum class Metric { L1, L2, Linf };

/// A hypothesis as its values on the sample: profile[i] = h(X_i).
using SampleProfile = std::vector<double>;

double empirical_distance(std::span<const double> a, std::span<const double> b, Metric metric);
double empirical_distance(const Stump& h, const Stump& g, const Dataset& data, Metric metric);

std::vector<SampleProfile> sample_profiles(std::span<const Stump> hypotheses, const Dataset& data);

struct Net {
    std::vector<std::size_t> centers;  ///< indices into the hypothesis set
    std::size_t count() const { return centers.size(); }
};

/// Farthest-point greedy net: the first center is hypothesis 0, then the uncovered
/// hypothesis farthest from the current centers (lowest index on ties) is added
/// until every hypothesis is within eps of a center.
Net greedy_covering(std::span<const SampleProfile> profiles, double eps, Metric metric);
Net greedy_covering(std::span<const Stump> hypotheses, const Dataset& data, double eps, Metric metric);

inline constexpr std::size_t kExactCoveringLimit = 12;

/// Minimal number of centers from the set covering it within eps. Throws
/// ValidationError for more than kExactCoveringLimit hypotheses.
std::size_t exact_covering(std::span<const SampleProfile> profiles, double eps, Metric metric);
std::size_t exact_covering(std::span<const Stump> hypotheses, const Dataset& data, double eps, Metric metric);

/// eps -> N(eps) step function on a decreasing grid. For eps in [eps_{j+1}, eps_j)
/// the count at eps_{j+1} is used; below the last grid point the count is the
/// number of distinct profiles; at or above eps_0 it is counts[0].
struct CoveringProfile {
    std::vector<double> eps_grid;
    std::vector<std::size_t> counts;
    std::size_t floor_count = 0;  ///< value below the smallest grid eps
    Metric metric = Metric::L2;
    std::string source = "greedy";

    /// Step-function value at eps (upper convention described above).
    std::size_t at(double eps) const;
    /// Pieces (lo, hi, N) covering (0, upper], ordered by increasing eps.
    struct Piece {
        double lo;
        double hi;
        double count;
    };
    std::vector<Piece> pieces(double upper) const;
};

/// Constant step function N(eps) = count.
CoveringProfile constant_profile(std::size_t count);

/// Dyadic grid 2^-j (j >= -1, so it starts at 2) down to the smallest positive
/// pairwise distance among the distinct profiles.
std::vector<double> default_eps_grid(std::span<const SampleProfile> distinct, Metric metric);

/// Covering profile of the deduplicated support of f (an upper estimate of the
/// base covering number). Counts are made monotone by carrying a finer net up.
CoveringProfile base_covering_profile(const ConvexEnsemble& f, const Dataset& data, std::vector<double> grid = {},
                                      Metric metric = Metric::L2);

/// Number of distinct sample sign-profiles in the support of f.
std::size_t n_infty(const ConvexEnsemble& f, const Dataset& data);

/// int_0^x sqrt(log(1/u)) du for 0 <= x <= 1, in closed form.
double sqrt_log_integral(double x);

/// psi(delta) = int_0^delta sqrt(N(eps) log(1/eps)) d eps. Requires 0 < delta < 1.
double entropy_integral(const CoveringProfile& profile, double delta);

/// Capped form: integrand min(sqrt(N log(1/e)), e^(-V/(V+2))) at e = max(eps, sqrt(t/n)).
double capped_entropy_integral(const CoveringProfile& profile, const BoundParams& params, double delta);

/// A concave nondecreasing psi with psi(0) = 0. Accepts x >= 0.
class EntropyCurve {
public:
    using Fn = std::function<double(double)>;
    explicit EntropyCurve(Fn fn) : fn_(std::move(fn)) {}
    static EntropyCurve uncapped(CoveringProfile profile);
    static EntropyCurve capped(CoveringProfile profile, BoundParams params);
    double operator()(double x) const { return x <= 0.0 ? 0.0 : fn_(x); }

private:
    Fn fn_;
};

struct FixedPoint {
    double eps = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

/// Largest solution of eps = psi(delta sqrt(eps)) / (delta sqrt(n)) by downward
/// iteration from 1 (the start is doubled while it lies below its image).
FixedPoint fixed_point(const EntropyCurve& psi, double delta, double n, int max_iter = 10000);

/// Entropy-integral bound with three variants: entropy, capped_entropy, remark1.
/// The headline total is the entropy variant.
BoundReport bound_theorem5(const ConvexEnsemble& f, const Dataset& data, const MarginProfile& profile,
                           const BoundParams& params);

/// N_inf / n * log(n / (delta N_inf)), the log floored at 1.
double remark1_term(double n_inf, double n, double delta);

struct HullEntropyPoint {
    double radius;  ///< (2 + C) eps
    double value;   ///< N(eps) log(1/eps)
};
HullEntropyPoint hull_entropy_reference(const CoveringProfile& N, double eps, double C);

struct RademacherEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
};
/// Monte Carlo estimate of E sup_h |n^-1 sum_i s_i h(X_i)| over M sign vectors.
RademacherEstimate rademacher_estimate(std::span<const SampleProfile> profiles, std::size_t draws, std::uint64_t seed);
RademacherEstimate rademacher_estimate(std::span<const Stump> hypotheses, const Dataset& data, std::size_t draws,
                                       std::uint64_t seed);

/// Distinct support stumps of f by sample profile (first occurrence kept).
std::vector<Stump> distinct_support(const ConvexEnsemble& f, const Dataset& data);

nlohmann::json covering_to_json(const CoveringProfile& profile);
std::string to_string(Metric metric);
Metric metric_from_string(const std::string& name);

}  // namespace ensbound
