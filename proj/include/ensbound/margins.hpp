#pragma once

#include <span>
#include <vector>

#include "ensbound/core.hpp"

namespace ensbound {

/// Sorted training margins y_i f(X_i); the empirical margin distribution.
class MarginProfile {
public:
    explicit MarginProfile(std::vector<double> margins);

    std::size_t n() const { return sorted_.size(); }
    std::span<const double> sorted() const { return sorted_; }

    /// P_n(yf <= delta), closed inequality.
    double cdf(double delta) const;
    /// delta_* = min_i Y_i f(X_i).
    double min_margin() const { return sorted_.front(); }

private:
    std::vector<double> sorted_;
};

MarginProfile margin_profile(const ConvexEnsemble& f, const Dataset& data);
inline double margin_cdf(const MarginProfile& profile, double delta) { return profile.cdf(delta); }
inline double min_margin(const MarginProfile& profile) { return profile.min_margin(); }

/// Largest dyadic delta = 2^-k (k >= 1) with delta^(2a/(2+a)) P_n(yf <= delta) <= n^(-2/(2+a)),
/// the zero-error threshold scanned over the dyadic grid; 0 when none qualifies.
double zero_error_threshold(const MarginProfile& profile, double alpha, int max_k = 60);

/// Piecewise-linear margin loss. Decreasing: 1 below lo, 0 above hi.
/// Increasing: 0 below lo, 1 above hi. Lipschitz constant 1/(hi - lo).
struct RampLoss {
    enum class Orientation { decreasing, increasing };

    double lo;
    double hi;
    Orientation orientation = Orientation::decreasing;

    RampLoss(double lo_, double hi_, Orientation o = Orientation::decreasing);

    double operator()(double s) const;
    double lipschitz() const { return 1.0 / (hi - lo); }
};

double ramp_mean(const ConvexEnsemble& f, const Dataset& data, const RampLoss& ramp);
double ramp_mean(const MarginProfile& profile, const RampLoss& ramp);

/// Fraction of holdout rows with y f(x) <= 0; a zero margin counts as an error.
double test_error(const ConvexEnsemble& f, const Dataset& holdout);

}  // namespace ensbound
