#include "ensbound/margins.hpp"

#include <algorithm>
#include <cmath>

#include "ensbound/error.hpp"

namespace ensbound {

MarginProfile::MarginProfile(std::vector<double> margins) : sorted_(std::move(margins)) {
    require(!sorted_.empty(), "margin profile: empty sample");
    for (double m : sorted_) require(std::isfinite(m), "margin profile: non-finite margin");
    std::sort(sorted_.begin(), sorted_.end());
}

double MarginProfile::cdf(double delta) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), delta);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

MarginProfile margin_profile(const ConvexEnsemble& f, const Dataset& data) {
    f.check_features(data.p());
    std::vector<double> m(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) m[i] = margin(f, data.row(i), data.label(i));
    return MarginProfile(std::move(m));
}

double zero_error_threshold(const MarginProfile& profile, double alpha, int max_k) {
    const double n = static_cast<double>(profile.n());
    const double budget = std::pow(n, -2.0 / (2.0 + alpha));
    for (int k = 1; k <= max_k; ++k) {
        const double delta = std::ldexp(1.0, -k);
        if (std::pow(delta, 2.0 * alpha / (2.0 + alpha)) * profile.cdf(delta) <= budget) return delta;
    }
    return 0.0;
}

RampLoss::RampLoss(double lo_, double hi_, Orientation o) : lo(lo_), hi(hi_), orientation(o) {
    require(std::isfinite(lo) && std::isfinite(hi) && hi > lo, "ramp loss: need finite lo < hi");
}

double RampLoss::operator()(double s) const {
    double up;  // increasing ramp value
    if (s <= lo) up = 0.0;
    else if (s >= hi) up = 1.0;
    else up = (s - lo) / (hi - lo);
    return orientation == Orientation::increasing ? up : 1.0 - up;
}

double ramp_mean(const MarginProfile& profile, const RampLoss& ramp) {
    double s = 0.0;
    for (double m : profile.sorted()) s += ramp(m);
    return s / static_cast<double>(profile.n());
}

double ramp_mean(const ConvexEnsemble& f, const Dataset& data, const RampLoss& ramp) {
    return ramp_mean(margin_profile(f, data), ramp);
}

double test_error(const ConvexEnsemble& f, const Dataset& holdout) {
    return margin_profile(f, holdout).cdf(0.0);
}

}  // namespace ensbound
