#include "ensbound/covering.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "ensbound/error.hpp"
#include "ensbound/random.hpp"

namespace ensbound {

namespace {

// Shared ball-membership predicate for greedy and exact covering. The relative
// slack absorbs rounding in sqrt so that distances landing exactly on a dyadic
// radius count as covered by both.
bool within(double d, double eps) { return d <= eps * (1.0 + 1e-12); }

std::vector<std::vector<double>> distance_matrix(std::span<const SampleProfile> profiles, Metric metric) {
    const std::size_t k = profiles.size();
    std::vector<std::vector<double>> d(k, std::vector<double>(k, 0.0));
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            d[a][b] = d[b][a] = empirical_distance(profiles[a], profiles[b], metric);
        }
    }
    return d;
}

std::vector<SampleProfile> distinct_profiles(const ConvexEnsemble& f, const Dataset& data) {
    std::vector<SampleProfile> out;
    for (const auto& s : distinct_support(f, data)) {
        SampleProfile p(data.n());
        for (std::size_t i = 0; i < data.n(); ++i) p[i] = s(data.row(i));
        out.push_back(std::move(p));
    }
    return out;
}

// Integral of sqrt(N log(1/e)) on [lo, hi], zero above 1.
double uncapped_piece(double lo, double hi, double count) {
    if (count <= 0.0 || hi <= lo) return 0.0;
    return std::sqrt(count) * (sqrt_log_integral(hi) - sqrt_log_integral(lo));
}

// Integral of e^-a on [lo, hi].
double power_piece(double lo, double hi, double a) {
    if (hi <= lo) return 0.0;
    return (std::pow(hi, 1.0 - a) - std::pow(lo, 1.0 - a)) / (1.0 - a);
}

double bisect(const std::function<double(double)>& g, double lo, double hi) {
    // g(lo) and g(hi) have opposite signs
    const bool lo_negative = g(lo) < 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if ((g(mid) < 0.0) == lo_negative) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Integral over [lo, hi] (inside (0, 1]) of min(sqrt(N log(1/e)), e^-a).
double capped_piece(double lo, double hi, double count, double a) {
    if (hi <= lo || count <= 0.0) return 0.0;
    // In s = log(1/e) the cap is active where g(s) = e^(2as) - N s < 0. g is convex
    // with g(0) = 1, so there are at most two crossings.
    const auto g = [&](double s) { return std::exp(2.0 * a * s) - count * s; };
    std::vector<double> cuts{lo, hi};
    const double ratio = count / (2.0 * a);
    if (ratio > 1.0) {
        const double s_min = std::log(ratio) / (2.0 * a);
        if (g(s_min) < 0.0) {
            double s_hi = std::max(1.0, 2.0 * s_min);
            while (g(s_hi) < 0.0) s_hi *= 2.0;
            for (double s : {bisect(g, 0.0, s_min), bisect(g, s_min, s_hi)}) {
                const double e = std::exp(-s);
                if (e > lo && e < hi) cuts.push_back(e);
            }
        }
    }
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double l = cuts[k];
        const double h = cuts[k + 1];
        if (h <= l) continue;
        const double mid = 0.5 * (l + h);
        const bool cap_active = std::pow(mid, -a) < std::sqrt(count * std::log(1.0 / mid));
        total += cap_active ? power_piece(l, h, a) : uncapped_piece(l, h, count);
    }
    return total;
}

double psi_uncapped(const CoveringProfile& profile, double x) {
    if (x <= 0.0) return 0.0;
    const double upper = std::min(x, 1.0);
    double total = 0.0;
    for (const auto& piece : profile.pieces(upper)) total += uncapped_piece(piece.lo, piece.hi, piece.count);
    return total;
}

double psi_capped(const CoveringProfile& profile, const BoundParams& params, double x) {
    if (x <= 0.0) return 0.0;
    const double a = params.V / (params.V + 2.0);
    const double s0 = std::sqrt(params.t / static_cast<double>(params.n));
    double total = 0.0;
    if (s0 > 0.0) {
        // frozen argument below sqrt(t/n)
        double h0 = 0.0;
        if (s0 < 1.0) {
            const double count = static_cast<double>(profile.at(s0));
            h0 = std::min(std::sqrt(count * std::log(1.0 / s0)), std::pow(s0, -a));
        }
        total += std::min(x, s0) * h0;
    }
    const double upper = std::min(x, 1.0);
    if (upper <= s0) return total;
    for (const auto& piece : profile.pieces(upper)) {
        const double lo = std::max(piece.lo, s0);
        if (piece.hi <= lo) continue;
        total += capped_piece(lo, piece.hi, piece.count, a);
    }
    return total;
}

}  // namespace

double empirical_distance(std::span<const double> a, std::span<const double> b, Metric metric) {
    require(a.size() == b.size() && !a.empty(), "empirical_distance: profiles must have equal nonzero length");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::abs(a[i] - b[i]);
        switch (metric) {
            case Metric::L1: acc += d; break;
            case Metric::L2: acc += d * d; break;
            case Metric::Linf: acc = std::max(acc, d); break;
        }
    }
    const double n = static_cast<double>(a.size());
    switch (metric) {
        case Metric::L1: return acc / n;
        case Metric::L2: return std::sqrt(acc / n);
        case Metric::Linf: return acc;
    }
    return acc;
}

std::vector<SampleProfile> sample_profiles(std::span<const Stump> hypotheses, const Dataset& data) {
    std::vector<SampleProfile> out;
    out.reserve(hypotheses.size());
    for (const auto& h : hypotheses) {
        require(h.feature < data.p(), "stump feature index out of range");
        SampleProfile p(data.n());
        for (std::size_t i = 0; i < data.n(); ++i) p[i] = h(data.row(i));
        out.push_back(std::move(p));
    }
    return out;
}

double empirical_distance(const Stump& h, const Stump& g, const Dataset& data, Metric metric) {
    const Stump both[] = {h, g};
    const auto p = sample_profiles(both, data);
    return empirical_distance(p[0], p[1], metric);
}

Net greedy_covering(std::span<const SampleProfile> profiles, double eps, Metric metric) {
    require(eps > 0.0, "greedy_covering: eps must be positive");
    Net net;
    const std::size_t k = profiles.size();
    if (k == 0) return net;
    std::vector<double> nearest(k, std::numeric_limits<double>::infinity());
    std::size_t next = 0;
    while (true) {
        net.centers.push_back(next);
        for (std::size_t j = 0; j < k; ++j) {
            nearest[j] = std::min(nearest[j], empirical_distance(profiles[j], profiles[next], metric));
        }
        double far = -1.0;
        std::size_t pick = k;
        for (std::size_t j = 0; j < k; ++j) {
            if (!within(nearest[j], eps) && nearest[j] > far) {
                far = nearest[j];
                pick = j;
            }
        }
        if (pick == k) break;
        next = pick;
    }
    return net;
}

Net greedy_covering(std::span<const Stump> hypotheses, const Dataset& data, double eps, Metric metric) {
    const auto p = sample_profiles(hypotheses, data);
    return greedy_covering(p, eps, metric);
}

std::size_t exact_covering(std::span<const SampleProfile> profiles, double eps, Metric metric) {
    require(eps > 0.0, "exact_covering: eps must be positive");
    const std::size_t k = profiles.size();
    require(k <= kExactCoveringLimit,
            "exact_covering: at most " + std::to_string(kExactCoveringLimit) + " hypotheses supported");
    if (k == 0) return 0;
    const auto d = distance_matrix(profiles, metric);
    std::vector<std::uint32_t> ball(k, 0);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t j = 0; j < k; ++j) {
            if (within(d[c][j], eps)) ball[c] |= (1u << j);
        }
    }
    const std::uint32_t all = (1u << k) - 1u;
    std::size_t best = k;
    for (std::uint32_t subset = 1; subset <= all; ++subset) {
        const auto size = static_cast<std::size_t>(std::popcount(subset));
        if (size >= best) continue;
        std::uint32_t covered = 0;
        for (std::size_t c = 0; c < k; ++c) {
            if (subset & (1u << c)) covered |= ball[c];
        }
        if (covered == all) best = size;
    }
    return best;
}

std::size_t exact_covering(std::span<const Stump> hypotheses, const Dataset& data, double eps, Metric metric) {
    require(hypotheses.size() <= kExactCoveringLimit,
            "exact_covering: at most " + std::to_string(kExactCoveringLimit) + " hypotheses supported");
    const auto p = sample_profiles(hypotheses, data);
    return exact_covering(p, eps, metric);
}

std::size_t CoveringProfile::at(double eps) const {
    if (eps_grid.empty()) return floor_count;
    if (eps >= eps_grid.front()) return counts.front();
    for (std::size_t j = 1; j < eps_grid.size(); ++j) {
        if (eps >= eps_grid[j]) return counts[j];
    }
    return floor_count;
}

std::vector<CoveringProfile::Piece> CoveringProfile::pieces(double upper) const {
    std::vector<Piece> out;
    double lo = 0.0;
    auto push = [&](double hi, std::size_t count) {
        hi = std::min(hi, upper);
        if (hi > lo) out.push_back({lo, hi, static_cast<double>(count)});
        lo = std::max(lo, hi);
    };
    if (eps_grid.empty()) {
        push(upper, floor_count);
        return out;
    }
    push(eps_grid.back(), floor_count);
    for (std::size_t j = eps_grid.size() - 1; j >= 1; --j) push(eps_grid[j - 1], counts[j]);
    push(upper, counts.front());
    return out;
}

CoveringProfile constant_profile(std::size_t count) {
    CoveringProfile p;
    p.floor_count = count;
    p.source = "constant";
    return p;
}

std::vector<double> default_eps_grid(std::span<const SampleProfile> distinct, Metric metric) {
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < distinct.size(); ++a) {
        for (std::size_t b = a + 1; b < distinct.size(); ++b) {
            const double d = empirical_distance(distinct[a], distinct[b], metric);
            if (d > 0.0) dmin = std::min(dmin, d);
        }
    }
    std::vector<double> grid{2.0};
    for (int j = 0; j < 64; ++j) {
        const double e = std::ldexp(1.0, -j);
        if (e < dmin * (1.0 - 1e-12)) break;
        grid.push_back(e);
    }
    return grid;
}

CoveringProfile base_covering_profile(const ConvexEnsemble& f, const Dataset& data, std::vector<double> grid,
                                      Metric metric) {
    f.check_features(data.p());
    const auto distinct = distinct_profiles(f, data);
    if (grid.empty()) grid = default_eps_grid(distinct, metric);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        require(grid[j] > 0.0 && grid[j] <= 2.0, "covering grid values must lie in (0, 2]");
        require(j == 0 || grid[j] < grid[j - 1], "covering grid must be strictly decreasing");
    }
    CoveringProfile profile;
    profile.eps_grid = std::move(grid);
    profile.metric = metric;
    profile.floor_count = distinct.size();
    profile.counts.resize(profile.eps_grid.size());
    for (std::size_t j = 0; j < profile.eps_grid.size(); ++j) {
        profile.counts[j] = greedy_covering(distinct, profile.eps_grid[j], metric).count();
    }
    // A net at a finer radius also covers at every coarser one.
    std::size_t carry = profile.floor_count;
    for (std::size_t j = profile.counts.size(); j-- > 0;) {
        profile.counts[j] = std::min(profile.counts[j], carry);
        carry = profile.counts[j];
    }
    return profile;
}

std::vector<Stump> distinct_support(const ConvexEnsemble& f, const Dataset& data) {
    f.check_features(data.p());
    std::map<std::vector<int>, std::size_t> seen;
    std::vector<Stump> out;
    for (const auto& t : f.terms()) {
        if (t.weight == 0.0) continue;
        std::vector<int> key(data.n());
        for (std::size_t i = 0; i < data.n(); ++i) key[i] = t.stump(data.row(i));
        if (seen.try_emplace(std::move(key), out.size()).second) out.push_back(t.stump);
    }
    return out;
}

std::size_t n_infty(const ConvexEnsemble& f, const Dataset& data) { return distinct_support(f, data).size(); }

double sqrt_log_integral(double x) {
    if (x <= 0.0) return 0.0;
    const double half_sqrt_pi = 0.5 * std::sqrt(std::numbers::pi);
    if (x >= 1.0) return half_sqrt_pi;
    const double r = std::sqrt(std::log(1.0 / x));
    return x * r + half_sqrt_pi * std::erfc(r);
}

double entropy_integral(const CoveringProfile& profile, double delta) {
    require(delta > 0.0 && delta < 1.0, "entropy_integral: need 0 < delta < 1");
    return psi_uncapped(profile, delta);
}

double capped_entropy_integral(const CoveringProfile& profile, const BoundParams& params, double delta) {
    require(delta > 0.0 && delta < 1.0, "capped_entropy_integral: need 0 < delta < 1");
    params.validate();
    return psi_capped(profile, params, delta);
}

EntropyCurve EntropyCurve::uncapped(CoveringProfile profile) {
    return EntropyCurve([p = std::move(profile)](double x) { return psi_uncapped(p, x); });
}

EntropyCurve EntropyCurve::capped(CoveringProfile profile, BoundParams params) {
    params.validate();
    return EntropyCurve([p = std::move(profile), q = std::move(params)](double x) { return psi_capped(p, q, x); });
}

FixedPoint fixed_point(const EntropyCurve& psi, double delta, double n, int max_iter) {
    require(delta > 0.0, "fixed_point: delta must be positive");
    require(n > 0.0, "fixed_point: n must be positive");
    const double scale = 1.0 / (delta * std::sqrt(n));
    const auto F = [&](double e) { return psi(delta * std::sqrt(e)) * scale; };

    FixedPoint out;
    double eps = 1.0;
    for (int k = 0; F(eps) > eps; ++k) {
        if (k >= 200) throw NumericalError("fixed_point: no start above the fixed point found");
        eps *= 2.0;
    }
    for (int it = 1; it <= max_iter; ++it) {
        const double next = F(eps);
        out.iterations = it;
        if (next >= eps) break;  // reached in floating point
        const double step = eps - next;
        eps = next;
        if (eps == 0.0 || step <= 1e-14 * eps) {
            out.eps = eps;
            out.residual = std::abs(F(eps) - eps);
            return out;
        }
        if (it == max_iter) throw NumericalError("fixed_point: no convergence within the iteration cap");
    }
    out.eps = eps;
    out.residual = std::abs(F(eps) - eps);
    return out;
}

double remark1_term(double n_inf, double n, double delta) {
    if (n_inf <= 0.0) return 0.0;
    return n_inf / n * log_ratio(n, delta * n_inf);
}

BoundReport bound_theorem5(const ConvexEnsemble& f, const Dataset& data, const MarginProfile& profile,
                           const BoundParams& params) {
    params.validate();
    const double n = static_cast<double>(params.n);
    const double K = params.K;
    const CoveringProfile cov = base_covering_profile(f, data);
    const auto plain = EntropyCurve::uncapped(cov);
    const auto capped = EntropyCurve::capped(cov, params);
    const double ninf = static_cast<double>(n_infty(f, data));

    BoundReport best;
    best.bound_name = "entropy_theorem5";
    best.total = std::numeric_limits<double>::infinity();
    double best_capped = best.total;
    double best_remark = best.total;
    for (double delta : params.delta_grid) {
        const double margin_term = K * profile.cdf(delta);
        const double confidence = K * params.t / (n * delta * delta);
        const double eps_hat = fixed_point(plain, delta, n).eps;
        const double total = margin_term + K * eps_hat + confidence;
        if (total < best.total) {
            best.chosen_delta = delta;
            best.margin_term = margin_term;
            best.complexity_term = K * eps_hat;
            best.confidence_term = confidence;
            best.total = total;
        }
        best_capped = std::min(best_capped, margin_term + K * fixed_point(capped, delta, n).eps + confidence);
        best_remark = std::min(best_remark, margin_term + K * remark1_term(ninf, n, delta) + confidence);
    }
    best.variants = {{"entropy", best.total}, {"capped_entropy", best_capped}, {"remark1", best_remark}};
    const double log_n = std::log(n);
    best.notes.push_back("t/log^2(n) = " + std::to_string(log_n > 0.0 ? params.t / (log_n * log_n) : 0.0) +
                         " (the bound assumes t >= C log^2 n for an unspecified C)");
    best.notes.push_back("covering numbers are greedy upper estimates over the support of f (N+)");
    return best;
}

HullEntropyPoint hull_entropy_reference(const CoveringProfile& N, double eps, double C) {
    require(eps > 0.0 && eps < 1.0, "hull_entropy_reference: need 0 < eps < 1");
    require(C >= 0.0, "hull_entropy_reference: C must be nonnegative");
    return {(2.0 + C) * eps, static_cast<double>(N.at(eps)) * std::log(1.0 / eps)};
}

RademacherEstimate rademacher_estimate(std::span<const SampleProfile> profiles, std::size_t draws,
                                       std::uint64_t seed) {
    require(draws >= 1, "rademacher_estimate: need at least one draw");
    RademacherEstimate out;
    if (profiles.empty()) return out;
    const std::size_t n = profiles.front().size();
    for (const auto& p : profiles) require(p.size() == n, "rademacher_estimate: ragged profiles");
    Rng rng(seed);
    std::vector<int> signs(n);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t m = 0; m < draws; ++m) {
        for (auto& s : signs) s = rng.sign();
        double sup = 0.0;
        for (const auto& p : profiles) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += signs[i] * p[i];
            sup = std::max(sup, std::abs(acc) / static_cast<double>(n));
        }
        sum += sup;
        sum_sq += sup * sup;
    }
    const double M = static_cast<double>(draws);
    out.mean = sum / M;
    if (draws > 1) {
        const double var = std::max(0.0, (sum_sq - M * out.mean * out.mean) / (M - 1.0));
        out.stderr_ = std::sqrt(var / M);
    }
    return out;
}

RademacherEstimate rademacher_estimate(std::span<const Stump> hypotheses, const Dataset& data, std::size_t draws,
                                       std::uint64_t seed) {
    const auto p = sample_profiles(hypotheses, data);
    return rademacher_estimate(p, draws, seed);
}

nlohmann::json covering_to_json(const CoveringProfile& profile) {
    return {{"metric", to_string(profile.metric)},
            {"source", profile.source},
            {"eps", profile.eps_grid},
            {"counts", profile.counts},
            {"floor_count", profile.floor_count}};
}

std::string to_string(Metric metric) {
    switch (metric) {
        case Metric::L1: return "L1";
        case Metric::L2: return "L2";
        case Metric::Linf: return "Linf";
    }
    return "L2";
}

Metric metric_from_string(const std::string& name) {
    if (name == "L1") return Metric::L1;
    if (name == "L2") return Metric::L2;
    if (name == "Linf") return Metric::Linf;
    fail("unknown metric '" + name + "' (expected L1, L2 or Linf)");
}

}  // namespace ensbound
