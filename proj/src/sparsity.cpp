#include "ensbound/sparsity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ensbound/error.hpp"

namespace ensbound {

namespace {

constexpr double kTailSlack = 1e-12;

// Keep the candidate with smaller total; ties go to the smaller delta.
bool better(double total, double delta, const BoundReport& best) {
    if (total < best.total) return true;
    return total == best.total && delta < best.chosen_delta;
}

BoundReport empty_report(std::string name, Combination c = Combination::sum) {
    BoundReport r;
    r.bound_name = std::move(name);
    r.total = std::numeric_limits<double>::infinity();
    r.combination = c;
    return r;
}

std::vector<double> gamma_candidates(const std::vector<double>& tails) {
    std::vector<double> gammas = tails;
    for (int k = 0; k <= 20; ++k) gammas.push_back(std::ldexp(1.0, -k));
    std::sort(gammas.begin(), gammas.end());
    gammas.erase(std::unique(gammas.begin(), gammas.end()), gammas.end());
    return gammas;
}

long long dimension_from_tails(const std::vector<double>& tails, double gamma) {
    for (std::size_t d = 0; d < tails.size(); ++d) {
        if (tails[d] <= gamma + kTailSlack) return static_cast<long long>(d);
    }
    return static_cast<long long>(tails.size()) - 1;
}

}  // namespace

std::vector<double> tail_weights(const ConvexEnsemble& f) {
    const auto& terms = f.terms();
    std::vector<double> tails(terms.size() + 1, 0.0);
    // summation rounding can push a tail of a normalized ensemble past 1 by an ulp
    for (std::size_t k = terms.size(); k-- > 0;) tails[k] = std::min(1.0, tails[k + 1] + std::abs(terms[k].weight));
    return tails;
}

long long gamma_dimension(const ConvexEnsemble& f, double gamma) {
    require(gamma >= 0.0, "gamma_dimension: gamma must be nonnegative");
    return dimension_from_tails(tail_weights(f), gamma);
}

EffectiveDimension effective_dimension_from_tails(const std::vector<double>& tails, double delta, double n) {
    require(delta > 0.0, "effective_dimension: delta must be positive");
    require(n > 1.0, "effective_dimension: n must exceed 1");
    const double scale = 2.0 * std::log(n) / (delta * delta);
    EffectiveDimension best{std::numeric_limits<double>::infinity(), 0};
    for (std::size_t d = 0; d < tails.size(); ++d) {
        const double v = static_cast<double>(d) + scale * tails[d] * tails[d];
        if (v < best.value) best = {v, static_cast<long long>(d)};
    }
    return best;
}

EffectiveDimension effective_dimension(const ConvexEnsemble& f, double delta, double n) {
    return effective_dimension_from_tails(tail_weights(f), delta, n);
}

double phi(double a, double b) {
    if (a <= 0.0 || a < b) return 0.0;
    return (a - b) * (a - b) / a;
}

double solve_phi(double b, double c) {
    require(b >= 0.0 && c >= 0.0, "solve_phi: b and c must be nonnegative");
    return b + c / 2.0 + std::sqrt(b * c + c * c / 4.0);
}

double solve_phi_relaxed(double b, double c) {
    require(b >= 0.0 && c >= 0.0, "solve_phi: b and c must be nonnegative");
    const double s = std::sqrt(c) + std::sqrt(b + c);
    return s * s;
}

double solve_concave(double x, double a, double b, double beta, int max_iter) {
    require(x >= 0.0 && a >= 0.0 && b >= 0.0, "solve_concave: x, a, b must be nonnegative");
    require(beta > 0.0 && beta < 1.0, "solve_concave: beta must lie in (0, 1)");
    auto rhs = [&](double y) { return x + a * std::sqrt(y) + b * std::pow(y, beta); };

    double y = (x + a + b + 1.0) * (x + a + b + 1.0);
    // For beta > 1/2 the start can sit below the root; move up until rhs(y) <= y.
    for (int guard = 0; rhs(y) > y; ++guard) {
        if (guard > 200) throw NumericalError("solve_concave: could not bracket the root");
        y *= 4.0;
    }
    for (int it = 0; it < max_iter; ++it) {
        const double next = rhs(y);
        if (!(next < y)) return y;  // the decreasing sequence has stalled at the fixed point
        if (y - next <= 1e-15 * std::max(1.0, y)) return next;
        y = next;
    }
    throw NumericalError("solve_concave: no convergence within iteration cap");
}

double hull_rate_term(double gamma, double delta, double n, double alpha) {
    return std::pow(gamma / delta, 2.0 * alpha / (2.0 + alpha)) * std::pow(n, -2.0 / (alpha + 2.0));
}

std::string to_string(ClassicKind kind) {
    switch (kind) {
        case ClassicKind::schapire_2_1: return "schapire_2_1";
        case ClassicKind::kp_nolog: return "kp_nolog";
        case ClassicKind::zero_error_2_4: return "zero_error_2_4";
        case ClassicKind::linfty_2_7: return "linfty_2_7";
        case ClassicKind::breiman_2_11: return "breiman_2_11";
    }
    return "?";
}

ClassicKind classic_kind_from_string(const std::string& name) {
    for (auto k : {ClassicKind::schapire_2_1, ClassicKind::kp_nolog, ClassicKind::zero_error_2_4,
                   ClassicKind::linfty_2_7, ClassicKind::breiman_2_11}) {
        if (to_string(k) == name) return k;
    }
    fail("unknown classic bound: " + name);
}

BoundReport classic_bound(ClassicKind kind, const MarginProfile& profile, const BoundParams& params,
                          const ClassicExtras& extra) {
    params.validate();
    const double n = static_cast<double>(params.n);
    const double K = params.K;
    BoundReport best = empty_report(to_string(kind));

    if (kind == ClassicKind::breiman_2_11) {
        require(extra.class_size.has_value() && *extra.class_size >= 1.0,
                "breiman bound: class size N >= 1 is required");
        const double N = *extra.class_size;
        const double dstar = profile.min_margin();
        best.chosen_delta = dstar;
        best.confidence_term = K * params.t / n;
        if (dstar > 0.0) {
            best.complexity_term = K * std::log(N) / (n * dstar * dstar);
            best.total = best.complexity_term + best.confidence_term;
        } else {
            best.complexity_term = std::numeric_limits<double>::infinity();
            best.notes.push_back("minimal margin is not positive; bound does not apply");
        }
        best.valid = dstar > 0.0 && dstar >= std::sqrt(32.0 / N);
        if (!best.valid) best.notes.push_back("precondition delta_* >= sqrt(32/N) violated");
        return best;
    }

    if (kind == ClassicKind::linfty_2_7) {
        require(extra.n_infty.has_value() && *extra.n_infty >= 1.0,
                "linfty bound: L-infinity covering number >= 1 is required");
        best.notes.push_back("observed-sample L-infinity covering number used in place of its expectation");
    }

    for (double delta : params.delta_grid) {
        const double pn = profile.cdf(delta);
        const double lr = log_ratio(n, delta);
        double margin_term = 0.0, complexity = 0.0, confidence = 0.0;
        switch (kind) {
            case ClassicKind::schapire_2_1:
                margin_term = pn;
                complexity = K * std::sqrt(params.V * lr * lr / (n * delta * delta));
                confidence = K * std::sqrt(params.t / n);
                break;
            case ClassicKind::kp_nolog:
                margin_term = pn;
                complexity = K * std::sqrt(params.V / (n * delta * delta));
                confidence = K * std::sqrt(params.t / n);
                break;
            case ClassicKind::zero_error_2_4:
                margin_term = K * pn;
                complexity = K * hull_rate_term(1.0, delta, n, params.alpha());
                confidence = K * params.t / n;
                break;
            case ClassicKind::linfty_2_7:
                margin_term = K * pn;
                complexity = K * std::log(*extra.n_infty) / n;
                confidence = K * params.t / n;
                break;
            case ClassicKind::breiman_2_11:
                break;
        }
        const double total = margin_term + complexity + confidence;
        if (better(total, delta, best)) {
            best.chosen_delta = delta;
            best.margin_term = margin_term;
            best.complexity_term = complexity;
            best.confidence_term = confidence;
            best.total = total;
        }
    }
    return best;
}

BoundReport bound_gamma_dim(const ConvexEnsemble& f, const MarginProfile& profile, const BoundParams& params) {
    params.validate();
    const double n = static_cast<double>(params.n);
    const double K = params.K;
    const auto tails = tail_weights(f);
    const auto gammas = gamma_candidates(tails);
    BoundReport best = empty_report("gamma_dim_2_8");

    for (double delta : params.delta_grid) {
        const double lr = log_ratio(n, delta);
        double inner = std::numeric_limits<double>::infinity();
        double inner_gamma = 1.0;
        long long inner_d = 0;
        for (double gamma : gammas) {
            const long long d = dimension_from_tails(tails, gamma);
            const double v = static_cast<double>(d) / n * lr + hull_rate_term(gamma, delta, n, params.alpha());
            if (v < inner) {
                inner = v;
                inner_gamma = gamma;
                inner_d = d;
            }
        }
        const double margin_term = K * profile.cdf(delta);
        const double complexity = K * inner;
        const double confidence = K * params.t / n;
        const double total = margin_term + complexity + confidence;
        if (better(total, delta, best)) {
            best.chosen_delta = delta;
            best.chosen_gamma = inner_gamma;
            best.chosen_d = inner_d;
            best.margin_term = margin_term;
            best.complexity_term = complexity;
            best.confidence_term = confidence;
            best.total = total;
        }
    }
    return best;
}

BoundReport theorem1_bound(const ConvexEnsemble& f, const Dataset& data, const BoundParams& params) {
    params.validate();
    const double n = static_cast<double>(params.n);
    const double K = params.K;
    const double alpha = params.alpha();
    const double beta = 0.5 - alpha / 4.0;
    const auto tails = tail_weights(f);
    const auto gammas = gamma_candidates(tails);
    const MarginProfile profile = margin_profile(f, data);
    BoundReport best = empty_report("theorem1", Combination::concave_root);
    best.beta = beta;
    best.notes.push_back("complexity_term is the sqrt(y) coefficient u (includes the t term); "
                         "confidence_term is the y^beta coefficient v");

    for (double delta : params.delta_grid) {
        const double b = ramp_mean(profile, RampLoss(0.0, delta));
        const double lr = log_ratio(n, delta);
        for (double gamma : gammas) {
            const long long d = dimension_from_tails(tails, gamma);
            const double u = K * (std::sqrt(static_cast<double>(d) / n * lr) + std::sqrt(params.t / n));
            const double v = K * std::pow(gamma / delta, alpha / 2.0) / std::sqrt(n);
            const double rho = solve_concave(b, u, v, beta);
            if (better(rho, delta, best)) {
                best.chosen_delta = delta;
                best.chosen_gamma = gamma;
                best.chosen_d = d;
                best.margin_term = b;
                best.complexity_term = u;
                best.confidence_term = v;
                best.total = rho;
            }
        }
    }
    return best;
}

BoundReport bound_sparsity(const ConvexEnsemble& f, const MarginProfile& profile, const BoundParams& params,
                           double explicit_eps) {
    params.validate();
    require(explicit_eps > 0.0, "bound_sparsity: eps must be positive");
    const double n = static_cast<double>(params.n);
    const double K = params.K;
    const auto tails = tail_weights(f);
    BoundReport best = empty_report("sparsity_theorem2", Combination::sparsity);
    double best_explicit = std::numeric_limits<double>::infinity();

    for (double delta : params.delta_grid) {
        const double pn = profile.cdf(delta);
        const EffectiveDimension e = effective_dimension_from_tails(tails, delta, std::max(n, 2.0));
        const double complexity = K * params.V * e.value / n * log_ratio(n, delta);
        const double confidence = K * params.t / n;
        const double u = complexity + confidence;
        const double s = std::sqrt(u) + std::sqrt(pn + u);
        const double total = s * s;
        best_explicit = std::min(best_explicit, (1.0 + explicit_eps) * pn + (2.0 + 1.0 / explicit_eps) * u);
        if (better(total, delta, best)) {
            best.chosen_delta = delta;
            best.chosen_d = e.d;
            best.margin_term = pn;
            best.complexity_term = complexity;
            best.confidence_term = confidence;
            best.total = total;
        }
    }
    best.variants.emplace_back("explicit_eps", best_explicit);
    return best;
}

double polynomial_rate_exponent(double beta) {
    require(beta > 1.0, "polynomial rate: beta must exceed 1");
    return 2.0 / (2.0 * beta - 1.0);
}

BoundReport example_rate(RateKind kind, double beta, const MarginProfile& profile, const BoundParams& params) {
    params.validate();
    const double n = static_cast<double>(params.n);
    const double K = params.K;
    const double exponent = kind == RateKind::polynomial ? polynomial_rate_exponent(beta) : 0.0;
    BoundReport r = empty_report(kind == RateKind::polynomial ? "example_polynomial" : "example_exponential");

    const double dstar = profile.min_margin();
    r.chosen_delta = dstar;
    if (dstar <= 0.0) {
        r.valid = false;
        r.notes.push_back("minimal margin is not positive; zero-error rate does not apply");
        return r;
    }
    // P_n(yf <= delta) just below delta_* is zero by construction
    r.margin_term = K * profile.cdf(std::nextafter(dstar, -std::numeric_limits<double>::infinity()));
    const double lr = log_ratio(n, dstar);
    r.complexity_term = K * params.V / (n * std::pow(dstar, exponent)) * lr * lr;
    r.confidence_term = K * params.t / n;
    r.total = r.margin_term + r.complexity_term + r.confidence_term;
    return r;
}

}  // namespace ensbound
