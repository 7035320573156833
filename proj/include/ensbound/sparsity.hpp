#pragma once

#include <optional>
#include <vector>

#include "ensbound/bounds.hpp"
#include "ensbound/core.hpp"
#include "ensbound/margins.hpp"

namespace ensbound {

/// Suffix sums of |weights|: tails[d] = gamma_d(f) for d = 0..T.
std::vector<double> tail_weights(const ConvexEnsemble& f);

/// Approximate gamma-dimension: smallest d with gamma_d(f) <= gamma.
long long gamma_dimension(const ConvexEnsemble& f, double gamma);

struct EffectiveDimension {
    double value = 0.0;
    long long d = 0;  ///< argmin (smallest on ties)
};

/// e_n(f, delta) = min_d (d + 2 gamma_d^2 / delta^2 * log n). n is real-valued
/// (>= 2 in practice; any n > 1 is accepted).
EffectiveDimension effective_dimension(const ConvexEnsemble& f, double delta, double n);
EffectiveDimension effective_dimension_from_tails(const std::vector<double>& tails, double delta, double n);

/// phi(a, b) = (a - b)^2 / a if a >= b, else 0; phi(0, b) = 0.
double phi(double a, double b);
/// Largest a >= b with phi(a, b) <= c (exact quadratic root).
double solve_phi(double b, double c);
/// (sqrt c + sqrt(b + c))^2, the looser closed form; always >= solve_phi(b, c).
double solve_phi_relaxed(double b, double c);

/// Largest solution y of y = x + a sqrt(y) + b y^beta, by monotone fixed-point
/// iteration from above. Throws NumericalError when the iteration cap is hit.
double solve_concave(double x, double a, double b, double beta, int max_iter = 10000);

enum class ClassicKind { schapire_2_1, kp_nolog, zero_error_2_4, linfty_2_7, breiman_2_11 };

struct ClassicExtras {
    std::optional<double> n_infty;      ///< L-infinity covering number of f (linfty)
    std::optional<double> class_size;   ///< card(H) or stand-in (breiman)
};

BoundReport classic_bound(ClassicKind kind, const MarginProfile& profile, const BoundParams& params,
                          const ClassicExtras& extra = {});

/// Inner infimum over gamma taken at the tail-weight breakpoints plus the dyadic grid.
BoundReport bound_gamma_dim(const ConvexEnsemble& f, const MarginProfile& profile, const BoundParams& params);

/// Ratio inequality in the ramp loss, inverted through solve_concave.
BoundReport theorem1_bound(const ConvexEnsemble& f, const Dataset& data, const BoundParams& params);

/// Sparsity bound with effective dimension. `explicit_eps` sets the variant
/// (1 + eps) P_n + (2 + 1/eps) U that is reported alongside.
BoundReport bound_sparsity(const ConvexEnsemble& f, const MarginProfile& profile, const BoundParams& params,
                           double explicit_eps = 1.0);

enum class RateKind { polynomial, exponential };

/// Closed-form zero-error rates for polynomially / exponentially decaying weights,
/// evaluated at the minimal margin.
BoundReport example_rate(RateKind kind, double beta, const MarginProfile& profile, const BoundParams& params);

/// delta_* exponent 2/(2 beta - 1) of the polynomial rate.
double polynomial_rate_exponent(double beta);

/// delta^(-2a/(2+a)) n^(-2/(a+2)) scaled by gamma^(2a/(2+a)); the whole-hull entropy term.
double hull_rate_term(double gamma, double delta, double n, double alpha);

std::string to_string(ClassicKind kind);
ClassicKind classic_kind_from_string(const std::string& name);

}  // namespace ensbound
