#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace ensbound {

/// Parameters shared by every bound evaluator. K stands in for the unspecified
/// absolute constants of the bounds, so totals are meaningful for shape and
/// relative comparison only.
struct BoundParams {
    double V = 2.0;   ///< covering exponent of the base class
    double t = 3.0;   ///< confidence exponent
    double K = 1.0;
    std::size_t n = 0;
    std::vector<double> delta_grid;  ///< defaults to {2^-k : k = 1..20} when empty at validation
    double p_exponent = 2.0;         ///< exponent for the general-p variance optimiser
    int m_max = 8;                   ///< cluster-count search cap

    double alpha() const { return 2.0 * V / (V + 2.0); }

    /// Throws ValidationError unless V, t, K > 0 (K >= 0 allowed), n >= 1, grid in (0, 1].
    void validate() const;
    /// Copy with n set and an empty grid replaced by the dyadic default.
    BoundParams with_sample(std::size_t n_) const;
};

std::vector<double> dyadic_grid(int k_min, int k_max);

/// max(1, ln(n/delta)). Keeps complexity terms positive when n/delta is small.
double log_ratio(double n, double delta);

/// How a report's total is assembled from its three terms.
enum class Combination {
    sum,           ///< total = margin + complexity + confidence
    sparsity,      ///< U = complexity + confidence; total = (sqrt U + sqrt(margin + U))^2
    concave_root,  ///< total = largest y with y = margin + complexity*sqrt(y) + confidence*y^beta
};

/// Term-by-term breakdown of one bound at its optimising parameters. Terms are
/// stored as they enter the total (constants K already applied).
struct BoundReport {
    std::string bound_name;
    double chosen_delta = 0.0;
    std::optional<double> chosen_gamma;
    std::optional<long long> chosen_d;
    std::optional<int> chosen_m;
    double margin_term = 0.0;
    double complexity_term = 0.0;
    double confidence_term = 0.0;
    double total = 0.0;
    Combination combination = Combination::sum;
    double beta = 0.0;  ///< exponent for concave_root
    bool valid = true;  ///< false when the bound's precondition fails (total still computed)
    std::vector<std::pair<std::string, double>> variants;  ///< alternative totals (named)
    std::vector<std::string> notes;
};

/// Total recomputed from the stored terms using the report's combination rule.
double recombine(const BoundReport& report);

nlohmann::json report_to_json(const BoundReport& report);

std::string to_string(Combination c);

}  // namespace ensbound
