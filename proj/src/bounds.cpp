#include "ensbound/bounds.hpp"

#include <cmath>

#include "ensbound/error.hpp"
#include "ensbound/sparsity.hpp"

namespace ensbound {

void BoundParams::validate() const {
    require(V > 0.0 && std::isfinite(V), "bound params: V must be positive");
    require(t >= 0.0 && std::isfinite(t), "bound params: t must be nonnegative");
    require(K >= 0.0 && std::isfinite(K), "bound params: K must be nonnegative");
    require(n >= 1, "bound params: n must be >= 1");
    require(!delta_grid.empty(), "bound params: delta grid is empty");
    for (double d : delta_grid) require(d > 0.0 && d <= 1.0, "bound params: delta grid entries must lie in (0, 1]");
    require(p_exponent >= 1.0, "bound params: p exponent must be >= 1");
    require(m_max >= 1, "bound params: m_max must be >= 1");
}

BoundParams BoundParams::with_sample(std::size_t n_) const {
    BoundParams out = *this;
    out.n = n_;
    if (out.delta_grid.empty()) out.delta_grid = dyadic_grid(1, 20);
    out.validate();
    return out;
}

std::vector<double> dyadic_grid(int k_min, int k_max) {
    require(k_min <= k_max, "dyadic grid: empty range");
    std::vector<double> g;
    for (int k = k_min; k <= k_max; ++k) g.push_back(std::ldexp(1.0, -k));
    return g;
}

double log_ratio(double n, double delta) { return std::max(1.0, std::log(n / delta)); }

double recombine(const BoundReport& r) {
    switch (r.combination) {
        case Combination::sum:
            return r.margin_term + r.complexity_term + r.confidence_term;
        case Combination::sparsity: {
            const double u = r.complexity_term + r.confidence_term;
            const double s = std::sqrt(u) + std::sqrt(r.margin_term + u);
            return s * s;
        }
        case Combination::concave_root:
            return solve_concave(r.margin_term, r.complexity_term, r.confidence_term, r.beta);
    }
    return r.total;
}

std::string to_string(Combination c) {
    switch (c) {
        case Combination::sum: return "sum";
        case Combination::sparsity: return "sparsity";
        case Combination::concave_root: return "concave_root";
    }
    return "?";
}

nlohmann::json report_to_json(const BoundReport& r) {
    nlohmann::json j = {{"bound_name", r.bound_name},
                        {"chosen_delta", r.chosen_delta},
                        {"chosen_gamma", nullptr},
                        {"chosen_d", nullptr},
                        {"chosen_m", nullptr},
                        {"margin_term", r.margin_term},
                        {"complexity_term", r.complexity_term},
                        {"confidence_term", r.confidence_term},
                        {"total", r.total},
                        {"combination", to_string(r.combination)},
                        {"valid", r.valid}};
    if (r.chosen_gamma) j["chosen_gamma"] = *r.chosen_gamma;
    if (r.chosen_d) j["chosen_d"] = *r.chosen_d;
    if (r.chosen_m) j["chosen_m"] = *r.chosen_m;
    if (r.combination == Combination::concave_root) j["beta"] = r.beta;
    nlohmann::json variants = nlohmann::json::object();
    for (const auto& [name, value] : r.variants) variants[name] = value;
    j["variants"] = std::move(variants);
    j["notes"] = r.notes;
    return j;
}

}  // namespace ensbound
