#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace ensbound {

/// Labeled sample (X_i, Y_i), i < n, stored row-major. Labels are exactly -1 or +1.
class Dataset {
public:
    Dataset(std::size_t p, std::vector<double> features, std::vector<int> labels);

    std::size_t n() const { return labels_.size(); }
    std::size_t p() const { return p_; }

    std::span<const double> row(std::size_t i) const { return {features_.data() + i * p_, p_}; }
    double feature(std::size_t i, std::size_t j) const { return features_[i * p_ + j]; }
    int label(std::size_t i) const { return labels_[i]; }

    std::span<const double> features() const { return features_; }
    std::span<const int> labels() const { return labels_; }

    /// Rows picked by index (repeats allowed).
    Dataset subset(std::span<const std::size_t> indices) const;

private:
    std::size_t p_;
    std::vector<double> features_;
    std::vector<int> labels_;
};

/// Axis-aligned decision stump: polarity if x[feature] > threshold, else -polarity.
/// Thresholds may be +-infinity, giving the two constant classifiers.
struct Stump {
    std::size_t feature = 0;
    double threshold = 0.0;
    int polarity = 1;

    int operator()(std::span<const double> x) const {
        return x[feature] > threshold ? polarity : -polarity;
    }

    friend bool operator==(const Stump&, const Stump&) = default;
    /// Lexicographic (feature, threshold, polarity).
    friend std::partial_ordering operator<=>(const Stump& a, const Stump& b) {
        if (a.feature != b.feature) return a.feature <=> b.feature;
        if (a.threshold != b.threshold) return a.threshold <=> b.threshold;
        return a.polarity <=> b.polarity;
    }
};

struct Term {
    double weight = 0.0;
    Stump stump;
    friend bool operator==(const Term&, const Term&) = default;
};

enum class HullMode { conv, sconv };

/// f = sum_k weight_k * h_k. In conv mode the weights are nonnegative with sum <= 1;
/// in sconv mode sum |weight_k| <= 1.
class ConvexEnsemble {
public:
    ConvexEnsemble() = default;
    ConvexEnsemble(std::vector<Term> terms, HullMode mode = HullMode::conv);

    const std::vector<Term>& terms() const { return terms_; }
    HullMode mode() const { return mode_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    std::vector<double> weights() const;
    double l1_mass() const;

    /// Check that every stump's feature index is < p.
    void check_features(std::size_t p) const;

    /// Fold negative weights into flipped polarity, producing a conv-mode ensemble.
    /// Never applied implicitly.
    ConvexEnsemble fold_signs() const;

    friend bool operator==(const ConvexEnsemble&, const ConvexEnsemble&) = default;

private:
    std::vector<Term> terms_;
    HullMode mode_ = HullMode::conv;
};

double evaluate_ensemble(const ConvexEnsemble& f, std::span<const double> x);
double margin(const ConvexEnsemble& f, std::span<const double> x, int y);

/// Merge identical stumps, rescale to unit l1 mass, sort by decreasing |weight|
/// (ties: stump order). Throws ValidationError on zero total mass.
ConvexEnsemble normalize(const ConvexEnsemble& f);

/// gamma_d(f) = sum of |weights| beyond the d largest.
double tail_weight(const ConvexEnsemble& f, long long d);

/// Values h_k(X_i), one row per term: profiles[k][i].
std::vector<std::vector<int>> stump_profiles(const ConvexEnsemble& f, const Dataset& data);

/// Ensemble values f(X_i) for every row.
std::vector<double> ensemble_values(const ConvexEnsemble& f, const Dataset& data);

// Persistence: {"mode": "conv"|"sconv", "terms": [{"weight", "feature", "threshold", "polarity"}]}.
// Infinite thresholds are written as the strings "inf" / "-inf".
nlohmann::json ensemble_to_json(const ConvexEnsemble& f);
ConvexEnsemble ensemble_from_json(const nlohmann::json& doc);
void save_ensemble(const ConvexEnsemble& f, const std::string& path);
ConvexEnsemble load_ensemble(const std::string& path);

std::string to_string(HullMode mode);

}  // namespace ensbound
