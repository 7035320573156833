#include "ensbound/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "ensbound/error.hpp"

namespace ensbound {

Dataset::Dataset(std::size_t p, std::vector<double> features, std::vector<int> labels)
    : p_(p), features_(std::move(features)), labels_(std::move(labels)) {
    require(p_ >= 1, "dataset: need at least one feature column");
    require(!labels_.empty(), "dataset: need at least one row");
    require(features_.size() == labels_.size() * p_, "dataset: feature matrix size does not match n * p");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        require(labels_[i] == 1 || labels_[i] == -1,
                "dataset: label of row " + std::to_string(i) + " is not -1 or +1");
    }
    for (std::size_t k = 0; k < features_.size(); ++k) {
        require(std::isfinite(features_[k]), "dataset: non-finite feature at row " + std::to_string(k / p_) +
                                                 ", column " + std::to_string(k % p_));
    }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    std::vector<double> feats;
    std::vector<int> labs;
    feats.reserve(indices.size() * p_);
    labs.reserve(indices.size());
    for (std::size_t i : indices) {
        require(i < n(), "dataset: subset index out of range");
        auto r = row(i);
        feats.insert(feats.end(), r.begin(), r.end());
        labs.push_back(labels_[i]);
    }
    return Dataset(p_, std::move(feats), std::move(labs));
}

ConvexEnsemble::ConvexEnsemble(std::vector<Term> terms, HullMode mode) : terms_(std::move(terms)), mode_(mode) {
    constexpr double slack = 1e-9;
    double mass = 0.0;
    for (const auto& t : terms_) {
        require(std::isfinite(t.weight), "ensemble: non-finite weight");
        require(t.stump.polarity == 1 || t.stump.polarity == -1, "ensemble: polarity must be -1 or +1");
        require(!std::isnan(t.stump.threshold), "ensemble: NaN threshold");
        if (mode_ == HullMode::conv) require(t.weight >= 0.0, "ensemble: negative weight in conv mode");
        mass += std::abs(t.weight);
    }
    require(mass <= 1.0 + slack, "ensemble: total absolute weight exceeds 1");
}

std::vector<double> ConvexEnsemble::weights() const {
    std::vector<double> w;
    w.reserve(terms_.size());
    for (const auto& t : terms_) w.push_back(t.weight);
    return w;
}

double ConvexEnsemble::l1_mass() const {
    double s = 0.0;
    for (const auto& t : terms_) s += std::abs(t.weight);
    return s;
}

void ConvexEnsemble::check_features(std::size_t p) const {
    for (const auto& t : terms_) {
        require(t.stump.feature < p, "ensemble: stump feature index " + std::to_string(t.stump.feature) +
                                         " out of range for " + std::to_string(p) + " features");
    }
}

ConvexEnsemble ConvexEnsemble::fold_signs() const {
    std::vector<Term> out = terms_;
    for (auto& t : out) {
        if (t.weight < 0.0) {
            t.weight = -t.weight;
            t.stump.polarity = -t.stump.polarity;
        }
    }
    return ConvexEnsemble(std::move(out), HullMode::conv);
}

double evaluate_ensemble(const ConvexEnsemble& f, std::span<const double> x) {
    double s = 0.0;
    for (const auto& t : f.terms()) {
        require(t.stump.feature < x.size(), "evaluate: stump feature index out of range for row");
        s += t.weight * t.stump(x);
    }
    return s;
}

double margin(const ConvexEnsemble& f, std::span<const double> x, int y) {
    require(y == 1 || y == -1, "margin: label must be -1 or +1");
    return y * evaluate_ensemble(f, x);
}

ConvexEnsemble normalize(const ConvexEnsemble& f) {
    std::map<Stump, double> merged;
    for (const auto& t : f.terms()) merged[t.stump] += t.weight;

    std::vector<Term> terms;
    double mass = 0.0;
    for (const auto& [stump, w] : merged) {
        if (w == 0.0) continue;
        terms.push_back({w, stump});
        mass += std::abs(w);
    }
    if (mass <= 0.0) throw ValidationError("normalize: degenerate ensemble (all weights are zero)");

    // Already unit mass up to rounding: leave weights untouched so normalize is idempotent.
    if (std::abs(mass - 1.0) > 1e-12) {
        for (auto& t : terms) t.weight /= mass;
    }
    std::stable_sort(terms.begin(), terms.end(),
                     [](const Term& a, const Term& b) { return std::abs(a.weight) > std::abs(b.weight); });
    return ConvexEnsemble(std::move(terms), f.mode());
}

double tail_weight(const ConvexEnsemble& f, long long d) {
    require(d >= 0, "tail_weight: d must be nonnegative");
    double s = 0.0;
    const auto& terms = f.terms();
    for (std::size_t k = static_cast<std::size_t>(d); k < terms.size(); ++k) s += std::abs(terms[k].weight);
    return s;
}

std::vector<std::vector<int>> stump_profiles(const ConvexEnsemble& f, const Dataset& data) {
    f.check_features(data.p());
    std::vector<std::vector<int>> out;
    out.reserve(f.size());
    for (const auto& t : f.terms()) {
        std::vector<int> prof(data.n());
        for (std::size_t i = 0; i < data.n(); ++i) prof[i] = t.stump(data.row(i));
        out.push_back(std::move(prof));
    }
    return out;
}

std::vector<double> ensemble_values(const ConvexEnsemble& f, const Dataset& data) {
    f.check_features(data.p());
    std::vector<double> out(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) out[i] = evaluate_ensemble(f, data.row(i));
    return out;
}

std::string to_string(HullMode mode) { return mode == HullMode::conv ? "conv" : "sconv"; }

namespace {

nlohmann::json threshold_to_json(double th) {
    if (std::isinf(th)) return th > 0 ? "inf" : "-inf";
    return th;
}

double threshold_from_json(const nlohmann::json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    fail("ensemble document: threshold must be a number or \"inf\"/\"-inf\"");
}

}  // namespace

nlohmann::json ensemble_to_json(const ConvexEnsemble& f) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : f.terms()) {
        terms.push_back({{"weight", t.weight},
                         {"feature", t.stump.feature},
                         {"threshold", threshold_to_json(t.stump.threshold)},
                         {"polarity", t.stump.polarity}});
    }
    return {{"mode", to_string(f.mode())}, {"terms", std::move(terms)}};
}

ConvexEnsemble ensemble_from_json(const nlohmann::json& doc) {
    try {
        const auto mode_s = doc.at("mode").get<std::string>();
        require(mode_s == "conv" || mode_s == "sconv", "ensemble document: mode must be conv or sconv");
        std::vector<Term> terms;
        for (const auto& t : doc.at("terms")) {
            const auto feature = t.at("feature").get<long long>();
            require(feature >= 0, "ensemble document: negative feature index");
            terms.push_back({t.at("weight").get<double>(),
                             Stump{static_cast<std::size_t>(feature), threshold_from_json(t.at("threshold")),
                                   t.at("polarity").get<int>()}});
        }
        return ConvexEnsemble(std::move(terms), mode_s == "conv" ? HullMode::conv : HullMode::sconv);
    } catch (const nlohmann::json::exception& e) {
        fail(std::string("ensemble document: ") + e.what());
    }
}

void save_ensemble(const ConvexEnsemble& f, const std::string& path) {
    std::ofstream out(path);
    require(static_cast<bool>(out), "cannot open " + path + " for writing");
    out << ensemble_to_json(f).dump(2) << '\n';
}

ConvexEnsemble load_ensemble(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        fail(path + ": " + e.what());
    }
    return ensemble_from_json(doc);
}

}  // namespace ensbound
