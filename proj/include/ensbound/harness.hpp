#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ensbound/bounds.hpp"
#include "ensbound/core.hpp"
#include "ensbound/margins.hpp"
#include "ensbound/sparsity.hpp"

namespace ensbound {

enum class SynthKind { two_gaussians, noisy_xor, weight_profile_fixture };

struct SynthSpec {
    SynthKind kind = SynthKind::two_gaussians;
    std::size_t n = 200;
    std::size_t p = 2;
    double noise = 0.0;
    double mu = 2.0;  ///< class mean offset for the Gaussian kinds
    // weight_profile_fixture only
    RateKind rate = RateKind::polynomial;
    double beta = 2.0;
    std::size_t T = 2000;
};

struct SynthResult {
    Dataset data;
    std::optional<ConvexEnsemble> ensemble;  ///< set for weight_profile_fixture
};

SynthResult synth_data(const SynthSpec& spec, std::uint64_t seed);

/// T distinct stumps with lambda_j proportional to j^-beta (polynomial) or e^-j
/// (exponential), normalised; weights that underflow to zero are dropped.
ConvexEnsemble weight_profile_ensemble(RateKind rate, double beta, std::size_t T, std::size_t p);

/// CSV with a header; feature columns in file order, `label` column holding -1/+1.
Dataset load_csv(const std::string& path);
/// Writes f0..f{p-1},label with round-trip exact numbers.
void save_csv(const Dataset& data, const std::string& path);

/// Every bound the harness knows, in report order.
const std::vector<std::string>& all_bound_names();

/// Compute the named bounds for f on its training sample.
std::vector<BoundReport> compute_bounds(const ConvexEnsemble& f, const Dataset& train, const BoundParams& params,
                                        const std::vector<std::string>& names, std::uint64_t seed,
                                        double example_beta = 2.0);

struct ExperimentConfig {
    std::optional<std::string> csv_path;
    SynthSpec synth;
    std::string trainer = "adaboost";  ///< adaboost | bagging
    std::size_t rounds = 100;
    double train_fraction = 0.7;
    double test_fraction = 0.3;
    std::vector<std::string> bounds;  ///< empty: all
    BoundParams params;               ///< n is filled per replicate
    std::size_t replicates = 1;
    std::uint64_t seed = 1;

    void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

/// Replicate studies; the returned document is a pure function of the config.
nlohmann::json run_experiment(const ExperimentConfig& config);

/// Least-squares slope of y on x.
double regression_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Writes <dir>/<series>.csv for each requested series (margin, covering, bounds).
std::vector<std::string> emit_plot_data(const nlohmann::json& report, const std::vector<std::string>& which,
                                        const std::string& dir);

/// Deterministic serialisation used for every document the tools write.
std::string dump_document(const nlohmann::json& doc);
void write_text(const std::string& path, const std::string& text);
nlohmann::json read_json(const std::string& path);

std::string to_string(SynthKind kind);
SynthKind synth_kind_from_string(const std::string& name);
RateKind rate_kind_from_string(const std::string& name);

}  // namespace ensbound
