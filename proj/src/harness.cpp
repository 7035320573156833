#include "ensbound/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "ensbound/covering.hpp"
#include "ensbound/error.hpp"
#include "ensbound/random.hpp"
#include "ensbound/trainers.hpp"
#include "ensbound/variance.hpp"

namespace ensbound {

namespace {

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    const char* first = text.data();
    if (*first == '+') ++first;
    const auto res = std::from_chars(first, text.data() + text.size(), out);
    return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

std::vector<double> linspace_thresholds(std::size_t T) {
    std::vector<double> out(T);
    for (std::size_t j = 0; j < T; ++j) out[j] = -4.0 + 8.0 * static_cast<double>(j) / static_cast<double>(T);
    return out;
}

const std::vector<std::string>& series_bound_names() {
    static const std::vector<std::string> names{"schapire_2_1", "gamma_dim_2_8", "sparsity_theorem2",
                                                "variance_theorem3", "entropy_theorem5"};
    return names;
}

nlohmann::json margin_series(const MarginProfile& profile) {
    std::vector<double> deltas;
    std::vector<double> cdf;
    const auto sorted = profile.sorted();
    if (sorted.front() > -1.0) {
        deltas.push_back(-1.0);
        cdf.push_back(profile.cdf(-1.0));
    }
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
        deltas.push_back(sorted[i]);
        cdf.push_back(profile.cdf(sorted[i]));
    }
    return {{"delta", deltas}, {"cdf", cdf}};
}

nlohmann::json bounds_series(const ConvexEnsemble& f, const Dataset& train, const BoundParams& params,
                             std::uint64_t seed) {
    std::vector<std::vector<double>> totals(series_bound_names().size());
    for (double delta : params.delta_grid) {
        BoundParams single = params;
        single.delta_grid = {delta};
        const auto reports = compute_bounds(f, train, single, series_bound_names(), seed);
        for (std::size_t b = 0; b < reports.size(); ++b) totals[b].push_back(reports[b].total);
    }
    return {{"delta", params.delta_grid}, {"names", series_bound_names()}, {"totals", totals}};
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

template <typename Fn>
auto with_replicate(std::size_t r, Fn&& fn) -> decltype(fn()) {
    const std::string prefix = "replicate " + std::to_string(r) + ": ";
    try {
        return fn();
    } catch (const ValidationError& e) {
        throw ValidationError(prefix + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(prefix + e.what());
    }
}

}  // namespace

ConvexEnsemble weight_profile_ensemble(RateKind rate, double beta, std::size_t T, std::size_t p) {
    require(T >= 1, "weight profile: T must be >= 1");
    require(p >= 1, "weight profile: p must be >= 1");
    if (rate == RateKind::polynomial) require(beta > 0.0, "weight profile: beta must be positive");
    const auto thresholds = linspace_thresholds(T);
    std::vector<Term> terms;
    for (std::size_t j = 1; j <= T; ++j) {
        const double w = rate == RateKind::polynomial ? std::pow(static_cast<double>(j), -beta)
                                                      : std::exp(-static_cast<double>(j));
        if (w <= 0.0) continue;
        terms.push_back({w, Stump{(j - 1) % p, thresholds[j - 1], 1}});
    }
    double total = 0.0;
    for (const auto& t : terms) total += t.weight;
    for (auto& t : terms) t.weight /= total;
    return normalize(ConvexEnsemble(std::move(terms)));
}

SynthResult synth_data(const SynthSpec& spec, std::uint64_t seed) {
    require(spec.n >= 2, "synth: n must be >= 2");
    require(spec.p >= 1, "synth: p must be >= 1");
    require(spec.noise >= 0.0 && spec.noise < 0.5, "synth: noise must lie in [0, 1/2)");
    require(std::isfinite(spec.mu), "synth: mu must be finite");
    if (spec.kind == SynthKind::noisy_xor) require(spec.p >= 2, "synth: noisy_xor needs p >= 2");

    Rng rng(seed);
    std::vector<double> x(spec.n * spec.p);
    std::vector<int> y(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        int label = 1;
        if (spec.kind == SynthKind::noisy_xor) {
            for (std::size_t j = 0; j < spec.p; ++j) x[i * spec.p + j] = 2.0 * rng.uniform() - 1.0;
            label = (x[i * spec.p] > 0.0) == (x[i * spec.p + 1] > 0.0) ? 1 : -1;
        } else {
            label = rng.sign();
            for (std::size_t j = 0; j < spec.p; ++j) x[i * spec.p + j] = label * spec.mu + rng.normal();
        }
        if (rng.uniform() < spec.noise) label = -label;
        y[i] = label;
    }
    SynthResult out{Dataset(spec.p, std::move(x), std::move(y)), std::nullopt};
    if (spec.kind == SynthKind::weight_profile_fixture) {
        out.ensemble = weight_profile_ensemble(spec.rate, spec.beta, spec.T, spec.p);
    }
    return out;
}

Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open CSV file '" + path + "'");
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "CSV file '" + path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_line(line);
    const auto label_it = std::find(header.begin(), header.end(), "label");
    require(label_it != header.end(), "CSV '" + path + "': missing label column");
    const std::size_t label_col = static_cast<std::size_t>(label_it - header.begin());
    require(header.size() >= 2, "CSV '" + path + "': need at least one feature column");
    const std::size_t p = header.size() - 1;

    std::vector<double> features;
    std::vector<int> labels;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        ++row;
        const auto cells = split_csv_line(line);
        require(cells.size() == header.size(), "CSV '" + path + "' row " + std::to_string(row) + ": expected " +
                                                   std::to_string(header.size()) + " columns, found " +
                                                   std::to_string(cells.size()));
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const std::string where = "CSV '" + path + "' row " + std::to_string(row) + ", column '" + header[c] + "'";
            double v = 0.0;
            require(parse_double(cells[c], v), where + ": non-numeric value '" + cells[c] + "'");
            require(std::isfinite(v), where + ": value must be finite");
            if (c == label_col) {
                require(v == 1.0 || v == -1.0, where + ": label must be -1 or +1, got '" + cells[c] + "'");
                labels.push_back(static_cast<int>(v));
            } else {
                features.push_back(v);
            }
        }
    }
    require(row >= 1, "CSV '" + path + "': no data rows");
    return Dataset(p, std::move(features), std::move(labels));
}

void save_csv(const Dataset& data, const std::string& path) {
    std::ostringstream out;
    for (std::size_t j = 0; j < data.p(); ++j) out << 'f' << j << ',';
    out << "label\n";
    for (std::size_t i = 0; i < data.n(); ++i) {
        for (std::size_t j = 0; j < data.p(); ++j) out << format_number(data.feature(i, j)) << ',';
        out << data.label(i) << '\n';
    }
    write_text(path, out.str());
}

const std::vector<std::string>& all_bound_names() {
    static const std::vector<std::string> names{
        "schapire_2_1",      "kp_nolog",         "zero_error_2_4",     "linfty_2_7",
        "breiman_2_11",      "gamma_dim_2_8",    "theorem1",           "sparsity_theorem2",
        "example_polynomial", "example_exponential", "variance_theorem3", "cluster_theorem4",
        "entropy_theorem5"};
    return names;
}

std::vector<BoundReport> compute_bounds(const ConvexEnsemble& f, const Dataset& train, const BoundParams& params,
                                        const std::vector<std::string>& names, std::uint64_t seed,
                                        double example_beta) {
    params.validate();
    require(!f.empty(), "bounds: empty ensemble");
    f.check_features(train.p());
    const MarginProfile profile = margin_profile(f, train);
    std::vector<BoundReport> out;
    for (const auto& name : names.empty() ? all_bound_names() : names) {
        if (name == "schapire_2_1" || name == "kp_nolog" || name == "zero_error_2_4") {
            out.push_back(classic_bound(classic_kind_from_string(name), profile, params));
        } else if (name == "linfty_2_7") {
            ClassicExtras extra;
            extra.n_infty = static_cast<double>(n_infty(f, train));
            out.push_back(classic_bound(ClassicKind::linfty_2_7, profile, params, extra));
        } else if (name == "breiman_2_11") {
            ClassicExtras extra;
            // stumps realise at most (n + 1) labelings per feature and polarity
            extra.class_size = 2.0 * static_cast<double>(train.p()) * static_cast<double>(train.n() + 1);
            out.push_back(classic_bound(ClassicKind::breiman_2_11, profile, params, extra));
        } else if (name == "gamma_dim_2_8") {
            out.push_back(bound_gamma_dim(f, profile, params));
        } else if (name == "theorem1") {
            out.push_back(theorem1_bound(f, train, params));
        } else if (name == "sparsity_theorem2") {
            out.push_back(bound_sparsity(f, profile, params));
        } else if (name == "example_polynomial") {
            out.push_back(example_rate(RateKind::polynomial, example_beta, profile, params));
        } else if (name == "example_exponential") {
            out.push_back(example_rate(RateKind::exponential, example_beta, profile, params));
        } else if (name == "variance_theorem3") {
            out.push_back(bound_variance(f, train, profile, params));
        } else if (name == "cluster_theorem4") {
            out.push_back(bound_cluster(f, train, profile, params, seed));
        } else if (name == "entropy_theorem5") {
            out.push_back(bound_theorem5(f, train, profile, params));
        } else {
            fail("unknown bound '" + name + "'");
        }
    }
    return out;
}

void ExperimentConfig::validate() const {
    require(replicates >= 1, "experiment: replicates must be >= 1");
    require(rounds >= 1, "experiment: rounds must be >= 1");
    require(trainer == "adaboost" || trainer == "bagging", "experiment: trainer must be adaboost or bagging");
    require(train_fraction > 0.0 && train_fraction < 1.0 && test_fraction > 0.0 && test_fraction < 1.0,
            "experiment: split fractions must lie in (0, 1)");
    require(std::abs(train_fraction + test_fraction - 1.0) <= 1e-9, "experiment: split fractions must sum to 1");
    for (const auto& b : bounds) {
        require(std::find(all_bound_names().begin(), all_bound_names().end(), b) != all_bound_names().end(),
                "experiment: unknown bound '" + b + "'");
    }
    params.with_sample(1);
    if (!csv_path) {
        require(synth.n >= 2 && synth.p >= 1, "experiment: synthetic data needs n >= 2 and p >= 1");
        require(synth.noise >= 0.0 && synth.noise < 0.5, "experiment: noise must lie in [0, 1/2)");
    }
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
    try {
        require(doc.is_object(), "experiment config must be a JSON object");
        ExperimentConfig c;
        if (doc.contains("data")) {
            const auto& d = doc.at("data");
            if (d.contains("csv")) {
                c.csv_path = d.at("csv").get<std::string>();
            } else {
                c.synth.kind = synth_kind_from_string(d.value("kind", std::string("two_gaussians")));
                c.synth.n = d.value("n", c.synth.n);
                c.synth.p = d.value("p", c.synth.p);
                c.synth.noise = d.value("noise", c.synth.noise);
                c.synth.mu = d.value("mu", c.synth.mu);
                c.synth.rate = rate_kind_from_string(d.value("rate", std::string("polynomial")));
                c.synth.beta = d.value("beta", c.synth.beta);
                c.synth.T = d.value("T", c.synth.T);
            }
        }
        if (doc.contains("trainer")) {
            const auto& t = doc.at("trainer");
            c.trainer = t.value("algorithm", c.trainer);
            c.rounds = t.value("rounds", c.rounds);
        }
        if (doc.contains("split")) {
            c.train_fraction = doc.at("split").value("train", c.train_fraction);
            c.test_fraction = doc.at("split").value("test", 1.0 - c.train_fraction);
        }
        if (doc.contains("bounds")) c.bounds = doc.at("bounds").get<std::vector<std::string>>();
        if (doc.contains("params")) {
            const auto& p = doc.at("params");
            c.params.V = p.value("V", c.params.V);
            c.params.t = p.value("t", c.params.t);
            c.params.K = p.value("K", c.params.K);
            c.params.p_exponent = p.value("p_exponent", c.params.p_exponent);
            c.params.m_max = p.value("m_max", c.params.m_max);
            if (p.contains("delta_grid")) {
                const auto& g = p.at("delta_grid");
                if (g.is_object()) {
                    const auto range = g.at("dyadic").get<std::vector<int>>();
                    require(range.size() == 2, "delta_grid.dyadic must be [k_min, k_max]");
                    c.params.delta_grid = dyadic_grid(range[0], range[1]);
                } else {
                    c.params.delta_grid = g.get<std::vector<double>>();
                }
            }
        }
        c.replicates = doc.value("replicates", c.replicates);
        c.seed = doc.value("seed", c.seed);
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("experiment config: ") + e.what());
    }
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json data;
    if (c.csv_path) {
        data = {{"csv", *c.csv_path}};
    } else {
        data = {{"kind", to_string(c.synth.kind)}, {"n", c.synth.n}, {"p", c.synth.p},
                {"noise", c.synth.noise},         {"mu", c.synth.mu}};
        if (c.synth.kind == SynthKind::weight_profile_fixture) {
            data["rate"] = c.synth.rate == RateKind::polynomial ? "polynomial" : "exponential";
            data["beta"] = c.synth.beta;
            data["T"] = c.synth.T;
        }
    }
    const BoundParams p = c.params.with_sample(1);
    return {{"data", data},
            {"trainer", {{"algorithm", c.trainer}, {"rounds", c.rounds}}},
            {"split", {{"train", c.train_fraction}, {"test", c.test_fraction}}},
            {"bounds", c.bounds.empty() ? all_bound_names() : c.bounds},
            {"params",
             {{"V", p.V}, {"t", p.t}, {"K", p.K}, {"delta_grid", p.delta_grid}, {"p_exponent", p.p_exponent},
              {"m_max", p.m_max}}},
            {"replicates", c.replicates},
            {"seed", c.seed}};
}

ExperimentConfig load_config(const std::string& path) { return config_from_json(read_json(path)); }

double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "regression: need at least two paired points");
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    require(sxx > 0.0, "regression: x values are all equal");
    return sxy / sxx;
}

nlohmann::json run_experiment(const ExperimentConfig& config) {
    config.validate();
    const std::vector<std::string> names = config.bounds.empty() ? all_bound_names() : config.bounds;
    std::optional<Dataset> csv_data;
    if (config.csv_path) csv_data = load_csv(*config.csv_path);
    const bool fixture = !config.csv_path && config.synth.kind == SynthKind::weight_profile_fixture;

    nlohmann::json replicates = nlohmann::json::array();
    std::vector<double> test_errors;
    std::vector<std::vector<BoundReport>> all_reports;
    std::optional<ConvexEnsemble> fixture_ensemble;
    std::size_t fixture_n = 0;

    for (std::size_t r = 0; r < config.replicates; ++r) {
        with_replicate(r, [&] {
            const std::uint64_t seed_r = derive_seed(config.seed, r);
            std::optional<ConvexEnsemble> prebuilt;
            Dataset data = csv_data ? *csv_data : [&] {
                auto s = synth_data(config.synth, derive_seed(seed_r, 0));
                prebuilt = std::move(s.ensemble);
                return std::move(s.data);
            }();
            require(data.n() >= 2, "experiment: need at least two rows to split");

            std::vector<std::size_t> perm(data.n());
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            Rng rng(derive_seed(seed_r, 1));
            for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
            const auto n_train = std::clamp<std::size_t>(
                static_cast<std::size_t>(std::llround(config.train_fraction * static_cast<double>(data.n()))), 1,
                data.n() - 1);
            std::vector<std::size_t> train_idx(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
            std::vector<std::size_t> test_idx(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
            std::sort(train_idx.begin(), train_idx.end());
            std::sort(test_idx.begin(), test_idx.end());
            const Dataset train = data.subset(train_idx);
            const Dataset test = data.subset(test_idx);

            ConvexEnsemble f = prebuilt ? *prebuilt
                               : config.trainer == "adaboost"
                                   ? adaboost(train, static_cast<int>(config.rounds))
                                   : bagging(train, static_cast<int>(config.rounds), derive_seed(seed_r, 2));
            const BoundParams params = config.params.with_sample(train.n());
            const MarginProfile profile = margin_profile(f, train);
            auto reports = compute_bounds(f, train, params, names, derive_seed(seed_r, 3), config.synth.beta);
            for (const auto& rep : reports) {
                if (!std::isfinite(rep.total)) continue;
                if (std::abs(recombine(rep) - rep.total) > 1e-9 * std::max(1.0, std::abs(rep.total))) {
                    throw NumericalError("report integrity check failed for " + rep.bound_name);
                }
            }
            const double err = test_error(f, test);

            nlohmann::json en = nlohmann::json::array();
            for (double delta : params.delta_grid) {
                const auto e = effective_dimension(f, delta, std::max(2.0, static_cast<double>(train.n())));
                en.push_back({{"delta", delta}, {"e_n", e.value}, {"d", e.d}});
            }
            nlohmann::json gdim = nlohmann::json::array();
            for (int k = 1; k <= 6; ++k) {
                const double g = std::ldexp(1.0, -k);
                gdim.push_back({{"gamma", g}, {"d", gamma_dimension(f, g)}});
            }
            const auto vars = pointwise_variances(f, train);
            const CoveringProfile cov = base_covering_profile(f, train);
            nlohmann::json complexities = {{"T", f.size()},
                                           {"min_margin", profile.min_margin()},
                                           {"train_margin_error", profile.cdf(0.0)},
                                           {"n_infty", n_infty(f, train)},
                                           {"mean_variance", mean_of(vars)},
                                           {"effective_dimension", en},
                                           {"gamma_dimension", gdim}};
            nlohmann::json bounds_json = nlohmann::json::array();
            for (const auto& rep : reports) bounds_json.push_back(report_to_json(rep));
            replicates.push_back(
                {{"index", r},
                 {"n_train", train.n()},
                 {"n_test", test.n()},
                 {"bounds", bounds_json},
                 {"test_error", err},
                 {"complexities", complexities},
                 {"series",
                  {{"margin", margin_series(profile)},
                   {"covering", {{"eps", cov.eps_grid}, {"count", cov.counts}}},
                   {"bounds", bounds_series(f, train, params, derive_seed(seed_r, 3))}}}});
            test_errors.push_back(err);
            all_reports.push_back(std::move(reports));
            if (fixture && r == 0) {
                fixture_ensemble = f;
                fixture_n = train.n();
            }
        });
    }

    nlohmann::json per_bound = nlohmann::json::object();
    for (std::size_t b = 0; b < names.size(); ++b) {
        std::vector<double> totals, margins, complexities, confidences;
        std::size_t covered = 0;
        std::size_t valid = 0;
        for (std::size_t r = 0; r < all_reports.size(); ++r) {
            const auto& rep = all_reports[r][b];
            totals.push_back(rep.total);
            margins.push_back(rep.margin_term);
            complexities.push_back(rep.complexity_term);
            confidences.push_back(rep.confidence_term);
            if (rep.total >= test_errors[r]) ++covered;
            if (rep.valid) ++valid;
        }
        const double R = static_cast<double>(all_reports.size());
        per_bound[names[b]] = {{"coverage", static_cast<double>(covered) / R},
                               {"valid_fraction", static_cast<double>(valid) / R},
                               {"mean_total", mean_of(totals)},
                               {"mean_margin_term", mean_of(margins)},
                               {"mean_complexity_term", mean_of(complexities)},
                               {"mean_confidence_term", mean_of(confidences)}};
    }
    nlohmann::json aggregate = {
        {"replicates", config.replicates},
        {"test_error_mean", mean_of(test_errors)},
        {"bounds", per_bound},
        {"coverage_note", "fraction of replicates with bound total >= holdout error; observational only, the "
                          "absolute constants K are unspecified"}};

    if (fixture_ensemble) {
        std::vector<double> deltas, log_inv, e_values, log_e;
        for (int k = 2; k <= 6; ++k) {
            const double delta = std::ldexp(1.0, -k);
            const double e = effective_dimension(*fixture_ensemble, delta, std::max(2.0, static_cast<double>(fixture_n))).value;
            deltas.push_back(delta);
            log_inv.push_back(std::log(1.0 / delta));
            e_values.push_back(e);
            log_e.push_back(std::log(e));
        }
        nlohmann::json slope = {{"delta", deltas}, {"e_n", e_values}, {"n", fixture_n},
                                {"slope", regression_slope(log_inv, log_e)}};
        if (config.synth.rate == RateKind::polynomial) {
            slope["expected_slope"] = polynomial_rate_exponent(config.synth.beta);
        }
        aggregate["fixture_slope"] = slope;
    }

    return {{"schema", 1}, {"config", config_to_json(config)}, {"replicates", replicates}, {"aggregate", aggregate}};
}

std::vector<std::string> emit_plot_data(const nlohmann::json& report, const std::vector<std::string>& which,
                                        const std::string& dir) {
    require(!which.empty(), "plot-data: no series selected");
    for (const auto& w : which) {
        require(w == "margin" || w == "covering" || w == "bounds",
                "plot-data: unknown series '" + w + "' (expected margin, covering or bounds)");
    }
    require(report.is_object() && report.contains("replicates") && report.at("replicates").is_array(),
            "plot-data: report has no replicates");
    std::filesystem::create_directories(dir);
    const auto cell = [](const nlohmann::json& v) {
        return v.is_number() ? format_number(v.get<double>()) : std::string("inf");
    };
    std::vector<std::string> written;
    for (const auto& w : which) {
        std::ostringstream out;
        bool header = false;
        for (const auto& rep : report.at("replicates")) {
            require(rep.contains("series") && rep.at("series").contains(w),
                    "plot-data: report lacks the '" + w + "' series");
            const auto& s = rep.at("series").at(w);
            const std::string idx = std::to_string(rep.at("index").get<std::size_t>());
            if (w == "margin") {
                if (!header) out << "replicate,delta,cdf\n";
                for (std::size_t i = 0; i < s.at("delta").size(); ++i) {
                    out << idx << ',' << cell(s.at("delta")[i]) << ',' << cell(s.at("cdf")[i]) << '\n';
                }
            } else if (w == "covering") {
                if (!header) out << "replicate,eps,count\n";
                for (std::size_t i = 0; i < s.at("eps").size(); ++i) {
                    out << idx << ',' << cell(s.at("eps")[i]) << ',' << s.at("count")[i].get<std::size_t>() << '\n';
                }
            } else {
                if (!header) {
                    out << "replicate,delta";
                    for (const auto& name : s.at("names")) out << ',' << name.get<std::string>();
                    out << '\n';
                }
                for (std::size_t i = 0; i < s.at("delta").size(); ++i) {
                    out << idx << ',' << cell(s.at("delta")[i]);
                    for (const auto& col : s.at("totals")) out << ',' << cell(col[i]);
                    out << '\n';
                }
            }
            header = true;
        }
        const std::string path = (std::filesystem::path(dir) / (w + ".csv")).string();
        write_text(path, out.str());
        written.push_back(path);
    }
    return written;
}

std::string dump_document(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), "cannot write '" + path + "'");
    out << text;
    require(static_cast<bool>(out), "write failed for '" + path + "'");
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
    }
}

std::string to_string(SynthKind kind) {
    switch (kind) {
        case SynthKind::two_gaussians: return "two_gaussians";
        case SynthKind::noisy_xor: return "noisy_xor";
        case SynthKind::weight_profile_fixture: return "weight_profile_fixture";
    }
    return "two_gaussians";
}

SynthKind synth_kind_from_string(const std::string& name) {
    if (name == "two_gaussians") return SynthKind::two_gaussians;
    if (name == "noisy_xor") return SynthKind::noisy_xor;
    if (name == "weight_profile_fixture") return SynthKind::weight_profile_fixture;
    fail("unknown synthetic kind '" + name + "'");
}

RateKind rate_kind_from_string(const std::string& name) {
    if (name == "polynomial") return RateKind::polynomial;
    if (name == "exponential") return RateKind::exponential;
    fail("unknown rate kind '" + name + "' (expected polynomial or exponential)");
}

}  // namespace ensbound
