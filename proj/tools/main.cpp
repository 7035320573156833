// ensbound command-line driver.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ensbound/covering.hpp"
#include "ensbound/error.hpp"
#include "ensbound/harness.hpp"
#include "ensbound/margins.hpp"
#include "ensbound/random.hpp"
#include "ensbound/randomized.hpp"
#include "ensbound/sparsity.hpp"
#include "ensbound/trainers.hpp"
#include "ensbound/variance.hpp"

using namespace ensbound;

namespace {

struct ParamOptions {
    double V = 2.0;
    double t = 3.0;
    double K = 1.0;
    int kmin = 1;
    int kmax = 20;
    double p_exponent = 2.0;
    int m_max = 8;

    void attach(CLI::App* app) {
        app->add_option("--V", V, "covering exponent of the base class")->capture_default_str();
        app->add_option("--t", t, "confidence exponent")->capture_default_str();
        app->add_option("--K", K, "stand-in for the absolute constant")->capture_default_str();
        app->add_option("--kmin", kmin, "delta grid: smallest k in 2^-k")->capture_default_str();
        app->add_option("--kmax", kmax, "delta grid: largest k in 2^-k")->capture_default_str();
        app->add_option("--p-exp", p_exponent, "exponent of the general-p variance optimiser")->capture_default_str();
        app->add_option("--m-max", m_max, "cluster-count search cap")->capture_default_str();
    }

    BoundParams make(std::size_t n) const {
        BoundParams p;
        p.V = V;
        p.t = t;
        p.K = K;
        p.delta_grid = dyadic_grid(kmin, kmax);
        p.p_exponent = p_exponent;
        p.m_max = m_max;
        return p.with_sample(n);
    }
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void emit(const nlohmann::json& doc, const std::string& path) {
    if (path.empty()) {
        std::cout << dump_document(doc);
    } else {
        write_text(path, dump_document(doc));
    }
}

std::string csv_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Margin-bound analysis of voting classifiers over decision stumps"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    std::string kind = "two_gaussians", rate = "polynomial", out, model_out;
    SynthSpec spec;
    std::uint64_t seed = 1;
    synth->add_option("--kind", kind, "two_gaussians | noisy_xor | weight_profile_fixture")->capture_default_str();
    synth->add_option("--n", spec.n)->capture_default_str();
    synth->add_option("--p", spec.p)->capture_default_str();
    synth->add_option("--noise", spec.noise)->capture_default_str();
    synth->add_option("--mu", spec.mu, "class mean offset")->capture_default_str();
    synth->add_option("--rate", rate, "fixture weight decay: polynomial | exponential")->capture_default_str();
    synth->add_option("--beta", spec.beta, "fixture polynomial exponent")->capture_default_str();
    synth->add_option("--T", spec.T, "fixture ensemble size")->capture_default_str();
    synth->add_option("--seed", seed)->capture_default_str();
    synth->add_option("--out", out, "dataset CSV path")->required();
    synth->add_option("--model-out", model_out, "fixture ensemble path");

    // train
    auto* train = app.add_subcommand("train", "fit AdaBoost or bagging");
    std::string data_path, algo = "adaboost", model_path;
    int rounds = 100;
    train->add_option("--data", data_path)->required();
    train->add_option("--algo", algo, "adaboost | bagging")->capture_default_str();
    train->add_option("--rounds", rounds)->capture_default_str();
    train->add_option("--seed", seed)->capture_default_str();
    train->add_option("--out", out, "ensemble JSON path")->required();

    // margins
    auto* margins = app.add_subcommand("margins", "training margin distribution");
    margins->add_option("--model", model_path)->required();
    margins->add_option("--data", data_path)->required();
    std::string margin_grid = "dyadic";
    margins->add_option("--grid", margin_grid, "dyadic | linear:<step>")->capture_default_str();
    margins->add_option("--out", out, "CSV of (delta, P_n(yf <= delta)) pairs");

    // complexity
    auto* complexity = app.add_subcommand("complexity", "complexity measures of a trained ensemble");
    std::string measure = "sparsity", grid = "dyadic";
    ParamOptions popts;
    double gamma = 0.0, delta = 0.0;
    complexity->add_option("--model", model_path)->required();
    complexity->add_option("--data", data_path)->required();
    complexity->add_option("--measure", measure, "sparsity | variance | clusters | covering")->capture_default_str();
    complexity->add_option("--grid", grid, "covering grid (dyadic)")->capture_default_str();
    complexity->add_option("--gamma", gamma, "cluster-count gamma (clusters)");
    complexity->add_option("--delta", delta, "cluster-count delta (clusters)");
    complexity->add_option("--seed", seed)->capture_default_str();
    complexity->add_option("--out", out, "output prefix: writes <out>.csv and <out>.json");
    popts.attach(complexity);

    // bounds
    auto* bounds = app.add_subcommand("bounds", "evaluate margin bounds");
    std::string bound_list, holdout;
    bounds->add_option("--model", model_path)->required();
    bounds->add_option("--data,--train", data_path, "training sample")->required();
    bounds->add_option("--which,--bound", bound_list, "comma-separated bound names (default: all)");
    bounds->add_option("--test,--holdout", holdout, "holdout CSV for the test error");
    bounds->add_option("--seed", seed)->capture_default_str();
    bounds->add_option("--out", out);
    popts.attach(bounds);

    // verify
    auto* verify = app.add_subcommand("verify", "Monte Carlo checks of the randomized approximations");
    std::string check = "maurey";
    std::size_t samples = 10000, clusters_m = 2, n_pairs = 16;
    long long d_head = 0;
    double k_user = kDefaultStep4K;
    double verify_delta = 0.1, verify_gamma = 0.0;
    verify->add_option("--model", model_path)->required();
    verify->add_option("--data", data_path)->required();
    verify->add_option("--check", check, "maurey | cluster-variance | sigma-hat | bernstein")->capture_default_str();
    verify->add_option("--samples", samples)->capture_default_str();
    verify->add_option("--seed", seed)->capture_default_str();
    verify->add_option("--d", d_head, "head size (maurey)")->capture_default_str();
    verify->add_option("--delta", verify_delta)->capture_default_str();
    verify->add_option("--gamma", verify_gamma, "(bernstein; default delta)");
    verify->add_option("--m", clusters_m, "number of clusters")->capture_default_str();
    verify->add_option("--N", n_pairs, "pairs per estimate (sigma-hat)")->capture_default_str();
    verify->add_option("--K", k_user, "absolute constant in the variance-check ceilings (bernstein)")->capture_default_str();
    verify->add_option("--out", out);

    // experiment
    auto* experiment = app.add_subcommand("experiment", "replicate study from a JSON config");
    std::string config_path, plots;
    experiment->add_option("--config", config_path)->required();
    experiment->add_option("--out", out, "report path (default: stdout)");
    experiment->add_option("--plots", plots, "directory for margin/covering/bounds CSV series");

    // plot-data
    auto* plot = app.add_subcommand("plot-data", "CSV series from an experiment report");
    std::string report_path, series = "margin,covering,bounds";
    plot->add_option("--report", report_path)->required();
    plot->add_option("--series", series)->capture_default_str();
    plot->add_option("--out", out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (synth->parsed()) {
            spec.kind = synth_kind_from_string(kind);
            spec.rate = rate_kind_from_string(rate);
            const auto result = synth_data(spec, seed);
            save_csv(result.data, out);
            if (result.ensemble && !model_out.empty()) save_ensemble(*result.ensemble, model_out);
        } else if (train->parsed()) {
            const Dataset data = load_csv(data_path);
            require(algo == "adaboost" || algo == "bagging", "unknown algorithm '" + algo + "'");
            const auto f = algo == "adaboost" ? adaboost(data, rounds) : bagging(data, rounds, seed);
            save_ensemble(f, out);
        } else if (margins->parsed()) {
            const Dataset data = load_csv(data_path);
            const auto f = load_ensemble(model_path);
            const auto profile = margin_profile(f, data);
            std::vector<double> deltas;
            if (margin_grid == "dyadic") {
                deltas = dyadic_grid(1, 20);
                std::reverse(deltas.begin(), deltas.end());
            } else if (margin_grid.rfind("linear:", 0) == 0) {
                double step = 0.0;
                try {
                    step = std::stod(margin_grid.substr(7));
                } catch (const std::exception&) {
                    fail("bad grid step in '" + margin_grid + "'");
                }
                require(step > 0.0 && step <= 2.0, "linear grid step must lie in (0, 2]");
                const auto count = static_cast<int>(std::floor(2.0 / step + 1e-9));
                for (int k = 0; k <= count; ++k) deltas.push_back(-1.0 + k * step);
            } else {
                fail("unknown margin grid '" + margin_grid + "' (expected dyadic or linear:<step>)");
            }
            std::ostringstream csv;
            csv << "delta,cdf\n";
            for (double dl : deltas) csv << csv_number(dl) << ',' << csv_number(profile.cdf(dl)) << '\n';
            if (!out.empty()) write_text(out, csv.str());
            std::cout << dump_document({{"n", profile.n()},
                                        {"min_margin", profile.min_margin()},
                                        {"training_error", profile.cdf(0.0)},
                                        {"cdf_at", {{"0.1", profile.cdf(0.1)}, {"0.25", profile.cdf(0.25)},
                                                    {"0.5", profile.cdf(0.5)}}}});
        } else if (complexity->parsed()) {
            const Dataset data = load_csv(data_path);
            const auto f = load_ensemble(model_path);
            const BoundParams params = popts.make(data.n());
            nlohmann::json doc;
            std::ostringstream csv;
            if (measure == "sparsity") {
                const auto tails = tail_weights(f);
                csv << "delta,effective_dimension,d\n";
                nlohmann::json en = nlohmann::json::array();
                for (double dl : params.delta_grid) {
                    const auto e = effective_dimension(f, dl, std::max(2.0, static_cast<double>(data.n())));
                    csv << csv_number(dl) << ',' << csv_number(e.value) << ',' << e.d << '\n';
                    en.push_back({{"delta", dl}, {"e_n", e.value}, {"d", e.d}});
                }
                doc = {{"measure", "sparsity"}, {"tail_weights", tails}, {"effective_dimension", en}};
            } else if (measure == "variance") {
                const auto vars = pointwise_variances(f, data);
                csv << "row,sigma2\n";
                for (std::size_t i = 0; i < vars.size(); ++i) csv << i << ',' << csv_number(vars[i]) << '\n';
                double mean = 0.0;
                for (double v : vars) mean += v / static_cast<double>(vars.size());
                doc = {{"measure", "variance"}, {"mean_variance", mean}, {"sigma2", vars}};
            } else if (measure == "clusters") {
                nlohmann::json per_m = nlohmann::json::array();
                csv << "m,row,sigma2\n";
                for (int m = 1; m <= std::min<int>(params.m_max, static_cast<int>(f.size())); ++m) {
                    const auto s = search_clusters(f, data, m, derive_seed(seed, static_cast<std::uint64_t>(m)));
                    const auto vars = cluster_variances(s.decomposition, f, data);
                    for (std::size_t i = 0; i < vars.size(); ++i) {
                        csv << m << ',' << i << ',' << csv_number(vars[i]) << '\n';
                    }
                    per_m.push_back({{"m", m},
                                     {"objective", s.objective},
                                     {"reduced", s.reduced},
                                     {"kmeans_trace", s.kmeans_trace},
                                     {"decomposition", decomposition_to_json(s.decomposition)}});
                }
                doc = {{"measure", "clusters"}, {"searches", per_m}};
                if (gamma > 0.0 && delta > 0.0) {
                    const auto c = cluster_count(f, data, params, gamma, delta, seed);
                    doc["cluster_count"] = {{"gamma", gamma}, {"delta", delta}, {"m_hat_upper", c.m},
                                            {"found", c.found}, {"tail", c.tail}, {"budget", c.budget}};
                }
            } else if (measure == "covering") {
                require(grid == "dyadic", "only the dyadic covering grid is supported");
                const auto cov = base_covering_profile(f, data);
                csv << "eps,count\n";
                for (std::size_t j = 0; j < cov.eps_grid.size(); ++j) {
                    csv << csv_number(cov.eps_grid[j]) << ',' << cov.counts[j] << '\n';
                }
                nlohmann::json nodes = nlohmann::json::array();
                for (int k = 2; k <= 20; ++k) {
                    const double x = std::ldexp(1.0, -k);
                    nodes.push_back({{"delta", x}, {"psi", entropy_integral(cov, x)},
                                     {"psi_capped", capped_entropy_integral(cov, params, x)}});
                }
                doc = {{"measure", "covering"}, {"profile", covering_to_json(cov)}, {"n_infty", n_infty(f, data)},
                       {"psi_nodes", nodes}};
            } else {
                fail("unknown measure '" + measure + "'");
            }
            if (out.empty()) {
                std::cout << dump_document(doc);
            } else {
                write_text(out + ".csv", csv.str());
                write_text(out + ".json", dump_document(doc));
            }
        } else if (bounds->parsed()) {
            const Dataset data = load_csv(data_path);
            const auto f = load_ensemble(model_path);
            const BoundParams params = popts.make(data.n());
            if (bound_list == "all") bound_list.clear();
            const auto reports = compute_bounds(f, data, params, split_list(bound_list), seed);
            nlohmann::json doc = {{"n", data.n()}, {"bounds", nlohmann::json::array()}};
            for (const auto& r : reports) doc["bounds"].push_back(report_to_json(r));
            if (!holdout.empty()) doc["test_error"] = test_error(f, load_csv(holdout));
            emit(doc, out);
        } else if (verify->parsed()) {
            const Dataset data = load_csv(data_path);
            const auto f = load_ensemble(model_path);
            const BoundParams params = ParamOptions{}.make(data.n());
            nlohmann::json doc;
            if (check == "maurey") {
                doc = to_json(check_maurey_tail(f, data, verify_delta, d_head, params, samples, seed));
            } else {
                const int m = static_cast<int>(std::min(clusters_m, f.size()));
                const auto c = search_clusters(f, data, m, seed).decomposition;
                if (check == "cluster-variance") {
                    doc = to_json(check_cluster_variance(c, f, data, samples, seed));
                } else if (check == "sigma-hat") {
                    doc = to_json(check_sigma_hat(c, f, data, samples, n_pairs, seed));
                } else if (check == "bernstein") {
                    doc = to_json(check_bernstein_tails(c, f, data, verify_gamma > 0.0 ? verify_gamma : verify_delta, verify_delta, params,
                                                        samples, seed, k_user));
                } else {
                    fail("unknown check '" + check + "'");
                }
                doc["decomposition"] = decomposition_to_json(c);
            }
            emit(doc, out);
            std::cerr << (doc.at("pass").get<bool>() ? "PASS" : "FAIL") << ' ' << check << '\n';
        } else if (experiment->parsed()) {
            const auto config = load_config(config_path);
            const auto report = run_experiment(config);
            emit(report, out);
            if (!plots.empty()) emit_plot_data(report, {"margin", "covering", "bounds"}, plots);
        } else if (plot->parsed()) {
            for (const auto& path : emit_plot_data(read_json(report_path), split_list(series), out)) {
                std::cout << path << '\n';
            }
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
