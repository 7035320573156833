// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "ensbound/covering.hpp"
#include "ensbound/harness.hpp"
#include "ensbound/margins.hpp"
#include "ensbound/randomized.hpp"
#include "ensbound/sparsity.hpp"
#include "ensbound/trainers.hpp"
#include "ensbound/variance.hpp"
#include "support.hpp"

#ifndef ENSBOUND_CLI_PATH
#error "ENSBOUND_CLI_PATH must point at the command-line tool"
#endif

using namespace ensbound;
using namespace testing_support;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.7g", v);
    return buf;
}

BoundParams params_for(std::size_t n, std::vector<double> grid) {
    BoundParams p;
    p.n = n;
    p.delta_grid = std::move(grid);
    return p;
}

// Random weight vectors from three shapes: flat, power-law and spiky.
std::vector<Term> random_terms(std::size_t T, Rng& rng) {
    const int shape = static_cast<int>(rng.below(3));
    std::vector<Term> terms;
    for (std::size_t k = 0; k < T; ++k) {
        double w = rng.uniform() + 1e-6;
        if (shape == 1) w = std::pow(static_cast<double>(k + 1), -1.0 - 2.0 * rng.uniform());
        if (shape == 2) w = rng.uniform() < 0.2 ? 1.0 + rng.uniform() : 1e-3 * rng.uniform() + 1e-9;
        terms.push_back({w, Stump{0, static_cast<double>(k), 1}});
    }
    double total = 0.0;
    for (const auto& t : terms) total += t.weight;
    for (auto& t : terms) t.weight /= total;
    return terms;
}

Outcome criterion1() {
    Rng rng(101);
    int mismatches = 0;
    int ceiling_violations = 0;
    double max_rel = 0.0;
    int cases = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const auto f = normalize(ConvexEnsemble(random_terms(1 + rng.below(50), rng)));
        for (int k = 0; k <= 8; ++k) {
            const double delta = std::ldexp(1.0, -k);
            for (double n : {2.0, 10.0, 100.0, 1e4, 1e6}) {
                const auto got = effective_dimension(f, delta, n);
                const auto oracle = brute_effective_dimension(f.weights(), delta, n);
                ++cases;
                if (got.d != oracle.second) ++mismatches;
                max_rel = std::max(max_rel, std::abs(got.value - oracle.first) / std::max(1.0, oracle.first));
                if (got.value > 2.0 * std::log(n) / (delta * delta)) ++ceiling_violations;
            }
        }
    }
    Outcome o;
    o.pass = mismatches == 0 && max_rel <= 1e-12 && ceiling_violations == 0;
    o.detail = std::to_string(cases) + " (f, delta, n) cases; argmin mismatches " + std::to_string(mismatches) +
               ", max relative value gap " + fmt(max_rel) + ", ceiling violations " + std::to_string(ceiling_violations);
    return o;
}

Outcome criterion2() {
    const double n = 1e4;
    const auto poly = weight_profile_ensemble(RateKind::polynomial, 2.0, 2000, 2);
    const auto expo = weight_profile_ensemble(RateKind::exponential, 0.0, 2000, 2);
    std::vector<double> x, y;
    bool exp_ok = true;
    double worst_ratio = 0.0;
    for (int k = 2; k <= 6; ++k) {
        const double delta = std::ldexp(1.0, -k);
        x.push_back(std::log(1.0 / delta));
        y.push_back(std::log(effective_dimension(poly, delta, n).value));
        const double e = effective_dimension(expo, delta, n).value;
        const double cap = 10.0 * (std::log(n) + std::log(1.0 / delta));
        worst_ratio = std::max(worst_ratio, e / cap);
        exp_ok = exp_ok && e <= cap;
    }
    const double slope = regression_slope(x, y);
    Outcome o;
    o.pass = std::abs(slope - 2.0 / 3.0) <= 0.15 && exp_ok;
    o.detail = "polynomial slope " + fmt(slope) + " (target 0.6667 +- 0.15); exponential max e_n / (10 (log n + log 1/delta)) = " +
               fmt(worst_ratio);
    return o;
}

Outcome criterion3() {
    Rng rng(303);
    double phi_res = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const double b = rng.uniform();
        const double c = rng.uniform();
        phi_res = std::max(phi_res, std::abs(phi(solve_phi(b, c), b) - c));
    }
    double conc_res = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const double x = rng.uniform(), a = rng.uniform(), b = rng.uniform();
        const double beta = 0.01 + 0.98 * rng.uniform();
        const double y = solve_concave(x, a, b, beta);
        conc_res = std::max(conc_res, std::abs(y - (x + a * std::sqrt(y) + b * std::pow(y, beta))));
    }
    const double sq = solve_concave(0.0, 2.0, 0.0, 0.5);
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    const double gold = solve_concave(1.0, 1.0, 0.0, 0.5);
    const EntropyCurve linear([](double v) { return 2.0 * v; });
    const auto fp = fixed_point(linear, 0.3, 100.0);
    const double e1 = std::abs(sq - 4.0);
    const double e2 = std::abs(gold - golden * golden);
    const double e3 = std::abs(fp.eps - 0.04);
    Outcome o;
    o.pass = phi_res < 1e-12 && conc_res < 1e-10 && e1 < 1e-10 && e2 < 1e-10 && e3 < 1e-10;
    o.detail = "solve_phi max residual " + fmt(phi_res) + "; solve_concave max residual " + fmt(conc_res) +
               "; closed forms |y - a^2| " + fmt(e1) + ", golden " + fmt(e2) + ", linear fixed point " + fmt(e3);
    return o;
}

ConvexEnsemble maurey_fixture() {
    std::vector<Term> terms{{0.3, Stump{0, 0.0, 1}}, {0.2, Stump{1, 0.0, -1}}};
    const double thr[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
    for (int k = 0; k < 5; ++k) terms.push_back({0.1, Stump{static_cast<std::size_t>(k % 2), thr[k], k % 2 ? 1 : -1}});
    return normalize(ConvexEnsemble(terms));
}

Outcome criterion4() {
    SynthSpec spec;
    spec.n = 100;
    spec.mu = 0.5;
    const auto data = synth_data(spec, 404).data;
    const auto f = maurey_fixture();
    const auto r = check_maurey_tail(f, data, 0.1, 2, params_for(100, {0.5}), 100000, 405);
    Outcome o;
    o.pass = r.N == 231 && r.gamma_d == 0.5 && r.unbiased_pass && r.two_sided.pass && r.one_sided.pass;
    o.detail = "N = " + std::to_string(r.N) + ", gamma_d = " + fmt(r.gamma_d) + ", rows " +
               std::to_string(r.two_sided.rows_checked) + "; max |mean g - f| / stderr " + fmt(r.max_mean_dev_stderr) +
               " (gate 4); worst exceedance " + fmt(r.two_sided.max_frequency) + " vs ceiling " +
               fmt(r.two_sided.ceiling) + " + " + fmt(r.two_sided.tolerance);
    return o;
}

Outcome criterion5() {
    const auto data = random_dataset(40, 3, 505);
    const auto f = random_ensemble(12, 3, 506);
    Rng rng(507);
    std::vector<std::size_t> a(f.size());
    for (std::size_t j = 0; j < a.size(); ++j) a[j] = j < 3 ? j : rng.below(3);
    const auto c = partition_decomposition(f, a);
    const auto cv = check_cluster_variance(c, f, data, 100000, 508);
    const auto sh = check_sigma_hat(c, f, data, 100000, 16, 509);
    Outcome o;
    o.pass = cv.fraction_passing >= 0.95 && sh.max_relative_error <= 0.02 && sh.max_summand <= 2.0;
    o.detail = "variance identity within 3 stderr at " + fmt(100.0 * cv.fraction_passing) + "% of " +
               std::to_string(cv.rows) + " rows; sigma-hat max relative error " + fmt(sh.max_relative_error) +
               " (gate 0.02), max summand " + fmt(sh.max_summand);
    return o;
}

Outcome criterion6() {
    Rng rng(606);
    double max_gap = 0.0;
    int dominated_fail = 0;
    std::size_t rows = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t p = 1 + rng.below(3);
        const auto f = random_ensemble(1 + rng.below(25), p, 6000 + rep);
        const auto data = random_dataset(10 + rng.below(30), p, 7000 + rep);
        const std::size_t m = 1 + rng.below(f.size());
        std::vector<std::size_t> a(f.size());
        for (std::size_t j = 0; j < a.size(); ++j) a[j] = j < m ? j : rng.below(m);
        const auto c = partition_decomposition(f, a);
        const auto prof = stump_profiles(f, data);
        for (std::size_t i = 0; i < data.n(); ++i) {
            ++rows;
            const double total = pointwise_variance(f, data.row(i));
            const double fx = evaluate_ensemble(f, data.row(i));
            double within = 0.0, between = 0.0;
            for (std::size_t k = 0; k < c.m(); ++k) {
                double mean = 0.0;
                for (std::size_t j = 0; j < c.members[k].size(); ++j) mean += c.sub_measures[k][j] * prof[c.members[k][j]][i];
                double var = 0.0;
                for (std::size_t j = 0; j < c.members[k].size(); ++j) {
                    const double dv = prof[c.members[k][j]][i] - mean;
                    var += c.sub_measures[k][j] * dv * dv;
                }
                within += c.alphas[k] * var;
                between += c.alphas[k] * (mean - fx) * (mean - fx);
            }
            max_gap = std::max(max_gap, std::abs(total - within - between));
            if (cluster_variance(c, f, data.row(i)) > total + 1e-15) ++dominated_fail;
        }
    }
    Outcome o;
    o.pass = max_gap <= 1e-12 && dominated_fail == 0;
    o.detail = std::to_string(rows) + " rows over 100 ensembles; max identity gap " + fmt(max_gap) +
               ", domination failures " + std::to_string(dominated_fail);
    return o;
}

Outcome criterion7() {
    Rng rng(707);
    int sandwich_fail = 0;
    int identity_fail = 0;
    int checks = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const auto data = random_dataset(16, 2, 7100 + rep);
        std::vector<Stump> hs;
        const std::size_t k = 2 + rng.below(9);
        for (std::size_t j = 0; j < k; ++j) hs.push_back(Stump{static_cast<std::size_t>(rng.below(2)), rng.normal(), rng.sign()});
        for (int j = -1; j <= 6; ++j) {
            const double eps = std::ldexp(1.0, -j);
            for (Metric m : {Metric::L1, Metric::L2}) {
                const auto g = greedy_covering(hs, data, eps, m).count();
                ++checks;
                if (!(exact_covering(hs, data, eps, m) <= g && g <= exact_covering(hs, data, eps / 2.0, m))) ++sandwich_fail;
            }
        }
        for (const auto& h : hs) {
            for (const auto& g : hs) {
                const double l1 = empirical_distance(h, g, data, Metric::L1);
                const double l2 = empirical_distance(h, g, data, Metric::L2);
                if (l2 != std::sqrt(2.0 * l1)) ++identity_fail;
            }
        }
    }
    Outcome o;
    o.pass = sandwich_fail == 0 && identity_fail == 0;
    o.detail = std::to_string(checks) + " sandwich checks, failures " + std::to_string(sandwich_fail) +
               "; L2 = sqrt(2 L1) bit-exact failures " + std::to_string(identity_fail);
    return o;
}

Outcome criterion8() {
    Rng rng(808);
    int ceiling_fail = 0, residual_fail = 0, largest_fail = 0, capped_fail = 0;
    double max_res = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        SynthSpec spec;
        spec.kind = rep % 2 ? SynthKind::noisy_xor : SynthKind::two_gaussians;
        spec.n = 60 + rng.below(60);
        spec.mu = 0.7;
        spec.noise = 0.1;
        const auto data = synth_data(spec, 8000 + rep).data;
        const int rounds = 5 + static_cast<int>(rng.below(40));
        const auto f = rep % 3 == 0 ? bagging(data, rounds, 8100 + rep) : adaboost(data, rounds);
        const auto cov = base_covering_profile(f, data);
        const double ninf = static_cast<double>(n_infty(f, data));
        for (double delta : {0.01, 0.05, 0.1, 0.2, 0.3, 0.36}) {
            if (entropy_integral(cov, delta) > 2.0 * std::sqrt(ninf) * delta * std::sqrt(std::log(1.0 / delta))) ++ceiling_fail;
        }
        const auto curve = EntropyCurve::uncapped(cov);
        const double n = static_cast<double>(data.n());
        for (double delta : {0.05, 0.125, 0.25, 0.5}) {
            const auto fp = fixed_point(curve, delta, n);
            max_res = std::max(max_res, fp.residual);
            if (fp.residual >= 1e-10) ++residual_fail;
            for (double e = fp.eps * 1.001 + 1e-12; e <= 1.0; e = e * 1.25 + 1e-6) {
                if (!(curve(delta * std::sqrt(e)) / (delta * std::sqrt(n)) < e)) ++largest_fail;
            }
        }
        const auto params = params_for(data.n(), dyadic_grid(1, 10));
        const auto r = bound_theorem5(f, data, margin_profile(f, data), params);
        if (r.variants.at(1).second > r.variants.at(0).second) ++capped_fail;
    }
    Outcome o;
    o.pass = ceiling_fail == 0 && residual_fail == 0 && largest_fail == 0 && capped_fail == 0;
    o.detail = "ceiling failures " + std::to_string(ceiling_fail) + ", max fixed-point residual " + fmt(max_res) +
               ", largest-solution failures " + std::to_string(largest_fail) + ", capped > uncapped " +
               std::to_string(capped_fail);
    return o;
}

Outcome criterion9() {
    Rng rng(909);
    int oracle_fail = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const auto data = random_dataset(2 + rng.below(40), 1 + rng.below(4), 9000 + rep);
        std::vector<double> w(data.n());
        double s = 0.0;
        for (auto& v : w) s += (v = rng.uniform() < 0.1 ? 0.0 : rng.uniform());
        if (s == 0.0) w[0] = s = 1.0;
        for (auto& v : w) v /= s;
        if (std::abs(best_stump(data, w).error - brute_best_stump_error(data, w)) > 1e-12) ++oracle_fail;
    }
    double max_dev = 0.0;
    int rounds_checked = 0;
    for (int rep = 0; rep < 20; ++rep) {
        SynthSpec spec;
        spec.n = 80;
        spec.mu = 0.5;
        spec.noise = 0.1;
        const auto data = synth_data(spec, 9100 + rep).data;
        const auto state = adaboost_trace(data, 40);
        for (const auto& r : state.history) {
            if (!(r.alpha > 0.0 && std::isfinite(r.alpha))) continue;
            ++rounds_checked;
            max_dev = std::max(max_dev, std::abs(weighted_error(r.stump, data, r.weights_after) - 0.5));
        }
    }
    SynthSpec sep;
    sep.n = 200;
    sep.noise = 0.0;
    const auto data = synth_data(sep, 9200).data;
    const auto f = adaboost(data, 200);
    const auto prof = margin_profile(f, data);
    Outcome o;
    o.pass = oracle_fail == 0 && max_dev <= 1e-9 && rounds_checked > 0 && prof.cdf(0.0) == 0.0 && prof.min_margin() > 0.0;
    o.detail = "best_stump oracle mismatches " + std::to_string(oracle_fail) + "/100; reweighted error max |e - 1/2| " +
               fmt(max_dev) + " over " + std::to_string(rounds_checked) + " rounds; separable run P_n(yf <= 0) = " +
               fmt(prof.cdf(0.0)) + ", delta_* = " + fmt(prof.min_margin());
    return o;
}

Outcome criterion10() {
    const auto fx = two_group_fixture(10000);
    BoundParams params = params_for(10000, dyadic_grid(1, 10));
    params.V = 2.0;
    params.m_max = 4;
    const double gamma = 0.5, delta = 0.5;
    const auto search = search_clusters(fx.f, fx.data, 2, 1001);
    const auto count = cluster_count(fx.f, fx.data, params, gamma, delta, 1002);
    const auto vars1 = pointwise_variances(fx.f, fx.data);
    const double n = 10000.0;
    const double lr = log_ratio(n, delta);
    const double budget1 = params.V * 1 * gamma / (n * delta * delta) * lr * lr;
    const bool m1_fails = variance_tail(vars1, gamma) > budget1;
    const auto prof = margin_profile(fx.f, fx.data);
    const auto vars2 = cluster_variances(search.decomposition, fx.f, fx.data);
    const auto at = [&](const std::vector<double>& v, int m) {
        return prof.cdf(delta) + variance_tail(v, gamma) + params.V * m * gamma / (n * delta * delta) * lr * lr + params.t / n;
    };
    const double fixed1 = at(vars1, 1), fixed2 = at(vars2, 2);
    const auto report = bound_cluster(fx.f, fx.data, prof, params, 1003);
    double m1 = NAN, m2 = NAN;
    for (const auto& [name, v] : report.variants) {
        if (name == "m=1") m1 = v;
        if (name == "m=2") m2 = v;
    }
    Outcome o;
    o.pass = search.objective == 0.0 && count.found && count.m == 2 && m1_fails && fixed2 < fixed1 && m2 < m1;
    o.detail = "m = 2 objective " + fmt(search.objective) + "; cluster_count " + std::to_string(count.m) +
               " (m = 1 tail 1 vs budget " + fmt(budget1) + "); at (0.5, 0.5) totals m=1 " + fmt(fixed1) + ", m=2 " +
               fmt(fixed2) + "; grid totals m=1 " + fmt(m1) + ", m=2 " + fmt(m2);
    return o;
}

Outcome criterion11() {
    Rng rng(1111);
    int order_fail = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t p = 1 + rng.below(3);
        const auto f = random_ensemble(1 + rng.below(40), p, 11000 + rep);
        const auto data = random_dataset(20 + rng.below(200), p, 11100 + rep);
        BoundParams params = params_for(data.n(), dyadic_grid(1, 1 + static_cast<int>(rng.below(15))));
        params.V = 0.5 + 5.0 * rng.uniform();
        params.t = 5.0 * rng.uniform();
        params.K = 0.1 + 2.0 * rng.uniform();
        const auto prof = margin_profile(f, data);
        if (bound_gamma_dim(f, prof, params).total > classic_bound(ClassicKind::zero_error_2_4, prof, params).total) {
            ++order_fail;
        }
    }
    int branch_fail = 0;
    for (int rep = 0; rep < 20; ++rep) {
        const auto f = random_ensemble(2 + rng.below(20), 2, 11200 + rep);
        const auto data = random_dataset(30 + rng.below(50), 2, 11300 + rep);
        BoundParams params = params_for(data.n(), dyadic_grid(1, 8));
        params.m_max = 2;
        const auto prof = margin_profile(f, data);
        const auto t3 = bound_variance(f, data, prof, params);
        const auto t4 = bound_cluster(f, data, prof, params, 11400 + rep);
        double grid = NAN, m1 = NAN;
        for (const auto& [name, v] : t3.variants) {
            if (name == "grid") grid = v;
        }
        for (const auto& [name, v] : t4.variants) {
            if (name == "m=1") m1 = v;
        }
        if (!(grid == m1)) ++branch_fail;
    }
    Outcome o;
    o.pass = order_fail == 0 && branch_fail == 0;
    o.detail = "gamma-dim > zero-error in " + std::to_string(order_fail) + "/50 cases; m = 1 branch mismatches " +
               std::to_string(branch_fail) + "/20 (bitwise)";
    return o;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(ENSBOUND_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome criterion12() {
    const auto dir = std::filesystem::temp_directory_path() / "ensbound_acceptance";
    std::filesystem::create_directories(dir);
    const auto cfg = dir / "config.json";
    std::ofstream(cfg) << R"({"data": {"kind": "two_gaussians", "n": 150, "p": 2, "noise": 0.1, "mu": 1.0},
        "trainer": {"algorithm": "adaboost", "rounds": 40}, "split": {"train": 0.7, "test": 0.3},
        "params": {"delta_grid": {"dyadic": [1, 8]}, "m_max": 3}, "replicates": 4, "seed": 1212})";
    const int a = run_cli("experiment --config " + cfg.string() + " --out " + (dir / "a.json").string());
    const int b = run_cli("experiment --config " + cfg.string() + " --out " + (dir / "b.json").string());
    const std::string ra = slurp(dir / "a.json");
    const std::string rb = slurp(dir / "b.json");
    const auto config = load_config(cfg.string());
    const bool in_process = dump_document(run_experiment(config)) == dump_document(run_experiment(config));
    Outcome o;
    o.pass = a == 0 && b == 0 && !ra.empty() && ra == rb && in_process;
    std::string coverage;
    if (!ra.empty()) {
        const auto doc = nlohmann::json::parse(ra);
        for (const auto& [name, v] : doc["aggregate"]["bounds"].items()) {
            coverage += " " + name + "=" + fmt(v["coverage"].get<double>());
        }
    }
    o.detail = std::string("CLI reports ") + (ra == rb && !ra.empty() ? "byte-identical" : "DIFFER") + " (" +
               std::to_string(ra.size()) + " bytes), in-process " + (in_process ? "identical" : "DIFFER") +
               "; observed coverage:" + coverage;
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"effective-dimension oracle", criterion1},
        {"example weight-profile scaling", criterion2},
        {"solver exactness", criterion3},
        {"Maurey unbiasedness and Hoeffding ceiling", criterion4},
        {"cluster-variance identity and sigma-hat unbiasedness", criterion5},
        {"law of total variance and domination", criterion6},
        {"covering sandwich and binary-metric identity", criterion7},
        {"entropy and fixed-point consistency", criterion8},
        {"trainer correctness", criterion9},
        {"cluster detection", criterion10},
        {"bound-order properties", criterion11},
        {"end-to-end determinism", criterion12},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::printf("%s %zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
