#include "ensbound/variance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "ensbound/error.hpp"
#include "ensbound/random.hpp"

namespace ensbound {

namespace {

using ProfileMatrix = std::vector<std::vector<int>>;

// Variance of the +-1 values of `members` under `measure` at row i, plus the mean.
double sub_variance(const ProfileMatrix& prof, std::span<const std::size_t> members, std::span<const double> measure,
                    std::size_t i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < members.size(); ++j) mean += measure[j] * prof[members[j]][i];
    double var = 0.0;
    for (std::size_t j = 0; j < members.size(); ++j) {
        const double dev = prof[members[j]][i] - mean;
        var += measure[j] * dev * dev;
    }
    return var;
}

std::vector<double> variances_from_profiles(const ClusterDecomposition& c, const ProfileMatrix& prof, std::size_t n) {
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < c.m(); ++k) {
            s += c.alphas[k] * c.alphas[k] * sub_variance(prof, c.members[k], c.sub_measures[k], i);
        }
        out[i] = s;
    }
    return out;
}

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

struct ProfileGroups {
    std::vector<std::vector<int>> points;  // distinct profiles
    std::vector<double> weights;           // summed |weights| per distinct profile
    std::vector<std::size_t> group_of;     // term -> group
};

ProfileGroups group_profiles(const ConvexEnsemble& f, const ProfileMatrix& prof) {
    ProfileGroups g;
    std::map<std::vector<int>, std::size_t> index;
    g.group_of.resize(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
        auto [it, inserted] = index.try_emplace(prof[k], g.points.size());
        if (inserted) {
            g.points.push_back(prof[k]);
            g.weights.push_back(0.0);
        }
        g.weights[it->second] += std::abs(f.terms()[k].weight);
        g.group_of[k] = it->second;
    }
    return g;
}

double squared_distance(const std::vector<int>& p, const std::vector<double>& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - c[i];
        s += d * d;
    }
    return s;
}

std::size_t sample_proportional(std::span<const double> w, Rng& rng) {
    double total = 0.0;
    for (double x : w) total += x;
    double u = rng.uniform() * total;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] <= 0.0) continue;
        last_positive = i;
        if (u < w[i]) return i;
        u -= w[i];
    }
    return last_positive;
}

struct KMeansRun {
    std::vector<std::size_t> assignment;  // per group
    std::vector<double> trace;
};

KMeansRun weighted_kmeans(const ProfileGroups& groups, std::size_t m, std::size_t n, Rng& rng) {
    const std::size_t G = groups.points.size();
    auto to_center = [](const std::vector<int>& p) { return std::vector<double>(p.begin(), p.end()); };

    // k-means++ seeding
    std::vector<std::vector<double>> centers;
    centers.push_back(to_center(groups.points[sample_proportional(groups.weights, rng)]));
    std::vector<double> d2(G, std::numeric_limits<double>::infinity());
    while (centers.size() < m) {
        std::vector<double> score(G);
        for (std::size_t g = 0; g < G; ++g) {
            d2[g] = std::min(d2[g], squared_distance(groups.points[g], centers.back()));
            score[g] = groups.weights[g] * d2[g];
        }
        centers.push_back(to_center(groups.points[sample_proportional(score, rng)]));
    }

    KMeansRun run;
    run.assignment.assign(G, m);  // m = unassigned
    const double scale = 1.0 / static_cast<double>(n);
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<std::size_t> next(G);
        std::vector<double> dist(G);
        for (std::size_t g = 0; g < G; ++g) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < m; ++c) {
                const double d = squared_distance(groups.points[g], centers[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            next[g] = best;
            dist[g] = best_d;
        }
        // refill empty clusters with the point contributing most to the cost
        std::vector<std::size_t> count(m, 0);
        for (std::size_t g = 0; g < G; ++g) ++count[next[g]];
        for (std::size_t c = 0; c < m; ++c) {
            if (count[c] > 0) continue;
            std::size_t pick = G;
            double worst = -1.0;
            for (std::size_t g = 0; g < G; ++g) {
                if (count[next[g]] > 1 && groups.weights[g] * dist[g] > worst) {
                    worst = groups.weights[g] * dist[g];
                    pick = g;
                }
            }
            if (pick == G) break;  // cannot happen when m <= G
            --count[next[pick]];
            next[pick] = c;
            count[c] = 1;
            dist[pick] = 0.0;
            centers[c] = to_center(groups.points[pick]);
        }
        double cost = 0.0;
        for (std::size_t g = 0; g < G; ++g) cost += groups.weights[g] * dist[g] * scale;
        run.trace.push_back(cost);

        const bool stable = next == run.assignment;
        run.assignment = std::move(next);
        if (stable) break;

        for (std::size_t c = 0; c < m; ++c) {
            std::vector<double> acc(n, 0.0);
            double mass = 0.0;
            for (std::size_t g = 0; g < G; ++g) {
                if (run.assignment[g] != c) continue;
                mass += groups.weights[g];
                for (std::size_t i = 0; i < n; ++i) acc[i] += groups.weights[g] * groups.points[g][i];
            }
            if (mass > 0.0) {
                for (double& a : acc) a /= mass;
                centers[c] = std::move(acc);
            }
        }
    }
    return run;
}

// Cluster ids relabelled in order of first appearance over the terms.
std::vector<std::size_t> canonical_assignment(const std::vector<std::size_t>& raw) {
    std::map<std::size_t, std::size_t> relabel;
    std::vector<std::size_t> out(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) {
        auto [it, inserted] = relabel.try_emplace(raw[k], relabel.size());
        out[k] = it->second;
    }
    return out;
}

double remark_log2(double n, double delta) {
    const double lr = log_ratio(n, delta);
    return lr * lr;
}

}  // namespace

double pointwise_variance(const ConvexEnsemble& f, std::span<const double> x) {
    const double mean = evaluate_ensemble(f, x);
    double var = 0.0;
    for (const auto& t : f.terms()) {
        const double dev = t.stump(x) - mean;
        var += std::abs(t.weight) * dev * dev;
    }
    return var;
}

std::vector<double> pointwise_variances(const ConvexEnsemble& f, const Dataset& data) {
    f.check_features(data.p());
    std::vector<double> out(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) out[i] = pointwise_variance(f, data.row(i));
    return out;
}

void ClusterDecomposition::check_consistent(const ConvexEnsemble& f) const {
    require(!alphas.empty(), "cluster decomposition: no clusters");
    require(members.size() == alphas.size() && sub_measures.size() == alphas.size(),
            "cluster decomposition: inconsistent cluster arrays");
    std::vector<double> rebuilt(f.size(), 0.0);
    std::vector<int> seen(f.size(), 0);
    double alpha_sum = 0.0;
    for (std::size_t k = 0; k < m(); ++k) {
        require(alphas[k] >= 0.0, "cluster decomposition: negative cluster mass");
        require(members[k].size() == sub_measures[k].size(), "cluster decomposition: member/measure mismatch");
        require(!members[k].empty(), "cluster decomposition: empty cluster");
        alpha_sum += alphas[k];
        double mass = 0.0;
        for (std::size_t j = 0; j < members[k].size(); ++j) {
            const std::size_t term = members[k][j];
            require(term < f.size(), "cluster decomposition: member index out of range");
            ++seen[term];
            rebuilt[term] += alphas[k] * sub_measures[k][j];
            mass += sub_measures[k][j];
        }
        require(std::abs(mass - 1.0) <= 1e-12, "cluster decomposition: sub-measure does not sum to 1");
    }
    require(std::abs(alpha_sum - f.l1_mass()) <= 1e-12, "cluster decomposition: cluster masses do not match f");
    for (std::size_t k = 0; k < f.size(); ++k) {
        require(seen[k] == 1, "cluster decomposition: term not covered exactly once");
        require(std::abs(rebuilt[k] - std::abs(f.terms()[k].weight)) <= 1e-12,
                "cluster decomposition: does not reconstruct the ensemble weights");
    }
}

ClusterDecomposition partition_decomposition(const ConvexEnsemble& f, std::span<const std::size_t> assignment) {
    require(assignment.size() == f.size(), "partition: assignment must cover every term");
    require(!f.empty(), "partition: empty ensemble");
    const std::size_t m = *std::max_element(assignment.begin(), assignment.end()) + 1;
    ClusterDecomposition c;
    c.alphas.assign(m, 0.0);
    c.members.assign(m, {});
    c.sub_measures.assign(m, {});
    for (std::size_t k = 0; k < f.size(); ++k) {
        c.members[assignment[k]].push_back(k);
        c.alphas[assignment[k]] += std::abs(f.terms()[k].weight);
    }
    for (std::size_t j = 0; j < m; ++j) {
        require(!c.members[j].empty(), "partition: cluster " + std::to_string(j) + " is empty");
        require(c.alphas[j] > 0.0, "partition: cluster " + std::to_string(j) + " has zero mass");
        for (std::size_t k : c.members[j]) c.sub_measures[j].push_back(std::abs(f.terms()[k].weight) / c.alphas[j]);
    }
    return c;
}

double cluster_variance(const ClusterDecomposition& c, const ConvexEnsemble& f, std::span<const double> x) {
    c.check_consistent(f);
    double s = 0.0;
    for (std::size_t k = 0; k < c.m(); ++k) {
        double mean = 0.0;
        for (std::size_t j = 0; j < c.members[k].size(); ++j) {
            mean += c.sub_measures[k][j] * f.terms()[c.members[k][j]].stump(x);
        }
        double var = 0.0;
        for (std::size_t j = 0; j < c.members[k].size(); ++j) {
            const double dev = f.terms()[c.members[k][j]].stump(x) - mean;
            var += c.sub_measures[k][j] * dev * dev;
        }
        s += c.alphas[k] * c.alphas[k] * var;
    }
    return s;
}

std::vector<double> cluster_variances(const ClusterDecomposition& c, const ConvexEnsemble& f, const Dataset& data) {
    c.check_consistent(f);
    return variances_from_profiles(c, stump_profiles(f, data), data.n());
}

double variance_tail(std::span<const double> values, double gamma) {
    require(!values.empty(), "variance_tail: empty sample");
    std::size_t count = 0;
    for (double v : values) {
        require(v >= 0.0, "variance_tail: negative variance");
        if (v >= gamma) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(values.size());
}

ClusterSearch search_clusters(const ConvexEnsemble& f, const Dataset& data, int m, std::uint64_t seed) {
    require(!f.empty(), "search_clusters: empty ensemble");
    require(m >= 1 && static_cast<std::size_t>(m) <= f.size(), "search_clusters: need 1 <= m <= T");
    const ProfileMatrix prof = stump_profiles(f, data);
    const ProfileGroups groups = group_profiles(f, prof);
    const std::size_t G = groups.points.size();

    ClusterSearch result;
    result.requested_m = m;
    if (static_cast<std::size_t>(m) >= G) {
        // one cluster per distinct profile: every cluster is internally constant
        result.reduced = static_cast<std::size_t>(m) > G;
        result.decomposition = partition_decomposition(f, canonical_assignment(groups.group_of));
        const auto vars = variances_from_profiles(result.decomposition, prof, data.n());
        result.objective = mean_of(vars);
        result.kmeans_trace = {0.0};
        return result;
    }

    bool have = false;
    for (int r = 0; r < kClusterRestarts; ++r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        KMeansRun run = weighted_kmeans(groups, static_cast<std::size_t>(m), data.n(), rng);
        std::vector<std::size_t> per_term(f.size());
        for (std::size_t k = 0; k < f.size(); ++k) per_term[k] = run.assignment[groups.group_of[k]];
        ClusterDecomposition c = partition_decomposition(f, canonical_assignment(per_term));
        const double objective = mean_of(variances_from_profiles(c, prof, data.n()));
        if (!have || objective < result.objective) {
            have = true;
            result.decomposition = std::move(c);
            result.objective = objective;
            result.kmeans_trace = std::move(run.trace);
        }
    }
    return result;
}

namespace {

struct CountScan {
    ClusterCount count;
    std::vector<std::vector<double>> variances;  // per m (index m-1), filled lazily up to the scan end
};

double cluster_budget(const BoundParams& params, int m, double gamma, double delta) {
    const double n = static_cast<double>(params.n);
    return params.V * m * gamma / (n * delta * delta) * remark_log2(n, delta);
}

std::vector<double> variances_for_m(const ConvexEnsemble& f, const Dataset& data, int m, std::uint64_t seed) {
    if (m == 1) return pointwise_variances(f, data);  // C^1(lambda) = {(1, lambda)}
    const int effective = std::min<int>(m, static_cast<int>(f.size()));
    const auto search = search_clusters(f, data, effective, derive_seed(seed, static_cast<std::uint64_t>(m)));
    return cluster_variances(search.decomposition, f, data);
}

}  // namespace

ClusterCount cluster_count(const ConvexEnsemble& f, const Dataset& data, const BoundParams& params, double gamma,
                           double delta, std::uint64_t seed) {
    require(delta > 0.0 && delta <= gamma && gamma <= 1.0, "cluster_count: need 0 < delta <= gamma <= 1");
    params.validate();
    ClusterCount out;
    for (int m = 1; m <= params.m_max; ++m) {
        const auto vars = variances_for_m(f, data, m, seed);
        const double tail = variance_tail(vars, gamma);
        const double budget = cluster_budget(params, m, gamma, delta);
        if (tail <= budget) {
            out = {m, true, tail, budget};
            return out;
        }
    }
    out.m = params.m_max + 1;
    out.found = false;
    out.budget = cluster_budget(params, out.m, gamma, delta);
    return out;
}

double variance_remark_gamma(double moment, double V, double n, double delta, double p) {
    require(moment > 0.0, "variance remark: needs a positive variance moment");
    const double g = std::pow(moment * n * delta * delta / (V * remark_log2(n, delta)), 1.0 / (p + 1.0));
    return std::min(1.0, g);
}

double variance_remark_term(double moment, double V, double n, double delta, double p) {
    const double lr = log_ratio(n, delta);
    const double q = p / (p + 1.0);
    const double relaxed = 2.0 * std::pow(V, q) * std::pow(moment, 1.0 / (p + 1.0)) / std::pow(n, q) /
                           std::pow(delta, 2.0 * q) * std::pow(lr, 2.0 * q);
    return std::min(relaxed, V / (n * delta * delta) * lr * lr);
}

double variance_pinf_term(double max_variance, double V, double n, double delta) {
    return V * max_variance / (n * delta * delta) * remark_log2(n, delta);
}

BoundReport variance_grid_bound(std::span<const double> variances, const MarginProfile& profile,
                                const BoundParams& params, int m) {
    params.validate();
    const double n = static_cast<double>(params.n);
    const double K = params.K;
    BoundReport best;
    best.bound_name = "variance_grid";
    best.total = std::numeric_limits<double>::infinity();
    best.chosen_m = m;

    for (double delta : params.delta_grid) {
        std::vector<double> gammas{delta};
        for (int j = 0; j <= 60; ++j) {
            const double g = std::ldexp(1.0, -j);
            if (g < delta) break;
            gammas.push_back(g);
        }
        const double margin_term = K * profile.cdf(delta);
        const double confidence = K * params.t / n;
        for (double gamma : gammas) {
            const double complexity =
                K * (variance_tail(variances, gamma) + params.V * m * gamma / (n * delta * delta) * remark_log2(n, delta));
            const double total = margin_term + complexity + confidence;
            const bool improves = total < best.total ||
                                  (total == best.total && (delta < best.chosen_delta ||
                                                           (delta == best.chosen_delta && gamma < *best.chosen_gamma)));
            if (improves) {
                best.chosen_delta = delta;
                best.chosen_gamma = gamma;
                best.margin_term = margin_term;
                best.complexity_term = complexity;
                best.confidence_term = confidence;
                best.total = total;
            }
        }
    }
    return best;
}

BoundReport bound_variance(const ConvexEnsemble& f, const Dataset& data, const MarginProfile& profile,
                           const BoundParams& params) {
    params.validate();
    const double n = static_cast<double>(params.n);
    const double K = params.K;
    const auto vars = pointwise_variances(f, data);

    BoundReport best = variance_grid_bound(vars, profile, params, 1);
    best.bound_name = "variance_theorem3";
    best.variants.emplace_back("grid", best.total);
    best.notes.push_back("branch=grid");

    auto consider = [&](const std::string& name, double delta, double gamma, double complexity) {
        const double margin_term = K * profile.cdf(delta);
        const double confidence = K * params.t / n;
        const double total = margin_term + K * complexity + confidence;
        if (total < best.total) {
            best.chosen_delta = delta;
            best.chosen_gamma = gamma;
            best.margin_term = margin_term;
            best.complexity_term = K * complexity;
            best.confidence_term = confidence;
            best.total = total;
            best.notes.back() = "branch=" + name;
        }
        return total;
    };

    auto moment = [&](double p) {
        double s = 0.0;
        for (double v : vars) s += std::pow(v, p);
        return s / static_cast<double>(vars.size());
    };

    for (double p : {1.0, params.p_exponent}) {
        const std::string name = p == 1.0 ? "remark_p1" : "remark_p" + std::to_string(p).substr(0, 4);
        if (p != 1.0 && params.p_exponent == 1.0) break;
        const double mp = moment(p);
        if (mp <= 0.0) {
            best.notes.push_back(name + " skipped: zero variance moment");
            continue;
        }
        double branch = std::numeric_limits<double>::infinity();
        for (double delta : params.delta_grid) {
            const double gamma = variance_remark_gamma(mp, params.V, n, delta, p);
            if (delta > gamma) continue;
            branch = std::min(branch, consider(name, delta, gamma, variance_remark_term(mp, params.V, n, delta, p)));
        }
        best.variants.emplace_back(name, branch);
    }

    const double max_var = vars.empty() ? 0.0 : *std::max_element(vars.begin(), vars.end());
    if (max_var > 0.0) {
        double branch = std::numeric_limits<double>::infinity();
        for (double delta : params.delta_grid) {
            if (delta > max_var) continue;
            branch = std::min(branch, consider("remark_pinf", delta, max_var,
                                               variance_pinf_term(max_var, params.V, n, delta)));
        }
        best.variants.emplace_back("remark_pinf", branch);
    } else {
        best.notes.push_back("remark_pinf skipped: zero maximal variance");
    }
    return best;
}

BoundReport bound_cluster(const ConvexEnsemble& f, const Dataset& data, const MarginProfile& profile,
                          const BoundParams& params, std::uint64_t seed) {
    params.validate();
    const double n = static_cast<double>(params.n);
    BoundReport best;
    best.total = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> per_m;

    for (int m = 1; m <= params.m_max; ++m) {
        per_m.push_back(variances_for_m(f, data, m, seed));
        BoundReport r = variance_grid_bound(per_m.back(), profile, params, m);
        best.variants.emplace_back("m=" + std::to_string(m), r.total);
        if (r.total < best.total) {
            auto variants = std::move(best.variants);
            best = std::move(r);
            best.variants = std::move(variants);
        }
    }
    best.bound_name = "cluster_theorem4";

    // headline shape at gamma = delta with the counted number of clusters
    const double delta = best.chosen_delta;
    int mhat = params.m_max + 1;
    for (int m = 1; m <= params.m_max; ++m) {
        if (variance_tail(per_m[static_cast<std::size_t>(m - 1)], delta) <= cluster_budget(params, m, delta, delta)) {
            mhat = m;
            break;
        }
    }
    best.variants.emplace_back("mhat_upper", mhat);
    best.variants.emplace_back("headline_mhat_term", mhat / (n * delta) * remark_log2(n, delta));
    best.notes.push_back("cluster counts come from heuristic hard-partition search: upper estimates (m-hat+)");
    return best;
}

nlohmann::json decomposition_to_json(const ClusterDecomposition& c) {
    nlohmann::json clusters = nlohmann::json::array();
    for (std::size_t k = 0; k < c.m(); ++k) {
        clusters.push_back({{"alpha", c.alphas[k]}, {"members", c.members[k]}, {"sub_measure", c.sub_measures[k]}});
    }
    return {{"m", c.m()}, {"clusters", std::move(clusters)}};
}

}  // namespace ensbound
