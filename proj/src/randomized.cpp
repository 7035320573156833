#include "ensbound/randomized.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "ensbound/error.hpp"
#include "ensbound/random.hpp"
#include "ensbound/sparsity.hpp"

namespace ensbound {

namespace {

// Sample rows grouped by (label, stump outputs); every check depends on a row
// only through this key.
struct RowGroups {
    std::vector<std::size_t> group_of;        // row -> group
    std::vector<std::size_t> representative;  // group -> first row
    std::vector<std::size_t> size;            // rows per group
    std::vector<std::vector<int>> values;     // values[k][u] = h_k at group u
    std::vector<int> label;                   // label per group
    std::vector<double> f;                    // f at group u

    std::size_t count() const { return representative.size(); }
};

RowGroups group_rows(const ConvexEnsemble& f, const Dataset& data) {
    f.check_features(data.p());
    const auto prof = stump_profiles(f, data);
    RowGroups g;
    std::map<std::vector<int>, std::size_t> index;
    g.group_of.resize(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) {
        std::vector<int> key;
        key.reserve(f.size() + 1);
        key.push_back(data.label(i));
        for (std::size_t k = 0; k < f.size(); ++k) key.push_back(prof[k][i]);
        auto [it, inserted] = index.try_emplace(std::move(key), g.representative.size());
        if (inserted) {
            g.representative.push_back(i);
            g.size.push_back(0);
            g.label.push_back(data.label(i));
            g.f.push_back(evaluate_ensemble(f, data.row(i)));
        }
        ++g.size[it->second];
        g.group_of[i] = it->second;
    }
    g.values.assign(f.size(), std::vector<int>(g.count()));
    for (std::size_t k = 0; k < f.size(); ++k) {
        for (std::size_t u = 0; u < g.count(); ++u) g.values[k][u] = prof[k][g.representative[u]];
    }
    return g;
}

std::pair<double, double> wilson(double p, double M, double z) {
    const double z2 = z * z;
    const double denom = 1.0 + z2 / M;
    const double centre = (p + z2 / (2.0 * M)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / M + z2 / (4.0 * M * M));
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double binomial_tolerance(double ceiling, double M) {
    const double c = std::clamp(ceiling, 0.0, 1.0);
    return 3.0 * std::sqrt(c * (1.0 - c) / M);
}

// Fill a TailCheck from per-group hit counts over the eligible groups.
TailCheck tail_check(std::string event, const RowGroups& rows, const std::vector<bool>& eligible,
                     const std::vector<std::size_t>& hits, double M, double ceiling) {
    TailCheck t;
    t.event = std::move(event);
    t.ceiling = ceiling;
    t.tolerance = binomial_tolerance(ceiling, M);
    bool first = true;
    for (std::size_t u = 0; u < rows.count(); ++u) {
        if (!eligible[u]) continue;
        t.rows_checked += rows.size[u];
        const double freq = static_cast<double>(hits[u]) / M;
        if (first || freq > t.max_frequency) {
            t.max_frequency = freq;
            t.worst_row = rows.representative[u];
            first = false;
        }
    }
    std::tie(t.wilson_lo, t.wilson_hi) = wilson(t.max_frequency, M, 3.0);
    t.pass = t.max_frequency <= t.ceiling + t.tolerance;
    return t;
}

std::vector<AliasTable> cluster_tables(const ClusterDecomposition& c) {
    std::vector<AliasTable> tables;
    tables.reserve(c.m());
    for (const auto& w : c.sub_measures) tables.emplace_back(w);
    return tables;
}

std::vector<double> analytic_cluster_variance(const ClusterDecomposition& c, const RowGroups& rows) {
    std::vector<double> out(rows.count(), 0.0);
    for (std::size_t u = 0; u < rows.count(); ++u) {
        double s = 0.0;
        for (std::size_t j = 0; j < c.m(); ++j) {
            double mean = 0.0;
            for (std::size_t q = 0; q < c.members[j].size(); ++q) {
                mean += c.sub_measures[j][q] * rows.values[c.members[j][q]][u];
            }
            double var = 0.0;
            for (std::size_t q = 0; q < c.members[j].size(); ++q) {
                const double dev = rows.values[c.members[j][q]][u] - mean;
                var += c.sub_measures[j][q] * dev * dev;
            }
            s += c.alphas[j] * c.alphas[j] * var;
        }
        out[u] = s;
    }
    return out;
}

// Paired-difference summands sum_k (sum_j alpha_j (xi^{j,1} - xi^{j,2}))^2 / 2 at
// each selected group; returns the per-group average and tracks the largest summand.
void sigma_hat_groups(const ClusterDecomposition& c, const std::vector<AliasTable>& tables, const RowGroups& rows,
                      const std::vector<std::size_t>& groups, std::size_t N, Rng& rng, std::vector<double>& out,
                      double& max_summand) {
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<std::size_t> a(c.m());
    std::vector<std::size_t> b(c.m());
    for (std::size_t k = 0; k < N; ++k) {
        for (std::size_t j = 0; j < c.m(); ++j) a[j] = c.members[j][tables[j].sample(rng)];
        for (std::size_t j = 0; j < c.m(); ++j) b[j] = c.members[j][tables[j].sample(rng)];
        for (std::size_t idx = 0; idx < groups.size(); ++idx) {
            const std::size_t u = groups[idx];
            double diff = 0.0;
            for (std::size_t j = 0; j < c.m(); ++j) diff += c.alphas[j] * (rows.values[a[j]][u] - rows.values[b[j]][u]);
            const double summand = 0.5 * diff * diff;
            max_summand = std::max(max_summand, summand);
            out[idx] += summand;
        }
    }
    for (double& v : out) v /= static_cast<double>(N);
}

}  // namespace

double MaureySample::operator()(std::span<const double> x) const {
    double g = 0.0;
    for (const auto& t : head) g += t.weight * t.stump(x);
    if (!drawn.empty()) {
        double s = 0.0;
        for (const auto& h : drawn) s += h(x);
        g += gamma_d * s / static_cast<double>(drawn.size());
    }
    return g;
}

MaureySample maurey_sample(const ConvexEnsemble& f, long long d, std::size_t N, std::uint64_t seed) {
    require(f.mode() == HullMode::conv, "maurey_sample: needs a conv-mode ensemble");
    require(d >= 0 && static_cast<std::size_t>(d) <= f.size(), "maurey_sample: need 0 <= d <= T");
    require(N >= 1, "maurey_sample: need N >= 1");
    const auto& terms = f.terms();
    for (std::size_t k = 1; k < terms.size(); ++k) {
        require(terms[k].weight <= terms[k - 1].weight, "maurey_sample: weights must be sorted decreasingly");
    }
    MaureySample s;
    s.d = d;
    s.N = N;
    s.head.assign(terms.begin(), terms.begin() + d);
    std::vector<double> tail;
    for (std::size_t k = static_cast<std::size_t>(d); k < terms.size(); ++k) tail.push_back(terms[k].weight);
    double gamma = 0.0;
    for (double w : tail) gamma += w;
    s.gamma_d = gamma;
    if (gamma <= 0.0) {
        s.head_only = true;
        return s;
    }
    AliasTable table(tail);
    Rng rng(seed);
    s.draws.reserve(N);
    s.drawn.reserve(N);
    for (std::size_t i = 0; i < N; ++i) {
        const std::size_t k = static_cast<std::size_t>(d) + table.sample(rng);
        s.draws.push_back(k);
        s.drawn.push_back(terms[k].stump);
    }
    return s;
}

std::size_t maurey_size(double gamma_d, double delta, double n) {
    require(delta > 0.0, "maurey_size: delta must be positive");
    return static_cast<std::size_t>(std::max(1.0, std::ceil(2.0 * gamma_d * gamma_d / (delta * delta) * std::log(n))));
}

std::size_t bernstein_size(double gamma, double delta, double n) {
    require(delta > 0.0, "bernstein_size: delta must be positive");
    return static_cast<std::size_t>(std::max(1.0, std::ceil(4.0 * gamma / (delta * delta) * std::log(n))));
}

MaureyReport check_maurey_tail(const ConvexEnsemble& f, const Dataset& data, double delta, long long d,
                               const BoundParams& params, std::size_t draws, std::uint64_t seed) {
    require(delta > 0.0, "check_maurey_tail: delta must be positive");
    require(draws >= 1, "check_maurey_tail: need at least one draw");
    params.validate();
    const double n = static_cast<double>(params.n);
    const double M = static_cast<double>(draws);
    const auto tails = tail_weights(f);
    require(d >= 0 && static_cast<std::size_t>(d) < tails.size(), "check_maurey_tail: need 0 <= d <= T");
    const RowGroups rows = group_rows(f, data);
    const std::size_t U = rows.count();

    MaureyReport r;
    r.d = d;
    r.gamma_d = tails[static_cast<std::size_t>(d)];
    r.delta = delta;
    r.draws = draws;
    r.target = 1.0 / n;
    r.head_only = r.gamma_d <= 0.0;
    r.N = r.head_only ? 0 : maurey_size(r.gamma_d, delta, n);
    const double ceiling = r.head_only ? 0.0 : std::exp(-static_cast<double>(r.N) * delta * delta / (2.0 * r.gamma_d * r.gamma_d));

    std::vector<bool> all(U, true);
    std::vector<std::size_t> two(U, 0);
    std::vector<std::size_t> one(U, 0);
    if (!r.head_only) {
        std::vector<double> head(U, 0.0);
        for (std::size_t k = 0; k < static_cast<std::size_t>(d); ++k) {
            for (std::size_t u = 0; u < U; ++u) head[u] += f.terms()[k].weight * rows.values[k][u];
        }
        std::vector<double> sum(U, 0.0);
        std::vector<double> sum_sq(U, 0.0);
        std::vector<std::size_t> counts(f.size(), 0);
        const double scale = r.gamma_d / static_cast<double>(r.N);
        for (std::size_t rep = 0; rep < draws; ++rep) {
            const auto s = maurey_sample(f, d, r.N, derive_seed(seed, rep));
            std::fill(counts.begin(), counts.end(), 0);
            for (std::size_t k : s.draws) ++counts[k];
            for (std::size_t u = 0; u < U; ++u) {
                double acc = 0.0;
                for (std::size_t k = static_cast<std::size_t>(d); k < f.size(); ++k) {
                    if (counts[k] != 0) acc += static_cast<double>(counts[k]) * rows.values[k][u];
                }
                const double z = head[u] + scale * acc - rows.f[u];
                sum[u] += z;
                sum_sq[u] += z * z;
                const double dev = rows.label[u] * z;
                if (std::abs(dev) >= delta) ++two[u];
                if (dev >= delta) ++one[u];
            }
        }
        for (std::size_t u = 0; u < U; ++u) {
            const double mean = sum[u] / M;
            const double var = draws > 1 ? std::max(0.0, (sum_sq[u] - M * mean * mean) / (M - 1.0)) : 0.0;
            const double se = std::sqrt(var / M);
            if (se > 0.0) {
                r.max_mean_dev_stderr = std::max(r.max_mean_dev_stderr, std::abs(mean) / se);
            } else if (std::abs(mean) > 1e-12) {
                r.unbiased_pass = false;
            }
        }
        if (r.max_mean_dev_stderr > 4.0) r.unbiased_pass = false;
    }
    r.two_sided = tail_check("|yg - yf| >= delta", rows, all, two, M, ceiling);
    r.one_sided = tail_check("yg - yf >= delta", rows, all, one, M, ceiling);
    r.pass = r.unbiased_pass && r.two_sided.pass && r.one_sided.pass;
    return r;
}

double ClusterSample::replicate(const ClusterDecomposition& c, const ConvexEnsemble& f, std::size_t k,
                                std::span<const double> x) const {
    require(k < picks.size(), "cluster sample: replicate index out of range");
    double g = 0.0;
    for (std::size_t j = 0; j < c.m(); ++j) g += c.alphas[j] * f.terms()[picks[k][j]].stump(x);
    return g;
}

double ClusterSample::operator()(const ClusterDecomposition& c, const ConvexEnsemble& f,
                                 std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < picks.size(); ++k) s += replicate(c, f, k, x);
    return s / static_cast<double>(picks.size());
}

ClusterSample cluster_sample(const ClusterDecomposition& c, std::size_t N, std::uint64_t seed) {
    require(N >= 1, "cluster_sample: need N >= 1");
    require(c.m() >= 1, "cluster_sample: empty decomposition");
    const auto tables = cluster_tables(c);
    Rng rng(seed);
    ClusterSample s;
    s.N = N;
    s.picks.assign(N, std::vector<std::size_t>(c.m()));
    for (std::size_t k = 0; k < N; ++k) {
        for (std::size_t j = 0; j < c.m(); ++j) s.picks[k][j] = c.members[j][tables[j].sample(rng)];
    }
    return s;
}

ClusterVarianceReport check_cluster_variance(const ClusterDecomposition& c, const ConvexEnsemble& f,
                                             const Dataset& data, std::size_t draws, std::uint64_t seed) {
    require(draws >= 100, "check_cluster_variance: need at least 100 draws");
    c.check_consistent(f);
    const RowGroups rows = group_rows(f, data);
    const std::size_t U = rows.count();
    const double M = static_cast<double>(draws);
    const auto analytic = analytic_cluster_variance(c, rows);

    // raw moments of z = g_1(x) - f(x), centred at the known mean for stability
    std::vector<std::array<double, 4>> mom(U, {0.0, 0.0, 0.0, 0.0});
    for (std::size_t rep = 0; rep < draws; ++rep) {
        const auto s = cluster_sample(c, 1, derive_seed(seed, rep));
        for (std::size_t u = 0; u < U; ++u) {
            double g = 0.0;
            for (std::size_t j = 0; j < c.m(); ++j) g += c.alphas[j] * rows.values[s.picks[0][j]][u];
            const double z = g - rows.f[u];
            const double z2 = z * z;
            mom[u][0] += z;
            mom[u][1] += z2;
            mom[u][2] += z2 * z;
            mom[u][3] += z2 * z2;
        }
    }

    ClusterVarianceReport r;
    r.draws = draws;
    r.rows = data.n();
    std::vector<double> mc(U);
    std::vector<bool> ok(U);
    for (std::size_t u = 0; u < U; ++u) {
        const double m1 = mom[u][0] / M;
        const double m2 = mom[u][1] / M;
        const double m3 = mom[u][2] / M;
        const double m4 = mom[u][3] / M;
        const double central2 = std::max(0.0, m2 - m1 * m1);
        const double central4 = std::max(0.0, m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1);
        mc[u] = central2 * M / (M - 1.0);
        const double se = std::sqrt(std::max(0.0, central4 - central2 * central2) / M);
        const double diff = std::abs(mc[u] - analytic[u]);
        r.max_abs_diff = std::max(r.max_abs_diff, diff);
        ok[u] = se > 0.0 ? diff <= 3.0 * se : diff <= 1e-12;
        const double mean_se = std::sqrt(central2 / M);
        if (mean_se > 0.0) r.max_mean_dev_stderr = std::max(r.max_mean_dev_stderr, std::abs(m1) / mean_se);
    }
    r.monte_carlo.resize(data.n());
    r.analytic.resize(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) {
        const std::size_t u = rows.group_of[i];
        r.monte_carlo[i] = mc[u];
        r.analytic[i] = analytic[u];
        if (ok[u]) ++r.rows_passing;
    }
    r.fraction_passing = static_cast<double>(r.rows_passing) / static_cast<double>(r.rows);
    r.pass = r.fraction_passing >= 0.95;
    return r;
}

SigmaHat sigma_hat(const ClusterDecomposition& c, const ConvexEnsemble& f, std::span<const double> x,
                   std::size_t N, std::uint64_t seed) {
    require(N >= 1, "sigma_hat: need N >= 1");
    c.check_consistent(f);
    const auto tables = cluster_tables(c);
    Rng rng(seed);
    SigmaHat out;
    for (std::size_t k = 0; k < N; ++k) {
        double diff = 0.0;
        for (std::size_t j = 0; j < c.m(); ++j) {
            const auto& first = f.terms()[c.members[j][tables[j].sample(rng)]].stump;
            const auto& second = f.terms()[c.members[j][tables[j].sample(rng)]].stump;
            diff += c.alphas[j] * (first(x) - second(x));
        }
        const double summand = 0.5 * diff * diff;
        out.max_summand = std::max(out.max_summand, summand);
        out.value += summand;
    }
    out.value /= static_cast<double>(N);
    return out;
}

SigmaHatReport check_sigma_hat(const ClusterDecomposition& c, const ConvexEnsemble& f, const Dataset& data,
                               std::size_t draws, std::size_t N, std::uint64_t seed) {
    require(draws >= 2, "check_sigma_hat: need at least two draws");
    require(N >= 1, "check_sigma_hat: need N >= 1");
    c.check_consistent(f);
    const RowGroups rows = group_rows(f, data);
    const std::size_t U = rows.count();
    const double M = static_cast<double>(draws);
    const auto analytic = analytic_cluster_variance(c, rows);
    const auto tables = cluster_tables(c);
    std::vector<std::size_t> groups(U);
    for (std::size_t u = 0; u < U; ++u) groups[u] = u;

    SigmaHatReport r;
    r.draws = draws;
    r.N = N;
    r.rows = data.n();
    std::vector<double> sum(U, 0.0);
    std::vector<double> sum_sq(U, 0.0);
    std::vector<double> est(U);
    for (std::size_t rep = 0; rep < draws; ++rep) {
        Rng rng(derive_seed(seed, rep));
        sigma_hat_groups(c, tables, rows, groups, N, rng, est, r.max_summand);
        for (std::size_t u = 0; u < U; ++u) {
            sum[u] += est[u];
            sum_sq[u] += est[u] * est[u];
        }
    }
    std::vector<bool> ok(U);
    std::vector<double> mean(U);
    for (std::size_t u = 0; u < U; ++u) {
        mean[u] = sum[u] / M;
        const double var = std::max(0.0, (sum_sq[u] - M * mean[u] * mean[u]) / (M - 1.0));
        const double se = std::sqrt(var / M);
        const double diff = std::abs(mean[u] - analytic[u]);
        if (analytic[u] > 0.0) {
            const double rel = diff / analytic[u];
            r.max_relative_error = std::max(r.max_relative_error, rel);
            ok[u] = rel <= 0.02 || diff <= 3.0 * se;
        } else {
            ok[u] = mean[u] == 0.0;
        }
    }
    r.mean_estimate.resize(data.n());
    r.analytic.resize(data.n());
    r.pass = r.max_summand <= 2.0 + 1e-12;
    for (std::size_t i = 0; i < data.n(); ++i) {
        const std::size_t u = rows.group_of[i];
        r.mean_estimate[i] = mean[u];
        r.analytic[i] = analytic[u];
        r.pass = r.pass && ok[u];
    }
    return r;
}

BernsteinReport check_bernstein_tails(const ClusterDecomposition& c, const ConvexEnsemble& f, const Dataset& data,
                                      double gamma, double delta, const BoundParams& params, std::size_t draws,
                                      std::uint64_t seed, double K_user) {
    require(delta > 0.0 && delta <= gamma, "check_bernstein_tails: need 0 < delta <= gamma");
    require(draws >= 1, "check_bernstein_tails: need at least one draw");
    require(K_user > 0.0, "check_bernstein_tails: K must be positive");
    params.validate();
    c.check_consistent(f);
    const double n = static_cast<double>(params.n);
    const double M = static_cast<double>(draws);
    const RowGroups rows = group_rows(f, data);
    const std::size_t U = rows.count();
    const auto analytic = analytic_cluster_variance(c, rows);
    const auto tables = cluster_tables(c);

    BernsteinReport r;
    r.gamma = gamma;
    r.delta = delta;
    r.draws = draws;
    r.K_user = K_user;
    r.N2 = bernstein_size(gamma, delta, n);
    r.N4 = static_cast<std::size_t>(std::max(1.0, std::ceil(K_user * std::log(n) / gamma)));

    std::vector<bool> low(U);
    std::vector<bool> high(U);
    std::vector<std::size_t> step4_groups;
    for (std::size_t u = 0; u < U; ++u) {
        low[u] = analytic[u] <= gamma;
        high[u] = analytic[u] >= 4.0 * gamma;
        if (low[u] || high[u]) step4_groups.push_back(u);
    }

    std::vector<std::size_t> hits2(U, 0);
    std::vector<std::size_t> hits_low(U, 0);
    std::vector<std::size_t> hits_high(U, 0);
    std::vector<double> weight(f.size());
    std::vector<double> est(step4_groups.size());
    double max_summand = 0.0;
    const double inv_n2 = 1.0 / static_cast<double>(r.N2);
    for (std::size_t rep = 0; rep < draws; ++rep) {
        // averaged sample g = N^-1 sum_k g_k
        const auto s = cluster_sample(c, r.N2, derive_seed(seed, 2 * rep));
        std::fill(weight.begin(), weight.end(), 0.0);
        for (const auto& pick : s.picks) {
            for (std::size_t j = 0; j < c.m(); ++j) weight[pick[j]] += c.alphas[j] * inv_n2;
        }
        for (std::size_t u = 0; u < U; ++u) {
            if (!low[u]) continue;
            double g = 0.0;
            for (std::size_t k = 0; k < f.size(); ++k) {
                if (weight[k] != 0.0) g += weight[k] * rows.values[k][u];
            }
            if (rows.label[u] * (g - rows.f[u]) >= delta) ++hits2[u];
        }
        // paired-difference variance estimate
        if (!step4_groups.empty()) {
            Rng rng(derive_seed(seed, 2 * rep + 1));
            sigma_hat_groups(c, tables, rows, step4_groups, r.N4, rng, est, max_summand);
            for (std::size_t idx = 0; idx < step4_groups.size(); ++idx) {
                const std::size_t u = step4_groups[idx];
                if (low[u] && est[idx] >= 2.0 * gamma) ++hits_low[u];
                if (high[u] && est[idx] <= 3.0 * gamma) ++hits_high[u];
            }
        }
    }
    const double ceiling2 = std::exp(-static_cast<double>(r.N2) * delta * delta / (4.0 * gamma));
    r.step2 = tail_check("yg - yf >= delta, sigma^2 <= gamma", rows, low, hits2, M, ceiling2);
    const auto ceiling4 = [&](double K) { return std::exp(-static_cast<double>(r.N4) * gamma / K); };
    r.step4_low = tail_check("sigma-hat^2 >= 2 gamma, sigma^2 <= gamma", rows, low, hits_low, M, ceiling4(K_user));
    r.step4_high = tail_check("sigma-hat^2 <= 3 gamma, sigma^2 >= 4 gamma", rows, high, hits_high, M, ceiling4(K_user));
    for (int e = 0; e <= 12; ++e) {
        const double K = std::ldexp(1.0, e);
        const double ceil = ceiling4(K);
        const double tol = binomial_tolerance(ceil, M);
        if (r.step4_low.max_frequency <= ceil + tol && r.step4_high.max_frequency <= ceil + tol) {
            r.smallest_K = K;
            break;
        }
    }
    r.pass = r.step2.pass && r.step4_low.pass && r.step4_high.pass;
    return r;
}

nlohmann::json to_json(const TailCheck& t) {
    return {{"event", t.event},          {"rows_checked", t.rows_checked}, {"max_frequency", t.max_frequency},
            {"worst_row", t.worst_row},  {"ceiling", t.ceiling},           {"tolerance", t.tolerance},
            {"wilson_lo", t.wilson_lo},  {"wilson_hi", t.wilson_hi},       {"pass", t.pass}};
}

nlohmann::json to_json(const MaureyReport& r) {
    return {{"check", "maurey"},
            {"d", r.d},
            {"N", r.N},
            {"gamma_d", r.gamma_d},
            {"delta", r.delta},
            {"draws", r.draws},
            {"head_only", r.head_only},
            {"target_1_over_n", r.target},
            {"max_mean_dev_stderr", r.max_mean_dev_stderr},
            {"unbiased_pass", r.unbiased_pass},
            {"two_sided", to_json(r.two_sided)},
            {"one_sided", to_json(r.one_sided)},
            {"pass", r.pass}};
}

nlohmann::json to_json(const ClusterVarianceReport& r) {
    return {{"check", "cluster-variance"},
            {"draws", r.draws},
            {"rows", r.rows},
            {"rows_passing", r.rows_passing},
            {"fraction_passing", r.fraction_passing},
            {"max_abs_diff", r.max_abs_diff},
            {"max_mean_dev_stderr", r.max_mean_dev_stderr},
            {"monte_carlo", r.monte_carlo},
            {"analytic", r.analytic},
            {"pass", r.pass}};
}

nlohmann::json to_json(const SigmaHatReport& r) {
    return {{"check", "sigma-hat"},
            {"draws", r.draws},
            {"N", r.N},
            {"rows", r.rows},
            {"max_relative_error", r.max_relative_error},
            {"max_summand", r.max_summand},
            {"mean_estimate", r.mean_estimate},
            {"analytic", r.analytic},
            {"pass", r.pass}};
}

nlohmann::json to_json(const BernsteinReport& r) {
    nlohmann::json j = {{"check", "bernstein"},
                        {"gamma", r.gamma},
                        {"delta", r.delta},
                        {"draws", r.draws},
                        {"N2", r.N2},
                        {"step2", to_json(r.step2)},
                        {"K_user", r.K_user},
                        {"N4", r.N4},
                        {"step4_low", to_json(r.step4_low)},
                        {"step4_high", to_json(r.step4_high)},
                        {"pass", r.pass}};
    j["smallest_K"] = r.smallest_K ? nlohmann::json(*r.smallest_K) : nlohmann::json(nullptr);
    return j;
}

}  // namespace ensbound
