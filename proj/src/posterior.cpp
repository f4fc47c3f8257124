#include "gpl/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "gpl/parallel.hpp"

namespace gpl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

std::string fmt(const char* spec, double x) {
    if (std::isnan(x)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

bool constant(const std::vector<std::span<const double>>& chains) {
    for (const auto& c : chains)
        for (double x : c)
            if (x != chains[0][0]) return false;
    return true;
}

}  // namespace

double quantile(std::vector<double> values, double prob) {
    if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double effective_sample_size(const std::vector<std::span<const double>>& chains) {
    const std::size_t M = chains.size();
    if (M == 0) throw std::invalid_argument("no chains");
    const std::size_t n = chains[0].size();
    for (const auto& c : chains)
        if (c.size() != n) throw std::invalid_argument("chains differ in length");
    if (n < 2 || constant(chains)) return kNaN;

    std::vector<std::vector<double>> centred(M);
    for (std::size_t c = 0; c < M; ++c) {
        const double m = mean_of(chains[c]);
        centred[c].resize(n);
        for (std::size_t t = 0; t < n; ++t) centred[c][t] = chains[c][t] - m;
    }
    auto autocov = [&](std::size_t lag) {
        double total = 0.0;
        for (const auto& x : centred) {
            double s = 0.0;
            for (std::size_t t = 0; t + lag < n; ++t) s += x[t] * x[t + lag];
            total += s / static_cast<double>(n);
        }
        return total / static_cast<double>(M);
    };
    const double g0 = autocov(0);
    if (!(g0 > 0.0)) return kNaN;

    double sum = 0.0;
    for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
        const double pair = (autocov(2 * k) + autocov(2 * k + 1)) / g0;
        if (pair <= 0.0) break;
        sum += pair;
    }
    const double tau = std::max(-1.0 + 2.0 * sum, 1.0 / std::log10(static_cast<double>(M * n)));
    return static_cast<double>(M * n) / tau;
}

double psrf(const std::vector<std::span<const double>>& chains) {
    const std::size_t M = chains.size();
    if (M < 2) return kNaN;
    const std::size_t n = chains[0].size();
    if (n < 2 || constant(chains)) return kNaN;
    std::vector<double> means(M);
    double W = 0.0;
    for (std::size_t c = 0; c < M; ++c) {
        means[c] = mean_of(chains[c]);
        double ss = 0.0;
        for (double x : chains[c]) ss += (x - means[c]) * (x - means[c]);
        W += ss / static_cast<double>(n - 1);
    }
    W /= static_cast<double>(M);
    const double grand = mean_of(means);
    double b_over_n = 0.0;
    for (double m : means) b_over_n += (m - grand) * (m - grand);
    b_over_n /= static_cast<double>(M - 1);
    if (!(W > 0.0)) return kNaN;
    const double V = (static_cast<double>(n) - 1.0) / static_cast<double>(n) * W + b_over_n;
    return std::sqrt(V / W);
}

PosteriorSummary summarize(const PosteriorSamples& samples) {
    const std::size_t N = samples.num_draws();
    if (N < 10) throw std::invalid_argument("at least 10 retained draws are needed for a summary");
    const std::size_t K = samples.num_entities();
    const std::size_t M = samples.chains(), n = samples.iterations();

    PosteriorSummary s;
    s.mean.resize(K);
    s.ci_low.resize(K);
    s.ci_high.resize(K);
    s.ess.resize(K);
    s.psrf.resize(K);
    parallel_for(K, [&](std::size_t k) {
        std::vector<double> all(N);
        for (std::size_t f = 0; f < N; ++f) all[f] = samples.draw(f)[k];
        s.mean[k] = mean_of(all);
        s.ci_low[k] = quantile(all, 0.025);
        s.ci_high[k] = quantile(all, 0.975);
        std::vector<std::span<const double>> chains;
        for (std::size_t c = 0; c < M; ++c) chains.emplace_back(all.data() + c * n, n);
        s.ess[k] = effective_sample_size(chains);
        s.psrf[k] = psrf(chains);
    });
    return s;
}

void write_summary_csv(std::ostream& out, const PosteriorSummary& s, const EntityTable& entities) {
    out << "entity,mean,ci_low,ci_high,ess,psrf\n";
    for (std::size_t k = 0; k < s.mean.size(); ++k)
        out << entities.label(static_cast<EntityId>(k)) << ',' << fmt("%.6f", s.mean[k]) << ','
            << fmt("%.6f", s.ci_low[k]) << ',' << fmt("%.6f", s.ci_high[k]) << ','
            << fmt("%.1f", s.ess[k]) << ',' << fmt("%.2f", s.psrf[k]) << '\n';
}

std::string summary_table(const PosteriorSummary& s, const EntityTable& entities) {
    int width = 6;
    for (const auto& l : entities.labels()) width = std::max(width, static_cast<int>(l.size()));
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*s %9s %9s %9s %9s %6s\n", width, "entity", "mean", "2.5%",
                  "97.5%", "ess", "psrf");
    out += buf;
    for (std::size_t k = 0; k < s.mean.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%-*s %9s %9s %9s %9s %6s\n", width,
                      entities.label(static_cast<EntityId>(k)).c_str(), fmt("%.4f", s.mean[k]).c_str(),
                      fmt("%.4f", s.ci_low[k]).c_str(), fmt("%.4f", s.ci_high[k]).c_str(),
                      fmt("%.0f", s.ess[k]).c_str(), fmt("%.2f", s.psrf[k]).c_str());
        out += buf;
    }
    return out;
}

std::vector<double> first_place_prob(std::span<const double> theta, std::span<const EntityId> field) {
    if (field.empty()) throw std::invalid_argument("empty field");
    std::size_t certain = 0;
    double s = 0.0;
    for (auto id : field) {
        if (id >= theta.size()) throw std::out_of_range("field entity outside theta");
        if (theta[id] >= 1.0) ++certain;
        else s += std::log1p(-theta[id]);
    }
    std::vector<double> p(field.size(), 0.0);
    if (certain >= 2) return p;
    if (certain == 1) {
        for (std::size_t i = 0; i < field.size(); ++i)
            if (theta[field[i]] >= 1.0) p[i] = std::exp(s);
        return p;
    }
    const double denom = -std::expm1(s);
    for (std::size_t i = 0; i < field.size(); ++i) {
        const double t = theta[field[i]];
        p[i] = t * std::exp(s - std::log1p(-t)) / denom;
    }
    return p;
}

std::vector<double> posterior_first_place(const PosteriorSamples& samples,
                                          std::span<const EntityId> field) {
    std::vector<double> acc(field.size(), 0.0);
    for (std::size_t f = 0; f < samples.num_draws(); ++f) {
        auto p = first_place_prob(samples.draw(f), field);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += p[i];
    }
    for (auto& x : acc) x /= static_cast<double>(samples.num_draws());
    return acc;
}

std::vector<EntityId> aggregate_total_order(std::span<const double> mean,
                                            std::span<const EntityId> subset, Direction direction) {
    std::vector<EntityId> out(subset.begin(), subset.end());
    for (auto id : out)
        if (id >= mean.size()) throw std::out_of_range("subset entity outside summary");
    std::sort(out.begin(), out.end());
    std::stable_sort(out.begin(), out.end(), [&](EntityId x, EntityId y) {
        return direction == Direction::standard ? mean[x] > mean[y] : mean[x] < mean[y];
    });
    return out;
}

std::vector<EntityId> exhaustive_modal_order(const PosteriorSamples& samples,
                                             std::span<const EntityId> subset, Direction direction) {
    const std::size_t n = subset.size();
    if (n == 0) throw std::invalid_argument("empty subset");
    if (n > kMaxExhaustiveEntities)
        throw std::invalid_argument("exhaustive search is limited to 8 entities");
    for (auto id : subset)
        if (id >= samples.num_entities()) throw std::out_of_range("subset entity outside samples");

    std::vector<EntityId> base(subset.begin(), subset.end());
    std::sort(base.begin(), base.end());
    if (std::adjacent_find(base.begin(), base.end()) != base.end())
        throw std::invalid_argument("subset contains duplicates");

    const std::size_t N = samples.num_draws();
    // per draw: log theta and log(1 - theta) for each subset position
    std::vector<double> lt(N * n), l1m(N * n);
    for (std::size_t f = 0; f < N; ++f) {
        auto d = samples.draw(f);
        for (std::size_t i = 0; i < n; ++i) {
            lt[f * n + i] = std::log(d[base[i]]);
            l1m[f * n + i] = log1m(d[base[i]]);
        }
    }

    std::vector<std::vector<std::size_t>> perms;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    do perms.push_back(idx);
    while (std::next_permutation(idx.begin(), idx.end()));

    std::vector<double> score(perms.size());
    parallel_for(perms.size(), [&](std::size_t p) {
        // Best-first positions; the reverse model is the standard model on
        // the reversed order.
        std::vector<std::size_t> seq = perms[p];
        if (direction == Direction::reverse) std::reverse(seq.begin(), seq.end());
        double total = 0.0;
        for (std::size_t f = 0; f < N; ++f) {
            const double* a = &lt[f * n];
            const double* b = &l1m[f * n];
            double suffix = 0.0, logp = 0.0;
            for (std::size_t j = n; j-- > 0;) {
                if (j + 1 < n) {
                    // stage j: seq[j] alone succeeds first among seq[j..n)
                    logp += a[seq[j]] + suffix;
                    const double s = suffix + b[seq[j]];
                    logp -= std::isinf(s) ? 0.0 : std::log(-std::expm1(s));
                }
                suffix += b[seq[j]];
            }
            total += std::exp(logp);
        }
        score[p] = total / static_cast<double>(N);
    });

    std::size_t best = 0;
    for (std::size_t p = 1; p < perms.size(); ++p)
        if (score[p] > score[best]) best = p;
    std::vector<EntityId> out;
    for (auto i : perms[best]) out.push_back(base[i]);
    return out;
}

}  // namespace gpl
