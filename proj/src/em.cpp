#include "gpl/em.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace gpl {

bool EmResult::any_degenerate() const {
    return std::find(degenerate.begin(), degenerate.end(), true) != degenerate.end();
}

double log_prior(std::span<const double> theta, const PriorSpec& prior) {
    double total = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        const double a = prior.a[k], b = prior.b[k];
        total += std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
        if (a != 1.0) total += (a - 1.0) * std::log(theta[k]);
        if (b != 1.0) total += (b - 1.0) * log1m(theta[k]);
    }
    return total;
}

double log_posterior(const Dataset& d, const SuffStats& st, std::span<const double> theta,
                     const PriorSpec& prior) {
    return log_likelihood(d, st, theta) + log_prior(theta, prior);
}

namespace {

void check_init(const ThetaVector& init, std::size_t K) {
    if (init.size() != K) throw std::invalid_argument("EM start value has the wrong length");
    for (double t : init)
        if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("EM start value must lie in (0, 1)");
}

double stage_weight(double log_surv) { return std::isinf(log_surv) ? 1.0 : -1.0 / std::expm1(log_surv); }

// Shared driver: `expected` fills the per-entity sum of expected latent
// stage lengths at the current theta; `objective` evaluates the log posterior.
template <class Expected, class Objective>
EmResult run_em(std::size_t K, std::span<const long> wins, const PriorSpec& prior, const EmConfig& cfg,
                ThetaVector theta, Expected expected, Objective objective) {
    prior.validate(K);
    check_init(theta, K);
    if (!(cfg.tolerance > 0.0)) throw std::invalid_argument("EM tolerance must be positive");

    EmResult res;
    res.degenerate.assign(K, false);
    res.log_posterior_trace.push_back(objective(theta));
    std::vector<double> sums(K);
    ThetaVector next(K);
    for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
        std::fill(sums.begin(), sums.end(), 0.0);
        expected(theta, sums);
        double msd = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const double num = prior.a[k] + static_cast<double>(wins[k]) - 1.0;
            const double den = prior.a[k] + prior.b[k] + sums[k] - 2.0;
            res.degenerate[k] = false;
            if (num <= 0.0) {
                next[k] = kEmThetaFloor;
                res.degenerate[k] = true;
            } else if (den <= num) {
                next[k] = 1.0;
                res.degenerate[k] = true;
            } else {
                next[k] = std::max(num / den, kEmThetaFloor);
            }
            const double diff = next[k] - theta[k];
            msd += diff * diff;
        }
        msd /= static_cast<double>(std::max<std::size_t>(K, 1));
        theta.swap(next);
        res.iterations = it;
        res.log_posterior_trace.push_back(objective(theta));
        if (msd < cfg.tolerance) {
            res.converged = true;
            break;
        }
    }
    res.theta = std::move(theta);
    return res;
}

}  // namespace

EmResult em_fit_general(const Dataset& d, const PriorSpec& prior, const EmConfig& cfg,
                        ThetaVector init) {
    const SuffStats st = compute_suffstats(d);
    std::vector<double> suffix, cum;
    auto expected = [&](const ThetaVector& theta, std::vector<double>& sums) {
        for (std::size_t i = 0; i < d.rankings.size(); ++i) {
            const Ranking& r = d.rankings[i];
            auto order = r.order();
            auto bucket = r.bucket();
            const std::size_t n = r.size();
            suffix.assign(n + 1, 0.0);
            for (std::size_t p = n; p-- > 0;) suffix[p] = suffix[p + 1] + log1m(theta[order[p]]);
            const auto& starts = st.stage_start[i];
            cum.assign(starts.size() + 1, 0.0);
            for (std::size_t j = 0; j < starts.size(); ++j)
                cum[j + 1] = cum[j] + stage_weight(suffix[starts[j]]);
            const int v = st.stages[i];
            for (std::size_t p = 0; p < n; ++p)
                sums[order[p]] += cum[static_cast<std::size_t>(std::min(bucket[p], v))];
        }
    };
    auto objective = [&](const ThetaVector& theta) { return log_posterior(d, st, theta, prior); };
    return run_em(d.num_entities(), st.wins, prior, cfg, std::move(init), expected, objective);
}

EmResult em_fit_paired(const PairedData& pd, const PriorSpec& prior, const EmConfig& cfg,
                       ThetaVector init) {
    auto expected = [&](const ThetaVector& theta, std::vector<double>& sums) {
        for (std::size_t p = 0; p < pd.pairs.size(); ++p) {
            const auto [i, j] = pd.pairs[p];
            const double w = static_cast<double>(pd.count[p]) * stage_weight(log1m(theta[i]) + log1m(theta[j]));
            sums[i] += w;
            sums[j] += w;
        }
    };
    // losses (appearances minus wins) carry the log(1 - theta) terms
    std::vector<double> losses(pd.num_entities, 0.0);
    for (std::size_t p = 0; p < pd.pairs.size(); ++p) {
        losses[pd.pairs[p].first] += static_cast<double>(pd.count[p]);
        losses[pd.pairs[p].second] += static_cast<double>(pd.count[p]);
    }
    for (std::size_t k = 0; k < pd.num_entities; ++k) losses[k] -= static_cast<double>(pd.wins[k]);
    auto objective = [&](const ThetaVector& theta) {
        double total = log_prior(theta, prior);
        for (std::size_t k = 0; k < pd.num_entities; ++k) {
            if (pd.wins[k] > 0) total += static_cast<double>(pd.wins[k]) * std::log(theta[k]);
            if (losses[k] > 0) total += losses[k] * log1m(theta[k]);
        }
        for (std::size_t p = 0; p < pd.pairs.size(); ++p) {
            const auto [i, j] = pd.pairs[p];
            const double s = log1m(theta[i]) + log1m(theta[j]);
            total -= static_cast<double>(pd.count[p]) * (std::isinf(s) ? 0.0 : std::log(-std::expm1(s)));
        }
        return total;
    };
    return run_em(pd.num_entities, pd.wins, prior, cfg, std::move(init), expected, objective);
}

EmResult em_fit(const Dataset& d, const PriorSpec& prior, const EmConfig& cfg, ThetaVector init) {
    if (cfg.variant == EmVariant::paired)
        return em_fit_paired(PairedData::from_dataset(d), prior, cfg, std::move(init));
    return em_fit_general(d, prior, cfg, std::move(init));
}

std::string em_report(const EmResult& r, const EntityTable& entities) {
    std::string out;
    std::size_t width = 6;
    for (const auto& l : entities.labels()) width = std::max(width, l.size());
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-*s  %s\n", static_cast<int>(width), "entity", "theta");
    out += buf;
    for (std::size_t k = 0; k < r.theta.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%-*s  %.6f%s\n", static_cast<int>(width),
                      entities.label(static_cast<EntityId>(k)).c_str(), r.theta[k],
                      r.degenerate[k] ? "  (boundary)" : "");
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "iterations: %zu\nconverged: %s\nlog posterior: %.10f\n", r.iterations,
                  r.converged ? "yes" : "no", r.log_posterior_trace.back());
    out += buf;
    return out;
}

}  // namespace gpl
