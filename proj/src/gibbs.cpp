#include "gpl/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "gpl/parallel.hpp"

namespace gpl {

PairedData PairedData::from_dataset(const Dataset& d) {
    PairedData pd;
    pd.num_entities = d.num_entities();
    std::map<std::pair<EntityId, EntityId>, std::uint64_t> table;
    for (const auto& r : d.rankings) {
        if (r.size() != 2)
            throw std::invalid_argument("paired sampler requires every ranking to compare two entities");
        auto y = r.order();
        ++table[{std::min(y[0], y[1]), std::max(y[0], y[1])}];
    }
    for (const auto& [key, n] : table) {
        pd.pairs.push_back(key);
        pd.count.push_back(n);
    }
    pd.wins = compute_suffstats(d).wins;
    return pd;
}

void sample_theta(const PriorSpec& prior, std::span<const long> wins,
                  std::span<const std::uint64_t> exposure, std::span<double> theta, Rng& rng) {
    for (std::size_t k = 0; k < theta.size(); ++k) {
        const auto w = static_cast<std::uint64_t>(wins[k]);
        if (exposure[k] < w) throw std::logic_error("latent exposure below win count");
        theta[k] = sample_beta(prior.a[k] + static_cast<double>(w),
                               prior.b[k] + static_cast<double>(exposure[k] - w), rng);
    }
}

void gibbs_step_general(const Dataset& d, const SuffStats& st, const PriorSpec& prior,
                        std::span<double> theta, LatentState& latent, Rng& rng) {
    latent.z.resize(st.total_stages());
    latent.exposure.assign(d.num_entities(), 0);
    std::vector<double> suffix;
    std::vector<std::uint64_t> cum;
    std::size_t slot = 0;
    for (std::size_t i = 0; i < d.rankings.size(); ++i) {
        const Ranking& r = d.rankings[i];
        auto order = r.order();
        auto bucket = r.bucket();
        const std::size_t n = r.size();
        suffix.assign(n + 1, 0.0);
        for (std::size_t p = n; p-- > 0;) suffix[p] = suffix[p + 1] + log1m(theta[order[p]]);

        const auto& starts = st.stage_start[i];
        cum.assign(starts.size() + 1, 0);
        for (std::size_t j = 0; j < starts.size(); ++j) {
            const double s = suffix[starts[j]];
            const double rate = std::isinf(s) ? 1.0 : -std::expm1(s);
            const std::uint64_t z = sample_geometric(rate, rng);
            latent.z[slot++] = z;
            cum[j + 1] = cum[j] + z;
        }
        const int v = st.stages[i];
        for (std::size_t p = 0; p < n; ++p)
            latent.exposure[order[p]] += cum[static_cast<std::size_t>(std::min(bucket[p], v))];
    }
    sample_theta(prior, st.wins, latent.exposure, theta, rng);
}

void gibbs_step_paired(const PairedData& pd, const PriorSpec& prior, std::span<double> theta,
                       LatentState& latent, Rng& rng) {
    latent.z.resize(pd.pairs.size());
    latent.exposure.assign(pd.num_entities, 0);
    for (std::size_t p = 0; p < pd.pairs.size(); ++p) {
        const auto [i, j] = pd.pairs[p];
        const double s = log1m(theta[i]) + log1m(theta[j]);
        const double rate = std::isinf(s) ? 1.0 : -std::expm1(s);
        const std::uint64_t z = sample_negbin(pd.count[p], rate, rng);
        latent.z[p] = z;
        latent.exposure[i] += z;
        latent.exposure[j] += z;
    }
    sample_theta(prior, pd.wins, latent.exposure, theta, rng);
}

PosteriorSamples run_chains(const Dataset& d, const PriorSpec& prior, const GibbsConfig& cfg,
                            Direction direction) {
    const std::size_t K = d.num_entities();
    prior.validate(K);
    if (cfg.iterations < 1) throw std::invalid_argument("iterations must be at least 1");
    if (cfg.chains < 1) throw std::invalid_argument("chains must be at least 1");

    const SuffStats st = compute_suffstats(d);
    PairedData pd;
    if (cfg.sampler == SamplerKind::paired) pd = PairedData::from_dataset(d);

    PosteriorSamples out(d.entities, cfg, prior, direction);
    auto streams = Rng::substreams(cfg.seed, cfg.chains);

    parallel_for(cfg.chains, [&](std::size_t c) {
        Rng& rng = streams[c];
        std::vector<double> theta(K);
        for (std::size_t k = 0; k < K; ++k) theta[k] = sample_beta(prior.a[k], prior.b[k], rng);
        LatentState latent;
        for (std::size_t it = 0; it < cfg.burnin + cfg.iterations; ++it) {
            if (cfg.sampler == SamplerKind::paired)
                gibbs_step_paired(pd, prior, theta, latent, rng);
            else
                gibbs_step_general(d, st, prior, theta, latent, rng);
            if (it >= cfg.burnin) {
                auto dst = out.draw(c, it - cfg.burnin);
                std::copy(theta.begin(), theta.end(), dst.begin());
            }
        }
    });
    return out;
}

}  // namespace gpl
