#include "gpl/predictive.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "gpl/parallel.hpp"

namespace gpl {

std::size_t SimulatedEvent::leaders() const {
    std::size_t n = 0;
    while (n < bucket.size() && bucket[n] == 1) ++n;
    return n;
}

Ranking SimulatedEvent::to_ranking() const { return Ranking(order, bucket, order.size()); }

SimulatedEvent simulate_event(std::span<const double> theta, std::span<const EntityId> field,
                              Direction direction, Rng& rng) {
    if (field.empty()) throw std::invalid_argument("empty field");
    const std::size_t n = field.size();
    std::vector<std::uint64_t> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (field[i] >= theta.size()) throw std::out_of_range("field entity outside theta");
        w[i] = sample_geometric(theta[field[i]], rng);
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
        return direction == Direction::standard ? w[x] < w[y] : w[x] > w[y];
    });
    SimulatedEvent ev;
    ev.order.reserve(n);
    ev.bucket.reserve(n);
    ev.latent.reserve(n);
    for (std::size_t p = 0; p < n; ++p) {
        const std::size_t i = idx[p];
        ev.order.push_back(field[i]);
        ev.latent.push_back(w[i]);
        ev.bucket.push_back(p == 0 ? 1 : ev.bucket.back() + (w[i] != ev.latent[p - 1] ? 1 : 0));
    }
    return ev;
}

EntityId simulate_tournament_winner(std::span<const double> theta, std::span<const EntityId> field,
                                    Direction direction, Rng& rng, std::size_t max_playoffs,
                                    PlayoffCounters* counters) {
    if (field.empty()) throw std::invalid_argument("empty field");
    if (field.size() == 1) return field[0];
    std::vector<EntityId> current(field.begin(), field.end());
    for (std::size_t round = 0;; ++round) {
        auto ev = simulate_event(theta, current, direction, rng);
        const std::size_t lead = ev.leaders();
        if (lead == 1) return ev.order[0];
        current.assign(ev.order.begin(), ev.order.begin() + static_cast<std::ptrdiff_t>(lead));
        if (round == max_playoffs) break;
        if (counters) ++counters->playoffs;
    }
    if (counters) ++counters->uniform_breaks;
    auto pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(current.size()));
    return current[std::min(pick, current.size() - 1)];
}

namespace {

std::size_t block_count(std::uint64_t n_sims) { return static_cast<std::size_t>((n_sims + kSimBlock - 1) / kSimBlock); }

void check_field(std::span<const EntityId> field, std::size_t K) {
    if (field.empty()) throw std::invalid_argument("empty field");
    std::vector<EntityId> sorted(field.begin(), field.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("field contains duplicates");
    if (sorted.back() >= K) throw std::out_of_range("field entity outside samples");
}

}  // namespace

WinProbabilities predictive_win_probs(const PosteriorSamples& samples, std::span<const EntityId> field,
                                      Direction direction, std::uint64_t n_sims, std::uint64_t seed,
                                      std::size_t max_playoffs) {
    if (n_sims < 1) throw std::invalid_argument("n_sims must be at least 1");
    check_field(field, samples.num_entities());
    const std::size_t blocks = block_count(n_sims);
    auto streams = Rng::substreams(seed, blocks);
    std::vector<std::vector<std::uint64_t>> wins(blocks, std::vector<std::uint64_t>(field.size(), 0));
    std::vector<PlayoffCounters> counters(blocks);

    std::vector<std::size_t> position(samples.num_entities(), 0);
    for (std::size_t i = 0; i < field.size(); ++i) position[field[i]] = i;
    const std::uint64_t N = samples.num_draws();

    parallel_for(blocks, [&](std::size_t b) {
        const std::uint64_t begin = b * kSimBlock;
        const std::uint64_t end = std::min<std::uint64_t>(begin + kSimBlock, n_sims);
        for (std::uint64_t t = begin; t < end; ++t) {
            auto theta = samples.draw(static_cast<std::size_t>(t % N));
            const EntityId w =
                simulate_tournament_winner(theta, field, direction, streams[b], max_playoffs, &counters[b]);
            ++wins[b][position[w]];
        }
    });

    WinProbabilities out;
    out.sims = n_sims;
    out.wins.assign(field.size(), 0);
    for (std::size_t b = 0; b < blocks; ++b) {
        for (std::size_t i = 0; i < field.size(); ++i) out.wins[i] += wins[b][i];
        out.counters.playoffs += counters[b].playoffs;
        out.counters.uniform_breaks += counters[b].uniform_breaks;
    }
    for (auto w : out.wins) out.prob.push_back(static_cast<double>(w) / static_cast<double>(n_sims));
    return out;
}

double BucketHistogram::probability(long value) const {
    if (value < 0 || static_cast<std::size_t>(value) >= counts.size() || sims == 0) return 0.0;
    return static_cast<double>(counts[static_cast<std::size_t>(value)]) / static_cast<double>(sims);
}

BucketHistogram predictive_bucket_counts(const PosteriorSamples& samples,
                                         std::span<const EntityId> field, Direction direction,
                                         std::uint64_t n_sims, std::uint64_t seed) {
    if (n_sims < 1) throw std::invalid_argument("n_sims must be at least 1");
    check_field(field, samples.num_entities());
    const std::size_t blocks = block_count(n_sims);
    auto streams = Rng::substreams(seed, blocks);
    std::vector<std::vector<std::uint64_t>> hist(blocks, std::vector<std::uint64_t>(field.size() + 1, 0));
    const std::uint64_t N = samples.num_draws();

    parallel_for(blocks, [&](std::size_t b) {
        const std::uint64_t begin = b * kSimBlock;
        const std::uint64_t end = std::min<std::uint64_t>(begin + kSimBlock, n_sims);
        for (std::uint64_t t = begin; t < end; ++t) {
            auto theta = samples.draw(static_cast<std::size_t>(t % N));
            auto ev = simulate_event(theta, field, direction, streams[b]);
            ++hist[b][static_cast<std::size_t>(ev.bucket_count())];
        }
    });

    BucketHistogram out;
    out.sims = n_sims;
    out.counts.assign(field.size() + 1, 0);
    for (const auto& h : hist)
        for (std::size_t v = 0; v < h.size(); ++v) out.counts[v] += h[v];
    return out;
}

SyntheticData synthetic_top_m_dataset(const SyntheticSpec& spec, std::uint64_t seed) {
    if (spec.entities < 2 || spec.min_field < 2 || spec.min_field > spec.max_field ||
        spec.max_field > spec.entities || spec.cut < 1)
        throw std::invalid_argument("inconsistent synthetic data settings");
    Rng rng(seed);
    std::vector<std::string> labels;
    const int digits = static_cast<int>(std::to_string(spec.entities).size());
    for (std::size_t k = 1; k <= spec.entities; ++k) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "p%0*zu", digits, k);
        labels.emplace_back(buf);
    }
    SyntheticData out{Dataset{EntityTable(labels), {}}, {}};
    out.truth.resize(spec.entities);
    for (auto& t : out.truth) t = sample_beta(spec.theta_a, spec.theta_b, rng);

    std::vector<EntityId> pool(spec.entities);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t e = 0; e < spec.events; ++e) {
        const std::size_t span = spec.max_field - spec.min_field + 1;
        const std::size_t size =
            spec.min_field + std::min(span - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(span)));
        for (std::size_t i = 0; i < size; ++i) {
            const std::size_t left = spec.entities - i;
            const std::size_t j =
                i + std::min(left - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(left)));
            std::swap(pool[i], pool[j]);
        }
        std::vector<EntityId> field(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
        auto ev = simulate_event(out.truth, field, Direction::standard, rng);
        out.data.rankings.push_back(truncate_top(ev.to_ranking(), std::min(spec.cut, size)));
    }
    return out;
}

}  // namespace gpl
