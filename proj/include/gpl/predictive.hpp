#pragma once

// Forward simulation from the model: single events, tournaments with
// play-offs among tied leaders, and posterior-predictive summaries.
//
// Simulation loops run in fixed blocks of kSimBlock draws, block b using
// sub-stream b of the seed, so results do not depend on the worker count.

#include <cstdint>
#include <span>
#include <vector>

#include "gpl/model.hpp"
#include "gpl/random.hpp"
#include "gpl/ranking.hpp"
#include "gpl/samples.hpp"

namespace gpl {

inline constexpr std::size_t kSimBlock = 4096;

struct SimulatedEvent {
    std::vector<EntityId> order;          // best first
    std::vector<int> bucket;              // dense, 1-based
    std::vector<std::uint64_t> latent;    // W per position of `order`

    int bucket_count() const { return bucket.empty() ? 0 : bucket.back(); }
    std::size_t leaders() const;          // size of the first bucket
    Ranking to_ranking() const;           // needs at least two entities
};

// W_k ~ Geom(theta_k) for each field member; smaller W ranks first for the
// standard model, larger W for the reverse model. Equal W share a bucket and
// keep field order inside it.
SimulatedEvent simulate_event(std::span<const double> theta, std::span<const EntityId> field,
                              Direction direction, Rng& rng);

struct PlayoffCounters {
    std::uint64_t playoffs = 0;         // extra rounds simulated
    std::uint64_t uniform_breaks = 0;   // ties still standing at the cap
};

EntityId simulate_tournament_winner(std::span<const double> theta, std::span<const EntityId> field,
                                    Direction direction, Rng& rng, std::size_t max_playoffs = 100,
                                    PlayoffCounters* counters = nullptr);

struct WinProbabilities {
    std::vector<double> prob;  // field order
    std::vector<std::uint64_t> wins;
    std::uint64_t sims = 0;
    PlayoffCounters counters;
};

// Simulation t uses posterior draw t mod N.
WinProbabilities predictive_win_probs(const PosteriorSamples& samples, std::span<const EntityId> field,
                                      Direction direction, std::uint64_t n_sims, std::uint64_t seed,
                                      std::size_t max_playoffs = 100);

struct BucketHistogram {
    std::vector<std::uint64_t> counts;  // counts[b] = events with b buckets
    std::uint64_t sims = 0;

    double probability(long value) const;
};

BucketHistogram predictive_bucket_counts(const PosteriorSamples& samples,
                                         std::span<const EntityId> field, Direction direction,
                                         std::uint64_t n_sims, std::uint64_t seed);

// Golf-like synthetic top-m data: `events` fields of random size in
// [min_field, max_field] drawn from K entities, each simulated under the
// standard model and truncated after the bucket holding position `cut`.
struct SyntheticSpec {
    std::size_t entities = 631;
    std::size_t events = 46;
    std::size_t min_field = 120;
    std::size_t max_field = 156;
    std::size_t cut = 70;
    double theta_a = 4.0;  // true theta_k ~ Beta(theta_a, theta_b)
    double theta_b = 120.0;
};

struct SyntheticData {
    Dataset data;
    ThetaVector truth;
};

SyntheticData synthetic_top_m_dataset(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace gpl
