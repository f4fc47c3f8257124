#pragma once

// Data-augmentation Gibbs samplers.
//
// general: one geometric latent per ranking stage (the minimum of the latent
//          trial counts of the stage's risk set).
// paired:  one negative-binomial latent per unordered entity pair, the sum
//          of the n_ij per-comparison minima.
// Given the latents, every theta_k has an independent Beta full conditional.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "gpl/model.hpp"
#include "gpl/random.hpp"
#include "gpl/ranking.hpp"
#include "gpl/samples.hpp"

namespace gpl {

struct LatentState {
    // general: z for every (ranking, stage), rankings in order.
    // paired: aggregate Z per pair, in PairedData::pairs order.
    std::vector<std::uint64_t> z;
    // zeta_k (general) or xi_k (paired): latent trials charged to entity k.
    std::vector<std::uint64_t> exposure;
};

// Pair-count table of a dataset whose rankings all have two competitors.
struct PairedData {
    std::size_t num_entities = 0;
    std::vector<std::pair<EntityId, EntityId>> pairs;  // i < j, sorted
    std::vector<std::uint64_t> count;                  // n_ij
    std::vector<long> wins;                            // wins plus ties per entity

    // Throws std::invalid_argument if some ranking has more than two entities.
    static PairedData from_dataset(const Dataset& d);
};

// theta_k ~ Beta(a_k + w_k, b_k + exposure_k - w_k) for every k.
void sample_theta(const PriorSpec& prior, std::span<const long> wins,
                  std::span<const std::uint64_t> exposure, std::span<double> theta, Rng& rng);

void gibbs_step_general(const Dataset& d, const SuffStats& st, const PriorSpec& prior,
                        std::span<double> theta, LatentState& latent, Rng& rng);

void gibbs_step_paired(const PairedData& pd, const PriorSpec& prior, std::span<double> theta,
                       LatentState& latent, Rng& rng);

// Runs cfg.chains independent chains (concurrently), each started from a
// prior draw on its own sub-stream of cfg.seed. `direction` is recorded as
// metadata; reverse-model callers pass already reversed data.
PosteriorSamples run_chains(const Dataset& d, const PriorSpec& prior, const GibbsConfig& cfg,
                            Direction direction = Direction::standard);

}  // namespace gpl
