#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gpl/model.hpp"
#include "gpl/samples.hpp"

namespace gpl {

struct PosteriorSummary {
    std::vector<double> mean;
    std::vector<double> ci_low;   // 2.5% quantile
    std::vector<double> ci_high;  // 97.5% quantile
    std::vector<double> ess;      // NaN when a parameter never moves
    std::vector<double> psrf;     // NaN with a single chain or zero variance
};

// Type-7 (linear interpolation) empirical quantile of unsorted data.
double quantile(std::vector<double> values, double prob);

// Effective sample size from the initial positive sequence estimator applied
// to the chain-averaged autocovariance. chains[c] holds chain c's trace.
double effective_sample_size(const std::vector<std::span<const double>>& chains);
// Potential scale reduction factor sqrt(V / W), V = (n-1)/n W + B/n.
double psrf(const std::vector<std::span<const double>>& chains);

// Requires at least 10 retained draws.
PosteriorSummary summarize(const PosteriorSamples& samples);

void write_summary_csv(std::ostream& out, const PosteriorSummary& s, const EntityTable& entities);
std::string summary_table(const PosteriorSummary& s, const EntityTable& entities);

// Probability that each field member is first on its own; returned in field
// order. The shortfall from 1 is the probability of a tie for first.
std::vector<double> first_place_prob(std::span<const double> theta, std::span<const EntityId> field);
std::vector<double> posterior_first_place(const PosteriorSamples& samples,
                                          std::span<const EntityId> field);

// Sorted by posterior mean (descending for the standard model, ascending for
// the reverse model); equal means keep ascending id order.
std::vector<EntityId> aggregate_total_order(std::span<const double> mean,
                                            std::span<const EntityId> subset, Direction direction);

inline constexpr std::size_t kMaxExhaustiveEntities = 8;

// Tie-free order of `subset` with the largest draw-averaged GPL probability.
// Orders are scanned in lexicographic order of subset positions and only a
// strictly larger score replaces the incumbent.
std::vector<EntityId> exhaustive_modal_order(const PosteriorSamples& samples,
                                             std::span<const EntityId> subset, Direction direction);

}  // namespace gpl
