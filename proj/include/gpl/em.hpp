#pragma once

// EM (minorize-maximize) iterations for the posterior mode under Beta priors.
// With a_k = b_k = 1 the mode is the maximum-likelihood estimate.

#include <string>
#include <vector>

#include "gpl/gibbs.hpp"
#include "gpl/model.hpp"
#include "gpl/ranking.hpp"
#include "gpl/samples.hpp"

namespace gpl {

enum class EmVariant { general, paired };

struct EmConfig {
    std::size_t max_iterations = 10000;
    double tolerance = 1e-16;  // on the mean squared parameter change
    EmVariant variant = EmVariant::general;
};

inline constexpr double kEmThetaFloor = 1e-12;

struct EmResult {
    ThetaVector theta;
    std::size_t iterations = 0;
    // Log posterior at the starting value and after every update.
    std::vector<double> log_posterior_trace;
    bool converged = false;
    // Entities whose update left (0, 1) and was clamped.
    std::vector<bool> degenerate;

    bool any_degenerate() const;
};

// Sum of Beta(a_k, b_k) log densities.
double log_prior(std::span<const double> theta, const PriorSpec& prior);
double log_posterior(const Dataset& d, const SuffStats& st, std::span<const double> theta,
                     const PriorSpec& prior);

EmResult em_fit_general(const Dataset& d, const PriorSpec& prior, const EmConfig& cfg,
                        ThetaVector init);
EmResult em_fit_paired(const PairedData& pd, const PriorSpec& prior, const EmConfig& cfg,
                       ThetaVector init);
// Dispatches on cfg.variant.
EmResult em_fit(const Dataset& d, const PriorSpec& prior, const EmConfig& cfg, ThetaVector init);

// One line per entity: label, estimate (6 d.p.), degenerate marker; then
// iterations, convergence flag and final log posterior.
std::string em_report(const EmResult& r, const EntityTable& entities);

}  // namespace gpl
