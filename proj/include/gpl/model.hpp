#pragma once

// Geometric Plackett-Luce likelihood and the baseline paired/PL models.
//
// Each entity k draws W_k ~ Geom(theta_k) on {1, 2, ...}; a ranking orders
// the W's from smallest (best) to largest, equal values forming a bucket.

#include <span>
#include <vector>

#include "gpl/ranking.hpp"

namespace gpl {

using ThetaVector = std::vector<double>;
using LambdaVector = std::vector<double>;

enum class Direction { standard, reverse };

// Throws std::invalid_argument unless theta has K entries in (0, 1].
void validate_theta(std::span<const double> theta, std::size_t K);
void validate_lambda(std::span<const double> lambda, std::size_t K);

struct OutcomeProbs {
    double win_first;
    double tie;
    double win_second;
};

// Pr(W_i < W_j), Pr(W_i = W_j), Pr(W_i > W_j) for independent geometrics.
OutcomeProbs geom_pair_probs(double theta_i, double theta_j);

// Success probability of min_i W_i, i.e. 1 - prod(1 - theta_i).
double geom_min_rate(std::span<const double> thetas);

// log(1 - theta) with theta = 1 mapping to -infinity.
double log1m(double theta);

double log_likelihood(const Dataset& d, std::span<const double> theta);
double log_likelihood(const Dataset& d, const SuffStats& st, std::span<const double> theta);
double ranking_log_likelihood(const Ranking& r, std::span<const double> theta);

// One entry per counted stage (bucket) j = 1..v of the ranking.
std::vector<double> stagewise_log_probs(const Ranking& r, std::span<const double> theta);

// Plackett-Luce log-likelihood; throws std::invalid_argument when a ranked
// prefix contains a tie.
double pl_log_likelihood(const Dataset& d, std::span<const double> lambda);

OutcomeProbs davidson_pair_probs(double lambda_i, double lambda_j, double delta);

}  // namespace gpl
