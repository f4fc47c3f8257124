#include "gpl/model.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gpl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_size(std::span<const double> v, std::size_t K, const char* what) {
    if (v.size() != K)
        throw std::invalid_argument(std::string(what) + " has " + std::to_string(v.size()) +
                                    " entries, expected " + std::to_string(K));
}

void check_ids(const Ranking& r, std::size_t K) {
    for (auto id : r.order())
        if (id >= K) throw std::invalid_argument("ranking references entity outside theta");
}

// log(1 - exp(s)) for s <= 0, with s = -inf giving 0.
double log1m_exp(double s) {
    if (s == kNegInf) return 0.0;
    if (s > -0.693147180559945) return std::log(-std::expm1(s));
    return std::log1p(-std::exp(s));
}

}  // namespace

void validate_theta(std::span<const double> theta, std::size_t K) {
    check_size(theta, K, "theta");
    for (double t : theta)
        if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("theta values must lie in (0, 1]");
}

void validate_lambda(std::span<const double> lambda, std::size_t K) {
    check_size(lambda, K, "lambda");
    for (double l : lambda)
        if (!(l > 0.0) || !std::isfinite(l))
            throw std::invalid_argument("lambda values must be positive and finite");
}

double log1m(double theta) { return theta >= 1.0 ? kNegInf : std::log1p(-theta); }

OutcomeProbs geom_pair_probs(double ti, double tj) {
    const double denom = ti + tj - ti * tj;
    return {ti * (1.0 - tj) / denom, ti * tj / denom, tj * (1.0 - ti) / denom};
}

double geom_min_rate(std::span<const double> thetas) {
    if (thetas.empty()) throw std::invalid_argument("geom_min_rate needs at least one rate");
    double s = 0.0;
    for (double t : thetas) {
        if (t >= 1.0) return 1.0;
        s += std::log1p(-t);
    }
    return -std::expm1(s);
}

std::vector<double> stagewise_log_probs(const Ranking& r, std::span<const double> theta) {
    check_ids(r, theta.size());
    auto order = r.order();
    const std::size_t n = r.size();
    // suffix[p] = sum of log(1 - theta) over positions p..n-1
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t p = n; p-- > 0;) suffix[p] = suffix[p + 1] + log1m(theta[order[p]]);

    const int v = r.stages();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(v));
    for (int j = 1; j <= v; ++j) {
        const std::size_t b = r.bucket_begin(j), e = r.bucket_end(j);
        double num = suffix[e];
        for (std::size_t p = b; p < e; ++p) num += std::log(theta[order[p]]);
        out.push_back(num - log1m_exp(suffix[b]));
    }
    return out;
}

double ranking_log_likelihood(const Ranking& r, std::span<const double> theta) {
    double total = 0.0;
    for (double x : stagewise_log_probs(r, theta)) total += x;
    return total;
}

double log_likelihood(const Dataset& d, const SuffStats& st, std::span<const double> theta) {
    const std::size_t K = d.num_entities();
    check_size(theta, K, "theta");
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        if (st.wins[k] > 0) total += static_cast<double>(st.wins[k]) * std::log(theta[k]);
        if (st.lower[k] > 0) total += static_cast<double>(st.lower[k]) * log1m(theta[k]);
    }
    if (total == kNegInf) return total;

    std::vector<double> suffix;
    for (std::size_t i = 0; i < d.rankings.size(); ++i) {
        auto order = d.rankings[i].order();
        const std::size_t n = order.size();
        suffix.assign(n + 1, 0.0);
        for (std::size_t p = n; p-- > 0;) suffix[p] = suffix[p + 1] + log1m(theta[order[p]]);
        for (std::size_t start : st.stage_start[i]) total -= log1m_exp(suffix[start]);
    }
    return total;
}

double log_likelihood(const Dataset& d, std::span<const double> theta) {
    return log_likelihood(d, compute_suffstats(d), theta);
}

double pl_log_likelihood(const Dataset& d, std::span<const double> lambda) {
    check_size(lambda, d.num_entities(), "lambda");
    double total = 0.0;
    for (const auto& r : d.rankings) {
        auto order = r.order();
        auto bucket = r.bucket();
        const std::size_t n = r.size();
        const std::size_t stop = r.truncated_top();
        for (std::size_t p = 0; p < stop; ++p)
            if (bucket[p] != static_cast<int>(p) + 1)
                throw std::invalid_argument("Plackett-Luce likelihood is undefined for tied rankings");
        if (r.complete() && bucket[n - 1] != static_cast<int>(n))
            throw std::invalid_argument("Plackett-Luce likelihood is undefined for tied rankings");

        std::vector<double> suffix(n + 1, 0.0);
        for (std::size_t p = n; p-- > 0;) suffix[p] = suffix[p + 1] + lambda[order[p]];
        for (std::size_t p = 0; p < stop; ++p)
            total += std::log(lambda[order[p]]) - std::log(suffix[p]);
    }
    return total;
}

OutcomeProbs davidson_pair_probs(double li, double lj, double delta) {
    if (!(li > 0.0) || !(lj > 0.0) || !(delta >= 0.0))
        throw std::invalid_argument("Davidson parameters must be positive (delta non-negative)");
    const double tie = delta * std::sqrt(li * lj);
    const double denom = li + lj + tie;
    return {li / denom, tie / denom, lj / denom};
}

}  // namespace gpl
