#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gpl/model.hpp"
#include "gpl/ranking.hpp"

namespace gpl {

// Independent Beta(a_k, b_k) priors on theta_k.
struct PriorSpec {
    std::vector<double> a;
    std::vector<double> b;

    static PriorSpec uniform(std::size_t K, double a = 1.0, double b = 1.0);
    std::size_t size() const { return a.size(); }
    // Throws std::invalid_argument unless both vectors have K positive entries.
    void validate(std::size_t K) const;
};

enum class SamplerKind { general, paired };

const char* to_string(SamplerKind s);
const char* to_string(Direction d);

struct GibbsConfig {
    std::size_t iterations = 10000;
    std::size_t burnin = 10;
    std::size_t chains = 4;
    std::uint64_t seed = 1;
    SamplerKind sampler = SamplerKind::general;
};

// Retained draws laid out chain-major: draw t of chain c occupies
// values[(c * iterations + t) * K .. +K).
class PosteriorSamples {
public:
    PosteriorSamples() = default;
    PosteriorSamples(EntityTable entities, GibbsConfig config, PriorSpec prior, Direction direction);

    const EntityTable& entities() const { return entities_; }
    const GibbsConfig& config() const { return config_; }
    const PriorSpec& prior() const { return prior_; }
    Direction direction() const { return direction_; }

    std::size_t num_entities() const { return entities_.size(); }
    std::size_t chains() const { return config_.chains; }
    std::size_t iterations() const { return config_.iterations; }
    std::size_t num_draws() const { return chains() * iterations(); }

    std::span<const double> draw(std::size_t flat) const;
    std::span<const double> draw(std::size_t chain, std::size_t t) const;
    std::span<double> draw(std::size_t chain, std::size_t t);
    double at(std::size_t chain, std::size_t t, std::size_t k) const;
    std::span<const double> values() const { return values_; }

    void write_csv(std::ostream& out) const;
    // Throws std::runtime_error on malformed input.
    static PosteriorSamples read_csv(std::istream& in);

private:
    EntityTable entities_;
    GibbsConfig config_;
    PriorSpec prior_;
    Direction direction_ = Direction::standard;
    std::vector<double> values_;
};

// Formats with enough digits to round-trip exactly.
std::string format_double(double x);

// Entry [i][t] is the log-likelihood of ranking i under draw t.
std::vector<std::vector<double>> pointwise_log_likelihoods(const Dataset& d,
                                                           const PosteriorSamples& samples);

}  // namespace gpl
