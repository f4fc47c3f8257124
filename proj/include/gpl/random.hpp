#pragma once

// Reproducible random streams: xoshiro256** seeded through splitmix64, with
// the 2^128-step jump used to carve independent sub-streams. All variate
// generators are implemented here so that output does not depend on the
// standard library vendor.

#include <array>
#include <cstdint>
#include <vector>

namespace gpl {

class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next();
    // Advances the state by 2^128 draws.
    void jump();

    // Uniform on the open interval (0, 1).
    double uniform();
    double normal();

    // `count` consecutive non-overlapping sub-streams of the stream for `seed`.
    static std::vector<Rng> substreams(std::uint64_t seed, std::size_t count);

    bool operator==(const Rng&) const = default;

private:
    std::array<std::uint64_t, 4> s_{};
};

// Geometric on {1, 2, ...} with success probability `rate` in (0, 1].
std::uint64_t sample_geometric(double rate, Rng& rng);
// Sum of n independent Geom(rate) draws (failures-plus-successes form).
std::uint64_t sample_negbin(std::uint64_t n, double rate, Rng& rng);
// log of a Gamma(shape, 1) draw; exact for any shape > 0.
double sample_log_gamma(double shape, Rng& rng);
double sample_gamma(double shape, Rng& rng);
// Beta(a, b) draw, strictly inside (0, 1).
double sample_beta(double a, double b, Rng& rng);

}  // namespace gpl
