#include "gpl/random.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gpl {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
    for (auto& w : s_) w = splitmix64(seed);
}

std::uint64_t Rng::next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

void Rng::jump() {
    static constexpr std::uint64_t kJump[] = {0x180ec6d33cfd0abaULL, 0xd5a61266f0c9392cULL,
                                              0xa9582618e03fc9aaULL, 0x39abdc4529b1661cULL};
    std::array<std::uint64_t, 4> acc{};
    for (std::uint64_t word : kJump) {
        for (int b = 0; b < 64; ++b) {
            if (word & (std::uint64_t{1} << b))
                for (int i = 0; i < 4; ++i) acc[i] ^= s_[i];
            next();
        }
    }
    s_ = acc;
}

double Rng::uniform() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
    for (;;) {
        const double u = 2.0 * uniform() - 1.0;
        const double v = 2.0 * uniform() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

std::vector<Rng> Rng::substreams(std::uint64_t seed, std::size_t count) {
    std::vector<Rng> out;
    out.reserve(count);
    Rng r(seed);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(r);
        r.jump();
    }
    return out;
}

std::uint64_t sample_geometric(double rate, Rng& rng) {
    if (!(rate > 0.0)) throw std::invalid_argument("geometric rate must be positive");
    if (rate >= 1.0) return 1;
    const double w = std::ceil(std::log(rng.uniform()) / std::log1p(-rate));
    constexpr double kCap = 4.0e18;
    if (!(w < kCap)) return static_cast<std::uint64_t>(kCap);
    return w < 1.0 ? 1 : static_cast<std::uint64_t>(w);
}

std::uint64_t sample_negbin(std::uint64_t n, double rate, Rng& rng) {
    std::uint64_t total = 0;
    for (std::uint64_t i = 0; i < n; ++i) total += sample_geometric(rate, rng);
    return total;
}

double sample_log_gamma(double shape, Rng& rng) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be positive");
    if (shape < 1.0) return sample_log_gamma(shape + 1.0, rng) + std::log(rng.uniform()) / shape;
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double x = rng.normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = rng.uniform();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return std::log(d) + std::log(v);
    }
}

double sample_gamma(double shape, Rng& rng) { return std::exp(sample_log_gamma(shape, rng)); }

double sample_beta(double a, double b, Rng& rng) {
    const double lx = sample_log_gamma(a, rng);
    const double ly = sample_log_gamma(b, rng);
    double t = 1.0 / (1.0 + std::exp(ly - lx));
    constexpr double kLow = std::numeric_limits<double>::min();
    const double high = std::nextafter(1.0, 0.0);
    if (t < kLow) t = kLow;
    if (t > high) t = high;
    return t;
}

}  // namespace gpl
