#include <doctest.h>

#include <cmath>

#include "gpl/random.hpp"

using namespace gpl;

namespace {

struct Moments {
    double mean = 0, var = 0;
};

template <class F>
Moments moments(int n, F draw) {
    double s = 0, ss = 0;
    for (int i = 0; i < n; ++i) {
        const double x = draw();
        s += x;
        ss += x * x;
    }
    Moments m;
    m.mean = s / n;
    m.var = ss / n - m.mean * m.mean;
    return m;
}

}  // namespace

TEST_CASE("uniform draws stay strictly inside (0, 1) and streams are reproducible") {
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100000; ++i) {
        const double u = a.uniform();
        CHECK((u > 0.0 && u < 1.0));
        CHECK(u == b.uniform());
        differs = differs || (u != c.uniform());
    }
    CHECK(differs);
}

TEST_CASE("substreams are distinct and match repeated jumps") {
    auto s = Rng::substreams(9, 3);
    Rng manual(9);
    CHECK(s[0] == manual);
    manual.jump();
    CHECK(s[1] == manual);
    manual.jump();
    CHECK(s[2] == manual);
    CHECK_FALSE(s[0].next() == s[1].next());
}

TEST_CASE("geometric draws") {
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) CHECK(sample_geometric(1.0, rng) == 1);

    const int n = 1000000;
    auto m = moments(n, [&] { return static_cast<double>(sample_geometric(0.5, rng)); });
    // Var(W) = (1 - p) / p^2 = 2
    CHECK(std::abs(m.mean - 2.0) < 3 * std::sqrt(2.0 / n));

    int ones = 0;
    for (int i = 0; i < n; ++i) ones += sample_geometric(0.25, rng) == 1;
    const double freq = static_cast<double>(ones) / n;
    CHECK(std::abs(freq - 0.25) < 3 * std::sqrt(0.25 * 0.75 / n));

    CHECK(sample_geometric(1e-300, rng) >= 1);
    CHECK_THROWS(sample_geometric(0.0, rng));
}

TEST_CASE("negative binomial as a sum of geometrics") {
    Rng rng(2);
    const int n = 200000;
    // NegBin(3, 0.75): mean 4, variance 3 * 0.25 / 0.5625
    auto m = moments(n, [&] { return static_cast<double>(sample_negbin(3, 0.75, rng)); });
    const double var = 3 * 0.25 / 0.5625;
    CHECK(std::abs(m.mean - 4.0) < 3 * std::sqrt(var / n));
    CHECK(sample_negbin(0, 0.5, rng) == 0);
}

TEST_CASE("gamma and beta moments") {
    Rng rng(3);
    const int n = 200000;
    for (double shape : {0.3, 1.0, 2.5, 40.0}) {
        auto m = moments(n, [&] { return sample_gamma(shape, rng); });
        CHECK(std::abs(m.mean - shape) < 3 * std::sqrt(shape / n));
        CHECK(m.var == doctest::Approx(shape).epsilon(0.05));
    }
    for (auto [a, b] : {std::pair{2.0, 3.0}, std::pair{0.5, 0.5}, std::pair{1.0, 400.0}, std::pair{0.2, 7.0}}) {
        const double mean = a / (a + b);
        const double var = a * b / ((a + b) * (a + b) * (a + b + 1));
        auto m = moments(n, [&] {
            const double x = sample_beta(a, b, rng);
            CHECK((x > 0.0 && x < 1.0));
            return x;
        });
        CHECK(std::abs(m.mean - mean) < 3 * std::sqrt(var / n));
        CHECK(m.var == doctest::Approx(var).epsilon(0.05));
    }
}

TEST_CASE("small gamma shapes do not underflow to zero in log space") {
    Rng rng(4);
    for (int i = 0; i < 10000; ++i) {
        const double lg = sample_log_gamma(0.01, rng);
        CHECK(std::isfinite(lg));
    }
    for (int i = 0; i < 10000; ++i) {
        const double x = sample_beta(0.01, 0.01, rng);
        CHECK((x > 0.0 && x < 1.0));
    }
}
