// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "gpl/cli.hpp"
#include "gpl/em.hpp"
#include "gpl/gibbs.hpp"
#include "gpl/model.hpp"
#include "gpl/posterior.hpp"
#include "gpl/predictive.hpp"
#include "oracles.hpp"

using namespace gpl;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s %2d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* spec, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

std::string vec(const std::vector<double>& v, const char* spec = "%.4f") {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(spec, v[i]);
    return s + ")";
}

Dataset puddings() { return read_dataset(std::string(GPL_DATA_DIR) + "/puddings.txt"); }

// Values reordered to the labels "1".."6".
std::vector<double> by_label(const std::vector<double>& v, const EntityTable& e) {
    std::vector<double> out;
    for (int k = 1; k <= 6; ++k) out.push_back(v[e.at(std::to_string(k))]);
    return out;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::string order_labels(const std::vector<EntityId>& ids, const EntityTable& e) {
    std::string s;
    for (auto id : ids) s += (s.empty() ? "" : ",") + e.label(id);
    return s;
}

const std::vector<double> kMapStandard{0.393, 0.416, 0.422, 0.429, 0.440, 0.467};
const std::vector<double> kMapReverse{0.466, 0.398, 0.430, 0.429, 0.458, 0.384};
const std::vector<double> kMeanStandard{0.396, 0.418, 0.424, 0.432, 0.442, 0.469};

void criterion_map(int id, bool reverse) {
    const auto start = Clock::now();
    Dataset d = puddings();
    if (reverse) d = reverse_dataset(d);
    auto r = em_fit_general(d, PriorSpec::uniform(6), EmConfig{}, ThetaVector(6, 0.5));
    const double secs = seconds_since(start);
    const auto theta = by_label(r.theta, d.entities);
    const double err = max_abs_diff(theta, reverse ? kMapReverse : kMapStandard);
    const bool pass = err <= 0.001 && r.converged && !r.any_degenerate() && (reverse || secs < 1.0);
    report(id, reverse ? "puddings reverse-GPL MAP" : "puddings MAP", pass,
           "theta " + vec(theta) + ", max error " + fmt("%.2e", err) + " (tol 1e-3), " +
               std::to_string(r.iterations) + " iterations, " + fmt("%.3f", secs) + " s");
}

struct GibbsRuns {
    PosteriorSamples general, paired, reverse;
};

GibbsRuns criterion_gibbs() {
    const auto start = Clock::now();
    const Dataset d = puddings();
    GibbsConfig cfg;
    cfg.iterations = 10000;
    cfg.chains = 4;
    cfg.seed = 2024;
    GibbsRuns runs;
    runs.general = run_chains(d, PriorSpec::uniform(6), cfg);
    cfg.sampler = SamplerKind::paired;
    cfg.seed = 2025;
    runs.paired = run_chains(d, PriorSpec::uniform(6), cfg);
    const double secs = seconds_since(start);

    bool pass = secs < 120.0;
    std::string detail;
    for (const auto* s : {&runs.general, &runs.paired}) {
        auto sum = summarize(*s);
        const auto mean = by_label(sum.mean, s->entities());
        const double err = max_abs_diff(mean, kMeanStandard);
        const double worst = *std::max_element(sum.psrf.begin(), sum.psrf.end());
        pass = pass && err <= 0.005 && worst <= 1.01;
        detail += std::string(s == &runs.general ? "general" : "paired") + " means " + vec(mean) + " max error " +
                  fmt("%.4f", err) + " max PSRF " + fmt("%.4f", worst) + "; ";
    }
    detail += fmt("%.1f", secs) + " s (limit 120)";
    report(3, "puddings Gibbs posterior means", pass, detail);

    cfg.seed = 2026;
    runs.reverse = run_chains(reverse_dataset(d), PriorSpec::uniform(6), cfg, Direction::reverse);
    return runs;
}

void criterion_orders(const GibbsRuns& runs) {
    auto all = oracle::iota_ids(6);
    const auto& e = runs.general.entities();
    const auto std_mean = summarize(runs.general).mean;
    const auto rev_mean = summarize(runs.reverse).mean;
    const auto agg_std = order_labels(aggregate_total_order(std_mean, all, Direction::standard), e);
    const auto agg_rev = order_labels(aggregate_total_order(rev_mean, all, Direction::reverse), e);
    const auto ex_std = order_labels(exhaustive_modal_order(runs.general, all, Direction::standard), e);
    const auto ex_rev = order_labels(exhaustive_modal_order(runs.reverse, all, Direction::reverse), e);
    const bool pass = agg_std == "6,5,4,3,2,1" && agg_rev == "6,2,4,3,5,1" && ex_std == agg_std && ex_rev == agg_rev;
    report(4, "total-order aggregation", pass,
           "standard mean order (" + agg_std + ") exhaustive (" + ex_std + "); reverse mean order (" + agg_rev +
               ") exhaustive (" + ex_rev + ")");
}

void criterion_oracle() {
    Rng rng(5);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t K = 2 + static_cast<std::size_t>(rng.uniform() * 3);
        std::vector<double> theta(K);
        for (auto& t : theta) t = 0.1 + 0.85 * rng.uniform();
        auto r = oracle::random_bucket_order(oracle::iota_ids(K), rng);
        if (rep % 3 == 2 && r.bucket_count() > 2) r = truncate_top(r, 1);
        worst = std::max(worst, std::abs(std::exp(ranking_log_likelihood(r, theta)) - oracle::ranking_probability(r, theta)));
    }
    double worst_sum = 0.0;
    for (std::size_t K : {2, 3})
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<double> theta(K);
            for (auto& t : theta) t = 0.01 + 0.99 * rng.uniform();
            double total = 0.0;
            const auto orders = oracle::all_bucket_orders(K);
            for (const auto& r : orders) total += std::exp(ranking_log_likelihood(r, theta));
            if (orders.size() != ordered_bell(static_cast<int>(K))) total = 0.0;
            worst_sum = std::max(worst_sum, std::abs(total - 1.0));
        }
    report(5, "likelihood oracle equivalence", worst < 1e-8 && worst_sum < 1e-8,
           "max |closed form - brute force| " + fmt("%.2e", worst) + " (tol 1e-8); max |sum - 1| over all outcomes " +
               fmt("%.2e", worst_sum) + " (tol 1e-8)");
}

void criterion_pl_limit() {
    Rng rng(6);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t K = 2 + static_cast<std::size_t>(rng.uniform() * 4);
        std::vector<double> lambda(K);
        for (auto& l : lambda) l = 0.2 + 5.0 * rng.uniform();
        std::vector<double> theta(K);
        for (std::size_t k = 0; k < K; ++k) theta[k] = 1e-6 * lambda[k] / lambda[0];
        auto r = oracle::random_bucket_order(oracle::iota_ids(K), rng, 0.0);
        Dataset d{oracle::numbered_entities(K), {r}};
        const double gpl = std::exp(ranking_log_likelihood(r, theta));
        const double pl = std::exp(pl_log_likelihood(d, lambda));
        worst = std::max(worst, std::abs(gpl - pl) / pl);
    }
    std::vector<double> theta{1e-6, 2.3e-6, 0.6e-6, 4.1e-6, 1.7e-6};
    const int n = 1000000;
    int tied = 0;
    for (int i = 0; i < n; ++i) tied += simulate_event(theta, oracle::iota_ids(5), Direction::standard, rng).bucket_count() < 5;
    const double freq = static_cast<double>(tied) / n;
    report(6, "Plackett-Luce limit", worst < 1e-4 && freq < 1e-4,
           "max relative difference " + fmt("%.2e", worst) + " (tol 1e-4); tie frequency " + fmt("%.2e", freq) +
               " over 1e6 events (limit 1e-4)");
}

void criterion_generative() {
    Rng rng(7);
    const int n = 1000000;
    int ties = 0;
    std::vector<double> half{0.5, 0.5};
    for (int i = 0; i < n; ++i) ties += simulate_event(half, oracle::iota_ids(2), Direction::standard, rng).bucket_count() == 1;
    const double tie_freq = static_cast<double>(ties) / n;
    const double tie_z = (tie_freq - 1.0 / 3) / std::sqrt((1.0 / 3) * (2.0 / 3) / n);

    std::vector<double> theta{0.2, 0.3, 0.5};
    auto p = first_place_prob(theta, oracle::iota_ids(3));
    std::vector<int> sole(3, 0);
    for (int i = 0; i < n; ++i) {
        auto ev = simulate_event(theta, oracle::iota_ids(3), Direction::standard, rng);
        if (ev.leaders() == 1) ++sole[ev.order[0]];
    }
    double worst_z = 0.0;
    for (int k = 0; k < 3; ++k)
        worst_z = std::max(worst_z, std::abs(static_cast<double>(sole[k]) / n - p[k]) / std::sqrt(p[k] * (1 - p[k]) / n));
    report(7, "generative/analytic agreement", std::abs(tie_z) <= 3 && worst_z <= 3,
           "pair tie frequency " + fmt("%.5f", tie_freq) + " (z " + fmt("%.2f", tie_z) +
               "); K=3 sole-winner max |z| " + fmt("%.2f", worst_z) + " (limit 3)");
}

Dataset random_em_dataset(Rng& rng) {
    const std::size_t K = 2 + static_cast<std::size_t>(rng.uniform() * 9);
    std::vector<double> truth(K);
    for (auto& t : truth) t = 0.1 + 0.8 * rng.uniform();
    Dataset d{oracle::numbered_entities(K), {}};
    const int n = 5 + static_cast<int>(rng.uniform() * 40);
    for (int i = 0; i < n; ++i) {
        const double kind = rng.uniform();
        const std::size_t size = kind < 0.3 ? 2 : 2 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(K - 1));
        auto ids = oracle::iota_ids(K);
        for (std::size_t a = 0; a < size; ++a) {
            auto b = a + static_cast<std::size_t>(rng.uniform() * static_cast<double>(K - a));
            std::swap(ids[a], ids[std::min(b, K - 1)]);
        }
        ids.resize(size);
        auto r = simulate_event(truth, ids, Direction::standard, rng).to_ranking();
        if (kind > 0.7 && r.bucket_count() > 2) r = truncate_top(r, 1 + static_cast<std::size_t>(rng.uniform() * 2));
        d.rankings.push_back(r);
    }
    return d;
}

void criterion_em_ascent() {
    Rng rng(8);
    int decreases = 0, interior = 0;
    double worst_grad = 0.0, worst_stop_grad = 0.0, worst_drop = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        auto d = random_em_dataset(rng);
        const std::size_t K = d.num_entities();
        PriorSpec prior = PriorSpec::uniform(K);
        if (rep % 2 == 1)
            for (std::size_t k = 0; k < K; ++k) {
                prior.a[k] = 1 + 2 * rng.uniform();
                prior.b[k] = 1 + 2 * rng.uniform();
            }
        ThetaVector init(K);
        for (auto& t : init) t = 0.05 + 0.9 * rng.uniform();
        auto r = em_fit_general(d, prior, EmConfig{}, init);
        for (std::size_t t = 1; t < r.log_posterior_trace.size(); ++t) {
            const double drop = r.log_posterior_trace[t - 1] - r.log_posterior_trace[t];
            worst_drop = std::max(worst_drop, drop);
            decreases += drop > 1e-10;
        }
        const bool inside = r.converged && !r.any_degenerate() &&
                            std::all_of(r.theta.begin(), r.theta.end(), [](double t) { return t > 1e-6 && t < 0.999; });
        if (!inside) continue;
        ++interior;
        for (double g : oracle::fd_gradient(d, prior, r.theta)) worst_stop_grad = std::max(worst_stop_grad, std::abs(g));
        EmConfig tight;
        tight.tolerance = 1e-26;
        tight.max_iterations = 1000000;
        auto mode = em_fit_general(d, prior, tight, r.theta);
        for (double g : oracle::fd_gradient(d, prior, mode.theta)) worst_grad = std::max(worst_grad, std::abs(g));
    }
    report(8, "EM monotone ascent", decreases == 0 && worst_grad < 1e-6 && interior > 0,
           "100 datasets, " + std::to_string(decreases) + " decreasing steps (largest drop " + fmt("%.1e", worst_drop) +
               "); " + std::to_string(interior) + " interior modes, max |gradient| at the fixed point " +
               fmt("%.2e", worst_grad) + " (tol 1e-6; " + fmt("%.1e", worst_stop_grad) +
               " at the default stopping point)");
}

void criterion_conjugacy() {
    PriorSpec prior{{1.0, 0.7, 2.0, 3.5}, {1.0, 1.5, 0.3, 8.0}};
    std::vector<long> wins{3, 0, 12, 40};
    std::vector<std::uint64_t> exposure{10, 4, 15, 200};
    Rng rng(9);
    const int n = 100000;
    std::vector<std::vector<double>> draws(4);
    std::vector<double> theta(4);
    for (int i = 0; i < n; ++i) {
        sample_theta(prior, wins, exposure, theta, rng);
        for (int k = 0; k < 4; ++k) draws[k].push_back(theta[k]);
    }
    double worst = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double a = prior.a[k] + static_cast<double>(wins[k]);
        const double b = prior.b[k] + static_cast<double>(exposure[k]) - static_cast<double>(wins[k]);
        const double mean = a / (a + b);
        const double var = a * b / ((a + b) * (a + b) * (a + b + 1));
        double m = 0.0;
        for (double x : draws[k]) m += x;
        m /= n;
        double v = 0.0, v2 = 0.0;
        for (double x : draws[k]) {
            const double dev = (x - m) * (x - m);
            v += dev;
            v2 += dev * dev;
        }
        v /= n;
        const double var_se = std::sqrt((v2 / n - v * v) / n);
        worst = std::max({worst, std::abs(m - mean) / std::sqrt(var / n), std::abs(v - var) / var_se});
    }
    report(9, "sampler conjugacy", worst <= 3,
           "max |z| of Beta mean and variance over 4 parameters, 1e5 draws: " + fmt("%.2f", worst) + " (limit 3)");
}

void criterion_scale() {
    const auto start = Clock::now();
    auto synth = synthetic_top_m_dataset(SyntheticSpec{}, 7);
    std::size_t largest = 0;
    for (const auto& r : synth.data.rankings) largest = std::max(largest, r.size());
    GibbsConfig cfg;
    cfg.iterations = 10000;
    cfg.chains = 4;
    cfg.seed = 11;
    auto s = run_chains(synth.data, PriorSpec::uniform(synth.data.num_entities()), cfg);
    auto sum = summarize(s);
    const double secs = seconds_since(start);
    const double min_ess = *std::min_element(sum.ess.begin(), sum.ess.end());
    report(10, "golf-scale smoke test", secs < 1800 && min_ess >= 1000,
           "K=" + std::to_string(synth.data.num_entities()) + ", " + std::to_string(synth.data.rankings.size()) +
               " events, largest field " + std::to_string(largest) + ", 4 chains x 1e4 iterations in " +
               fmt("%.1f", secs) + " s (limit 1800), min ESS " + fmt("%.0f", min_ess) + " (limit 1000)");
}

void criterion_bell() {
    const auto b5 = ordered_bell(5), b10 = ordered_bell(10);
    report(11, "ordered Bell numbers", b5 == 541 && b10 == 102247563,
           "ordered_bell(5)=" + std::to_string(b5) + ", ordered_bell(10)=" + std::to_string(b10));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(std::vector<std::string> args, std::string& out) {
    args.insert(args.begin(), "gpl");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    const int code = gpl::cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
    out = o.str();
    return code;
}

void criterion_determinism() {
    const fs::path root = fs::temp_directory_path() / ("gpl_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string pudd = std::string(GPL_DATA_DIR) + "/puddings.txt";
    const std::string illus = std::string(GPL_DATA_DIR) + "/illustrative.txt";
    {
        std::ofstream(root / "theta.txt") << "1 0.5\n2 0.4\n3 0.3\n4 0.2\n5 0.1\n";
    }
    const std::string theta = (root / "theta.txt").string();

    // Each run writes into its own directory; stdout is compared after
    // stripping the "wrote <path>" lines that name that directory.
    auto commands = [&](const fs::path& dir) {
        const auto samples = (dir / "gibbs/samples.csv").string();
        const auto rev_samples = (dir / "rev/samples.csv").string();
        return std::vector<std::vector<std::string>>{
            {"fit-em", "--data", pudd, "--out", (dir / "em").string()},
            {"fit-em", "--data", pudd, "--model", "reverse-gpl", "--out", (dir / "em_rev").string()},
            {"fit-gibbs", "--data", pudd, "--iters", "1000", "--seed", "3", "--out", (dir / "gibbs").string()},
            {"fit-gibbs", "--data", pudd, "--iters", "1000", "--seed", "3", "--sampler", "paired", "--model",
             "reverse-gpl", "--out", (dir / "rev").string()},
            {"summarize", "--samples", samples, "--exhaustive", "--out", (dir / "sum").string()},
            {"summarize", "--samples", rev_samples, "--out", (dir / "sum_rev").string()},
            {"predict", "--samples", samples, "--sims", "20000", "--seed", "4", "--out", (dir / "pred").string()},
            {"predict", "--samples", rev_samples, "--field", "2,5,6", "--sims", "20000", "--out", (dir / "pred_rev").string()},
            {"simulate", "--samples", samples, "--sims", "20000", "--observed", "3", "--out", (dir / "sim").string()},
            {"loglik", "--data", illus, "--theta", theta, "--out", (dir / "ll").string()},
            {"loglik", "--data", pudd, "--samples", samples, "--out", (dir / "pw").string()},
            {"bell", "7"},
        };
    };
    auto strip = [](const std::string& s) {
        std::istringstream in(s);
        std::string line, kept;
        while (std::getline(in, line))
            if (line.rfind("wrote ", 0) != 0) kept += line + '\n';
        return kept;
    };
    std::map<std::string, std::vector<std::string>> stdout_of;
    const std::vector<std::pair<std::string, const char*>> runs{{"a", "1"}, {"b", "1"}, {"c", "4"}};
    for (const auto& [name, threads] : runs) {
        setenv("GPL_THREADS", threads, 1);
        for (const auto& cmd : commands(root / name)) {
            std::string out;
            run_cli(cmd, out);
            stdout_of[name].push_back(strip(out));
        }
    }
    unsetenv("GPL_THREADS");

    std::size_t files = 0, mismatched = 0;
    for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), root / "a");
        const auto ref = slurp(entry.path());
        ++files;
        for (const char* other : {"b", "c"})
            if (slurp(root / other / rel) != ref) ++mismatched;
    }
    std::size_t stdout_mismatch = 0;
    for (std::size_t i = 0; i < stdout_of["a"].size(); ++i)
        for (const char* other : {"b", "c"}) stdout_mismatch += stdout_of[other][i] != stdout_of["a"][i];
    fs::remove_all(root);
    report(12, "determinism", files >= 11 && mismatched == 0 && stdout_mismatch == 0,
           std::to_string(commands(root).size()) + " commands run three times (GPL_THREADS 1, 1, 4): " +
               std::to_string(files) + " output files, " + std::to_string(mismatched) + " differing; " +
               std::to_string(stdout_mismatch) + " differing stdout");
}

}  // namespace

int main() {
    const auto start = Clock::now();
    criterion_map(1, false);
    criterion_map(2, true);
    auto runs = criterion_gibbs();
    criterion_orders(runs);
    criterion_oracle();
    criterion_pl_limit();
    criterion_generative();
    criterion_em_ascent();
    criterion_conjugacy();
    criterion_scale();
    criterion_bell();
    criterion_determinism();
    std::printf("%d of 12 criteria failed (%.1f s)\n", failures, seconds_since(start));
    return failures == 0 ? 0 : 1;
}
