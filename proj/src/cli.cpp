#include "gpl/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gpl/em.hpp"
#include "gpl/gibbs.hpp"
#include "gpl/posterior.hpp"
#include "gpl/predictive.hpp"
#include "gpl/ranking.hpp"
#include "gpl/samples.hpp"

namespace gpl::cli {

namespace {

// Failure attributable to the input files rather than the command line.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string data;
    std::string model = "gpl";
    double prior_a = 1.0;
    double prior_b = 1.0;
    std::string prior_file;
    std::uint64_t seed = 1;
    std::string out;

    std::size_t chains = 4;
    std::size_t iters = 10000;
    std::size_t burnin = 10;
    std::string sampler = "general";
    double psrf_threshold = 1.1;
    bool strict_psrf = false;

    double tol = 1e-16;
    std::size_t max_iter = 10000;

    std::string samples;
    std::vector<std::string> field;
    std::uint64_t sims = 10000;
    std::size_t max_playoffs = 100;
    long observed = -1;

    std::string theta;
    bool exhaustive = false;
    int k = 0;
};

std::string num(const char* spec, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

Direction direction_of(const Options& o) {
    return o.model == "reverse-gpl" ? Direction::reverse : Direction::standard;
}

Dataset load_data(const Options& o) {
    if (o.data.empty()) throw UsageError("--data is required");
    Dataset d;
    try {
        d = read_dataset(o.data);
    } catch (const ParseError& e) {
        throw DataError(o.data + ": " + e.what());
    } catch (const std::exception& e) {
        throw DataError(o.data + ": " + e.what());
    }
    if (direction_of(o) == Direction::reverse) {
        try {
            d = reverse_dataset(d);
        } catch (const std::invalid_argument& e) {
            throw DataError(o.data + ": " + e.what());
        }
    }
    return d;
}

PosteriorSamples load_samples(const Options& o) {
    if (o.samples.empty()) throw UsageError("--samples is required");
    std::ifstream in(o.samples, std::ios::binary);
    if (!in) throw DataError("cannot open " + o.samples);
    try {
        return PosteriorSamples::read_csv(in);
    } catch (const std::exception& e) {
        throw DataError(o.samples + ": " + e.what());
    }
}

PriorSpec load_prior(const Options& o, const EntityTable& entities) {
    if (!(o.prior_a > 0.0) || !(o.prior_b > 0.0)) throw UsageError("--prior-a and --prior-b must be positive");
    PriorSpec prior = PriorSpec::uniform(entities.size(), o.prior_a, o.prior_b);
    if (o.prior_file.empty()) return prior;
    std::ifstream in(o.prior_file);
    if (!in) throw DataError("cannot open " + o.prior_file);
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string label;
        double a = 0.0, b = 0.0;
        if (!(ss >> label)) continue;
        if (!(ss >> a >> b) || !(a > 0.0) || !(b > 0.0))
            throw DataError(o.prior_file + ": line " + std::to_string(lineno) + ": expected 'label a b'");
        auto id = entities.find(label);
        if (!id)
            throw DataError(o.prior_file + ": line " + std::to_string(lineno) + ": unknown entity '" + label + "'");
        prior.a[*id] = a;
        prior.b[*id] = b;
    }
    return prior;
}

std::vector<EntityId> resolve_field(const Options& o, const EntityTable& entities) {
    std::vector<EntityId> field;
    if (o.field.empty()) {
        for (std::size_t k = 0; k < entities.size(); ++k) field.push_back(static_cast<EntityId>(k));
        return field;
    }
    for (const auto& label : o.field) {
        auto id = entities.find(label);
        if (!id) throw DataError("--field: unknown entity '" + label + "'");
        if (std::find(field.begin(), field.end(), *id) != field.end())
            throw UsageError("--field: entity '" + label + "' listed twice");
        field.push_back(*id);
    }
    return field;
}

// Writes `content` to out-dir/name when --out is set.
void persist(const Options& o, const std::string& name, const std::string& content, std::ostream& out) {
    if (o.out.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(o.out, ec);
    const auto path = std::filesystem::path(o.out) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path.string());
    f << content;
    if (!f) throw DataError("cannot write " + path.string());
    out << "wrote " << path.string() << '\n';
}

std::string labels_of(const std::vector<EntityId>& ids, const EntityTable& entities) {
    std::string s;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) s += ' ';
        s += entities.label(ids[i]);
    }
    return s;
}

int cmd_fit_em(const Options& o, std::ostream& out) {
    const Dataset d = load_data(o);
    const PriorSpec prior = load_prior(o, d.entities);
    EmConfig cfg;
    cfg.tolerance = o.tol;
    cfg.max_iterations = o.max_iter;
    if (!(cfg.tolerance > 0.0)) throw UsageError("--tol must be positive");
    if (o.sampler == "paired") {
        if (!d.all_paired()) throw DataError(o.data + ": --sampler paired needs paired comparisons only");
        cfg.variant = EmVariant::paired;
    }
    EmResult r = em_fit(d, prior, cfg, ThetaVector(d.num_entities(), 0.5));
    const std::string report = em_report(r, d.entities);
    out << report;
    persist(o, "em_report.txt", report, out);
    if (r.any_degenerate() || d.num_entities() == 0) {
        out << "warning: mode on the boundary of the parameter space for the entities marked above\n";
        return degenerate;
    }
    return ok;
}

int cmd_fit_gibbs(const Options& o, std::ostream& out, std::ostream& err) {
    const Dataset d = load_data(o);
    const PriorSpec prior = load_prior(o, d.entities);
    GibbsConfig cfg;
    cfg.chains = o.chains;
    cfg.iterations = o.iters;
    cfg.burnin = o.burnin;
    cfg.seed = o.seed;
    cfg.sampler = o.sampler == "paired" ? SamplerKind::paired : SamplerKind::general;
    if (cfg.chains < 1 || cfg.iterations < 1) throw UsageError("--chains and --iters must be at least 1");
    if (cfg.sampler == SamplerKind::paired && !d.all_paired())
        throw DataError(o.data + ": --sampler paired needs paired comparisons only");

    const PosteriorSamples samples = run_chains(d, prior, cfg, direction_of(o));
    std::ostringstream csv;
    samples.write_csv(csv);
    persist(o, "samples.csv", csv.str(), out);

    if (samples.num_draws() < 10) {
        out << "fewer than 10 draws retained; no summary\n";
        return ok;
    }
    const PosteriorSummary s = summarize(samples);
    std::ostringstream sc;
    write_summary_csv(sc, s, d.entities);
    persist(o, "summary.csv", sc.str(), out);
    out << summary_table(s, d.entities);

    double worst = 0.0;
    for (double r : s.psrf)
        if (!std::isnan(r)) worst = std::max(worst, r);
    if (cfg.chains >= 2 && worst > o.psrf_threshold) {
        err << "warning: PSRF " << num("%.2f", worst) << " exceeds " << num("%.2f", o.psrf_threshold) << '\n';
        if (o.strict_psrf) return degenerate;
    }
    return ok;
}

int cmd_summarize(const Options& o, std::ostream& out) {
    const PosteriorSamples samples = load_samples(o);
    const PosteriorSummary s = summarize(samples);
    std::ostringstream sc;
    write_summary_csv(sc, s, samples.entities());
    persist(o, "summary.csv", sc.str(), out);
    out << summary_table(s, samples.entities());

    const auto subset = resolve_field(o, samples.entities());
    out << "total order: " << labels_of(aggregate_total_order(s.mean, subset, samples.direction()), samples.entities())
        << '\n';
    if (o.exhaustive) {
        if (subset.size() > kMaxExhaustiveEntities)
            throw UsageError("--exhaustive supports at most 8 entities; narrow it with --field");
        out << "modal order: "
            << labels_of(exhaustive_modal_order(samples, subset, samples.direction()), samples.entities()) << '\n';
    }
    if (samples.direction() == Direction::standard) {
        const auto p = posterior_first_place(samples, subset);
        out << "probability of a sole first place:\n";
        for (std::size_t i = 0; i < subset.size(); ++i)
            out << "  " << samples.entities().label(subset[i]) << ' ' << num("%.4f", p[i]) << '\n';
    }
    return ok;
}

int cmd_predict(const Options& o, std::ostream& out) {
    const PosteriorSamples samples = load_samples(o);
    const auto field = resolve_field(o, samples.entities());
    if (o.sims < 1) throw UsageError("--sims must be at least 1");
    const auto r = predictive_win_probs(samples, field, samples.direction(), o.sims, o.seed, o.max_playoffs);
    std::ostringstream csv;
    csv << "entity,win_prob,wins\n";
    for (std::size_t i = 0; i < field.size(); ++i)
        csv << samples.entities().label(field[i]) << ',' << num("%.6f", r.prob[i]) << ',' << r.wins[i] << '\n';
    out << csv.str();
    out << "# simulations=" << r.sims << " playoffs=" << r.counters.playoffs
        << " uniform_breaks=" << r.counters.uniform_breaks << '\n';
    persist(o, "win_probs.csv", csv.str(), out);
    return ok;
}

int cmd_simulate(const Options& o, std::ostream& out) {
    const PosteriorSamples samples = load_samples(o);
    const auto field = resolve_field(o, samples.entities());
    if (o.sims < 1) throw UsageError("--sims must be at least 1");
    const auto h = predictive_bucket_counts(samples, field, samples.direction(), o.sims, o.seed);
    std::ostringstream csv;
    csv << "value,count,frequency\n";
    for (std::size_t v = 1; v < h.counts.size(); ++v)
        csv << v << ',' << h.counts[v] << ',' << num("%.6f", h.probability(static_cast<long>(v))) << '\n';
    out << csv.str();
    if (o.observed >= 0) {
        std::uint64_t at_most = 0;
        for (std::size_t v = 0; v < h.counts.size() && static_cast<long>(v) <= o.observed; ++v) at_most += h.counts[v];
        out << "# observed=" << o.observed << " probability=" << num("%.6f", h.probability(o.observed))
            << " at_most=" << num("%.6f", static_cast<double>(at_most) / static_cast<double>(h.sims)) << '\n';
    }
    persist(o, "bucket_counts.csv", csv.str(), out);
    return ok;
}

ThetaVector load_theta(const std::string& path, const EntityTable& entities) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    ThetaVector theta(entities.size(), std::nan(""));
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string label;
        double t = 0.0;
        if (!(ss >> label)) continue;
        if (!(ss >> t) || !(t > 0.0 && t <= 1.0))
            throw DataError(path + ": line " + std::to_string(lineno) + ": expected 'label theta' with theta in (0, 1]");
        auto id = entities.find(label);
        if (!id) throw DataError(path + ": line " + std::to_string(lineno) + ": unknown entity '" + label + "'");
        theta[*id] = t;
    }
    for (std::size_t k = 0; k < theta.size(); ++k)
        if (std::isnan(theta[k]))
            throw DataError(path + ": no value for entity '" + entities.label(static_cast<EntityId>(k)) + "'");
    return theta;
}

int cmd_loglik(const Options& o, std::ostream& out) {
    const Dataset d = load_data(o);
    if (o.theta.empty() == o.samples.empty()) throw UsageError("loglik needs exactly one of --theta or --samples");
    if (!o.theta.empty()) {
        const ThetaVector theta = load_theta(o.theta, d.entities);
        const std::string text = "log-likelihood: " + num("%.12g", log_likelihood(d, theta)) + '\n';
        out << text;
        persist(o, "loglik.txt", text, out);
        return ok;
    }
    const PosteriorSamples samples = load_samples(o);
    std::vector<std::vector<double>> m;
    try {
        m = pointwise_log_likelihoods(d, samples);
    } catch (const std::invalid_argument& e) {
        throw DataError(e.what());
    }
    std::ostringstream csv;
    csv << "ranking";
    for (std::size_t t = 0; t < samples.num_draws(); ++t) csv << ",draw" << t + 1;
    csv << '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        csv << i + 1;
        for (double x : m[i]) csv << ',' << format_double(x);
        csv << '\n';
    }
    if (o.out.empty()) out << csv.str();
    persist(o, "pointwise_loglik.csv", csv.str(), out);
    return ok;
}

int cmd_bell(const Options& o, std::ostream& out) {
    if (o.k < 1 || o.k > 15) throw UsageError("k must be between 1 and 15");
    out << ordered_bell(o.k) << '\n';
    return ok;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Geometric Plackett-Luce models for rankings with ties", "gpl"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value file; command-line flags take precedence");

    app.add_option("--data", o.data, "ranking file");
    app.add_option("--model", o.model, "gpl or reverse-gpl")->check(CLI::IsMember({"gpl", "reverse-gpl"}));
    app.add_option("--prior-a", o.prior_a, "Beta prior a for every entity");
    app.add_option("--prior-b", o.prior_b, "Beta prior b for every entity");
    app.add_option("--prior-file", o.prior_file, "per-entity priors, lines 'label a b'");
    app.add_option("--seed", o.seed, "random seed");
    app.add_option("--out", o.out, "output directory");
    app.add_option("--chains", o.chains, "number of chains");
    app.add_option("--iters", o.iters, "retained iterations per chain");
    app.add_option("--burnin", o.burnin, "discarded iterations per chain");
    app.add_option("--sampler", o.sampler, "general or paired")->check(CLI::IsMember({"general", "paired"}));
    app.add_option("--psrf-threshold", o.psrf_threshold, "PSRF warning threshold");
    app.add_flag("--strict-psrf", o.strict_psrf, "exit with status 3 when the PSRF threshold is exceeded");
    app.add_option("--tol", o.tol, "EM tolerance on the mean squared change");
    app.add_option("--max-iter", o.max_iter, "EM iteration cap");
    app.add_option("--samples", o.samples, "posterior samples CSV");
    app.add_option("--field", o.field, "entity labels (comma separated)")->delimiter(',');
    app.add_option("--sims", o.sims, "number of simulations");
    app.add_option("--max-playoffs", o.max_playoffs, "play-off rounds before a uniform tie break");
    app.add_option("--observed", o.observed, "observed bucket count to score");
    app.add_option("--theta", o.theta, "parameter file, lines 'label theta'");
    app.add_flag("--exhaustive", o.exhaustive, "also search all total orders (at most 8 entities)");

    auto* fit_em = app.add_subcommand("fit-em", "posterior mode by EM");
    auto* fit_gibbs = app.add_subcommand("fit-gibbs", "posterior sampling by Gibbs");
    auto* summarize_cmd = app.add_subcommand("summarize", "summaries of a samples file");
    auto* predict = app.add_subcommand("predict", "predictive win probabilities");
    auto* simulate = app.add_subcommand("simulate", "predictive distribution of the bucket count");
    auto* loglik = app.add_subcommand("loglik", "log-likelihood at a parameter or per posterior draw");
    auto* bell = app.add_subcommand("bell", "number of bucket orders of k entities");
    bell->add_option("k", o.k, "number of entities")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream cli_out, cli_err;
        const int code = app.exit(e, cli_out, cli_err);
        out << cli_out.str();
        err << cli_err.str();
        return code == 0 ? ok : usage;
    }

    try {
        if (*fit_em) return cmd_fit_em(o, out);
        if (*fit_gibbs) return cmd_fit_gibbs(o, out, err);
        if (*summarize_cmd) return cmd_summarize(o, out);
        if (*predict) return cmd_predict(o, out);
        if (*simulate) return cmd_simulate(o, out);
        if (*loglik) return cmd_loglik(o, out);
        if (*bell) return cmd_bell(o, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return data;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return data;
    }
    return usage;
}

}  // namespace gpl::cli
