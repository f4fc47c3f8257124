#include "gpl/samples.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gpl {

PriorSpec PriorSpec::uniform(std::size_t K, double a, double b) {
    return PriorSpec{std::vector<double>(K, a), std::vector<double>(K, b)};
}

void PriorSpec::validate(std::size_t K) const {
    if (a.size() != K || b.size() != K)
        throw std::invalid_argument("prior has " + std::to_string(a.size()) + " entries, expected " +
                                    std::to_string(K));
    for (std::size_t k = 0; k < K; ++k)
        if (!(a[k] > 0.0) || !(b[k] > 0.0) || !std::isfinite(a[k]) || !std::isfinite(b[k]))
            throw std::invalid_argument("prior hyperparameters must be positive");
}

const char* to_string(SamplerKind s) { return s == SamplerKind::general ? "general" : "paired"; }
const char* to_string(Direction d) { return d == Direction::standard ? "gpl" : "reverse-gpl"; }

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

PosteriorSamples::PosteriorSamples(EntityTable entities, GibbsConfig config, PriorSpec prior,
                                   Direction direction)
    : entities_(std::move(entities)),
      config_(config),
      prior_(std::move(prior)),
      direction_(direction),
      values_(config.chains * config.iterations * entities_.size(), 0.0) {}

std::span<const double> PosteriorSamples::draw(std::size_t flat) const {
    const std::size_t K = num_entities();
    return std::span<const double>(values_).subspan(flat * K, K);
}

std::span<const double> PosteriorSamples::draw(std::size_t chain, std::size_t t) const {
    return draw(chain * iterations() + t);
}

std::span<double> PosteriorSamples::draw(std::size_t chain, std::size_t t) {
    const std::size_t K = num_entities();
    return std::span<double>(values_).subspan((chain * iterations() + t) * K, K);
}

double PosteriorSamples::at(std::size_t chain, std::size_t t, std::size_t k) const {
    return values_[(chain * iterations() + t) * num_entities() + k];
}

namespace {

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_double(v[i]);
    }
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s) {
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::runtime_error("samples file: bad number '" + s + "'");
    return x;
}

std::uint64_t parse_u64(const std::string& s) {
    std::uint64_t x = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::runtime_error("samples file: bad integer '" + s + "'");
    return x;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& cell : split_csv(s)) out.push_back(parse_double(cell));
    return out;
}

}  // namespace

void PosteriorSamples::write_csv(std::ostream& out) const {
    out << "# seed=" << config_.seed << '\n'
        << "# sampler=" << to_string(config_.sampler) << '\n'
        << "# chains=" << config_.chains << '\n'
        << "# iterations=" << config_.iterations << '\n'
        << "# burnin=" << config_.burnin << '\n'
        << "# model=" << to_string(direction_) << '\n'
        << "# prior_a=" << join(prior_.a) << '\n'
        << "# prior_b=" << join(prior_.b) << '\n';
    const auto& labels = entities_.labels();
    for (std::size_t k = 0; k < labels.size(); ++k) out << (k ? "," : "") << labels[k];
    out << '\n';
    const std::size_t K = num_entities();
    for (std::size_t f = 0; f < num_draws(); ++f) {
        for (std::size_t k = 0; k < K; ++k) {
            if (k) out << ',';
            out << format_double(values_[f * K + k]);
        }
        out << '\n';
    }
}

PosteriorSamples PosteriorSamples::read_csv(std::istream& in) {
    GibbsConfig cfg;
    PriorSpec prior;
    Direction direction = Direction::standard;
    bool have_chains = false;
    std::string line;
    std::vector<std::string> labels;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] != '#') {
            labels = split_csv(line);
            break;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto key = line.substr(1, eq - 1);
        key.erase(0, key.find_first_not_of(' '));
        const auto value = line.substr(eq + 1);
        if (key == "seed") cfg.seed = parse_u64(value);
        else if (key == "sampler") cfg.sampler = value == "paired" ? SamplerKind::paired : SamplerKind::general;
        else if (key == "chains") { cfg.chains = parse_u64(value); have_chains = true; }
        else if (key == "iterations") cfg.iterations = parse_u64(value);
        else if (key == "burnin") cfg.burnin = parse_u64(value);
        else if (key == "model") direction = value == "reverse-gpl" ? Direction::reverse : Direction::standard;
        else if (key == "prior_a") prior.a = parse_list(value);
        else if (key == "prior_b") prior.b = parse_list(value);
    }
    if (labels.empty()) throw std::runtime_error("samples file: missing header row");
    EntityTable table(labels);
    const std::size_t K = table.size();

    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_csv(line);
        if (cells.size() != K)
            throw std::runtime_error("samples file: row " + std::to_string(rows + 1) + " has " +
                                     std::to_string(cells.size()) + " columns, expected " +
                                     std::to_string(K));
        for (const auto& c : cells) {
            const double x = parse_double(c);
            if (!(x > 0.0 && x <= 1.0)) throw std::runtime_error("samples file: draw outside (0, 1]");
            values.push_back(x);
        }
        ++rows;
    }
    if (rows == 0) throw std::runtime_error("samples file: no draws");
    if (!have_chains || cfg.chains == 0 || rows % cfg.chains != 0) cfg.chains = 1;
    cfg.iterations = rows / cfg.chains;
    if (prior.a.size() != K || prior.b.size() != K) prior = PriorSpec::uniform(K);

    PosteriorSamples s(std::move(table), cfg, std::move(prior), direction);
    s.values_ = std::move(values);
    return s;
}

std::vector<std::vector<double>> pointwise_log_likelihoods(const Dataset& d,
                                                           const PosteriorSamples& samples) {
    const std::size_t K = d.num_entities();
    std::vector<std::size_t> column(K);
    for (std::size_t k = 0; k < K; ++k) {
        auto id = samples.entities().find(d.entities.label(static_cast<EntityId>(k)));
        if (!id)
            throw std::invalid_argument("entity '" + d.entities.label(static_cast<EntityId>(k)) +
                                        "' is missing from the samples");
        column[k] = *id;
    }
    const std::size_t N = samples.num_draws();
    std::vector<std::vector<double>> out(d.rankings.size(), std::vector<double>(N));
    std::vector<double> theta(K);
    for (std::size_t t = 0; t < N; ++t) {
        auto draw = samples.draw(t);
        for (std::size_t k = 0; k < K; ++k) theta[k] = draw[column[k]];
        for (std::size_t i = 0; i < d.rankings.size(); ++i)
            out[i][t] = ranking_log_likelihood(d.rankings[i], theta);
    }
    return out;
}

}  // namespace gpl
