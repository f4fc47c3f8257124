#include "gpl/ranking.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

namespace gpl {

// ---------------------------------------------------------------------------
// EntityTable

EntityTable::EntityTable(std::vector<std::string> labels) {
    for (auto& l : labels) {
        if (l.empty()) throw std::invalid_argument("empty entity label");
        if (index_.contains(l)) throw std::invalid_argument("duplicate entity label '" + l + "'");
        index_.emplace(l, static_cast<EntityId>(labels_.size()));
        labels_.push_back(std::move(l));
    }
}

EntityId EntityTable::intern(std::string_view label) {
    if (label.empty()) throw std::invalid_argument("empty entity label");
    std::string key(label);
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    auto id = static_cast<EntityId>(labels_.size());
    index_.emplace(key, id);
    labels_.push_back(std::move(key));
    return id;
}

std::optional<EntityId> EntityTable::find(std::string_view label) const {
    if (auto it = index_.find(std::string(label)); it != index_.end()) return it->second;
    return std::nullopt;
}

EntityId EntityTable::at(std::string_view label) const {
    if (auto id = find(label)) return *id;
    throw std::out_of_range("unknown entity '" + std::string(label) + "'");
}

// ---------------------------------------------------------------------------
// Ranking

Ranking::Ranking(std::vector<EntityId> order, std::vector<int> bucket, std::size_t top)
    : order_(std::move(order)), bucket_(std::move(bucket)), top_(top) {
    validate();
}

Ranking Ranking::from_buckets(const std::vector<std::vector<EntityId>>& ranked,
                              const std::vector<EntityId>& unranked) {
    std::vector<EntityId> order;
    std::vector<int> bucket;
    int b = 0;
    for (const auto& group : ranked) {
        if (group.empty()) throw std::invalid_argument("empty bucket");
        ++b;
        for (auto id : group) {
            order.push_back(id);
            bucket.push_back(b);
        }
    }
    if (b == 0) throw std::invalid_argument("ranking has no ranked bucket");
    const std::size_t top = order.size();
    for (auto id : unranked) {
        order.push_back(id);
        bucket.push_back(b + 1);
    }
    return Ranking(std::move(order), std::move(bucket), top);
}

void Ranking::validate() const {
    const std::size_t n = order_.size();
    if (bucket_.size() != n) throw std::invalid_argument("order and bucket lengths differ");
    if (n < 2) throw std::invalid_argument("a ranking needs at least two entities");
    if (top_ < 1 || top_ > n) throw std::invalid_argument("truncation level out of range");
    if (bucket_[0] != 1) throw std::invalid_argument("bucket indices must start at 1");
    for (std::size_t j = 1; j < n; ++j) {
        int step = bucket_[j] - bucket_[j - 1];
        if (step != 0 && step != 1)
            throw std::invalid_argument("bucket indices must be dense and non-decreasing");
    }
    if (top_ < n) {
        if (bucket_[top_] != bucket_[top_ - 1] + 1)
            throw std::invalid_argument("unranked remainder must start a new bucket");
        if (bucket_.back() != bucket_[top_])
            throw std::invalid_argument("unranked remainder must form a single bucket");
    }
    std::unordered_set<EntityId> seen;
    for (auto id : order_)
        if (!seen.insert(id).second) throw std::invalid_argument("duplicate entity in ranking");
}

std::size_t Ranking::bucket_begin(int b) const {
    return static_cast<std::size_t>(
        std::lower_bound(bucket_.begin(), bucket_.end(), b) - bucket_.begin());
}

std::size_t Ranking::bucket_end(int b) const {
    return static_cast<std::size_t>(
        std::upper_bound(bucket_.begin(), bucket_.end(), b) - bucket_.begin());
}

std::vector<std::vector<EntityId>> Ranking::ranked_buckets() const {
    std::vector<std::vector<EntityId>> out;
    for (std::size_t j = 0; j < top_; ++j) {
        if (j == 0 || bucket_[j] != bucket_[j - 1]) out.emplace_back();
        out.back().push_back(order_[j]);
    }
    return out;
}

std::span<const EntityId> Ranking::unranked() const {
    return std::span<const EntityId>(order_).subspan(top_);
}

bool Dataset::all_paired() const {
    return std::all_of(rankings.begin(), rankings.end(),
                       [](const Ranking& r) { return r.size() == 2; });
}

// ---------------------------------------------------------------------------
// Parsing

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

constexpr std::string_view kSpace = " \t\r\v\f";

std::string_view trim(std::string_view s) {
    auto b = s.find_first_not_of(kSpace);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(kSpace);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::vector<std::string_view> words(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        i = s.find_first_not_of(kSpace, i);
        if (i == std::string_view::npos) break;
        auto e = s.find_first_of(kSpace, i);
        if (e == std::string_view::npos) e = s.size();
        out.push_back(s.substr(i, e - i));
        i = e;
    }
    return out;
}

Ranking parse_line(std::string_view line, std::size_t lineno, EntityTable& entities) {
    auto halves = split(line, '|');
    if (halves.size() > 2) throw ParseError(lineno, "more than one '|' marker");

    std::vector<std::vector<std::string_view>> ranked;
    for (auto chunk : split(halves[0], '>')) {
        auto& group = ranked.emplace_back();
        for (auto tok : split(chunk, '=')) {
            auto label = trim(tok);
            if (label.empty()) throw ParseError(lineno, "empty bucket or missing label");
            if (words(label).size() != 1)
                throw ParseError(lineno, "labels in a bucket must be separated by '='");
            group.push_back(label);
        }
    }

    std::vector<std::string_view> rest;
    if (halves.size() == 2) {
        if (halves[1].find_first_of("=>") != std::string_view::npos)
            throw ParseError(lineno, "separators are not allowed after '|'");
        rest = words(halves[1]);
        if (rest.empty()) throw ParseError(lineno, "'|' must be followed by unranked competitors");
    }

    std::unordered_set<std::string_view> seen;
    auto check = [&](std::string_view label) {
        if (!seen.insert(label).second)
            throw ParseError(lineno, "duplicate entity '" + std::string(label) + "'");
    };
    std::vector<std::vector<EntityId>> ids;
    for (const auto& group : ranked) {
        auto& g = ids.emplace_back();
        for (auto label : group) {
            check(label);
            g.push_back(entities.intern(label));
        }
    }
    std::vector<EntityId> unranked;
    for (auto label : rest) {
        check(label);
        unranked.push_back(entities.intern(label));
    }
    if (seen.size() < 2) throw ParseError(lineno, "a ranking needs at least two entities");
    return Ranking::from_buckets(ids, unranked);
}

}  // namespace

Dataset parse_dataset(std::string_view text, EntityTable entities) {
    Dataset d{std::move(entities), {}};
    std::size_t lineno = 0;
    for (auto raw : split(text, '\n')) {
        ++lineno;
        auto line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        d.rankings.push_back(parse_line(line, lineno, d.entities));
    }
    return d;
}

Dataset parse_dataset(std::string_view text) { return parse_dataset(text, EntityTable{}); }

Dataset read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dataset(buf.str());
}

std::string format_ranking(const Ranking& r, const EntityTable& entities) {
    std::string out;
    auto order = r.order();
    auto bucket = r.bucket();
    for (std::size_t j = 0; j < r.top(); ++j) {
        if (j > 0) out += bucket[j] == bucket[j - 1] ? " = " : " > ";
        out += entities.label(order[j]);
    }
    if (!r.complete()) {
        out += " |";
        for (auto id : r.unranked()) {
            out += ' ';
            out += entities.label(id);
        }
    }
    return out;
}

std::string serialize(const Dataset& d) {
    std::string out;
    for (const auto& r : d.rankings) {
        out += format_ranking(r, d.entities);
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sufficient statistics

std::span<const EntityId> SuffStats::risk_set(const Dataset& d, std::size_t i,
                                              std::size_t j) const {
    return d.rankings.at(i).order().subspan(stage_start.at(i).at(j));
}

std::size_t SuffStats::total_stages() const {
    std::size_t n = 0;
    for (int v : stages) n += static_cast<std::size_t>(v);
    return n;
}

SuffStats compute_suffstats(const Dataset& d) {
    const std::size_t K = d.num_entities();
    SuffStats st;
    st.wins.assign(K, 0);
    st.lower.assign(K, 0);
    st.appearances.assign(K, 0);
    st.stages.reserve(d.rankings.size());
    st.stage_start.reserve(d.rankings.size());

    for (const auto& r : d.rankings) {
        const int v = r.stages();
        st.stages.push_back(v);
        auto& starts = st.stage_start.emplace_back();
        for (int j = 1; j <= v; ++j) starts.push_back(r.bucket_begin(j));

        auto order = r.order();
        auto bucket = r.bucket();
        for (std::size_t p = 0; p < r.size(); ++p) {
            const EntityId k = order[p];
            if (k >= K) throw std::out_of_range("ranking references an unknown entity");
            st.appearances[k] += 1;
            st.lower[k] += bucket[p] - 1;
            if (bucket[p] <= v) st.wins[k] += 1;
        }
    }
    return st;
}

// ---------------------------------------------------------------------------
// Transforms

Ranking reverse_ranking(const Ranking& r) {
    if (!r.complete())
        throw std::invalid_argument("cannot reverse a top-m ranking");
    std::vector<EntityId> order(r.order().rbegin(), r.order().rend());
    std::vector<int> bucket;
    bucket.reserve(r.size());
    const int last = r.bucket_count();
    for (auto it = r.bucket().rbegin(); it != r.bucket().rend(); ++it)
        bucket.push_back(last + 1 - *it);
    return Ranking(std::move(order), std::move(bucket), r.size());
}

Dataset reverse_dataset(const Dataset& d) {
    Dataset out{d.entities, {}};
    out.rankings.reserve(d.rankings.size());
    for (const auto& r : d.rankings) out.rankings.push_back(reverse_ranking(r));
    return out;
}

Ranking truncate_top(const Ranking& r, std::size_t q) {
    if (q < 1 || q > r.top()) throw std::invalid_argument("truncation position out of range");
    const int b = r.bucket()[q - 1];
    const std::size_t m = r.bucket_end(b);
    auto order = r.order();
    std::vector<EntityId> y(order.begin(), order.end());
    std::vector<int> s(r.bucket().begin(), r.bucket().end());
    for (std::size_t j = m; j < s.size(); ++j) s[j] = b + 1;
    return Ranking(std::move(y), std::move(s), m);
}

std::uint64_t ordered_bell(int k) {
    if (k < 1 || k > 15) throw std::out_of_range("ordered_bell: k must be in [1, 15]");
    std::vector<std::uint64_t> a(static_cast<std::size_t>(k) + 1, 0);
    a[0] = 1;
    for (int n = 1; n <= k; ++n) {
        std::uint64_t binom = 1;  // C(n, j)
        std::uint64_t sum = 0;
        for (int j = 1; j <= n; ++j) {
            binom = binom * static_cast<std::uint64_t>(n - j + 1) / static_cast<std::uint64_t>(j);
            sum += binom * a[static_cast<std::size_t>(n - j)];
        }
        a[static_cast<std::size_t>(n)] = sum;
    }
    return a[static_cast<std::size_t>(k)];
}

}  // namespace gpl
