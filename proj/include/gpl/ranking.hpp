#pragma once

// Rank orderings with ties (bucket orders), possibly truncated to the top m
// positions, over a shared table of entity labels.
//
// A ranking stores the entities best-first in `order` together with a dense
// 1-based bucket index per position. Entities sharing a bucket index are tied.
// For a top-m ranking the unranked remainder occupies positions m+1..n and all
// of it sits in bucket (bucket[m-1] + 1).

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gpl {

using EntityId = std::uint32_t;

class EntityTable {
public:
    EntityTable() = default;
    explicit EntityTable(std::vector<std::string> labels);

    // Returns the id of `label`, adding it if unseen.
    EntityId intern(std::string_view label);
    std::optional<EntityId> find(std::string_view label) const;
    EntityId at(std::string_view label) const;  // throws std::out_of_range

    const std::string& label(EntityId id) const { return labels_.at(id); }
    const std::vector<std::string>& labels() const { return labels_; }
    std::size_t size() const { return labels_.size(); }

    bool operator==(const EntityTable& other) const { return labels_ == other.labels_; }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, EntityId> index_;
};

class Ranking {
public:
    // Builds a ranking from best-first buckets plus an (optionally empty)
    // unranked remainder. Throws std::invalid_argument on empty buckets,
    // duplicate entities or fewer than two competitors.
    static Ranking from_buckets(const std::vector<std::vector<EntityId>>& ranked,
                                const std::vector<EntityId>& unranked = {});

    // Builds from explicit (y, s, m). `bucket` must already be in canonical
    // dense form.
    Ranking(std::vector<EntityId> order, std::vector<int> bucket, std::size_t top);

    std::span<const EntityId> order() const { return order_; }
    std::span<const int> bucket() const { return bucket_; }
    std::size_t size() const { return order_.size(); }
    std::size_t top() const { return top_; }
    bool complete() const { return top_ == order_.size(); }

    // m* = min(m, n - 1)
    std::size_t truncated_top() const { return std::min(top_, order_.size() - 1); }
    // v = s at position m*: the number of counted stages.
    int stages() const { return bucket_[truncated_top() - 1]; }
    int bucket_count() const { return bucket_.back(); }
    // t_j = 1 when positions j and j+1 (0-based j) share a bucket.
    bool tied_with_next(std::size_t j) const { return bucket_[j] == bucket_[j + 1]; }

    // Positions [begin, end) holding bucket `b` (1-based).
    std::size_t bucket_begin(int b) const;
    std::size_t bucket_end(int b) const;

    // Entities of the ranked buckets, best first; the remainder is separate.
    std::vector<std::vector<EntityId>> ranked_buckets() const;
    std::span<const EntityId> unranked() const;

    bool operator==(const Ranking& other) const = default;

private:
    void validate() const;

    std::vector<EntityId> order_;
    std::vector<int> bucket_;
    std::size_t top_ = 0;
};

struct Dataset {
    EntityTable entities;
    std::vector<Ranking> rankings;

    std::size_t num_entities() const { return entities.size(); }
    bool all_paired() const;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Ranking file format: one observation per line, '>' between buckets, '='
// within a bucket, optional '|' followed by unranked competitors, '#'
// comments.
Dataset parse_dataset(std::string_view text);
Dataset read_dataset(const std::filesystem::path& path);
// Parses against an existing entity table (new labels are appended).
Dataset parse_dataset(std::string_view text, EntityTable entities);

std::string format_ranking(const Ranking& r, const EntityTable& entities);
std::string serialize(const Dataset& d);

// Sufficient statistics of the likelihood.
//   wins[k]         w_k: counted stages in which k is selected
//   lower[k]        d_k: total number of buckets ranked above k
//   appearances[k]  c_k
//   stages[i]       v_i
//   stage_start[i]  offsets into rankings[i].order(); stage j (0-based) has
//                   risk set order[stage_start[i][j] .. n_i)
struct SuffStats {
    std::vector<long> wins;
    std::vector<long> lower;
    std::vector<long> appearances;
    std::vector<int> stages;
    std::vector<std::vector<std::size_t>> stage_start;

    std::span<const EntityId> risk_set(const Dataset& d, std::size_t i, std::size_t j) const;
    std::size_t total_stages() const;
};

SuffStats compute_suffstats(const Dataset& d);

// Reverse ("bigger is better") transform of complete rankings:
// y' = rev(y), s' = s_n + 1 - rev(s). Throws std::invalid_argument on top-m data.
Ranking reverse_ranking(const Ranking& r);
Dataset reverse_dataset(const Dataset& d);

// Truncates a complete ranking to a top-q report: every bucket up to and
// including the one holding position q is kept, the rest become unranked.
Ranking truncate_top(const Ranking& r, std::size_t q);

// Number of bucket orders of k entities (Fubini numbers), 1 <= k <= 15.
std::uint64_t ordered_bell(int k);

}  // namespace gpl
