#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "shingledate/corpus.hpp"

namespace shingledate {

struct Neighbor {
    std::string id;
    double distance = 0.0;
};

// Candidate ids whose date feeds one target's estimate: the union over all
// orders of that order's m nearest nonzero-resemblance candidates.
struct CandidatePool {
    std::string target;
    std::vector<std::string> members;  // sorted, unique
    int nominal_m = 0;
    int effective_m = 0;               // == members.size(), <= r * nominal_m
};

// Sparse store of resemblance distances between a target corpus and a dated
// candidate corpus. Only pairs with nonzero resemblance (distance < 1) are
// kept; a document is never its own candidate. Per (target, order) the
// candidates are sorted ascending by distance with lexicographic id as the
// tie break, so nearest-m queries are list prefixes. Built once, then
// read-only and safe for concurrent queries.
class DistanceStore {
public:
    struct Entry {
        std::uint32_t candidate = 0;  // index into candidate_ids()
        double distance = 0.0;
    };

    static DistanceStore build(const Corpus& targets, const Corpus& candidates,
                               const std::vector<int>& orders,
                               unsigned threads = 1);

    // Ingests the sparse resemblance dump format. With mirror_pairs, each
    // line also adds the reversed pair (for dumps that wrote unordered pairs
    // once).
    static DistanceStore from_tsv(std::istream& in, bool mirror_pairs = false);

    const std::vector<int>& orders() const { return orders_; }
    const std::vector<std::string>& target_ids() const { return target_ids_; }
    const std::vector<std::string>& candidate_ids() const {
        return candidate_ids_;
    }
    bool has_target(const std::string& id) const;

    // Ascending (distance, candidate id); throws on unknown target or order.
    std::span<const Entry> entries(const std::string& target, int order) const;

    // Distance for one pair at one order; 1.0 when the pair is absent
    // (zero resemblance).
    double distance(const std::string& target, int order,
                    const std::string& candidate) const;

    // (id, order) pairs excluded because the document was too short.
    const std::vector<std::pair<std::string, int>>& skipped() const {
        return skipped_;
    }

    // Writes the sparse dump (targets in sorted order, orders ascending,
    // entries nearest first).
    void write_tsv(std::ostream& os) const;

private:
    std::size_t target_index(const std::string& id) const;
    std::size_t order_index(int order) const;
    std::size_t candidate_index(const std::string& id) const;

    std::vector<int> orders_;
    std::vector<std::string> target_ids_;     // sorted
    std::vector<std::string> candidate_ids_;  // sorted
    std::unordered_map<std::string, std::size_t> target_lookup_;
    std::unordered_map<std::string, std::size_t> candidate_lookup_;
    // lists_[target * orders + order], sorted by (distance, candidate)
    std::vector<std::vector<Entry>> lists_;
    // same entries sorted by candidate index, for point lookups
    std::vector<std::vector<Entry>> by_candidate_;
    std::vector<std::pair<std::string, int>> skipped_;
};

// Up to m nearest candidates at one order; fewer when fewer have nonzero
// resemblance. Strict size-m cut with lexicographic id tie break at the m-th
// position.
std::vector<Neighbor> nearest_m(const std::string& target, int order, int m,
                                const DistanceStore& store);

// Union of nearest_m over every order in the store.
CandidatePool candidate_pool(const std::string& target, int m,
                             const DistanceStore& store);

}  // namespace shingledate
