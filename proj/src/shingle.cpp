#include "shingledate/shingle.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <set>

#include "shingledate/error.hpp"
#include "shingledate/parallel.hpp"

namespace shingledate {

Fingerprint fingerprint_shingle(const std::string* words, std::size_t k) {
    if (k == 0) throw InvalidInput("fingerprint of an empty shingle");
    // FNV-1a 64
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < k; ++i) {
        if (i) {
            h ^= static_cast<unsigned char>(kShingleSeparator);
            h *= 1099511628211ull;
        }
        for (const unsigned char c : words[i]) {
            h ^= c;
            h *= 1099511628211ull;
        }
    }
    // splitmix64 finalizer for avalanche
    h ^= h >> 30;
    h *= 0xbf58476d1ce4e5b9ull;
    h ^= h >> 27;
    h *= 0x94d049bb133111ebull;
    h ^= h >> 31;
    return h;
}

ShingleSet extract_shingles(const std::vector<std::string>& tokens, int k) {
    if (k < 1) throw InvalidInput("shingle order must be >= 1");
    const auto order = static_cast<std::size_t>(k);
    if (tokens.size() < order)
        throw InvalidInput("document too short for order-" +
                           std::to_string(k) + " shingles (" +
                           std::to_string(tokens.size()) + " tokens)");

    ShingleSet set;
    set.order = k;
    set.fingerprints.reserve(tokens.size() - order + 1);
    for (std::size_t t = 0; t + order <= tokens.size(); ++t)
        set.fingerprints.push_back(fingerprint_shingle(&tokens[t], order));
    std::sort(set.fingerprints.begin(), set.fingerprints.end());
    set.fingerprints.erase(
        std::unique(set.fingerprints.begin(), set.fingerprints.end()),
        set.fingerprints.end());
    return set;
}

namespace {

std::size_t intersection_size(const std::vector<Fingerprint>& a,
                              const std::vector<Fingerprint>& b) {
    std::size_t count = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib)
            ++ia;
        else if (*ib < *ia)
            ++ib;
        else {
            ++count;
            ++ia;
            ++ib;
        }
    }
    return count;
}

}  // namespace

double resemblance_distance(const ShingleSet& a, const ShingleSet& b) {
    if (a.order != b.order)
        throw InvalidInput("shingle order mismatch: " +
                           std::to_string(a.order) + " vs " +
                           std::to_string(b.order));
    if (a.fingerprints.empty() || b.fingerprints.empty())
        throw InvalidInput("resemblance of an empty shingle set");
    const std::size_t inter = intersection_size(a.fingerprints,
                                                b.fingerprints);
    const std::size_t uni = a.count() + b.count() - inter;
    return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

double exact_resemblance_distance(const std::vector<std::string>& tokens_a,
                                  const std::vector<std::string>& tokens_b,
                                  int k) {
    if (k < 1) throw InvalidInput("shingle order must be >= 1");
    const auto order = static_cast<std::size_t>(k);
    if (tokens_a.size() < order || tokens_b.size() < order)
        throw InvalidInput("document too short for order-" +
                           std::to_string(k) + " shingles");

    using Tuple = std::vector<std::string>;
    auto tuples = [order](const std::vector<std::string>& tokens) {
        std::set<Tuple> out;
        for (std::size_t t = 0; t + order <= tokens.size(); ++t)
            out.emplace(tokens.begin() + static_cast<std::ptrdiff_t>(t),
                        tokens.begin() + static_cast<std::ptrdiff_t>(t + order));
        return out;
    };
    const std::set<Tuple> sa = tuples(tokens_a);
    const std::set<Tuple> sb = tuples(tokens_b);

    std::size_t inter = 0;
    for (const Tuple& t : sa) inter += sb.count(t);
    const std::size_t uni = sa.size() + sb.size() - inter;
    return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

DistanceVector distance_vector(const std::vector<ShingleSet>& sets_a,
                               const std::vector<ShingleSet>& sets_b) {
    if (sets_a.size() != sets_b.size())
        throw InvalidInput("distance_vector: order count mismatch");
    DistanceVector d;
    d.orders.reserve(sets_a.size());
    d.values.reserve(sets_a.size());
    for (std::size_t i = 0; i < sets_a.size(); ++i) {
        d.orders.push_back(sets_a[i].order);
        d.values.push_back(resemblance_distance(sets_a[i], sets_b[i]));
    }
    return d;
}

DistanceVector distance_vector(const Document& a, const Document& b,
                               const std::vector<int>& orders) {
    std::vector<ShingleSet> sets_a;
    std::vector<ShingleSet> sets_b;
    sets_a.reserve(orders.size());
    sets_b.reserve(orders.size());
    for (const int k : orders) {
        sets_a.push_back(extract_shingles(a.tokens, k));
        sets_b.push_back(extract_shingles(b.tokens, k));
    }
    return distance_vector(sets_a, sets_b);
}

namespace {

// Per-document shingle sets for the requested orders; empty optional when
// the document is too short for that order.
struct ShingledDoc {
    const Document* doc = nullptr;
    std::vector<ShingleSet> sets;     // only the orders that fit
    std::vector<std::size_t> slots;   // sets index per order, npos if absent
};

constexpr std::size_t kNoSet = static_cast<std::size_t>(-1);

std::vector<ShingledDoc> shingle_corpus(const Corpus& corpus,
                                        const std::vector<int>& orders,
                                        unsigned threads) {
    std::vector<std::string> ids = corpus.sorted_ids();
    std::vector<ShingledDoc> out(ids.size());
    parallel_for(ids.size(), threads, [&](std::size_t i) {
        ShingledDoc& entry = out[i];
        entry.doc = &corpus.at(ids[i]);
        entry.slots.assign(orders.size(), kNoSet);
        for (std::size_t oi = 0; oi < orders.size(); ++oi) {
            const auto k = static_cast<std::size_t>(orders[oi]);
            if (entry.doc->tokens.size() < k) continue;
            entry.slots[oi] = entry.sets.size();
            entry.sets.push_back(
                extract_shingles(entry.doc->tokens, orders[oi]));
        }
    });
    return out;
}

void append_resemblance(std::string& buffer, const std::string& id_i,
                        const std::string& id_j, int order,
                        double resemblance) {
    char value[64];
    std::snprintf(value, sizeof(value), "%.6g", resemblance);
    buffer += id_i;
    buffer += '\t';
    buffer += id_j;
    buffer += '\t';
    buffer += std::to_string(order);
    buffer += '\t';
    buffer += value;
    buffer += '\n';
}

void validate_orders(const std::vector<int>& orders) {
    if (orders.empty()) throw InvalidInput("no shingle orders given");
    for (const int k : orders)
        if (k < 1) throw InvalidInput("shingle order must be >= 1");
}

}  // namespace

void write_resemblance_tsv(std::ostream& os, const Corpus& targets,
                           const Corpus& candidates,
                           const std::vector<int>& orders, unsigned threads) {
    validate_orders(orders);
    const auto target_docs = shingle_corpus(targets, orders, threads);
    const auto candidate_docs = shingle_corpus(candidates, orders, threads);

    std::vector<std::string> buffers(target_docs.size());
    parallel_for(target_docs.size(), threads, [&](std::size_t ti) {
        const ShingledDoc& t = target_docs[ti];
        std::string& buffer = buffers[ti];
        for (const ShingledDoc& c : candidate_docs) {
            if (c.doc->id == t.doc->id) continue;
            for (std::size_t oi = 0; oi < orders.size(); ++oi) {
                if (t.slots[oi] == kNoSet || c.slots[oi] == kNoSet) continue;
                const double d = resemblance_distance(t.sets[t.slots[oi]],
                                                      c.sets[c.slots[oi]]);
                if (d < 1.0)
                    append_resemblance(buffer, t.doc->id, c.doc->id,
                                       orders[oi], 1.0 - d);
            }
        }
    });
    for (const std::string& buffer : buffers) os << buffer;
}

void write_resemblance_tsv(std::ostream& os, const Corpus& corpus,
                           const std::vector<int>& orders, unsigned threads) {
    validate_orders(orders);
    const auto docs = shingle_corpus(corpus, orders, threads);

    std::vector<std::string> buffers(docs.size());
    parallel_for(docs.size(), threads, [&](std::size_t i) {
        const ShingledDoc& a = docs[i];
        std::string& buffer = buffers[i];
        for (std::size_t j = i + 1; j < docs.size(); ++j) {
            const ShingledDoc& b = docs[j];
            for (std::size_t oi = 0; oi < orders.size(); ++oi) {
                if (a.slots[oi] == kNoSet || b.slots[oi] == kNoSet) continue;
                const double d = resemblance_distance(a.sets[a.slots[oi]],
                                                      b.sets[b.slots[oi]]);
                if (d < 1.0)
                    append_resemblance(buffer, a.doc->id, b.doc->id,
                                       orders[oi], 1.0 - d);
            }
        }
    });
    for (const std::string& buffer : buffers) os << buffer;
}

}  // namespace shingledate
