#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "shingledate/corpus.hpp"

namespace shingledate {

using Fingerprint = std::uint64_t;

// Joins the words of a shingle before hashing; cannot occur inside a
// normalized token, so distinct word tuples never collide by concatenation.
inline constexpr char kShingleSeparator = '\x1f';

// The distinct order-k shingles of one document, held as sorted 64-bit
// fingerprints so intersection and union sizes fall out of a linear merge.
struct ShingleSet {
    int order = 0;
    std::vector<Fingerprint> fingerprints;  // ascending, unique

    std::size_t count() const { return fingerprints.size(); }
};

// Resemblance distances for one document pair, one value per shingle order.
struct DistanceVector {
    std::vector<int> orders;
    std::vector<double> values;  // each in [0, 1], parallel to orders
};

// Stable 64-bit hash of k consecutive words: FNV-1a over the separator-joined
// words, followed by an avalanche finalizer. Identical across runs and
// platforms.
Fingerprint fingerprint_shingle(const std::string* words, std::size_t k);

// Distinct length-k consecutive word subsequences, fingerprinted. Requires
// k >= 1 and at least k tokens.
ShingleSet extract_shingles(const std::vector<std::string>& tokens, int k);

// 1 - |intersection| / |union| of two same-order shingle sets.
double resemblance_distance(const ShingleSet& a, const ShingleSet& b);

// The same distance computed on literal word-tuple sets, with no hashing
// anywhere on the path. Kept behind the same contract as the fingerprint
// route so the two can be checked against each other bit for bit.
double exact_resemblance_distance(const std::vector<std::string>& tokens_a,
                                  const std::vector<std::string>& tokens_b,
                                  int k);

// Componentwise resemblance distance at each order.
DistanceVector distance_vector(const std::vector<ShingleSet>& sets_a,
                               const std::vector<ShingleSet>& sets_b);
DistanceVector distance_vector(const Document& a, const Document& b,
                               const std::vector<int>& orders);

// Sparse resemblance dump: one line `id_i TAB id_j TAB k TAB resemblance`
// per pair and order, resemblance to 6 significant digits, zero-resemblance
// pairs omitted. Targets and candidates are walked in sorted-id order, so
// output bytes do not depend on the thread count. Documents too short for an
// order are skipped at that order.
void write_resemblance_tsv(std::ostream& os, const Corpus& targets,
                           const Corpus& candidates,
                           const std::vector<int>& orders,
                           unsigned threads = 1);

// Within-corpus variant: each unordered pair appears once (id_i < id_j).
void write_resemblance_tsv(std::ostream& os, const Corpus& corpus,
                           const std::vector<int>& orders,
                           unsigned threads = 1);

}  // namespace shingledate
