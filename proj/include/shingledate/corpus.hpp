#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace shingledate {

// One normalized document: an ordered token sequence with an identifier and,
// for dated documents, a year.
struct Document {
    std::string id;
    std::optional<int> date;  // year; absent for undated documents
    std::vector<std::string> tokens;

    bool dated() const { return date.has_value(); }
};

// Documents keyed by unique id. Immutable once populated; insertion order is
// preserved for iteration.
class Corpus {
public:
    void add(Document doc);

    const Document& at(const std::string& id) const;
    const Document* find(const std::string& id) const;
    bool contains(const std::string& id) const { return find(id) != nullptr; }

    std::size_t size() const { return docs_.size(); }
    bool empty() const { return docs_.empty(); }
    const std::vector<Document>& documents() const { return docs_; }

    std::vector<std::string> sorted_ids() const;
    bool all_dated() const;
    std::size_t dated_count() const;

    Corpus dated_subset() const;
    Corpus undated_subset() const;

    // Mean year over dated documents, optionally leaving one id out.
    double mean_date(const std::string& excluded_id = {}) const;

private:
    std::vector<Document> docs_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct SplitSpec {
    double train_fraction = 1.0;
    double validation_fraction = 0.0;
    double test_fraction = 0.0;
    std::uint64_t seed = 0;

    void validate() const;  // each fraction in [0,1], sum 1 within 1e-9
};

struct SplitResult {
    Corpus train;
    Corpus validation;
    Corpus test;
};

// Normalizes raw text into the token sequence used for shingling:
//   1. each paired !...! span becomes the standalone token "#"
//      (an unpaired '!' counts as punctuation and is dropped),
//   2. every character that is neither a letter, a digit, '#', nor
//      whitespace is deleted,
//   3. case is preserved and repeated words are kept.
// Throws InvalidInput when nothing survives normalization.
std::vector<std::string> normalize_text(const std::string& raw);

// Manifest format: UTF-8, one record per line,
//   id TAB date TAB raw-text
// where date is a decimal year or empty (undated). Lines starting with '#'
// in column 0 are comments.
Corpus parse_manifest(std::istream& in);
Corpus load_manifest(const std::string& path);
void write_manifest(std::ostream& os, const Corpus& corpus);

// Seeded shuffle over the sorted ids, then contiguous slices. Validation and
// test sizes are the rounded fractions; the remainder goes to train.
// Every document must be dated.
SplitResult split_corpus(const Corpus& corpus, const SplitSpec& spec);

}  // namespace shingledate
