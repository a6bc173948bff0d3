#pragma once

#include <cstdint>

#include "shingledate/corpus.hpp"

namespace shingledate {

// Drifting-vocabulary corpus generator for desk-scale experiments. Each
// document gets a date uniform over the range and draws its words, with a
// Zipf-like frequency skew, from a vocabulary window of `vocab_size` words
// whose start slides by `drift_rate` words per year. Documents written close
// in time therefore share vocabulary (and shingles); documents far apart
// share less, none at all once drift has moved the window entirely.
// drift_rate 0 makes resemblance independent of date. date_jitter shifts
// each document's window by a uniform offset in [-jitter, +jitter] years, so
// a document's language only approximately reflects its date; it puts a
// noise floor under any dating method.
struct SyntheticSpec {
    int n_documents = 0;
    int date_lo = 0;  // inclusive years
    int date_hi = 0;
    int vocab_size = 0;
    double drift_rate = 0.0;  // vocabulary turnover per year
    int length_lo = 0;  // tokens per document, inclusive
    int length_hi = 0;
    std::uint64_t seed = 0;
    double zipf_exponent = 1.05;  // word-frequency skew within the window
    double date_jitter = 0.0;     // years of per-document window noise

    void validate() const;
};

// Deterministic in its parameters (including the seed): identical inputs
// produce identical corpora on every platform and thread count.
Corpus generate_synthetic(const SyntheticSpec& spec);

}  // namespace shingledate
