#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "shingledate/error.hpp"
#include "shingledate/rng.hpp"
#include "shingledate/shingle.hpp"
#include "shingledate/synthetic.hpp"

using namespace shingledate;

TEST_CASE("extract_shingles enumerates distinct windows") {
    const std::vector<std::string> abcd = {"a", "b", "c", "d"};
    CHECK(extract_shingles(abcd, 2).count() == 3);

    const std::vector<std::string> abab = {"a", "b", "a", "b"};
    CHECK(extract_shingles(abab, 2).count() == 2);

    CHECK_THROWS_AS(extract_shingles({"a", "b"}, 3), InvalidInput);
    CHECK_THROWS_AS(extract_shingles(abcd, 0), InvalidInput);
}

TEST_CASE("fingerprints are deterministic and separator-safe") {
    const std::vector<std::string> words = {"unum", "duo", "tria"};
    CHECK(fingerprint_shingle(words.data(), 3) ==
          fingerprint_shingle(words.data(), 3));

    // concatenation ambiguity is broken by the separator
    const std::vector<std::string> ab_c = {"ab", "c"};
    const std::vector<std::string> a_bc = {"a", "bc"};
    CHECK(fingerprint_shingle(ab_c.data(), 2) !=
          fingerprint_shingle(a_bc.data(), 2));
}

TEST_CASE("resemblance_distance on hand sets") {
    const auto make = [](std::vector<std::string> tokens) {
        return extract_shingles(tokens, 1);
    };
    const ShingleSet abc = make({"a", "b", "c"});
    const ShingleSet bcd = make({"b", "c", "d"});
    const ShingleSet xyz = make({"x", "y", "z"});

    CHECK(resemblance_distance(abc, abc) == 0.0);
    CHECK(resemblance_distance(abc, xyz) == 1.0);
    CHECK(resemblance_distance(abc, bcd) == 0.5);  // 1 - 2/4

    ShingleSet wrong_order = extract_shingles({"a", "b", "c"}, 2);
    CHECK_THROWS_AS(resemblance_distance(abc, wrong_order), InvalidInput);
}

TEST_CASE("distance_vector basics") {
    Document a;
    a.id = "a";
    a.tokens = {"unum", "duo", "tria", "quattuor"};
    Document b;
    b.id = "b";
    b.tokens = {"quinque", "sex", "septem", "octo"};

    const DistanceVector self = distance_vector(a, a, {1, 2, 3});
    CHECK(self.values == std::vector<double>{0.0, 0.0, 0.0});

    const DistanceVector disjoint = distance_vector(a, b, {1, 2, 3});
    CHECK(disjoint.values == std::vector<double>{1.0, 1.0, 1.0});

    Document too_short;
    too_short.id = "c";
    too_short.tokens = {"unum", "duo"};
    CHECK_THROWS_AS(distance_vector(a, too_short, {1, 2, 3}), InvalidInput);
}

TEST_CASE("document against its own first half matches the tuple oracle") {
    SyntheticSpec spec;
    spec.n_documents = 1;
    spec.date_lo = 1100;
    spec.date_hi = 1101;
    spec.vocab_size = 80;
    spec.length_lo = 120;
    spec.length_hi = 120;
    spec.seed = 99;
    const Corpus corpus = generate_synthetic(spec);
    const std::vector<std::string>& tokens =
        corpus.documents().front().tokens;
    const std::vector<std::string> half(tokens.begin(),
                                        tokens.begin() + 60);

    for (const int k : {1, 2, 3}) {
        const double via_fingerprints = resemblance_distance(
            extract_shingles(tokens, k), extract_shingles(half, k));
        CHECK(via_fingerprints == oracles::tuple_set_distance(tokens, half, k));
        CHECK(via_fingerprints ==
              exact_resemblance_distance(tokens, half, k));
    }
}

TEST_CASE("metric properties and oracle equality on random pairs") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 150; ++trial) {
        std::vector<std::string> a;
        std::vector<std::string> b;
        const auto vocab = 3 + bounded_uniform(rng, 40);
        const auto len_a = 5 + bounded_uniform(rng, 60);
        const auto len_b = 5 + bounded_uniform(rng, 60);
        for (std::uint64_t i = 0; i < len_a; ++i)
            a.push_back("w" + std::to_string(bounded_uniform(rng, vocab)));
        for (std::uint64_t i = 0; i < len_b; ++i)
            b.push_back("w" + std::to_string(bounded_uniform(rng, vocab)));

        const int k = 1 + static_cast<int>(bounded_uniform(rng, 3));
        const ShingleSet sa = extract_shingles(a, k);
        const ShingleSet sb = extract_shingles(b, k);

        const double dab = resemblance_distance(sa, sb);
        CHECK(dab == resemblance_distance(sb, sa));  // symmetry, exact
        CHECK(resemblance_distance(sa, sa) == 0.0);
        CHECK(dab >= 0.0);
        CHECK(dab <= 1.0);
        CHECK(dab == oracles::tuple_set_distance(a, b, k));
        CHECK(dab == exact_resemblance_distance(a, b, k));
    }
}

TEST_CASE("mean resemblance decreases with shingle order") {
    SyntheticSpec spec;
    spec.n_documents = 60;
    spec.date_lo = 1100;
    spec.date_hi = 1250;
    spec.vocab_size = 600;
    spec.drift_rate = 2.0;
    spec.length_lo = 80;
    spec.length_hi = 160;
    spec.seed = 5;
    const Corpus corpus = generate_synthetic(spec);
    const auto& docs = corpus.documents();

    double means[3] = {0.0, 0.0, 0.0};
    std::size_t pairs = 0;
    std::vector<std::vector<ShingleSet>> sets(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i)
        for (int k = 1; k <= 3; ++k)
            sets[i].push_back(extract_shingles(docs[i].tokens, k));
    for (std::size_t i = 0; i < docs.size(); ++i)
        for (std::size_t j = i + 1; j < docs.size(); ++j) {
            ++pairs;
            for (int k = 0; k < 3; ++k)
                means[k] += 1.0 - resemblance_distance(sets[i][k], sets[j][k]);
        }
    for (double& m : means) m /= double(pairs);
    CHECK(means[0] > means[1]);
    CHECK(means[1] > means[2]);
}

TEST_CASE("resemblance dump format") {
    const Corpus corpus = oracles::make_corpus({
        {"doc_a", 1200, "unum duo tria quattuor"},
        {"doc_b", 1210, "duo tria quattuor quinque"},
        {"doc_c", 1300, "sex septem octo novem"},
    });

    std::ostringstream within;
    write_resemblance_tsv(within, corpus, {1, 2});
    // a-b share 3 of 5 unigrams and 2 of 4 bigrams; c is disjoint from both
    CHECK(within.str() ==
          "doc_a\tdoc_b\t1\t0.6\n"
          "doc_a\tdoc_b\t2\t0.5\n");

    std::ostringstream cross;
    const Corpus targets = oracles::make_corpus({
        {"doc_b", 1210, "duo tria quattuor quinque"},
    });
    write_resemblance_tsv(cross, targets, corpus, {1});
    CHECK(cross.str() == "doc_b\tdoc_a\t1\t0.6\n");  // self pair omitted
}

TEST_CASE("six significant digits in the dump") {
    // 1/3 resemblance: 2 shared of 6 distinct unigrams
    const Corpus corpus = oracles::make_corpus({
        {"a", 1200, "p q r s"},
        {"b", 1210, "p q x y"},
    });
    std::ostringstream os;
    write_resemblance_tsv(os, corpus, {1});
    CHECK(os.str() == "a\tb\t1\t0.333333\n");
}
