#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "shingledate/corpus.hpp"
#include "shingledate/error.hpp"
#include "shingledate/rng.hpp"

using namespace shingledate;

TEST_CASE("normalize_text strips punctuation and keeps case") {
    CHECK(normalize_text("Haec est, finalis; concordia") ==
          std::vector<std::string>{"Haec", "est", "finalis", "concordia"});
    CHECK(normalize_text("regis ... Regis") ==
          std::vector<std::string>{"regis", "Regis"});
}

TEST_CASE("normalize_text turns number spans into # tokens") {
    CHECK(normalize_text("in !xv! dies anno regni") ==
          std::vector<std::string>{"in", "#", "dies", "anno", "regni"});
    // adjacent to a word the span still becomes its own token
    CHECK(normalize_text("anno!xv!domini") ==
          std::vector<std::string>{"anno", "#", "domini"});
    // an unpaired '!' is ordinary punctuation
    CHECK(normalize_text("quid! est") ==
          std::vector<std::string>{"quid", "est"});
    CHECK(normalize_text("!xv! dies!") == std::vector<std::string>{"#", "dies"});
    // with three marks the first two pair, the last is dropped
    CHECK(normalize_text("ecce! quid !iii! est") ==
          std::vector<std::string>{"ecce", "#", "iii", "est"});
}

TEST_CASE("normalize_text keeps digits and number signs") {
    CHECK(normalize_text("anno 1237 # fine") ==
          std::vector<std::string>{"anno", "1237", "#", "fine"});
}

TEST_CASE("normalize_text rejects empty results") {
    CHECK_THROWS_AS(normalize_text(""), InvalidInput);
    CHECK_THROWS_AS(normalize_text(" ,;: !"), InvalidInput);
}

TEST_CASE("normalize_text is idempotent on its own output") {
    std::mt19937_64 rng(41);
    const std::string pieces[] = {"verbum", "Regis,",  "!xii!", "a;b",
                                  "7cum",   "(ad)",    "!",     "##",
                                  "quo-d",  "ad."};
    for (int trial = 0; trial < 200; ++trial) {
        std::string raw;
        const auto n = 1 + bounded_uniform(rng, 12);
        for (std::uint64_t i = 0; i < n; ++i) {
            if (i) raw += ' ';
            raw += pieces[bounded_uniform(rng, std::size(pieces))];
        }
        std::vector<std::string> tokens;
        try {
            tokens = normalize_text(raw);
        } catch (const InvalidInput&) {
            continue;  // everything stripped; nothing to re-normalize
        }
        std::string joined;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (i) joined += ' ';
            joined += tokens[i];
            CHECK_FALSE(tokens[i].empty());
        }
        CHECK(normalize_text(joined) == tokens);
    }
}

TEST_CASE("parse_manifest reads dated and undated records") {
    std::istringstream in(
        "# comment line\n"
        "00640214\t1237\tHaec est finalis concordia\n"
        "undoc01\t\tin curia domini\n");
    const Corpus corpus = parse_manifest(in);
    REQUIRE(corpus.size() == 2);
    CHECK(corpus.at("00640214").date == 1237);
    CHECK(corpus.at("00640214").tokens.size() == 4);
    CHECK_FALSE(corpus.at("undoc01").dated());
}

TEST_CASE("parse_manifest rejects duplicates and malformed lines") {
    {
        std::istringstream in("a\t1200\tverba hic\na\t1201\talia verba\n");
        CHECK_THROWS_WITH_AS(parse_manifest(in),
                             doctest::Contains("duplicate document id: a"),
                             InvalidInput);
    }
    {
        std::istringstream in("a\t1200\tverba hic\nno tabs here\n");
        CHECK_THROWS_WITH_AS(parse_manifest(in), doctest::Contains("line 2"),
                             InvalidInput);
    }
    {
        std::istringstream in("a\t12x0\tverba\n");
        CHECK_THROWS_AS(parse_manifest(in), InvalidInput);
    }
    {
        std::istringstream in("a\t-4\tverba\n");
        CHECK_THROWS_AS(parse_manifest(in), InvalidInput);
    }
    {
        // text normalizes to nothing
        std::istringstream in("a\t1200\t---\n");
        CHECK_THROWS_WITH_AS(parse_manifest(in), doctest::Contains("line 1"),
                             InvalidInput);
    }
}

TEST_CASE("manifest round trip") {
    std::istringstream in("a\t1200\tunum duo tria\nb\t\tquattuor quinque\n");
    const Corpus corpus = parse_manifest(in);
    std::ostringstream out;
    write_manifest(out, corpus);
    CHECK(out.str() == "a\t1200\tunum duo tria\nb\t\tquattuor quinque\n");
}

namespace {

Corpus dated_corpus(std::size_t n) {
    Corpus corpus;
    for (std::size_t i = 0; i < n; ++i) {
        Document doc;
        doc.id = "d" + std::to_string(100000 + i);
        doc.date = 1100 + static_cast<int>(i % 300);
        doc.tokens = {"verbum", std::to_string(i)};
        corpus.add(std::move(doc));
    }
    return corpus;
}

}  // namespace

TEST_CASE("split sizes follow rounded fractions with remainder to train") {
    const Corpus corpus = dated_corpus(3353);
    SplitSpec spec;
    spec.validation_fraction = 167.0 / 3353.0;
    spec.test_fraction = 152.0 / 3353.0;
    spec.train_fraction = 1.0 - spec.validation_fraction - spec.test_fraction;
    spec.seed = 20240101;
    const SplitResult split = split_corpus(corpus, spec);
    CHECK(split.train.size() == 3034);
    CHECK(split.validation.size() == 167);
    CHECK(split.test.size() == 152);
}

TEST_CASE("split is a deterministic disjoint partition") {
    const Corpus corpus = dated_corpus(101);
    SplitSpec spec;
    spec.train_fraction = 0.7;
    spec.validation_fraction = 0.2;
    spec.test_fraction = 0.1;
    spec.seed = 7;

    const SplitResult a = split_corpus(corpus, spec);
    const SplitResult b = split_corpus(corpus, spec);

    std::set<std::string> seen;
    for (const Corpus* part : {&a.train, &a.validation, &a.test})
        for (const Document& doc : part->documents())
            CHECK(seen.insert(doc.id).second);  // pairwise disjoint
    CHECK(seen.size() == corpus.size());        // union is the input

    CHECK(a.train.sorted_ids() == b.train.sorted_ids());
    CHECK(a.validation.sorted_ids() == b.validation.sorted_ids());
    CHECK(a.test.sorted_ids() == b.test.sorted_ids());

    spec.seed = 8;
    const SplitResult c = split_corpus(corpus, spec);
    CHECK(a.train.sorted_ids() != c.train.sorted_ids());
}

TEST_CASE("split edge cases") {
    const Corpus corpus = dated_corpus(10);
    SplitSpec all_train;
    const SplitResult split = split_corpus(corpus, all_train);
    CHECK(split.train.size() == 10);
    CHECK(split.validation.empty());
    CHECK(split.test.empty());

    SplitSpec bad;
    bad.train_fraction = 0.5;
    bad.validation_fraction = 0.2;
    bad.test_fraction = 0.2;
    CHECK_THROWS_AS(split_corpus(corpus, bad), InvalidInput);

    Corpus with_undated = dated_corpus(3);
    Document undated;
    undated.id = "u1";
    undated.tokens = {"sine", "anno"};
    with_undated.add(std::move(undated));
    CHECK_THROWS_AS(split_corpus(with_undated, all_train), InvalidInput);
}
