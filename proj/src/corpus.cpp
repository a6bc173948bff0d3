#include "shingledate/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "shingledate/error.hpp"
#include "shingledate/rng.hpp"

namespace shingledate {

void Corpus::add(Document doc) {
    if (doc.id.empty()) throw InvalidInput("document id is empty");
    auto [it, inserted] = index_.emplace(doc.id, docs_.size());
    if (!inserted) throw InvalidInput("duplicate document id: " + doc.id);
    docs_.push_back(std::move(doc));
}

const Document& Corpus::at(const std::string& id) const {
    if (const Document* doc = find(id)) return *doc;
    throw InvalidInput("unknown document id: " + id);
}

const Document* Corpus::find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &docs_[it->second];
}

std::vector<std::string> Corpus::sorted_ids() const {
    std::vector<std::string> ids;
    ids.reserve(docs_.size());
    for (const auto& doc : docs_) ids.push_back(doc.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

bool Corpus::all_dated() const {
    return std::all_of(docs_.begin(), docs_.end(),
                       [](const Document& d) { return d.dated(); });
}

std::size_t Corpus::dated_count() const {
    return static_cast<std::size_t>(
        std::count_if(docs_.begin(), docs_.end(),
                      [](const Document& d) { return d.dated(); }));
}

Corpus Corpus::dated_subset() const {
    Corpus out;
    for (const auto& doc : docs_)
        if (doc.dated()) out.add(doc);
    return out;
}

Corpus Corpus::undated_subset() const {
    Corpus out;
    for (const auto& doc : docs_)
        if (!doc.dated()) out.add(doc);
    return out;
}

double Corpus::mean_date(const std::string& excluded_id) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& doc : docs_) {
        if (!doc.dated() || doc.id == excluded_id) continue;
        sum += static_cast<double>(*doc.date);
        ++n;
    }
    if (n == 0) throw InvalidInput("no dated documents to average");
    return sum / static_cast<double>(n);
}

void SplitSpec::validate() const {
    const double fractions[] = {train_fraction, validation_fraction,
                                test_fraction};
    for (double f : fractions)
        if (!(f >= 0.0 && f <= 1.0))
            throw InvalidInput("split fractions must lie in [0, 1]");
    const double sum = train_fraction + validation_fraction + test_fraction;
    if (std::abs(sum - 1.0) > 1e-9)
        throw InvalidInput("split fractions must sum to 1");
}

std::vector<std::string> normalize_text(const std::string& raw) {
    // Pass 1: paired !...! spans become standalone '#' tokens; an unpaired
    // '!' is dropped like any other punctuation.
    std::string staged;
    staged.reserve(raw.size());
    std::size_t i = 0;
    while (i < raw.size()) {
        const char c = raw[i];
        if (c == '!') {
            const std::size_t close = raw.find('!', i + 1);
            if (close == std::string::npos) {
                ++i;
                continue;
            }
            staged += " # ";
            i = close + 1;
        } else {
            staged += c;
            ++i;
        }
    }

    // Pass 2: keep letters, digits, '#' and bytes outside ASCII (UTF-8
    // continuation); whitespace delimits tokens; everything else is deleted.
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    };
    for (const unsigned char c : staged) {
        if (c < 0x80 && std::isspace(c)) {
            flush();
            continue;
        }
        if (c >= 0x80 || std::isalnum(c) || c == '#')
            current += static_cast<char>(c);
    }
    flush();

    if (tokens.empty())
        throw InvalidInput("document is empty after normalization");
    return tokens;
}

namespace {

std::optional<int> parse_date_field(const std::string& field,
                                    std::size_t lineno) {
    if (field.empty()) return std::nullopt;
    int year = 0;
    const auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), year);
    if (ec != std::errc{} || ptr != field.data() + field.size() || year <= 0)
        throw InvalidInput("manifest line " + std::to_string(lineno) +
                           ": date must be a positive year, got '" + field +
                           "'");
    return year;
}

}  // namespace

Corpus parse_manifest(std::istream& in) {
    Corpus corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') continue;

        const std::size_t tab1 = line.find('\t');
        const std::size_t tab2 =
            tab1 == std::string::npos ? std::string::npos
                                      : line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos)
            throw InvalidInput("manifest line " + std::to_string(lineno) +
                               ": expected id<TAB>date<TAB>text");

        Document doc;
        doc.id = line.substr(0, tab1);
        if (doc.id.empty())
            throw InvalidInput("manifest line " + std::to_string(lineno) +
                               ": empty id");
        doc.date = parse_date_field(line.substr(tab1 + 1, tab2 - tab1 - 1),
                                    lineno);
        try {
            doc.tokens = normalize_text(line.substr(tab2 + 1));
        } catch (const InvalidInput& e) {
            throw InvalidInput("manifest line " + std::to_string(lineno) +
                               ": " + e.what());
        }
        corpus.add(std::move(doc));
    }
    return corpus;
}

Corpus load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open manifest: " + path);
    return parse_manifest(in);
}

void write_manifest(std::ostream& os, const Corpus& corpus) {
    for (const auto& doc : corpus.documents()) {
        os << doc.id << '\t';
        if (doc.date) os << *doc.date;
        os << '\t';
        for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
            if (i) os << ' ';
            os << doc.tokens[i];
        }
        os << '\n';
    }
}

SplitResult split_corpus(const Corpus& corpus, const SplitSpec& spec) {
    spec.validate();
    for (const auto& doc : corpus.documents())
        if (!doc.dated())
            throw InvalidInput("split requires dated documents; undated: " +
                               doc.id);

    std::vector<std::string> ids = corpus.sorted_ids();
    std::mt19937_64 rng(spec.seed);
    deterministic_shuffle(ids, rng);

    const auto n = static_cast<double>(ids.size());
    auto n_validation =
        static_cast<std::size_t>(std::llround(n * spec.validation_fraction));
    auto n_test =
        static_cast<std::size_t>(std::llround(n * spec.test_fraction));
    n_validation = std::min(n_validation, ids.size());
    n_test = std::min(n_test, ids.size() - n_validation);
    const std::size_t n_train = ids.size() - n_validation - n_test;

    SplitResult result;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const Document& doc = corpus.at(ids[i]);
        if (i < n_train)
            result.train.add(doc);
        else if (i < n_train + n_validation)
            result.validation.add(doc);
        else
            result.test.add(doc);
    }
    return result;
}

}  // namespace shingledate
