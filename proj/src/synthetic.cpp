#include "shingledate/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "shingledate/error.hpp"
#include "shingledate/rng.hpp"

namespace shingledate {

void SyntheticSpec::validate() const {
    if (n_documents < 0) throw InvalidInput("n_documents must be >= 0");
    if (date_hi <= date_lo)
        throw InvalidInput("date range must be nondegenerate");
    if (vocab_size < 1) throw InvalidInput("vocab_size must be >= 1");
    if (drift_rate < 0.0) throw InvalidInput("drift_rate must be >= 0");
    if (length_lo < 1 || length_hi < length_lo)
        throw InvalidInput("document length range is invalid");
    if (!(zipf_exponent >= 0.0))
        throw InvalidInput("zipf_exponent must be >= 0");
    if (date_jitter < 0.0) throw InvalidInput("date_jitter must be >= 0");
}

Corpus generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();

    // cumulative Zipf weights over ranks within the active window
    std::vector<double> cumulative(static_cast<std::size_t>(spec.vocab_size));
    double total = 0.0;
    for (std::size_t rank = 0; rank < cumulative.size(); ++rank) {
        total += std::pow(static_cast<double>(rank + 1), -spec.zipf_exponent);
        cumulative[rank] = total;
    }
    for (double& c : cumulative) c /= total;

    std::mt19937_64 rng(spec.seed);
    const auto date_span =
        static_cast<std::uint64_t>(spec.date_hi - spec.date_lo) + 1;
    const auto length_span =
        static_cast<std::uint64_t>(spec.length_hi - spec.length_lo) + 1;

    int id_width = 1;
    for (int n = spec.n_documents; n >= 10; n /= 10) ++id_width;

    Corpus corpus;
    for (int i = 0; i < spec.n_documents; ++i) {
        const int date =
            spec.date_lo + static_cast<int>(bounded_uniform(rng, date_span));
        const auto length = static_cast<std::size_t>(
            spec.length_lo +
            static_cast<int>(bounded_uniform(rng, length_span)));
        const double jitter =
            spec.date_jitter > 0.0
                ? (2.0 * uniform01(rng) - 1.0) * spec.date_jitter
                : 0.0;
        const double effective_years = std::max(
            0.0, static_cast<double>(date - spec.date_lo) + jitter);
        const auto window_start = static_cast<std::uint64_t>(
            std::floor(spec.drift_rate * effective_years));

        Document doc;
        std::string id = std::to_string(i);
        doc.id = "syn" + std::string(
                             static_cast<std::size_t>(id_width) - id.size(),
                             '0') +
                 id;
        doc.date = date;
        doc.tokens.reserve(length);
        for (std::size_t t = 0; t < length; ++t) {
            const double u = uniform01(rng);
            const auto rank = static_cast<std::size_t>(
                std::lower_bound(cumulative.begin(), cumulative.end(), u) -
                cumulative.begin());
            doc.tokens.push_back(
                "w" + std::to_string(window_start +
                                     static_cast<std::uint64_t>(std::min(
                                         rank, cumulative.size() - 1))));
        }
        corpus.add(std::move(doc));
    }
    return corpus;
}

}  // namespace shingledate
