#include "shingledate/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "shingledate/error.hpp"
#include "shingledate/parallel.hpp"

namespace shingledate {

void HeatmapParams::validate() const {
    if (!(zero_floor >= 0.0 && zero_floor < clip_high && clip_high <= 1.0))
        throw InvalidInput("heatmap thresholds must satisfy "
                           "0 <= zero_floor < clip_high <= 1");
    if (!(white_threshold > 0.0 && white_threshold < 1.0))
        throw InvalidInput("white_threshold must lie in (0, 1)");
    if (group_size < 1) throw InvalidInput("group_size must be >= 1");
}

namespace {

std::vector<std::string> ids_by_date(const Corpus& corpus,
                                     const char* which) {
    if (corpus.empty())
        throw InvalidInput(std::string("heatmap: empty ") + which + " corpus");
    std::vector<const Document*> docs;
    docs.reserve(corpus.size());
    for (const Document& doc : corpus.documents()) {
        if (!doc.dated())
            throw InvalidInput(std::string("heatmap: undated ") + which +
                               " document: " + doc.id);
        docs.push_back(&doc);
    }
    std::sort(docs.begin(), docs.end(),
              [](const Document* a, const Document* b) {
                  if (*a->date != *b->date) return *a->date < *b->date;
                  return a->id < b->id;
              });
    std::vector<std::string> ids;
    ids.reserve(docs.size());
    for (const Document* doc : docs) ids.push_back(doc->id);
    return ids;
}

}  // namespace

HeatmapImage render_heatmap(const Corpus& validation, const Corpus& training,
                            const DistanceStore& store, int order,
                            const HeatmapParams& params, unsigned threads) {
    params.validate();
    const std::vector<std::string> row_ids = ids_by_date(validation,
                                                         "validation");
    const std::vector<std::string> col_ids = ids_by_date(training,
                                                         "training");

    const auto group_size = static_cast<std::size_t>(params.group_size);
    const std::size_t n_groups =
        std::max<std::size_t>(1, col_ids.size() / group_size);

    // training doc (by store candidate index) -> column group and group size
    std::vector<std::size_t> group_of(store.candidate_ids().size(),
                                      static_cast<std::size_t>(-1));
    std::vector<double> group_count(n_groups, 0.0);
    {
        std::size_t ci = 0;
        for (const std::string& id : col_ids) {
            const std::size_t group =
                std::min(ci / group_size, n_groups - 1);  // last absorbs
            group_count[group] += 1.0;
            ++ci;
            // a training document absent from the candidate universe has
            // zero resemblance to every row and only affects group size
            const auto& candidates = store.candidate_ids();
            const auto it = std::lower_bound(candidates.begin(),
                                             candidates.end(), id);
            if (it != candidates.end() && *it == id)
                group_of[static_cast<std::size_t>(it - candidates.begin())] =
                    group;
        }
    }

    HeatmapImage image;
    image.rows = row_ids.size();
    image.cols = n_groups;
    image.pixels.assign(image.rows * image.cols, 0);

    parallel_for(image.rows, threads, [&](std::size_t r) {
        std::vector<double> sums(n_groups, 0.0);
        // pairs absent from the store have resemblance 0 and contribute
        // nothing to the group sums
        for (const DistanceStore::Entry& entry :
             store.entries(row_ids[r], order)) {
            const std::size_t group = group_of[entry.candidate];
            if (group == static_cast<std::size_t>(-1)) continue;
            double v = 1.0 - entry.distance;
            if (v > params.clip_high) v = params.clip_high;
            if (v < params.zero_floor) v = 0.0;
            sums[group] += v;
        }
        double row_max = 0.0;
        for (std::size_t g = 0; g < n_groups; ++g) {
            sums[g] /= group_count[g];
            row_max = std::max(row_max, sums[g]);
        }
        for (std::size_t g = 0; g < n_groups; ++g) {
            const double v = row_max > 0.0 ? sums[g] / row_max : 0.0;
            double x = (v - params.white_threshold) /
                       (1.0 - params.white_threshold);
            x = std::clamp(x, 0.0, 1.0);
            image.pixels[r * n_groups + g] =
                static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - x)));
        }
    });
    return image;
}

void write_pgm(std::ostream& os, const HeatmapImage& image) {
    os << "P5\n" << image.cols << ' ' << image.rows << "\n255\n";
    os.write(reinterpret_cast<const char*>(image.pixels.data()),
             static_cast<std::streamsize>(image.pixels.size()));
}

}  // namespace shingledate
