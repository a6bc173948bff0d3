#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "shingledate/corpus.hpp"
#include "shingledate/neighbors.hpp"

namespace shingledate {

// Grey-scale recipe for the validation-by-training resemblance image:
// resemblances above clip_high are clipped to it, values below zero_floor
// drop to zero, training documents are date-sorted and averaged in
// consecutive groups of group_size (the last group absorbs the remainder),
// each row is scaled so its maximum is 1, and values at or below
// white_threshold render white with a linear ramp to black at 1.
struct HeatmapParams {
    double clip_high = 0.3;
    double zero_floor = 0.1;
    int group_size = 5;
    double white_threshold = 0.8;

    void validate() const;
};

struct HeatmapImage {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> pixels;  // row-major

    std::uint8_t at(std::size_t r, std::size_t c) const {
        return pixels[r * cols + c];
    }
};

// One row per validation document (earliest date first), one column per
// training group. The store must cover the validation-by-training pairs at
// the requested order. Pixel bytes are identical for every thread count.
HeatmapImage render_heatmap(const Corpus& validation, const Corpus& training,
                            const DistanceStore& store, int order,
                            const HeatmapParams& params, unsigned threads = 1);

// Binary 8-bit grayscale PGM (magic P5, maxval 255).
void write_pgm(std::ostream& os, const HeatmapImage& image);

}  // namespace shingledate
