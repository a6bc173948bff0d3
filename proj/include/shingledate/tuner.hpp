#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "shingledate/corpus.hpp"
#include "shingledate/estimator.hpp"
#include "shingledate/neighbors.hpp"

namespace shingledate {

// Candidate bandwidths per order (strictly increasing, +infinity allowed as
// the last entry) and candidate neighbor counts.
struct BandwidthGrid {
    std::vector<std::vector<double>> per_order;
    std::vector<int> m_candidates;

    // 25 log-spaced bandwidths spanning [1e-4, 1] plus the infinity
    // sentinel per order; m in {5, 10, 20, 50}.
    static BandwidthGrid default_grid(std::size_t n_orders);

    void validate() const;
};

struct SurfacePoint {
    int m = 0;
    std::vector<double> bandwidths;
    double loss = 0.0;
};

struct TuneResult {
    int best_m = 0;
    std::vector<double> best_bandwidths;
    double cv_loss = 0.0;
    std::vector<SurfacePoint> loss_surface;  // grid evaluation order
};

// Predictive cross-validation loss: every training document is held out in
// turn, its date imputed from its own candidate pool over the remaining
// training documents, and the squared errors summed. Documents whose pool is
// empty contribute the training-mean fallback error; if every pool is empty
// the loss is undefined and an error is thrown. The store must be the
// train-by-train store (it never pairs a document with itself, which is what
// keeps the held-out document out of its own pool).
double cv_loss(const KernelConfig& cfg, const Corpus& train,
               const DistanceStore& store, unsigned threads = 1);

// Exhaustive search over m_candidates x the bandwidth grid's Cartesian
// product. Combinations with every bandwidth infinite are skipped (the
// kernel weight would be constant). Ties break toward smaller m, then
// componentwise smaller bandwidths.
//
// Reference optima from a corpus of ~3350 dated medieval charters, for
// calibration context: single-order runs found (m, h) of (10, 9.0e-3),
// (5, 6.7e-3) and (10, 2.0e-3) for orders 1, 2 and 3, with validation mean
// absolute errors of 13.1, 11.1 and 12.1 years against a 36.6-year
// mean-predictor baseline, and a held-out test error of 12.2 years at the
// order-2 optimum.
TuneResult tune(const Corpus& train, const BandwidthGrid& grid,
                const DistanceStore& store,
                Kernel kernel = Kernel::exponential, unsigned threads = 1);

// Loss-surface dump: `m TAB h_1 ... TAB h_r TAB loss`, with `inf` for the
// infinity sentinel.
void write_loss_surface(std::ostream& os, const TuneResult& result);

}  // namespace shingledate
