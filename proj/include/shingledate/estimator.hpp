#pragma once

#include <string>
#include <vector>

#include "shingledate/corpus.hpp"
#include "shingledate/neighbors.hpp"
#include "shingledate/shingle.hpp"

namespace shingledate {

// K(x) = exp(-x), or the indicator of x <= 1 (boxcar). Both are nonnegative
// and nonincreasing on the positive half-line with K(0) = 1.
enum class Kernel { exponential, boxcar };

// Kernel choice plus one bandwidth per shingle order. A bandwidth of
// +infinity removes its order's factor entirely (the factor becomes K(0));
// at least one bandwidth must stay finite.
struct KernelConfig {
    Kernel kernel = Kernel::exponential;
    std::vector<double> bandwidths;
    int m = 5;  // nominal nearest-neighbor count per order

    void validate() const;
};

struct Estimate {
    double value = 0.0;
    int effective_neighbors = 0;  // candidates that carried positive weight
    bool fell_back = false;       // no positive weight; value is the
                                  // candidate-set mean date
    double weight_sum = 0.0;      // unnormalized; may underflow to 0 even
                                  // when the estimate itself is well defined
};

enum class RobustLoss { absolute, huber };

struct RobustSpec {
    RobustLoss loss = RobustLoss::absolute;
    double huber_c = 1.345;   // threshold on MAD-scaled residuals, in years
    double tolerance = 1e-6;  // years
    int max_iterations = 100;

    void validate() const;
};

// Product over orders of K(d_k / h_k). Orders in `d` must match the config's
// bandwidth count.
double kernel_weight(const DistanceVector& d, const KernelConfig& cfg);

// Weighted mean of the pool members' dates, weights from the kernel applied
// to the stored distances (absent pairs count as distance 1). With an empty
// pool or zero total weight the estimate falls back to the mean date of the
// dated set (target excluded) and sets fell_back. The exponential kernel is
// evaluated with a shifted exponent so the weighted mean survives bandwidths
// that would underflow the raw weights.
Estimate impute_date(const std::string& target, const CandidatePool& pool,
                     const Corpus& dated, const DistanceStore& store,
                     const KernelConfig& cfg);

// Robust variants. Absolute loss gives the weighted lower median: the
// smallest candidate date whose cumulative weight, after sorting candidates
// by date, reaches half the total. Huber is solved by iteratively reweighted
// averaging at fixed MAD scale; running out of iterations throws
// ConvergenceError carrying the last iterate.
Estimate robust_impute(const std::string& target, const CandidatePool& pool,
                       const Corpus& dated, const DistanceStore& store,
                       const KernelConfig& cfg, const RobustSpec& spec);

}  // namespace shingledate
