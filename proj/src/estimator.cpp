#include "shingledate/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shingledate/error.hpp"

namespace shingledate {

void KernelConfig::validate() const {
    if (bandwidths.empty()) throw InvalidInput("no bandwidths configured");
    bool any_finite = false;
    for (const double h : bandwidths) {
        if (!(h > 0.0)) throw InvalidInput("bandwidths must be positive");
        if (std::isfinite(h)) any_finite = true;
    }
    if (!any_finite)
        throw InvalidInput("at least one bandwidth must be finite");
    if (m < 1) throw InvalidInput("m must be >= 1");
}

void RobustSpec::validate() const {
    if (!(huber_c > 0.0)) throw InvalidInput("huber threshold must be > 0");
    if (!(tolerance > 0.0)) throw InvalidInput("tolerance must be > 0");
    if (max_iterations < 1) throw InvalidInput("max_iterations must be >= 1");
}

double kernel_weight(const DistanceVector& d, const KernelConfig& cfg) {
    cfg.validate();
    if (d.orders.size() != cfg.bandwidths.size() ||
        d.values.size() != d.orders.size())
        throw InvalidInput("distance vector length does not match bandwidths");
    // d/h is 0 when h is infinite, so that factor is K(0) = 1
    if (cfg.kernel == Kernel::exponential) {
        double exponent = 0.0;
        for (std::size_t i = 0; i < d.values.size(); ++i)
            exponent += d.values[i] / cfg.bandwidths[i];
        return std::exp(-exponent);
    }
    for (std::size_t i = 0; i < d.values.size(); ++i)
        if (d.values[i] / cfg.bandwidths[i] > 1.0) return 0.0;
    return 1.0;
}

namespace {

struct WeightedDate {
    double date = 0.0;
    // shifted weight: raw weight times a common positive constant, which the
    // estimators below are invariant to
    double weight = 0.0;
    double raw_weight = 0.0;
};

struct PoolWeights {
    std::vector<WeightedDate> candidates;  // pool order (sorted by id)
    double weight_total = 0.0;             // shifted
    double raw_total = 0.0;
    int positive = 0;
};

PoolWeights compute_pool_weights(const std::string& target,
                                 const CandidatePool& pool,
                                 const Corpus& dated,
                                 const DistanceStore& store,
                                 const KernelConfig& cfg) {
    const auto& orders = store.orders();
    if (cfg.bandwidths.size() != orders.size())
        throw InvalidInput("bandwidth count does not match store orders");

    PoolWeights out;
    out.candidates.reserve(pool.members.size());

    if (cfg.kernel == Kernel::exponential) {
        // work with exponents and shift by the minimum; exp(-(s - s_min))
        // never underflows for the nearest candidate
        std::vector<double> exponents;
        exponents.reserve(pool.members.size());
        double s_min = std::numeric_limits<double>::infinity();
        for (const std::string& id : pool.members) {
            const Document& doc = dated.at(id);
            if (!doc.dated())
                throw InvalidInput("pool candidate is undated: " + id);
            double s = 0.0;
            for (std::size_t oi = 0; oi < orders.size(); ++oi)
                s += store.distance(target, orders[oi], id) /
                     cfg.bandwidths[oi];
            exponents.push_back(s);
            s_min = std::min(s_min, s);
            out.candidates.push_back(
                WeightedDate{static_cast<double>(*doc.date), 0.0, 0.0});
        }
        for (std::size_t i = 0; i < exponents.size(); ++i) {
            const double w = std::exp(-(exponents[i] - s_min));
            out.candidates[i].weight = w;
            out.candidates[i].raw_weight = std::exp(-exponents[i]);
            out.weight_total += w;
            out.raw_total += out.candidates[i].raw_weight;
            if (w > 0.0) ++out.positive;
        }
        return out;
    }

    for (const std::string& id : pool.members) {
        const Document& doc = dated.at(id);
        if (!doc.dated())
            throw InvalidInput("pool candidate is undated: " + id);
        double w = 1.0;
        for (std::size_t oi = 0; oi < orders.size(); ++oi)
            if (store.distance(target, orders[oi], id) /
                    cfg.bandwidths[oi] >
                1.0) {
                w = 0.0;
                break;
            }
        out.candidates.push_back(
            WeightedDate{static_cast<double>(*doc.date), w, w});
        out.weight_total += w;
        out.raw_total += w;
        if (w > 0.0) ++out.positive;
    }
    return out;
}

Estimate fallback_estimate(const std::string& target, const Corpus& dated) {
    Estimate est;
    est.value = dated.mean_date(target);
    est.effective_neighbors = 0;
    est.fell_back = true;
    est.weight_sum = 0.0;
    return est;
}

void require_dated_set(const std::string& target, const Corpus& dated) {
    std::size_t n = dated.dated_count();
    const Document* self = dated.find(target);
    if (self != nullptr && self->dated()) --n;
    if (n == 0) throw InvalidInput("no dated documents to impute from");
}

// Smallest value whose cumulative weight reaches half the total, after
// sorting by value (the lower weighted median).
double weighted_lower_median(std::vector<WeightedDate> candidates,
                             double weight_total) {
    std::sort(candidates.begin(), candidates.end(),
              [](const WeightedDate& a, const WeightedDate& b) {
                  return a.date < b.date;
              });
    const double half = weight_total / 2.0;
    double cumulative = 0.0;
    for (const WeightedDate& c : candidates) {
        cumulative += c.weight;
        if (cumulative >= half) return c.date;
    }
    return candidates.back().date;  // numeric slack; total was positive
}

}  // namespace

Estimate impute_date(const std::string& target, const CandidatePool& pool,
                     const Corpus& dated, const DistanceStore& store,
                     const KernelConfig& cfg) {
    cfg.validate();
    require_dated_set(target, dated);
    if (pool.members.empty()) return fallback_estimate(target, dated);

    const PoolWeights weights =
        compute_pool_weights(target, pool, dated, store, cfg);
    if (!(weights.weight_total > 0.0))
        return fallback_estimate(target, dated);

    double numerator = 0.0;
    for (const WeightedDate& c : weights.candidates)
        numerator += c.weight * c.date;

    Estimate est;
    est.value = numerator / weights.weight_total;
    est.effective_neighbors = weights.positive;
    est.fell_back = false;
    est.weight_sum = weights.raw_total;
    return est;
}

Estimate robust_impute(const std::string& target, const CandidatePool& pool,
                       const Corpus& dated, const DistanceStore& store,
                       const KernelConfig& cfg, const RobustSpec& spec) {
    cfg.validate();
    spec.validate();
    require_dated_set(target, dated);
    if (pool.members.empty()) return fallback_estimate(target, dated);

    const PoolWeights weights =
        compute_pool_weights(target, pool, dated, store, cfg);
    if (!(weights.weight_total > 0.0))
        return fallback_estimate(target, dated);

    Estimate est;
    est.effective_neighbors = weights.positive;
    est.fell_back = false;
    est.weight_sum = weights.raw_total;

    const double median =
        weighted_lower_median(weights.candidates, weights.weight_total);
    if (spec.loss == RobustLoss::absolute) {
        est.value = median;
        return est;
    }

    // Huber: scale residuals by their weighted median absolute deviation,
    // taken about the initial median and held fixed, then iterate weighted
    // averages until the step falls under tolerance.
    std::vector<WeightedDate> absolute_residuals = weights.candidates;
    for (WeightedDate& c : absolute_residuals)
        c.date = std::abs(c.date - median);
    const double scale =
        weighted_lower_median(absolute_residuals, weights.weight_total);
    if (scale < 1e-12) {
        est.value = median;  // at least half the weight sits on the median
        return est;
    }

    double current = median;
    for (int iteration = 0; iteration < spec.max_iterations; ++iteration) {
        double numerator = 0.0;
        double denominator = 0.0;
        for (const WeightedDate& c : weights.candidates) {
            const double u = std::abs(c.date - current) / scale;
            const double huber = u <= spec.huber_c ? 1.0 : spec.huber_c / u;
            numerator += c.weight * huber * c.date;
            denominator += c.weight * huber;
        }
        const double next = numerator / denominator;
        const double step = std::abs(next - current);
        current = next;
        if (step < spec.tolerance) {
            est.value = current;
            return est;
        }
    }
    throw ConvergenceError(
        "huber imputation did not converge within " +
            std::to_string(spec.max_iterations) + " iterations for " + target,
        current);
}

}  // namespace shingledate
