#include "shingledate/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "shingledate/error.hpp"
#include "shingledate/parallel.hpp"

namespace shingledate {

BandwidthGrid BandwidthGrid::default_grid(std::size_t n_orders) {
    BandwidthGrid grid;
    std::vector<double> values;
    constexpr int kCount = 25;
    const double log_lo = std::log10(1e-4);
    const double log_hi = std::log10(1.0);
    for (int i = 0; i < kCount; ++i)
        values.push_back(std::pow(
            10.0, log_lo + (log_hi - log_lo) * i / double(kCount - 1)));
    values.push_back(std::numeric_limits<double>::infinity());
    grid.per_order.assign(n_orders, values);
    grid.m_candidates = {5, 10, 20, 50};
    return grid;
}

void BandwidthGrid::validate() const {
    if (per_order.empty()) throw InvalidInput("bandwidth grid has no orders");
    for (const auto& values : per_order) {
        if (values.empty())
            throw InvalidInput("bandwidth grid has an empty candidate list");
        for (const double h : values)
            if (!(h > 0.0))
                throw InvalidInput("grid bandwidths must be positive");
        for (std::size_t i = 1; i < values.size(); ++i)
            if (!(values[i] > values[i - 1]))
                throw InvalidInput(
                    "grid bandwidths must be strictly increasing");
    }
    if (m_candidates.empty()) throw InvalidInput("no m candidates");
    for (const int m : m_candidates)
        if (m < 1) throw InvalidInput("m candidates must be >= 1");
}

double cv_loss(const KernelConfig& cfg, const Corpus& train,
               const DistanceStore& store, unsigned threads) {
    cfg.validate();
    if (train.dated_count() < 2)
        throw InvalidInput("cross-validation needs at least 2 dated documents");
    for (const auto& doc : train.documents())
        if (!doc.dated())
            throw InvalidInput("training corpus has undated document: " +
                               doc.id);

    const auto& docs = train.documents();
    std::vector<double> errors(docs.size(), 0.0);
    std::vector<unsigned char> had_pool(docs.size(), 0);

    parallel_for(docs.size(), threads, [&](std::size_t i) {
        const Document& held_out = docs[i];
        const CandidatePool pool = candidate_pool(held_out.id, cfg.m, store);
        had_pool[i] = pool.members.empty() ? 0 : 1;
        const Estimate est =
            impute_date(held_out.id, pool, train, store, cfg);
        const double residual =
            static_cast<double>(*held_out.date) - est.value;
        errors[i] = residual * residual;
    });

    if (std::find(had_pool.begin(), had_pool.end(), 1) == had_pool.end())
        throw InvalidInput(
            "every held-out document has an empty candidate pool");

    double loss = 0.0;
    for (const double e : errors) loss += e;  // fixed order: thread-invariant
    return loss;
}

TuneResult tune(const Corpus& train, const BandwidthGrid& grid,
                const DistanceStore& store, Kernel kernel, unsigned threads) {
    grid.validate();
    if (grid.per_order.size() != store.orders().size())
        throw InvalidInput("grid order count does not match distance store");

    TuneResult result;
    double best = std::numeric_limits<double>::infinity();

    // m ascending, bandwidths in lexicographic order: keeping only strict
    // improvements realizes the smaller-m, smaller-h tie break
    for (const int m : grid.m_candidates) {
        std::vector<std::size_t> odometer(grid.per_order.size(), 0);
        while (true) {
            std::vector<double> bandwidths(grid.per_order.size());
            bool any_finite = false;
            for (std::size_t oi = 0; oi < odometer.size(); ++oi) {
                bandwidths[oi] = grid.per_order[oi][odometer[oi]];
                if (std::isfinite(bandwidths[oi])) any_finite = true;
            }
            if (any_finite) {
                KernelConfig cfg;
                cfg.kernel = kernel;
                cfg.bandwidths = bandwidths;
                cfg.m = m;
                const double loss = cv_loss(cfg, train, store, threads);
                result.loss_surface.push_back(
                    SurfacePoint{m, bandwidths, loss});
                if (loss < best) {
                    best = loss;
                    result.best_m = m;
                    result.best_bandwidths = bandwidths;
                    result.cv_loss = loss;
                }
            }
            // advance, last order fastest
            bool advanced = false;
            std::size_t oi = odometer.size();
            while (oi > 0) {
                --oi;
                if (++odometer[oi] < grid.per_order[oi].size()) {
                    advanced = true;
                    break;
                }
                odometer[oi] = 0;
            }
            if (!advanced) break;
        }
    }
    if (result.loss_surface.empty())
        throw InvalidInput("grid contains no valid bandwidth combination");
    return result;
}

namespace {

void append_bandwidth(std::string& line, double h) {
    if (std::isinf(h)) {
        line += "inf";
        return;
    }
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.10g", h);
    line += buffer;
}

}  // namespace

void write_loss_surface(std::ostream& os, const TuneResult& result) {
    char buffer[64];
    for (const SurfacePoint& point : result.loss_surface) {
        std::string line = std::to_string(point.m);
        for (const double h : point.bandwidths) {
            line += '\t';
            append_bandwidth(line, h);
        }
        std::snprintf(buffer, sizeof(buffer), "%.10g", point.loss);
        line += '\t';
        line += buffer;
        line += '\n';
        os << line;
    }
}

}  // namespace shingledate
