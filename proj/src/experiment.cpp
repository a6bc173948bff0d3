#include "shingledate/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include "shingledate/error.hpp"
#include "shingledate/parallel.hpp"
#include "shingledate/shingle.hpp"

namespace shingledate {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

int to_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const int parsed = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw InvalidInput("config: " + key + " expects an integer, got '" +
                           value + "'");
    }
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double parsed = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw InvalidInput("config: " + key + " expects a number, got '" +
                           value + "'");
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw InvalidInput("config: " + key + " expects true or false, got '" +
                       value + "'");
}

std::vector<int> to_int_list(const std::string& key,
                             const std::string& value) {
    std::vector<int> out;
    std::stringstream stream(value);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(to_int(key, item));
    }
    if (out.empty())
        throw InvalidInput("config: " + key + " expects a list of integers");
    return out;
}

SyntheticSpec& ensure_synthetic(ExperimentConfig& config) {
    if (!config.synthetic) {
        SyntheticSpec spec;
        spec.n_documents = 200;
        spec.date_lo = 1100;
        spec.date_hi = 1399;
        spec.vocab_size = 1200;
        spec.drift_rate = 6.0;
        spec.length_lo = 120;
        spec.length_hi = 240;
        config.synthetic = spec;
    }
    return *config.synthetic;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
    ExperimentConfig config;
    bool split_seed_set = false;
    std::optional<std::uint64_t> master_seed;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw InvalidInput("config line " + std::to_string(lineno) +
                               ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw InvalidInput("config line " + std::to_string(lineno) +
                               ": empty key");

        if (key == "manifest") {
            config.manifest_path = value;
        } else if (key == "synthetic.n_documents") {
            ensure_synthetic(config).n_documents = to_int(key, value);
        } else if (key == "synthetic.date_lo") {
            ensure_synthetic(config).date_lo = to_int(key, value);
        } else if (key == "synthetic.date_hi") {
            ensure_synthetic(config).date_hi = to_int(key, value);
        } else if (key == "synthetic.vocab_size") {
            ensure_synthetic(config).vocab_size = to_int(key, value);
        } else if (key == "synthetic.drift_rate") {
            ensure_synthetic(config).drift_rate = to_double(key, value);
        } else if (key == "synthetic.length_lo") {
            ensure_synthetic(config).length_lo = to_int(key, value);
        } else if (key == "synthetic.length_hi") {
            ensure_synthetic(config).length_hi = to_int(key, value);
        } else if (key == "synthetic.zipf_exponent") {
            ensure_synthetic(config).zipf_exponent = to_double(key, value);
        } else if (key == "synthetic.date_jitter") {
            ensure_synthetic(config).date_jitter = to_double(key, value);
        } else if (key == "seed") {
            master_seed = static_cast<std::uint64_t>(to_int(key, value));
        } else if (key == "split_seed") {
            config.split.seed = static_cast<std::uint64_t>(to_int(key, value));
            split_seed_set = true;
        } else if (key == "orders") {
            config.orders = to_int_list(key, value);
        } else if (key == "train_fraction") {
            config.split.train_fraction = to_double(key, value);
        } else if (key == "validation_fraction") {
            config.split.validation_fraction = to_double(key, value);
        } else if (key == "test_fraction") {
            config.split.test_fraction = to_double(key, value);
        } else if (key == "kernel") {
            if (value == "exponential")
                config.kernel = Kernel::exponential;
            else if (value == "boxcar")
                config.kernel = Kernel::boxcar;
            else
                throw InvalidInput("config: unknown kernel '" + value + "'");
        } else if (key == "estimator") {
            if (value == "mean")
                config.estimator = EstimatorKind::weighted_mean;
            else if (value == "median")
                config.estimator = EstimatorKind::local_median;
            else if (value == "huber")
                config.estimator = EstimatorKind::huber;
            else
                throw InvalidInput("config: unknown estimator '" + value +
                                   "'");
        } else if (key == "huber_c") {
            config.huber_c = to_double(key, value);
        } else if (key == "grid.h_min") {
            config.grid_h_min = to_double(key, value);
        } else if (key == "grid.h_max") {
            config.grid_h_max = to_double(key, value);
        } else if (key == "grid.h_count") {
            config.grid_h_count = to_int(key, value);
        } else if (key == "grid.include_inf") {
            config.grid_include_inf = to_bool(key, value);
        } else if (key == "grid.m") {
            config.grid_m = to_int_list(key, value);
        } else if (key == "heatmap.order") {
            config.heatmap_order = to_int(key, value);
        } else if (key == "heatmap.clip_high") {
            config.heatmap.clip_high = to_double(key, value);
        } else if (key == "heatmap.zero_floor") {
            config.heatmap.zero_floor = to_double(key, value);
        } else if (key == "heatmap.group_size") {
            config.heatmap.group_size = to_int(key, value);
        } else if (key == "heatmap.white_threshold") {
            config.heatmap.white_threshold = to_double(key, value);
        } else if (key == "dump_resemblances") {
            config.dump_resemblances = to_bool(key, value);
        } else if (key == "threads") {
            const int threads = to_int(key, value);
            if (threads < 0)
                throw InvalidInput("config: threads must be >= 0");
            config.threads = static_cast<unsigned>(threads);
        } else if (key == "output_dir") {
            config.output_dir = value;
        } else {
            throw InvalidInput("config line " + std::to_string(lineno) +
                               ": unknown key '" + key + "'");
        }
    }
    if (master_seed) {
        if (!split_seed_set) config.split.seed = *master_seed;
        if (config.synthetic) config.synthetic->seed = *master_seed;
    }
    return config;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config: " + path);
    return parse(in);
}

BandwidthGrid ExperimentConfig::make_grid() const {
    if (!(grid_h_min > 0.0) || !(grid_h_max >= grid_h_min))
        throw InvalidInput("config: grid bandwidth range is invalid");
    if (grid_h_count < 1)
        throw InvalidInput("config: grid.h_count must be >= 1");

    std::vector<double> values;
    if (grid_h_count == 1) {
        values.push_back(grid_h_min);
    } else {
        const double log_lo = std::log10(grid_h_min);
        const double log_hi = std::log10(grid_h_max);
        for (int i = 0; i < grid_h_count; ++i)
            values.push_back(std::pow(
                10.0,
                log_lo + (log_hi - log_lo) * i / double(grid_h_count - 1)));
    }
    if (grid_include_inf)
        values.push_back(std::numeric_limits<double>::infinity());

    BandwidthGrid grid;
    grid.per_order.assign(orders.size(), values);
    grid.m_candidates = grid_m;
    return grid;
}

void ExperimentConfig::validate() const {
    if (manifest_path.empty() == !synthetic.has_value())
        throw InvalidInput(
            "config must name exactly one corpus source: manifest or "
            "synthetic.*");
    if (orders.empty()) throw InvalidInput("config: no shingle orders");
    for (std::size_t i = 0; i < orders.size(); ++i) {
        if (orders[i] < 1)
            throw InvalidInput("config: shingle orders must be >= 1");
        if (i > 0 && orders[i] <= orders[i - 1])
            throw InvalidInput("config: orders must be strictly increasing");
    }
    split.validate();
    if (synthetic) synthetic->validate();
    heatmap.validate();
    if (heatmap_order != 0 &&
        std::find(orders.begin(), orders.end(), heatmap_order) ==
            orders.end())
        throw InvalidInput("config: heatmap.order is not one of the orders");
    make_grid().validate();
}

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const InvalidInput& e) {
        throw InvalidInput(std::string(name) + ": " + e.what());
    } catch (const Error& e) {
        throw Error(std::string(name) + ": " + e.what());
    } catch (const std::exception& e) {
        throw Error(std::string(name) + ": " + e.what());
    }
}

struct ImputedSet {
    std::map<std::string, Estimate> estimates;
    SetSummary summary;
};

ImputedSet impute_set(const Corpus& targets, const Corpus& train,
                      const DistanceStore& store, const KernelConfig& cfg,
                      EstimatorKind kind, double huber_c, unsigned threads) {
    const auto& docs = targets.documents();
    std::vector<Estimate> estimates(docs.size());
    parallel_for(docs.size(), threads, [&](std::size_t i) {
        const CandidatePool pool = candidate_pool(docs[i].id, cfg.m, store);
        switch (kind) {
            case EstimatorKind::weighted_mean:
                estimates[i] = impute_date(docs[i].id, pool, train, store, cfg);
                break;
            case EstimatorKind::local_median: {
                RobustSpec spec;
                spec.loss = RobustLoss::absolute;
                estimates[i] =
                    robust_impute(docs[i].id, pool, train, store, cfg, spec);
                break;
            }
            case EstimatorKind::huber: {
                RobustSpec spec;
                spec.loss = RobustLoss::huber;
                spec.huber_c = huber_c;
                estimates[i] =
                    robust_impute(docs[i].id, pool, train, store, cfg, spec);
                break;
            }
        }
    });

    ImputedSet out;
    out.summary.count = docs.size();
    if (!docs.empty()) {
        out.summary.effective_m_min = estimates[0].effective_neighbors;
        out.summary.effective_m_max = estimates[0].effective_neighbors;
    }
    double effective_sum = 0.0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        out.estimates.emplace(docs[i].id, estimates[i]);
        effective_sum += estimates[i].effective_neighbors;
        out.summary.effective_m_min = std::min(
            out.summary.effective_m_min, estimates[i].effective_neighbors);
        out.summary.effective_m_max = std::max(
            out.summary.effective_m_max, estimates[i].effective_neighbors);
        if (estimates[i].fell_back) ++out.summary.fallbacks;
    }
    if (!docs.empty())
        out.summary.effective_m_mean =
            effective_sum / static_cast<double>(docs.size());
    return out;
}

std::map<std::string, int> truth_of(const Corpus& corpus) {
    std::map<std::string, int> truth;
    for (const Document& doc : corpus.documents()) truth[doc.id] = *doc.date;
    return truth;
}

std::string format_bandwidths(const std::vector<double>& bandwidths) {
    std::string out;
    char buffer[64];
    for (std::size_t i = 0; i < bandwidths.size(); ++i) {
        if (i) out += ',';
        if (std::isinf(bandwidths[i])) {
            out += "inf";
        } else {
            std::snprintf(buffer, sizeof(buffer), "%.10g", bandwidths[i]);
            out += buffer;
        }
    }
    return out;
}

class ArtifactWriter {
public:
    ArtifactWriter(std::string dir, std::vector<std::string>& names)
        : dir_(std::move(dir)), names_(names) {}

    template <typename Fn>
    void write(const std::string& name, Fn&& fn) {
        const std::filesystem::path path =
            std::filesystem::path(dir_) / name;
        std::ofstream os(path, std::ios::binary);
        if (!os) throw InvalidInput("cannot write artifact: " + path.string());
        fn(os);
        os.flush();
        if (!os) throw Error("failed writing artifact: " + path.string());
        names_.push_back(name);
    }

private:
    std::string dir_;
    std::vector<std::string>& names_;
};

void append_kv(std::ostream& os, const std::string& key,
               const std::string& value) {
    os << key << '\t' << value << '\n';
}

std::string fixed4(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.4f", v);
    return buffer;
}

std::string general10(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.10g", v);
    return buffer;
}

void append_set_summary(std::ostream& os, const std::string& prefix,
                        const SetSummary& summary) {
    append_kv(os, prefix + "_count", std::to_string(summary.count));
    if (summary.count == 0) return;
    append_kv(os, prefix + "_effective_m_mean",
              fixed4(summary.effective_m_mean));
    append_kv(os, prefix + "_effective_m_min",
              std::to_string(summary.effective_m_min));
    append_kv(os, prefix + "_effective_m_max",
              std::to_string(summary.effective_m_max));
    append_kv(os, prefix + "_fallbacks", std::to_string(summary.fallbacks));
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    stage("config", [&] { config.validate(); });

    const Corpus full = stage("corpus", [&] {
        return config.synthetic ? generate_synthetic(*config.synthetic)
                                : load_manifest(config.manifest_path);
    });
    const Corpus dated = full.dated_subset();
    const Corpus undated = full.undated_subset();
    if (dated.empty()) throw InvalidInput("corpus: no dated documents");

    const SplitResult split =
        stage("split", [&] { return split_corpus(dated, config.split); });
    if (split.train.size() < 2)
        throw InvalidInput("split: training set needs at least 2 documents");

    ExperimentResult result;
    result.n_train = split.train.size();
    result.n_validation = split.validation.size();
    result.n_test = split.test.size();
    result.n_undated = undated.size();

    const unsigned threads = config.threads;
    const DistanceStore train_store = stage("store", [&] {
        return DistanceStore::build(split.train, split.train, config.orders,
                                    threads);
    });
    std::optional<DistanceStore> validation_store;
    std::optional<DistanceStore> test_store;
    std::optional<DistanceStore> undated_store;
    stage("store", [&] {
        if (!split.validation.empty())
            validation_store = DistanceStore::build(
                split.validation, split.train, config.orders, threads);
        if (!split.test.empty())
            test_store = DistanceStore::build(split.test, split.train,
                                              config.orders, threads);
        if (!undated.empty())
            undated_store = DistanceStore::build(undated, split.train,
                                                 config.orders, threads);
    });

    result.tuning = stage("tune", [&] {
        return tune(split.train, config.make_grid(), train_store,
                    config.kernel, threads);
    });

    KernelConfig best;
    best.kernel = config.kernel;
    best.bandwidths = result.tuning.best_bandwidths;
    best.m = result.tuning.best_m;

    std::optional<ImputedSet> validation_set;
    std::optional<ImputedSet> test_set;
    std::optional<ImputedSet> undated_set;
    stage("impute", [&] {
        if (validation_store)
            validation_set =
                impute_set(split.validation, split.train, *validation_store,
                           best, config.estimator, config.huber_c, threads);
        if (test_store)
            test_set = impute_set(split.test, split.train, *test_store, best,
                                  config.estimator, config.huber_c, threads);
        if (undated_store)
            undated_set = impute_set(undated, split.train, *undated_store,
                                     best, config.estimator, config.huber_c,
                                     threads);
    });

    const double train_mean = split.train.mean_date();
    stage("evaluate", [&] {
        if (validation_set) {
            result.validation = evaluate(validation_set->estimates,
                                         truth_of(split.validation),
                                         train_mean);
            result.validation_summary = validation_set->summary;
        }
        if (test_set) {
            result.test = evaluate(test_set->estimates, truth_of(split.test),
                                   train_mean);
            result.test_summary = test_set->summary;
        }
        if (undated_set) result.undated_summary = undated_set->summary;
    });

    std::optional<HeatmapImage> heatmap;
    stage("render", [&] {
        if (validation_store) {
            const int order = config.heatmap_order != 0 ? config.heatmap_order
                                                        : config.orders.front();
            heatmap = render_heatmap(split.validation, split.train,
                                     *validation_store, order, config.heatmap,
                                     threads);
        }
    });

    stage("write", [&] {
        std::filesystem::create_directories(config.output_dir);
        ArtifactWriter writer(config.output_dir, result.artifacts);

        writer.write("summary.tsv", [&](std::ostream& os) {
            append_kv(os, "n_documents", std::to_string(full.size()));
            append_kv(os, "n_train", std::to_string(result.n_train));
            append_kv(os, "n_validation",
                      std::to_string(result.n_validation));
            append_kv(os, "n_test", std::to_string(result.n_test));
            append_kv(os, "n_undated", std::to_string(result.n_undated));
            std::string orders_text;
            for (std::size_t i = 0; i < config.orders.size(); ++i) {
                if (i) orders_text += ',';
                orders_text += std::to_string(config.orders[i]);
            }
            append_kv(os, "orders", orders_text);
            append_kv(os, "kernel",
                      config.kernel == Kernel::exponential ? "exponential"
                                                           : "boxcar");
            append_kv(os, "estimator",
                      config.estimator == EstimatorKind::weighted_mean
                          ? "mean"
                          : config.estimator == EstimatorKind::local_median
                                ? "median"
                                : "huber");
            append_kv(os, "train_skipped_document_orders",
                      std::to_string(train_store.skipped().size()));
            append_kv(os, "best_m", std::to_string(result.tuning.best_m));
            append_kv(os, "best_bandwidths",
                      format_bandwidths(result.tuning.best_bandwidths));
            append_kv(os, "cv_loss", general10(result.tuning.cv_loss));
            append_kv(os, "train_mean", fixed4(train_mean));
            if (result.validation) {
                append_kv(os, "validation_mae",
                          fixed4(result.validation->mae));
                append_kv(os, "validation_baseline_mae",
                          fixed4(result.validation->baseline_mae));
                append_set_summary(os, "validation",
                                   result.validation_summary);
            }
            if (result.test) {
                append_kv(os, "test_mae", fixed4(result.test->mae));
                append_kv(os, "test_baseline_mae",
                          fixed4(result.test->baseline_mae));
                append_set_summary(os, "test", result.test_summary);
            }
            if (result.n_undated > 0)
                append_set_summary(os, "undated", result.undated_summary);
        });

        writer.write("loss_surface.tsv", [&](std::ostream& os) {
            write_loss_surface(os, result.tuning);
        });

        if (result.validation)
            writer.write("validation_report.tsv", [&](std::ostream& os) {
                write_eval_tsv(os, *result.validation);
            });
        if (result.test)
            writer.write("test_report.tsv", [&](std::ostream& os) {
                write_eval_tsv(os, *result.test);
            });

        const EvalReport* scatter_source =
            result.test ? &*result.test
                        : (result.validation ? &*result.validation : nullptr);
        if (scatter_source)
            writer.write("scatter.tsv", [&](std::ostream& os) {
                write_scatter_tsv(os, *scatter_source);
            });

        if (heatmap)
            writer.write("heatmap.pgm", [&](std::ostream& os) {
                write_pgm(os, *heatmap);
            });

        if (undated_set)
            writer.write("undated_predictions.tsv", [&](std::ostream& os) {
                for (const auto& [id, est] : undated_set->estimates)
                    os << id << '\t' << fixed4(est.value) << '\t'
                       << est.effective_neighbors << '\t'
                       << (est.fell_back ? 1 : 0) << '\n';
            });

        if (config.synthetic)
            writer.write("synthetic_manifest.tsv", [&](std::ostream& os) {
                write_manifest(os, full);
            });

        if (config.dump_resemblances) {
            writer.write("resemblance_train.tsv", [&](std::ostream& os) {
                train_store.write_tsv(os);
            });
            if (validation_store)
                writer.write("resemblance_validation.tsv",
                             [&](std::ostream& os) {
                                 validation_store->write_tsv(os);
                             });
        }
    });

    return result;
}

}  // namespace shingledate
