#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "shingledate/corpus.hpp"
#include "shingledate/error.hpp"
#include "shingledate/estimator.hpp"
#include "shingledate/evaluate.hpp"
#include "shingledate/experiment.hpp"
#include "shingledate/heatmap.hpp"
#include "shingledate/neighbors.hpp"
#include "shingledate/shingle.hpp"
#include "shingledate/synthetic.hpp"
#include "shingledate/tuner.hpp"

namespace py = pybind11;
using namespace shingledate;

namespace {

std::string corpus_to_manifest(const Corpus& corpus) {
    std::ostringstream os;
    write_manifest(os, corpus);
    return os.str();
}

Corpus corpus_from_manifest(const std::string& text) {
    std::istringstream in(text);
    return parse_manifest(in);
}

py::array_t<std::uint8_t> heatmap_array(const HeatmapImage& image) {
    py::array_t<std::uint8_t> array({image.rows, image.cols});
    std::copy(image.pixels.begin(), image.pixels.end(),
              array.mutable_data());
    return array;
}

py::bytes heatmap_pgm(const HeatmapImage& image) {
    std::ostringstream os;
    write_pgm(os, image);
    return py::bytes(os.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Document dating by kernel smoothing over shingle-resemblance "
              "distances";

    py::register_exception<InvalidInput>(m, "InvalidInputError",
                                         PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError",
                                             PyExc_RuntimeError);

    py::class_<Document>(m, "Document")
        .def(py::init([](std::string id, std::optional<int> date,
                         std::vector<std::string> tokens) {
                 Document doc;
                 doc.id = std::move(id);
                 doc.date = date;
                 doc.tokens = std::move(tokens);
                 return doc;
             }),
             py::arg("id"), py::arg("date"), py::arg("tokens"))
        .def_readonly("id", &Document::id)
        .def_readonly("date", &Document::date)
        .def_readonly("tokens", &Document::tokens)
        .def("__repr__", [](const Document& d) {
            return "Document(id=" + d.id + ", tokens=" +
                   std::to_string(d.tokens.size()) + ")";
        });

    py::class_<Corpus>(m, "Corpus")
        .def(py::init<>())
        .def("add", &Corpus::add)
        .def("at", &Corpus::at, py::return_value_policy::copy)
        .def("contains", &Corpus::contains)
        .def("__len__", &Corpus::size)
        .def("ids", &Corpus::sorted_ids)
        .def("documents", &Corpus::documents,
             py::return_value_policy::copy)
        .def("dated_subset", &Corpus::dated_subset)
        .def("undated_subset", &Corpus::undated_subset)
        .def("mean_date", &Corpus::mean_date, py::arg("excluded_id") = "")
        .def("to_manifest", &corpus_to_manifest);

    m.def("normalize_text", &normalize_text, py::arg("raw"));
    m.def("parse_manifest", &corpus_from_manifest, py::arg("text"));
    m.def("load_manifest", &load_manifest, py::arg("path"));

    py::class_<SplitSpec>(m, "SplitSpec")
        .def(py::init([](double train, double validation, double test,
                         std::uint64_t seed) {
                 return SplitSpec{train, validation, test, seed};
             }),
             py::arg("train_fraction"), py::arg("validation_fraction"),
             py::arg("test_fraction"), py::arg("seed") = 0)
        .def_readwrite("train_fraction", &SplitSpec::train_fraction)
        .def_readwrite("validation_fraction", &SplitSpec::validation_fraction)
        .def_readwrite("test_fraction", &SplitSpec::test_fraction)
        .def_readwrite("seed", &SplitSpec::seed);

    m.def(
        "split_corpus",
        [](const Corpus& corpus, const SplitSpec& spec) {
            SplitResult result = split_corpus(corpus, spec);
            return py::make_tuple(result.train, result.validation,
                                  result.test);
        },
        py::arg("corpus"), py::arg("spec"));

    py::class_<ShingleSet>(m, "ShingleSet")
        .def_readonly("order", &ShingleSet::order)
        .def_readonly("fingerprints", &ShingleSet::fingerprints)
        .def("count", &ShingleSet::count);

    m.def("extract_shingles", &extract_shingles, py::arg("tokens"),
          py::arg("k"));
    m.def("resemblance_distance", &resemblance_distance, py::arg("a"),
          py::arg("b"));
    m.def("exact_resemblance_distance", &exact_resemblance_distance,
          py::arg("tokens_a"), py::arg("tokens_b"), py::arg("k"));

    py::class_<DistanceVector>(m, "DistanceVector")
        .def(py::init([](std::vector<int> orders, std::vector<double> values) {
                 return DistanceVector{std::move(orders), std::move(values)};
             }),
             py::arg("orders"), py::arg("values"))
        .def_readonly("orders", &DistanceVector::orders)
        .def_readonly("values", &DistanceVector::values);

    m.def(
        "distance_vector",
        [](const Document& a, const Document& b,
           const std::vector<int>& orders) {
            return distance_vector(a, b, orders);
        },
        py::arg("a"), py::arg("b"), py::arg("orders"));

    py::class_<Neighbor>(m, "Neighbor")
        .def_readonly("id", &Neighbor::id)
        .def_readonly("distance", &Neighbor::distance);

    py::class_<CandidatePool>(m, "CandidatePool")
        .def_readonly("target", &CandidatePool::target)
        .def_readonly("members", &CandidatePool::members)
        .def_readonly("nominal_m", &CandidatePool::nominal_m)
        .def_readonly("effective_m", &CandidatePool::effective_m);

    py::class_<DistanceStore>(m, "DistanceStore")
        .def_static("build", &DistanceStore::build, py::arg("targets"),
                    py::arg("candidates"), py::arg("orders"),
                    py::arg("threads") = 1)
        .def_static(
            "from_tsv",
            [](const std::string& text, bool mirror_pairs) {
                std::istringstream in(text);
                return DistanceStore::from_tsv(in, mirror_pairs);
            },
            py::arg("text"), py::arg("mirror_pairs") = false)
        .def_property_readonly("orders", &DistanceStore::orders)
        .def("target_ids", &DistanceStore::target_ids)
        .def("candidate_ids", &DistanceStore::candidate_ids)
        .def("distance", &DistanceStore::distance, py::arg("target"),
             py::arg("order"), py::arg("candidate"))
        .def("skipped", &DistanceStore::skipped)
        .def("to_tsv", [](const DistanceStore& store) {
            std::ostringstream os;
            store.write_tsv(os);
            return os.str();
        });

    m.def("nearest_m", &nearest_m, py::arg("target"), py::arg("order"),
          py::arg("m"), py::arg("store"));
    m.def("candidate_pool", &candidate_pool, py::arg("target"), py::arg("m"),
          py::arg("store"));

    py::enum_<Kernel>(m, "Kernel")
        .value("exponential", Kernel::exponential)
        .value("boxcar", Kernel::boxcar);

    py::class_<KernelConfig>(m, "KernelConfig")
        .def(py::init([](Kernel kernel, std::vector<double> bandwidths,
                         int m) {
                 KernelConfig cfg;
                 cfg.kernel = kernel;
                 cfg.bandwidths = std::move(bandwidths);
                 cfg.m = m;
                 return cfg;
             }),
             py::arg("kernel") = Kernel::exponential, py::arg("bandwidths"),
             py::arg("m") = 5)
        .def_readwrite("kernel", &KernelConfig::kernel)
        .def_readwrite("bandwidths", &KernelConfig::bandwidths)
        .def_readwrite("m", &KernelConfig::m);

    m.def("kernel_weight", &kernel_weight, py::arg("d"), py::arg("cfg"));

    py::class_<Estimate>(m, "Estimate")
        .def(py::init([](double value, int effective_neighbors,
                         bool fell_back, double weight_sum) {
                 return Estimate{value, effective_neighbors, fell_back,
                                 weight_sum};
             }),
             py::arg("value"), py::arg("effective_neighbors") = 0,
             py::arg("fell_back") = false, py::arg("weight_sum") = 0.0)
        .def_readonly("value", &Estimate::value)
        .def_readonly("effective_neighbors", &Estimate::effective_neighbors)
        .def_readonly("fell_back", &Estimate::fell_back)
        .def_readonly("weight_sum", &Estimate::weight_sum);

    py::enum_<RobustLoss>(m, "RobustLoss")
        .value("absolute", RobustLoss::absolute)
        .value("huber", RobustLoss::huber);

    py::class_<RobustSpec>(m, "RobustSpec")
        .def(py::init<>())
        .def_readwrite("loss", &RobustSpec::loss)
        .def_readwrite("huber_c", &RobustSpec::huber_c)
        .def_readwrite("tolerance", &RobustSpec::tolerance)
        .def_readwrite("max_iterations", &RobustSpec::max_iterations);

    m.def("impute_date", &impute_date, py::arg("target"), py::arg("pool"),
          py::arg("dated"), py::arg("store"), py::arg("cfg"));
    m.def("robust_impute", &robust_impute, py::arg("target"), py::arg("pool"),
          py::arg("dated"), py::arg("store"), py::arg("cfg"),
          py::arg("spec"));

    py::class_<BandwidthGrid>(m, "BandwidthGrid")
        .def(py::init<>())
        .def_static("default_grid", &BandwidthGrid::default_grid,
                    py::arg("n_orders"))
        .def_readwrite("per_order", &BandwidthGrid::per_order)
        .def_readwrite("m_candidates", &BandwidthGrid::m_candidates);

    py::class_<SurfacePoint>(m, "SurfacePoint")
        .def_readonly("m", &SurfacePoint::m)
        .def_readonly("bandwidths", &SurfacePoint::bandwidths)
        .def_readonly("loss", &SurfacePoint::loss);

    py::class_<TuneResult>(m, "TuneResult")
        .def_readonly("best_m", &TuneResult::best_m)
        .def_readonly("best_bandwidths", &TuneResult::best_bandwidths)
        .def_readonly("cv_loss", &TuneResult::cv_loss)
        .def_readonly("loss_surface", &TuneResult::loss_surface);

    m.def("cv_loss", &cv_loss, py::arg("cfg"), py::arg("train"),
          py::arg("store"), py::arg("threads") = 1);
    m.def("tune", &tune, py::arg("train"), py::arg("grid"), py::arg("store"),
          py::arg("kernel") = Kernel::exponential, py::arg("threads") = 1);

    py::class_<EvalRow>(m, "EvalRow")
        .def_readonly("id", &EvalRow::id)
        .def_readonly("true_year", &EvalRow::true_year)
        .def_readonly("estimated", &EvalRow::estimated)
        .def_readonly("absolute_error", &EvalRow::absolute_error)
        .def_readonly("effective_neighbors", &EvalRow::effective_neighbors)
        .def_readonly("fell_back", &EvalRow::fell_back);

    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("rows", &EvalReport::rows)
        .def_readonly("mae", &EvalReport::mae)
        .def_readonly("baseline_mae", &EvalReport::baseline_mae);

    m.def("evaluate", &evaluate, py::arg("predictions"), py::arg("truth"),
          py::arg("train_mean"));
    m.def(
        "scatter_tsv",
        [](const EvalReport& report) {
            std::ostringstream os;
            write_scatter_tsv(os, report);
            return os.str();
        },
        py::arg("report"));

    py::class_<HeatmapParams>(m, "HeatmapParams")
        .def(py::init<>())
        .def_readwrite("clip_high", &HeatmapParams::clip_high)
        .def_readwrite("zero_floor", &HeatmapParams::zero_floor)
        .def_readwrite("group_size", &HeatmapParams::group_size)
        .def_readwrite("white_threshold", &HeatmapParams::white_threshold);

    py::class_<HeatmapImage>(m, "HeatmapImage")
        .def_readonly("rows", &HeatmapImage::rows)
        .def_readonly("cols", &HeatmapImage::cols)
        .def("to_numpy", &heatmap_array)
        .def("to_pgm", &heatmap_pgm);

    m.def("render_heatmap", &render_heatmap, py::arg("validation"),
          py::arg("training"), py::arg("store"), py::arg("order"),
          py::arg("params") = HeatmapParams{}, py::arg("threads") = 1);

    py::class_<SyntheticSpec>(m, "SyntheticSpec")
        .def(py::init<>())
        .def_readwrite("n_documents", &SyntheticSpec::n_documents)
        .def_readwrite("date_lo", &SyntheticSpec::date_lo)
        .def_readwrite("date_hi", &SyntheticSpec::date_hi)
        .def_readwrite("vocab_size", &SyntheticSpec::vocab_size)
        .def_readwrite("drift_rate", &SyntheticSpec::drift_rate)
        .def_readwrite("length_lo", &SyntheticSpec::length_lo)
        .def_readwrite("length_hi", &SyntheticSpec::length_hi)
        .def_readwrite("seed", &SyntheticSpec::seed)
        .def_readwrite("zipf_exponent", &SyntheticSpec::zipf_exponent)
        .def_readwrite("date_jitter", &SyntheticSpec::date_jitter);

    m.def("generate_synthetic", &generate_synthetic, py::arg("spec"));

    py::enum_<EstimatorKind>(m, "EstimatorKind")
        .value("weighted_mean", EstimatorKind::weighted_mean)
        .value("local_median", EstimatorKind::local_median)
        .value("huber", EstimatorKind::huber);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_static("load", &ExperimentConfig::load, py::arg("path"))
        .def_static(
            "parse",
            [](const std::string& text) {
                std::istringstream in(text);
                return ExperimentConfig::parse(in);
            },
            py::arg("text"))
        .def_readwrite("manifest_path", &ExperimentConfig::manifest_path)
        .def_readwrite("synthetic", &ExperimentConfig::synthetic)
        .def_readwrite("orders", &ExperimentConfig::orders)
        .def_readwrite("split", &ExperimentConfig::split)
        .def_readwrite("kernel", &ExperimentConfig::kernel)
        .def_readwrite("estimator", &ExperimentConfig::estimator)
        .def_readwrite("threads", &ExperimentConfig::threads)
        .def_readwrite("output_dir", &ExperimentConfig::output_dir);

    py::class_<SetSummary>(m, "SetSummary")
        .def_readonly("count", &SetSummary::count)
        .def_readonly("effective_m_mean", &SetSummary::effective_m_mean)
        .def_readonly("effective_m_min", &SetSummary::effective_m_min)
        .def_readonly("effective_m_max", &SetSummary::effective_m_max)
        .def_readonly("fallbacks", &SetSummary::fallbacks);

    py::class_<ExperimentResult>(m, "ExperimentResult")
        .def_readonly("n_train", &ExperimentResult::n_train)
        .def_readonly("n_validation", &ExperimentResult::n_validation)
        .def_readonly("n_test", &ExperimentResult::n_test)
        .def_readonly("n_undated", &ExperimentResult::n_undated)
        .def_readonly("tuning", &ExperimentResult::tuning)
        .def_readonly("validation", &ExperimentResult::validation)
        .def_readonly("test", &ExperimentResult::test)
        .def_readonly("artifacts", &ExperimentResult::artifacts);

    m.def("run_experiment", &run_experiment, py::arg("config"));

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
