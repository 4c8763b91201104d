#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vpforest/eval.hpp"
#include "vpforest/forest.hpp"
#include "vpforest/minifloat.hpp"
#include "vpforest/stream.hpp"

namespace py = pybind11;
using namespace vpforest;

namespace {

ConfusionMatrix matrix_from_counts(const std::vector<std::vector<std::uint64_t>>& counts) {
    const int n = static_cast<int>(counts.size());
    ConfusionMatrix cm(n);
    for (int t = 0; t < n; ++t) {
        if (counts[static_cast<std::size_t>(t)].size() != counts.size()) {
            throw Error("confusion matrix must be square");
        }
        for (int p = 0; p < n; ++p) {
            const std::uint64_t c = counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
            for (std::uint64_t i = 0; i < c; ++i) {
                cm.record(t, p);
            }
        }
    }
    return cm;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Reduced-precision Mondrian forest stream classifier";

    py::register_exception<RangeOverflowError>(m, "RangeOverflowError");
    py::register_exception<NonFiniteError>(m, "NonFiniteError");

    py::enum_<OverflowPolicy>(m, "OverflowPolicy")
        .value("ToInfinity", OverflowPolicy::ToInfinity)
        .value("Saturate", OverflowPolicy::Saturate)
        .value("Error", OverflowPolicy::Error);

    py::enum_<ArithOp>(m, "ArithOp")
        .value("Add", ArithOp::Add)
        .value("Sub", ArithOp::Sub)
        .value("Mul", ArithOp::Mul)
        .value("Div", ArithOp::Div);

    py::enum_<InstrumentationMode>(m, "InstrumentationMode")
        .value("Uninstrumented", InstrumentationMode::Uninstrumented)
        .value("NodeBounds", InstrumentationMode::NodeBounds)
        .value("Whole", InstrumentationMode::Whole);

    py::enum_<F1Average>(m, "F1Average")
        .value("Macro", F1Average::Macro)
        .value("Micro", F1Average::Micro);

    py::enum_<RunStatus>(m, "RunStatus")
        .value("Ok", RunStatus::Ok)
        .value("Overflow", RunStatus::Overflow);

    py::class_<PrecisionFormat>(m, "PrecisionFormat")
        .def(py::init<>())
        .def_readwrite("mantissa_bits", &PrecisionFormat::mantissa_bits)
        .def_readwrite("exponent_bits", &PrecisionFormat::exponent_bits)
        .def_readwrite("overflow", &PrecisionFormat::overflow)
        .def("width", &PrecisionFormat::width)
        .def("e_min", &PrecisionFormat::e_min)
        .def("e_max", &PrecisionFormat::e_max)
        .def("__repr__", [](const PrecisionFormat& f) {
            return "PrecisionFormat(p=" + std::to_string(f.mantissa_bits) +
                   ", e=" + std::to_string(f.exponent_bits) + ")";
        });

    m.def("make_format", &make_format, py::arg("mantissa_bits"), py::arg("exponent_bits"),
          py::arg("overflow") = OverflowPolicy::ToInfinity);
    m.def("dynamic_range", &dynamic_range, py::arg("format"));
    m.def("round_to_precision", &round_to_precision, py::arg("x"), py::arg("format"));
    m.def("rounded_arith", &rounded_arith, py::arg("op"), py::arg("a"), py::arg("b"),
          py::arg("format"));

    py::class_<RawSensorRow>(m, "RawSensorRow")
        .def(py::init<>())
        .def(py::init([](std::vector<double> axes, int label) {
                 return RawSensorRow{std::move(axes), label};
             }),
             py::arg("axes"), py::arg("label"))
        .def_readwrite("axes", &RawSensorRow::axes)
        .def_readwrite("label", &RawSensorRow::label);

    py::class_<StreamSample>(m, "StreamSample")
        .def(py::init<>())
        .def(py::init([](std::vector<double> features, int label) {
                 return StreamSample{std::move(features), label};
             }),
             py::arg("features"), py::arg("label"))
        .def_readwrite("features", &StreamSample::features)
        .def_readwrite("label", &StreamSample::label)
        .def("__repr__", [](const StreamSample& s) {
            return "StreamSample(features=[" + std::to_string(s.features.size()) +
                   " values], label=" + std::to_string(s.label) + ")";
        });

    m.def("featurize_windows", &featurize_windows, py::arg("rows"), py::arg("window") = 50);
    m.def("shuffle_stream", &shuffle_stream, py::arg("samples"), py::arg("ordering_seed"));
    m.def("synthesize", &synthesize, py::arg("n_classes"), py::arg("n_features"),
          py::arg("n_samples"), py::arg("seed"), py::arg("separation"));
    m.def(
        "normalize_minmax",
        [](std::vector<StreamSample> samples, double lo, double hi) {
            normalize_minmax(samples, lo, hi);
            return samples;
        },
        py::arg("samples"), py::arg("lo") = -1.0, py::arg("hi") = 1.0,
        "Returns a copy of the stream rescaled per feature onto [lo, hi]");

    py::class_<ForestConfig>(m, "ForestConfig")
        .def(py::init<>())
        .def_readwrite("n_trees", &ForestConfig::n_trees)
        .def_readwrite("memory_bytes", &ForestConfig::memory_bytes)
        .def_readwrite("base_count", &ForestConfig::base_count)
        .def_readwrite("discount", &ForestConfig::discount)
        .def_readwrite("budget", &ForestConfig::budget)
        .def_readwrite("n_features", &ForestConfig::n_features)
        .def_readwrite("n_classes", &ForestConfig::n_classes)
        .def_readwrite("seed", &ForestConfig::seed)
        .def_readwrite("fmt", &ForestConfig::fmt)
        .def_readwrite("mode", &ForestConfig::mode);

    m.def("apply_default_hyperparams", &apply_default_hyperparams, py::arg("config"),
          "Sets (base_count, discount, budget) from the tree-count table, in place");

    py::class_<Footprint>(m, "Footprint")
        .def_readonly("int_bytes", &Footprint::int_bytes)
        .def_readonly("float_bytes", &Footprint::float_bytes)
        .def_readonly("total", &Footprint::total);

    m.def("node_footprint", &node_footprint, py::arg("config"));

    py::class_<MondrianForest>(m, "MondrianForest")
        .def(py::init<const ForestConfig&>(), py::arg("config"))
        .def(
            "partial_fit",
            [](MondrianForest& f, const std::vector<double>& features, int label) {
                f.partial_fit({features, label});
            },
            py::arg("features"), py::arg("label"))
        .def(
            "partial_fit",
            [](MondrianForest& f, const StreamSample& sample) { f.partial_fit(sample); },
            py::arg("sample"))
        .def("predict_proba", &MondrianForest::predict_proba, py::arg("features"))
        .def("predict", &MondrianForest::predict, py::arg("features"))
        .def("footprint", &MondrianForest::footprint)
        .def_property_readonly(
            "allocated_nodes",
            [](const MondrianForest& f) { return f.pool().allocated(); })
        .def_property_readonly(
            "capacity_nodes",
            [](const MondrianForest& f) { return f.pool().capacity_nodes(); });

    py::class_<Checkpoint>(m, "Checkpoint")
        .def_readonly("elements_seen", &Checkpoint::elements_seen)
        .def_readonly("f1", &Checkpoint::f1)
        .def("__repr__", [](const Checkpoint& c) {
            return "Checkpoint(elements_seen=" + std::to_string(c.elements_seen) +
                   ", f1=" + std::to_string(c.f1) + ")";
        });

    py::class_<PrequentialReport>(m, "PrequentialReport")
        .def_readonly("checkpoints", &PrequentialReport::checkpoints)
        .def_readonly("final_f1", &PrequentialReport::final_f1)
        .def_readonly("status", &PrequentialReport::status)
        .def_readonly("failed_at", &PrequentialReport::failed_at)
        .def_readonly("error", &PrequentialReport::error);

    m.def("prequential_run", &prequential_run, py::arg("forest"), py::arg("stream"),
          py::arg("report_interval") = 50, py::arg("average") = F1Average::Macro,
          py::arg("include_class0") = true);

    m.def(
        "macro_f1",
        [](const std::vector<std::vector<std::uint64_t>>& matrix, bool include_class0) {
            return macro_f1(matrix_from_counts(matrix), include_class0);
        },
        py::arg("matrix"), py::arg("include_class0") = true,
        "Macro F1 of a [true][predicted] count matrix");
    m.def(
        "micro_f1",
        [](const std::vector<std::vector<std::uint64_t>>& matrix, bool include_class0) {
            return micro_f1(matrix_from_counts(matrix), include_class0);
        },
        py::arg("matrix"), py::arg("include_class0") = true);

    m.def("delta_f1", &delta_f1, py::arg("reduced"), py::arg("baseline"),
          "Pointwise F1 differences on a shared checkpoint grid");
}
