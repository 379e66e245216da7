#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "scir/error.hpp"
#include "scir/features.hpp"
#include "scir/manifest.hpp"
#include "scir/matcher.hpp"
#include "scir/pca.hpp"
#include "scir/pipeline.hpp"
#include "scir/scattering.hpp"
#include "scir/serialize.hpp"
#include "scir/synthetic.hpp"
#include "scir/texture.hpp"

#include <cstring>

namespace py = pybind11;
using namespace scir;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// (height, width) arrays map onto row-major GrayImage storage.
GrayImage to_image(const Array& a) {
    if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
    const auto h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
    std::vector<double> data(a.data(), a.data() + a.size());
    GrayImage img(w, h, std::move(data));
    img.check();
    return img;
}

Array from_image(const GrayImage& img) {
    Array out({img.height(), img.width()});
    std::memcpy(out.mutable_data(), img.data().data(), img.data().size() * sizeof(double));
    return out;
}

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

std::vector<double> to_vector(const Array& a) { return {a.data(), a.data() + a.size()}; }

QuantizedImage to_labels(const py::array_t<int, py::array::c_style | py::array::forcecast>& a, int levels) {
    if (a.ndim() != 2) throw py::value_error("expected a 2-D label array");
    return QuantizedImage(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), levels,
                          std::vector<int>(a.data(), a.data() + a.size()));
}

}  // namespace

PYBIND11_MODULE(_scir, m) {
    m.doc() = "Scattering and co-occurrence features for iris identification.";

    // Leaked on purpose: the type must outlive the interpreter's teardown.
    static PyObject* scir_error = py::exception<Error>(m, "ScirError", PyExc_RuntimeError).release().ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object err = py::reinterpret_borrow<py::object>(scir_error)(e.what());
            err.attr("code") = to_string(e.code());
            PyErr_SetObject(scir_error, err.ptr());
        }
    });

    m.def("load_image", [](const std::filesystem::path& p, bool luma) {
        return from_image(load_image(p, luma ? ColorPolicy::Luma : ColorPolicy::Reject));
    }, py::arg("path"), py::arg("luma") = false, "Grayscale image in [0, 1] as a (height, width) array.");

    m.def("path_count", [](int scales, int orientations, int layers) {
        return scattering_path_count({scales, orientations, layers});
    }, py::arg("scales") = 5, py::arg("orientations") = 6, py::arg("layers") = 2);

    m.def("scattering_features", [](const Array& image, int scales, int orientations, int layers) {
        const auto img = to_image(image);
        const auto bank = FilterBank::build({scales, orientations, layers}, img.size());
        return to_array(scattering_features(img, bank));
    }, py::arg("image"), py::arg("scales") = 5, py::arg("orientations") = 6, py::arg("layers") = 2,
       "Mean and variance of every scattering map, in canonical path order.");

    m.def("quantize", [](const Array& image, int levels) {
        const auto q = quantize(to_image(image), levels);
        py::array_t<int> out({q.height(), q.width()});
        std::memcpy(out.mutable_data(), q.labels().data(), q.labels().size() * sizeof(int));
        return out;
    }, py::arg("image"), py::arg("levels") = 8);

    m.def("cooccurrence", [](const py::array_t<int, py::array::c_style | py::array::forcecast>& labels, int levels,
                             int dx, int dy) {
        const auto c = cooccurrence(to_labels(labels, levels), {dx, dy});
        py::array_t<std::int64_t> out({levels, levels});
        std::memcpy(out.mutable_data(), c.counts.data(), c.counts.size() * sizeof(std::int64_t));
        return out;
    }, py::arg("labels"), py::arg("levels"), py::arg("dx") = 1, py::arg("dy") = 0);

    m.def("haralick14", [](const py::array_t<int, py::array::c_style | py::array::forcecast>& labels, int levels,
                           int dx, int dy) {
        const auto f = haralick14(cooccurrence(to_labels(labels, levels), {dx, dy}));
        return py::array_t<double>(f.size(), f.data());
    }, py::arg("labels"), py::arg("levels"), py::arg("dx") = 1, py::arg("dy") = 0);

    m.def("block_texture_features", [](const Array& image, int cols, int rows, int levels, int dx, int dy) {
        return to_array(block_texture_features(to_image(image), {{cols, rows}, levels, {dx, dy}}));
    }, py::arg("image"), py::arg("cols") = 4, py::arg("rows") = 3, py::arg("levels") = 8, py::arg("dx") = 1,
       py::arg("dy") = 0);

    py::class_<PipelineConfig>(m, "PipelineConfig")
        .def(py::init<>())
        .def_static("from_text", &PipelineConfig::from_text)
        .def("to_text", &PipelineConfig::to_text)
        .def("validate", &PipelineConfig::validate)
        .def_property_readonly("feature_length", &PipelineConfig::feature_length)
        .def_property_readonly("scatter_length", &PipelineConfig::scatter_length)
        .def_property_readonly("texture_length", &PipelineConfig::texture_length)
        .def_readwrite("k", &PipelineConfig::k)
        .def_readwrite("epsilon", &PipelineConfig::epsilon)
        .def_readwrite("standardize", &PipelineConfig::standardize)
        .def("__repr__", [](const PipelineConfig& c) { return "PipelineConfig(\n" + c.to_text() + ")"; });

    py::class_<FeatureExtractor>(m, "FeatureExtractor")
        .def(py::init<const PipelineConfig&>(), py::arg("config") = PipelineConfig{})
        .def("extract", [](const FeatureExtractor& fx, const Array& image) {
            return to_array(fx.extract(to_image(image)).values);
        }, py::arg("image"), "Resize to the working size, then scattering followed by texture features.");

    py::class_<PcaModel>(m, "PcaModel")
        .def_property_readonly("mean", &PcaModel::mean)
        .def_property_readonly("eigenvalues", &PcaModel::eigenvalues)
        .def_property_readonly("eigenvectors", &PcaModel::eigenvectors)
        .def_property_readonly("dimension", &PcaModel::dimension)
        .def_property_readonly("sample_count", &PcaModel::sample_count)
        .def_property_readonly("fingerprint", &PcaModel::fingerprint)
        .def("project", [](const PcaModel& model, const Array& f, std::size_t k) {
            return to_array(project(model, to_vector(f), k).values);
        }, py::arg("features"), py::arg("k"))
        .def("reconstruct", [](const PcaModel& model, const Array& alpha) {
            return Eigen::VectorXd(reconstruct(model, {to_vector(alpha), model.fingerprint()}));
        }, py::arg("alpha"))
        .def("retained_variance", [](const PcaModel& model, std::size_t k) { return retained_variance(model, k); })
        .def("choose_k", [](const PcaModel& model, double eps) { return choose_k(model, eps); })
        .def("save", [](const PcaModel& model, const std::filesystem::path& p) { save_model(p, model); })
        .def_static("load", [](const std::filesystem::path& p) { return load_model(p); });

    m.def("fit_pca", [](const Eigen::MatrixXd& samples, bool standardize) {
        return fit_pca(samples, {PcaRoute::Auto, standardize});
    }, py::arg("samples"), py::arg("standardize") = false, "Rows of `samples` are feature vectors.");

    py::class_<MatchResult>(m, "MatchResult")
        .def_readonly("subject", &MatchResult::subject)
        .def_readonly("index", &MatchResult::index)
        .def_readonly("distance", &MatchResult::distance)
        .def_readonly("runner_up", &MatchResult::runner_up)
        .def("__repr__", [](const MatchResult& r) {
            return "MatchResult(subject='" + r.subject + "', distance=" + std::to_string(r.distance) + ")";
        });

    py::class_<Gallery>(m, "Gallery")
        .def(py::init<std::uint64_t>(), py::arg("fingerprint"))
        .def("enroll", [](Gallery& g, const std::string& subject, const Array& templ) {
            g.enroll(subject, {to_vector(templ), g.fingerprint()});
        }, py::arg("subject"), py::arg("template"))
        .def("identify", [](const Gallery& g, const Array& probe, std::size_t components) {
            return identify(g, {to_vector(probe), g.fingerprint()}, components);
        }, py::arg("probe"), py::arg("components") = 0)
        .def("__len__", &Gallery::size)
        .def_property_readonly("dimension", &Gallery::dimension)
        .def_property_readonly("subjects", [](const Gallery& g) {
            std::vector<std::string> out;
            for (const auto& e : g.entries()) out.push_back(e.subject);
            return out;
        })
        .def("save", [](const Gallery& g, const std::filesystem::path& p) { save_gallery(p, g); })
        .def_static("load", [](const std::filesystem::path& p) { return load_gallery(p); });

    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("rank1_accuracy", &EvalReport::rank1_accuracy)
        .def_readonly("dimension", &EvalReport::dimension)
        .def_readonly("probe_count", &EvalReport::probe_count)
        .def_readonly("curve", &EvalReport::curve)
        .def("to_json", [](const EvalReport& r) { return to_json(r).dump(2); });

    m.def("evaluate", [](const Gallery& g, const std::vector<std::pair<std::string, Array>>& probes,
                         const std::vector<std::size_t>& k_grid) {
        std::vector<Probe> ps;
        for (const auto& [subject, v] : probes) ps.push_back({subject, {to_vector(v), g.fingerprint()}});
        return evaluate(g, ps, k_grid);
    }, py::arg("gallery"), py::arg("probes"), py::arg("k_grid") = std::vector<std::size_t>{});

    m.def("synthesize_image", [](int cls, int index, std::uint64_t seed) {
        SyntheticSpec spec;
        spec.seed = seed;
        return from_image(synthesize_image(spec, cls, index));
    }, py::arg("cls"), py::arg("index"), py::arg("seed") = 7);

    m.def("generate_synthetic", [](const std::filesystem::path& out, int classes, int per_class, std::uint64_t seed) {
        SyntheticSpec spec;
        spec.classes = classes;
        spec.per_class = per_class;
        spec.seed = seed;
        generate_synthetic(spec, out);
        return out / "manifest.tsv";
    }, py::arg("out_dir"), py::arg("classes") = 10, py::arg("per_class") = 10, py::arg("seed") = 7,
       "Writes the corpus and returns the manifest path.");

    m.def("run_extract", [](const std::filesystem::path& manifest, const std::filesystem::path& out,
                            const PipelineConfig& config, int threads) {
        py::gil_scoped_release release;
        return run_extract(read_manifest(manifest), config, out, threads).images;
    }, py::arg("manifest"), py::arg("out_dir"), py::arg("config") = PipelineConfig{}, py::arg("threads") = 1);

    m.def("run_train", [](const std::filesystem::path& features, const std::filesystem::path& model,
                          const std::filesystem::path& gallery, std::optional<double> epsilon,
                          std::optional<std::size_t> k) {
        py::gil_scoped_release release;
        const auto s = run_train(features, {epsilon, k, std::nullopt}, model, gallery);
        return std::make_pair(s.k, s.retained);
    }, py::arg("features_dir"), py::arg("model"), py::arg("gallery"), py::arg("epsilon") = std::nullopt,
       py::arg("k") = std::nullopt, "Returns (K, retained variance).");

    m.def("run_evaluate", [](const std::filesystem::path& model, const std::filesystem::path& gallery,
                             const std::filesystem::path& manifest, const std::vector<std::size_t>& k_grid) {
        py::gil_scoped_release release;
        EvaluateOptions opts;
        opts.k_grid = k_grid;
        return run_evaluate(model, gallery, read_manifest(manifest), opts);
    }, py::arg("model"), py::arg("gallery"), py::arg("manifest"), py::arg("k_grid") = std::vector<std::size_t>{});
}
