// Thin numpy-facing wrapper over the core library.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "specdep/crossspectra.hpp"
#include "specdep/errors.hpp"
#include "specdep/inference.hpp"
#include "specdep/ingest.hpp"
#include "specdep/measures.hpp"
#include "specdep/simulate.hpp"
#include "specdep/spectral.hpp"

namespace py = pybind11;
using namespace specdep;

namespace {

using Array3 = py::array_t<double, py::array::c_style | py::array::forcecast>;

SegmentSet segments_from_array(const Array3& a, std::vector<std::string> names, std::optional<double> rate) {
  if (a.ndim() != 3) throw DimensionError("segments must be a (n_segments, n_samples, n_channels) array");
  std::vector<double> data(a.data(), a.data() + a.size());
  return SegmentSet(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
                    static_cast<std::size_t>(a.shape(2)), std::move(data), std::move(names), rate);
}

py::array_t<double> segments_to_array(const SegmentSet& s) {
  py::array_t<double> out({s.n_segments(), s.n_samples(), s.n_channels()});
  std::copy(s.data().begin(), s.data().end(), out.mutable_data());
  return out;
}

py::array_t<cdouble> coeffs_to_array(const SpectralEnsemble& e) {
  py::array_t<cdouble> out({e.n_segments(), e.n_freqs(), e.n_channels()});
  std::copy(e.coeffs().begin(), e.coeffs().end(), out.mutable_data());
  return out;
}

py::dict triple(const MeasureTriple& t) {
  py::dict d;
  d["total"] = t.total;
  d["lagged"] = t.lagged;
  d["instantaneous"] = t.instantaneous;
  return d;
}

py::object freq_object(const FreqTag& f) {
  if (const int* w = std::get_if<int>(&f)) return py::int_(*w);
  return py::str(std::get<std::string>(f));
}

SegmentFormat segment_format(const std::string& name) {
  if (name == "csv-long") return SegmentFormat::csv_long;
  if (name == "binary-f64") return SegmentFormat::binary_f64;
  throw ConfigError("unknown segment format '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_specdep, m) {
  m.doc() = "Frequency-resolved linear and nonlinear dependence between groups of time series";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<MalformedInputError>(m, "MalformedInputError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<RangeError>(m, "RangeError", base.ptr());
  py::register_exception<CoverageError>(m, "CoverageError", base.ptr());
  py::register_exception<NormModeError>(m, "NormModeError", base.ptr());
  py::register_exception<DegenerateSegmentError>(m, "DegenerateSegmentError", base.ptr());
  py::register_exception<SingularMatrixError>(m, "SingularMatrixError", base.ptr());
  py::register_exception<ConsistencyError>(m, "ConsistencyError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<SegmentSet>(m, "SegmentSet")
      .def(py::init(&segments_from_array), py::arg("data"), py::arg("channel_names") = std::vector<std::string>{},
           py::arg("sampling_rate") = std::nullopt)
      .def_property_readonly("n_segments", &SegmentSet::n_segments)
      .def_property_readonly("n_samples", &SegmentSet::n_samples)
      .def_property_readonly("n_channels", &SegmentSet::n_channels)
      .def_property_readonly("channel_names", &SegmentSet::channel_names)
      .def_property_readonly("sampling_rate", &SegmentSet::sampling_rate)
      .def("to_numpy", &segments_to_array);

  py::class_<BlockPartition>(m, "BlockPartition")
      .def(py::init<std::vector<std::vector<std::size_t>>, std::vector<std::string>>(), py::arg("blocks"),
           py::arg("names") = std::vector<std::string>{})
      .def_static("singletons", &BlockPartition::singletons)
      .def_property_readonly("blocks", &BlockPartition::blocks)
      .def_property_readonly("names", &BlockPartition::names)
      .def_property_readonly("dims", &BlockPartition::dims)
      .def("__len__", &BlockPartition::size);

  py::class_<SpectralEnsemble>(m, "SpectralEnsemble")
      .def_property_readonly("freq_indices", &SpectralEnsemble::freq_indices)
      .def_property_readonly("n_segments", &SpectralEnsemble::n_segments)
      .def_property_readonly("n_channels", &SpectralEnsemble::n_channels)
      .def_property_readonly("norm", [](const SpectralEnsemble& e) { return to_string(e.norm().kind); })
      .def("to_numpy", &coeffs_to_array);

  py::class_<CrossSpectrum>(m, "CrossSpectrum")
      .def(py::init([](Eigen::MatrixXcd matrix, std::size_t n_segments, std::size_t n_samples) {
             CrossSpectrum s;
             s.matrix = std::move(matrix);
             s.n_segments = n_segments;
             s.n_samples = n_samples;
             return s;
           }),
           py::arg("matrix"), py::arg("n_segments") = 1, py::arg("n_samples") = 0)
      .def_readonly("matrix", &CrossSpectrum::matrix)
      .def_property_readonly("freq", [](const CrossSpectrum& s) { return freq_object(s.freq); })
      .def_readonly("n_segments", &CrossSpectrum::n_segments)
      .def_readonly("n_pooled", &CrossSpectrum::n_pooled)
      .def_readonly("n_samples", &CrossSpectrum::n_samples);

  py::class_<DependenceReport>(m, "DependenceReport")
      .def_property_readonly("kind", [](const DependenceReport& r) { return to_string(r.kind); })
      .def_property_readonly("scope", [](const DependenceReport& r) { return to_string(r.scope); })
      .def_property_readonly("freq", [](const DependenceReport& r) { return freq_object(r.freq); })
      .def_readonly("block_dims", &DependenceReport::block_dims)
      .def_property_readonly("measures", [](const DependenceReport& r) { return triple(r.measures); })
      .def_property_readonly("raw", [](const DependenceReport& r) { return triple(r.raw); })
      .def_property_readonly("rho2", [](const DependenceReport& r) { return triple(r.rho2); })
      .def_readonly("flags", &DependenceReport::flags);

  py::class_<TestResult>(m, "TestResult")
      .def_property_readonly("measure", [](const TestResult& t) { return to_string(t.measure); })
      .def_readonly("statistic", &TestResult::statistic)
      .def_readonly("df", &TestResult::df)
      .def_readonly("p_value", &TestResult::p_value)
      .def_property_readonly("scale", [](const TestResult& t) { return to_string(t.scale_used); })
      .def_readonly("scale_value", &TestResult::scale_value)
      .def_readonly("flags", &TestResult::flags);

  m.def("load_segments", [](const std::filesystem::path& p, const std::string& fmt) {
    return load_segments(p, segment_format(fmt));
  }, py::arg("path"), py::arg("format") = "csv-long");
  m.def("write_segments", [](const SegmentSet& s, const std::filesystem::path& p, const std::string& fmt) {
    write_segments(s, p, segment_format(fmt));
  }, py::arg("segments"), py::arg("path"), py::arg("format") = "csv-long");
  m.def("detrend", [](const SegmentSet& s) { return detrend(s, DetrendMode::mean); });
  m.def("hann_taper", &hann_taper);

  m.def("dft", [](const SegmentSet& s, std::optional<std::vector<int>> freqs) {
    return freqs ? dft(s, *freqs) : dft(s);
  }, py::arg("segments"), py::arg("freqs") = std::nullopt);
  m.def("normalize_block", &normalize_block);
  m.def("normalize_channel", &normalize_channel);
  m.def("accumulate", &accumulate, py::arg("ensemble"), py::arg("omega"));
  m.def("accumulate_all", &accumulate_all);
  m.def("pool", [](const std::vector<CrossSpectrum>& spectra, const std::string& name, std::vector<int> bins) {
    return pool(spectra, FrequencyBand{name, std::move(bins)});
  }, py::arg("spectra"), py::arg("name"), py::arg("bins"));

  auto options = [](double ridge, bool allow_infinite) { return MeasureOptions{ridge, allow_infinite}; };
  m.def("linear_dependence", [options](const CrossSpectrum& s, const BlockPartition& p, double ridge, bool inf) {
    return linear_dependence(s, p, options(ridge, inf));
  }, py::arg("spectrum"), py::arg("partition"), py::arg("ridge") = 0.0, py::arg("allow_infinite") = false);
  m.def("nonlinear_dependence", [options](const CrossSpectrum& s, const BlockPartition& p, double ridge, bool inf) {
    return nonlinear_dependence(s, p, options(ridge, inf));
  }, py::arg("spectrum"), py::arg("partition"), py::arg("ridge") = 0.0, py::arg("allow_infinite") = false);
  m.def("all_univariate_linear",
        [options](const CrossSpectrum& s, std::vector<std::size_t> ch, double ridge, bool inf) {
          return all_univariate_linear(s, ch, options(ridge, inf));
        },
        py::arg("spectrum"), py::arg("channels") = std::vector<std::size_t>{}, py::arg("ridge") = 0.0,
        py::arg("allow_infinite") = false);
  m.def("all_univariate_nonlinear",
        [options](const CrossSpectrum& s, std::vector<std::size_t> ch, double ridge, bool inf) {
          return all_univariate_nonlinear(s, ch, options(ridge, inf));
        },
        py::arg("spectrum"), py::arg("channels") = std::vector<std::size_t>{}, py::arg("ridge") = 0.0,
        py::arg("allow_infinite") = false);

  m.def("test_dependence", [](const DependenceReport& r, std::size_t n_t, std::size_t n_r, const std::string& scale) {
    const auto t = test_dependence(r, n_t, n_r, parse_scale(scale));
    return std::vector<TestResult>(t.begin(), t.end());
  }, py::arg("report"), py::arg("n_samples"), py::arg("n_segments"), py::arg("scale") = "calibrated-2NRm1");
  m.def("chi_square_sf", &chi_square_sf, py::arg("x"), py::arg("df"));
  m.def("degrees_of_freedom", [](std::vector<std::size_t> dims, const std::string& measure, const std::string& scope) {
    Component c = Component::total;
    if (measure == "lagged") c = Component::lagged;
    else if (measure == "instantaneous") c = Component::instantaneous;
    else if (measure != "total") throw ConfigError("unknown measure '" + measure + "'");
    return degrees_of_freedom(dims, c, scope == "all-univariate" ? DfScope::all_univariate : DfScope::blocks);
  }, py::arg("dims"), py::arg("measure"), py::arg("scope") = "blocks");

  m.def("white_noise", &white_noise, py::arg("n_segments"), py::arg("n_samples"), py::arg("n_channels"),
        py::arg("seed"));
  m.def("lagged_coupling", &lagged_coupling, py::arg("n_segments"), py::arg("n_samples"), py::arg("lag"),
        py::arg("coupling"), py::arg("noise_sd"), py::arg("seed"));
  m.def("volume_conduction",
        [](std::size_t n_r, std::size_t n_t, Eigen::MatrixXd c, Eigen::MatrixXd d, double noise_sd,
           std::uint64_t seed) {
          SimulationConfig cfg;
          cfg.n_segments = n_r;
          cfg.n_samples = n_t;
          cfg.mixing_c = std::move(c);
          cfg.mixing_d = std::move(d);
          cfg.noise_sd = noise_sd;
          cfg.seed = seed;
          auto rec = volume_conduction(cfg);
          return py::make_tuple(std::move(rec.segments), std::move(rec.partition));
        },
        py::arg("n_segments") = 200, py::arg("n_samples") = 128,
        py::arg("mixing_c") = Eigen::MatrixXd::Ones(1, 1), py::arg("mixing_d") = Eigen::MatrixXd::Ones(1, 1),
        py::arg("noise_sd") = 1.0, py::arg("seed") = 1);
}
