#include "specdep/inference.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "specdep/errors.hpp"

namespace specdep {

const char* to_string(Component c) {
  switch (c) {
    case Component::total: return "total";
    case Component::lagged: return "lagged";
    case Component::instantaneous: return "instantaneous";
  }
  return "unknown";
}

const char* to_string(Scale s) {
  switch (s) {
    case Scale::paper_nt: return "paper-NT";
    case Scale::segments_nr: return "segments-NR";
    case Scale::calibrated_2nrm1: return "calibrated-2NRm1";
  }
  return "unknown";
}

Scale parse_scale(const std::string& text) {
  if (text == "paper-NT") return Scale::paper_nt;
  if (text == "segments-NR") return Scale::segments_nr;
  if (text == "calibrated-2NRm1") return Scale::calibrated_2nrm1;
  throw ConfigError("unknown scale '" + text + "'");
}

int degrees_of_freedom(std::span<const std::size_t> dims, Component c, DfScope scope) {
  if (dims.empty()) throw DimensionError("degrees_of_freedom needs at least one dimension");
  for (auto d : dims)
    if (d < 1) throw DimensionError("block dimensions must be >= 1");

  long long pairs;
  if (scope == DfScope::all_univariate) {
    if (dims.size() != 1) throw DimensionError("all-univariate df takes a single p");
    const long long p = static_cast<long long>(dims[0]);
    pairs = p * (p - 1) / 2;
  } else {
    pairs = 0;
    for (std::size_t i = 0; i < dims.size(); ++i)
      for (std::size_t j = i + 1; j < dims.size(); ++j)
        pairs += static_cast<long long>(dims[i]) * static_cast<long long>(dims[j]);
  }
  return static_cast<int>(c == Component::total ? 2 * pairs : pairs);
}

double chi_square_sf(double x, int df) {
  if (df < 1) throw RangeError("chi-square df must be >= 1");
  if (std::isnan(x)) throw RangeError("chi-square argument is NaN");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

double scale_value(Scale scale, std::size_t n_t, std::size_t n_r) {
  switch (scale) {
    case Scale::paper_nt: return static_cast<double>(n_t);
    case Scale::segments_nr: return static_cast<double>(n_r);
    case Scale::calibrated_2nrm1: return 2.0 * (static_cast<double>(n_r) - 1.0);
  }
  return 0.0;
}

std::array<TestResult, 3> test_dependence(const DependenceReport& report, std::size_t n_t,
                                          std::size_t n_r, Scale scale) {
  if (report.kind != MeasureKind::linear)
    throw NormModeError("chi-square tests apply to linear measures only");
  if (scale == Scale::paper_nt && n_t == 0)
    throw ConfigError("paper-NT scale needs the segment length N_T");
  if (n_r < 1) throw ConfigError("test needs at least one segment");

  const double k = scale_value(scale, n_t, n_r);
  const bool univariate = report.scope == Scope::all_univariate;
  const std::vector<std::size_t> dims =
      univariate ? std::vector<std::size_t>{report.block_dims.size()} : report.block_dims;
  const DfScope df_scope = univariate ? DfScope::all_univariate : DfScope::blocks;

  const std::array<std::pair<Component, double>, 3> parts{{
      {Component::total, report.measures.total},
      {Component::lagged, report.measures.lagged},
      {Component::instantaneous, report.measures.instantaneous},
  }};
  std::array<TestResult, 3> out;
  for (std::size_t i = 0; i < 3; ++i) {
    auto& t = out[i];
    t.measure = parts[i].first;
    t.df = degrees_of_freedom(dims, t.measure, df_scope);
    t.scale_used = scale;
    t.scale_value = k;
    if (std::isinf(parts[i].second)) {
      t.statistic = parts[i].second;
      t.p_value = 0.0;
      t.flags.emplace_back("infinite_measure");
    } else {
      t.statistic = k * parts[i].second;
      t.p_value = t.df > 0 ? chi_square_sf(t.statistic, t.df) : 1.0;
      if (parts[i].second < 0.0) t.flags.emplace_back("negative_lagged");
    }
  }
  return out;
}

}  // namespace specdep
