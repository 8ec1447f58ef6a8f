#include "specdep/json_io.hpp"

#include <cmath>

#include "specdep/errors.hpp"

namespace specdep {

namespace {

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const char* name) {
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty())
    throw ConfigError(std::string(name) + " must be a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ConfigError(std::string(name) + " rows must have equal length");
    for (Eigen::Index k = 0; k < cols; ++k) {
      const auto& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) throw ConfigError(std::string(name) + " entries must be numbers");
      m(i, k) = v.get<double>();
    }
  }
  return m;
}

}  // namespace

nlohmann::json freq_to_json(const FreqTag& tag) {
  if (const auto* w = std::get_if<int>(&tag)) return *w;
  return std::get<std::string>(tag);
}

nlohmann::json to_json(const CrossSpectrum& s) {
  const auto n = s.matrix.rows();
  auto re = nlohmann::json::array();
  auto im = nlohmann::json::array();
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      re.push_back(s.matrix(a, b).real());
      im.push_back(s.matrix(a, b).imag());
    }
  return {{"freq", freq_to_json(s.freq)},
          {"n_segments", s.n_segments},
          {"norm_mode", to_string(s.norm.kind)},
          {"matrix_re", std::move(re)},
          {"matrix_im", std::move(im)}};
}

nlohmann::json to_json(const DependenceReport& r) {
  return {{"kind", to_string(r.kind)},
          {"scope", to_string(r.scope)},
          {"freq", freq_to_json(r.freq)},
          {"block_dims", r.block_dims},
          {"total", finite_or_null(r.measures.total)},
          {"lagged", finite_or_null(r.measures.lagged)},
          {"instantaneous", finite_or_null(r.measures.instantaneous)},
          {"rho2",
           {{"total", r.rho2.total}, {"lagged", r.rho2.lagged}, {"instantaneous", r.rho2.instantaneous}}},
          {"flags", r.flags}};
}

nlohmann::json to_json(const TestResult& t) {
  return {{"measure", to_string(t.measure)},
          {"statistic", finite_or_null(t.statistic)},
          {"df", t.df},
          {"p_value", t.p_value},
          {"scale_used", to_string(t.scale_used)},
          {"scale_value", t.scale_value}};
}

nlohmann::json to_json(const SimulationConfig& cfg) {
  nlohmann::json source;
  if (cfg.source.type == SourceSpec::Type::white) {
    source = {{"type", "white"}};
  } else {
    source = {{"type", "ar-pair"}, {"lag", cfg.source.lag}, {"coupling", cfg.source.coupling}};
  }
  return {{"n_segments", cfg.n_segments},
          {"n_samples", cfg.n_samples},
          {"mixing_C", matrix_to_json(cfg.mixing_c)},
          {"mixing_D", matrix_to_json(cfg.mixing_d)},
          {"source", source},
          {"noise_sd", cfg.noise_sd},
          {"seed", cfg.seed},
          {"allow_zero_noise", cfg.allow_zero_noise}};
}

SimulationConfig simulation_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("simulation spec must be a JSON object");
  SimulationConfig cfg;
  try {
    if (j.contains("n_segments")) cfg.n_segments = j.at("n_segments").get<std::size_t>();
    if (j.contains("n_samples")) cfg.n_samples = j.at("n_samples").get<std::size_t>();
    if (j.contains("mixing_C")) cfg.mixing_c = matrix_from_json(j.at("mixing_C"), "mixing_C");
    if (j.contains("mixing_D")) cfg.mixing_d = matrix_from_json(j.at("mixing_D"), "mixing_D");
    if (j.contains("noise_sd")) cfg.noise_sd = j.at("noise_sd").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("allow_zero_noise")) cfg.allow_zero_noise = j.at("allow_zero_noise").get<bool>();
    if (j.contains("source")) {
      const auto& s = j.at("source");
      const auto type = s.at("type").get<std::string>();
      if (type == "white") {
        cfg.source.type = SourceSpec::Type::white;
      } else if (type == "ar-pair") {
        cfg.source.type = SourceSpec::Type::ar_pair;
        cfg.source.lag = s.at("lag").get<std::size_t>();
        cfg.source.coupling = s.at("coupling").get<double>();
      } else {
        throw ConfigError("unknown source type '" + type + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad simulation spec: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

}  // namespace specdep
