#pragma once

#include <json.hpp>

#include "specdep/crossspectra.hpp"
#include "specdep/inference.hpp"
#include "specdep/measures.hpp"
#include "specdep/simulate.hpp"

namespace specdep {

/// {freq, n_segments, norm_mode, matrix_re, matrix_im}; matrices row-major.
nlohmann::json to_json(const CrossSpectrum& s);

/// {kind, scope, freq, block_dims, total, lagged, instantaneous,
///  rho2: {total, lagged, instantaneous}, flags}. Infinite measures are null.
nlohmann::json to_json(const DependenceReport& r);

/// {measure, statistic, df, p_value, scale_used, scale_value}.
nlohmann::json to_json(const TestResult& t);

nlohmann::json to_json(const SimulationConfig& cfg);
/// Missing keys keep their defaults; throws ConfigError on bad values.
SimulationConfig simulation_config_from_json(const nlohmann::json& j);

nlohmann::json freq_to_json(const FreqTag& tag);

}  // namespace specdep
