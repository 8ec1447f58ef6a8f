#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "specdep/crossspectra.hpp"
#include "specdep/inference.hpp"
#include "specdep/ingest.hpp"
#include "specdep/measures.hpp"

namespace specdep::cli {

enum class InputFormat { csv_long, binary_f64, spectral_f64 };

struct BandSpec {
  std::string name;
  std::vector<int> bins;                            // explicit bins, or
  std::optional<std::pair<double, double>> hz;      // a Hz range
};

struct AnalysisConfig {
  std::filesystem::path input;
  InputFormat format = InputFormat::csv_long;
  std::string partition;  // "X=0,1;Y=2,3"; empty means one block per channel
  std::vector<BandSpec> bands;
  bool linear = true;
  bool nonlinear = false;
  bool all_univariate = false;
  std::optional<NormMode::Kind> norm;
  Scale scale = Scale::calibrated_2nrm1;
  bool scale_given = false;
  double ridge = 0.0;
  bool allow_infinite = false;
  DetrendMode detrend = DetrendMode::mean;
  bool hann = false;
  std::optional<double> sampling_rate;
  std::size_t n_samples = 0;  // spectral input only: N_T of the source
  std::filesystem::path out;
  bool dump_spectra = false;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Parsers for the textual forms; all throw ConfigError.
std::vector<BandSpec> parse_bands(const std::string& text);
BlockPartition parse_partition(const std::string& text, const std::vector<std::string>& channel_names,
                               std::size_t n_channels);
std::vector<int> resolve_band(const BandSpec& band, const std::vector<int>& retained,
                              std::size_t n_samples, std::optional<double> rate);
/// Fills the fields present in a JSON config file; later CLI flags override.
void apply_config_json(const nlohmann::json& j, AnalysisConfig& cfg);

/// One measure evaluation with its label and (linear only) tests.
struct AnalysisRow {
  std::string blocks;  // e.g. "X|Y"
  DependenceReport report;
  std::vector<TestResult> tests;
};

struct AnalysisResult {
  std::vector<AnalysisRow> rows;  // deterministic order
  std::vector<CrossSpectrum> spectra;
  std::vector<std::string> notes;
};

/// Full pipeline without touching the output directory.
AnalysisResult run_analysis(const AnalysisConfig& cfg);
/// Writes reports.json, tests.json, connectivity.csv (and spectra.json).
void write_outputs(const AnalysisResult& result, const AnalysisConfig& cfg);

/// Exit codes: 0 ok, 2 config, 3 data, 4 numerical.
int cmd_analyze(const AnalysisConfig& cfg, std::ostream& err);
int cmd_simulate(const std::optional<std::filesystem::path>& spec, const std::filesystem::path& out,
                 std::ostream& err);
int cmd_selftest(std::ostream& out, double perturb_logdet = 0.0);

/// Maps a library exception to its exit code.
int exit_code_for(const std::exception& e);
/// "specdep: error kind=<kind> exit=<code> reason=<message>"
void report_error(const std::exception& e, std::ostream& err);

std::string format_double(double v);

}  // namespace specdep::cli
