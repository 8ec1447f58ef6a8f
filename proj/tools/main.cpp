#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "commands.hpp"
#include "specdep/errors.hpp"

namespace cli = specdep::cli;

int main(int argc, char** argv) {
  CLI::App app{"specdep: instantaneous and lagged spectral dependence between groups of time series"};
  app.require_subcommand(1);

  cli::AnalysisConfig cfg;
  std::string config_path, format, bands, measures, norm, scale, detrend, taper;

  auto* analyze = app.add_subcommand("analyze", "Compute dependence measures and tests");
  analyze->add_option("--config", config_path, "JSON config file; flags given here override it");
  analyze->add_option("--input", cfg.input, "Segmented recording");
  analyze->add_option("--format", format, "csv-long | binary-f64 | spectral-f64");
  analyze->add_option("--partition", cfg.partition, "Blocks, e.g. 'X=0,1;Y=2,3' (default: one per channel)");
  analyze->add_option("--bands", bands, "Bands, e.g. 'alpha=8-12Hz;low=1:4;odd=1,3,5'");
  analyze->add_option("--measures", measures, "Comma list of linear, nonlinear, all-univariate");
  analyze->add_option("--norm", norm, "block | channel (required for nonlinear)");
  analyze->add_option("--scale", scale, "paper-NT | segments-NR | calibrated-2NRm1");
  analyze->add_option("--ridge", cfg.ridge, "Ridge added as ridge*(trace/M)*I before determinants");
  analyze->add_flag("--allow-infinite", cfg.allow_infinite, "Report singular joint spectra as infinite dependence");
  analyze->add_option("--detrend", detrend, "mean | none (default mean)");
  analyze->add_option("--taper", taper, "none | hann (default none)");
  analyze->add_option("--rate", cfg.sampling_rate, "Sampling rate in Hz (overrides the file)");
  analyze->add_option("--n-samples", cfg.n_samples, "Segment length N_T for spectral-f64 input");
  analyze->add_option("--threads", cfg.threads, "Worker threads (default: all cores)");
  analyze->add_option("--out", cfg.out, "Output directory");
  analyze->add_flag("--dump-spectra", cfg.dump_spectra, "Also write spectra.json");

  std::string spec_path, sim_out;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic recording");
  simulate->add_option("--spec", spec_path, "JSON simulation spec (default: common-source scenario)");
  simulate->add_option("--out", sim_out, "Output directory")->required();

  double perturb = 0.0;
  auto* selftest = app.add_subcommand("selftest", "Run the built-in oracle suites");
  selftest->add_option("--perturb-logdet", perturb)->group("");  // sensitivity hook

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*analyze) {
    try {
      cli::AnalysisConfig merged;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw specdep::ConfigError("cannot open config " + config_path);
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
          throw specdep::ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        cli::apply_config_json(j, merged);
      }
      if (!analyze->get_option("--input")->empty()) merged.input = cfg.input;
      if (!analyze->get_option("--partition")->empty()) merged.partition = cfg.partition;
      if (!analyze->get_option("--ridge")->empty()) merged.ridge = cfg.ridge;
      if (!analyze->get_option("--rate")->empty()) merged.sampling_rate = cfg.sampling_rate;
      if (!analyze->get_option("--n-samples")->empty()) merged.n_samples = cfg.n_samples;
      if (!analyze->get_option("--threads")->empty()) merged.threads = cfg.threads;
      if (!analyze->get_option("--out")->empty()) merged.out = cfg.out;
      if (cfg.allow_infinite) merged.allow_infinite = true;
      if (cfg.dump_spectra) merged.dump_spectra = true;

      nlohmann::json overrides = nlohmann::json::object();
      if (!format.empty()) overrides["format"] = format;
      if (!bands.empty()) overrides["bands"] = bands;
      if (!measures.empty()) overrides["measures"] = measures;
      if (!norm.empty()) overrides["norm"] = norm;
      if (!scale.empty()) overrides["scale"] = scale;
      if (!detrend.empty()) overrides["detrend"] = detrend;
      if (!taper.empty()) {
        if (taper != "none" && taper != "hann") throw specdep::ConfigError("unknown taper " + taper);
        overrides["taper"] = taper;
      }
      cli::apply_config_json(overrides, merged);
      return cli::cmd_analyze(merged, std::cerr);
    } catch (const std::exception& e) {
      cli::report_error(e, std::cerr);
      return cli::exit_code_for(e);
    }
  }
  if (*simulate) {
    std::optional<std::filesystem::path> spec;
    if (!spec_path.empty()) spec = spec_path;
    return cli::cmd_simulate(spec, sim_out, std::cerr);
  }
  return cli::cmd_selftest(std::cout, perturb);
}
