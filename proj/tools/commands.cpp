#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "specdep/errors.hpp"
#include "specdep/json_io.hpp"
#include "specdep/linalg.hpp"
#include "specdep/random.hpp"
#include "specdep/selftest.hpp"
#include "specdep/simulate.hpp"
#include "specdep/spectral.hpp"

namespace specdep::cli {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
std::optional<T> parse_num(const std::string& s) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<int> parse_bins(const std::string& text, const std::string& band) {
  std::vector<int> bins;
  for (const auto& item : split(text, ',')) {
    const auto colon = item.find(':');
    if (colon != std::string::npos) {
      const auto lo = parse_num<int>(trim(item.substr(0, colon)));
      const auto hi = parse_num<int>(trim(item.substr(colon + 1)));
      if (!lo || !hi || *lo > *hi) throw ConfigError("bad bin range '" + item + "' in band " + band);
      for (int w = *lo; w <= *hi; ++w) bins.push_back(w);
    } else {
      const auto w = parse_num<int>(item);
      if (!w) throw ConfigError("bad bin '" + item + "' in band " + band);
      bins.push_back(*w);
    }
  }
  if (bins.empty()) throw ConfigError("band " + band + " has no bins");
  return bins;
}

struct Target {
  const CrossSpectrum* raw = nullptr;
  const CrossSpectrum* normalized = nullptr;
};

// A block-normalized spectrum restricted to a subset of its blocks is the
// block-normalized spectrum of that sub-partition: blocks normalize independently.
CrossSpectrum relabel(const CrossSpectrum& s, const BlockPartition& sub) {
  CrossSpectrum out = s;
  out.norm = NormMode::block(sub);
  return out;
}

std::string join_names(const BlockPartition& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += '|';
    s += p.names()[i];
  }
  return s;
}

std::vector<TestResult> tests_for(const DependenceReport& r, Scale scale) {
  const auto t = test_dependence(r, r.n_samples, r.n_segments * r.n_pooled, scale);
  return {t.begin(), t.end()};
}

std::vector<AnalysisRow> evaluate(const Target& target, const AnalysisConfig& cfg,
                                  const BlockPartition& partition) {
  MeasureOptions opts;
  opts.ridge = cfg.ridge;
  opts.allow_infinite = cfg.allow_infinite;

  // The full partition first, then each block pair when there are more than two blocks.
  std::vector<BlockPartition> groups{partition};
  if (partition.size() > 2)
    for (std::size_t a = 0; a < partition.size(); ++a)
      for (std::size_t b = a + 1; b < partition.size(); ++b)
        groups.emplace_back(std::vector<std::vector<std::size_t>>{partition.block(a), partition.block(b)},
                            std::vector<std::string>{partition.names()[a], partition.names()[b]});

  std::vector<AnalysisRow> rows;
  const bool multi_block = partition.size() >= 2;
  if (cfg.linear && multi_block)
    for (const auto& g : groups) {
      auto rep = linear_dependence(*target.raw, g, opts);
      auto tests = tests_for(rep, cfg.scale);
      rows.push_back({join_names(g), std::move(rep), std::move(tests)});
    }
  const auto channels = partition.channels();
  if (cfg.all_univariate) {
    auto rep = all_univariate_linear(*target.raw, channels, opts);
    auto tests = tests_for(rep, cfg.scale);
    rows.push_back({"*", std::move(rep), std::move(tests)});
  }
  if (cfg.nonlinear) {
    if (*cfg.norm == NormMode::Kind::block) {
      if (multi_block)
        for (const auto& g : groups)
          rows.push_back({join_names(g), nonlinear_dependence(relabel(*target.normalized, g), g, opts), {}});
    } else {
      rows.push_back({"*", all_univariate_nonlinear(*target.normalized, channels, opts), {}});
    }
  }
  return rows;
}

SegmentSet load_input(const AnalysisConfig& cfg) {
  const auto fmt = cfg.format == InputFormat::csv_long ? SegmentFormat::csv_long : SegmentFormat::binary_f64;
  auto s = load_segments(cfg.input, fmt);
  if (cfg.sampling_rate) s.set_sampling_rate(cfg.sampling_rate);
  s = detrend(s, cfg.detrend);
  if (cfg.hann) s = hann_taper(s);
  return s;
}

void validate(const AnalysisConfig& cfg) {
  if (cfg.input.empty()) throw ConfigError("--input is required");
  if (!cfg.linear && !cfg.nonlinear && !cfg.all_univariate) throw ConfigError("no measures requested");
  if (cfg.nonlinear && !cfg.norm)
    throw ConfigError("nonlinear measures need --norm block or --norm channel");
  if (cfg.ridge < 0.0 || !std::isfinite(cfg.ridge)) throw ConfigError("--ridge must be >= 0");
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<BandSpec> parse_bands(const std::string& text) {
  std::vector<BandSpec> bands;
  std::set<std::string> names;
  for (const auto& item : split(text, ';')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("band '" + item + "' needs the form name=spec");
    BandSpec b;
    b.name = trim(item.substr(0, eq));
    std::string spec = trim(item.substr(eq + 1));
    if (b.name.empty()) throw ConfigError("band with empty name");
    if (!names.insert(b.name).second) throw ConfigError("duplicate band name " + b.name);
    if (spec.size() > 2 && (spec.ends_with("Hz") || spec.ends_with("hz"))) {
      spec = trim(spec.substr(0, spec.size() - 2));
      const auto dash = spec.find('-', 1);
      const auto lo = dash == std::string::npos ? std::nullopt : parse_num<double>(trim(spec.substr(0, dash)));
      const auto hi = dash == std::string::npos ? std::nullopt : parse_num<double>(trim(spec.substr(dash + 1)));
      if (!lo || !hi || *lo > *hi) throw ConfigError("bad Hz range in band " + b.name);
      b.hz = std::pair{*lo, *hi};
    } else {
      b.bins = parse_bins(spec, b.name);
    }
    bands.push_back(std::move(b));
  }
  return bands;
}

BlockPartition parse_partition(const std::string& text, const std::vector<std::string>& channel_names,
                               std::size_t n_channels) {
  if (trim(text).empty()) return BlockPartition::singletons(n_channels);
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<std::string> names;
  for (const auto& item : split(text, ';')) {
    const auto eq = item.find('=');
    std::string name = eq == std::string::npos ? "B" + std::to_string(blocks.size()) : trim(item.substr(0, eq));
    const std::string members = eq == std::string::npos ? item : item.substr(eq + 1);
    std::vector<std::size_t> block;
    for (const auto& tok : split(members, ',')) {
      const auto named = std::find(channel_names.begin(), channel_names.end(), tok);
      if (named != channel_names.end()) {
        block.push_back(static_cast<std::size_t>(named - channel_names.begin()));
      } else if (const auto idx = parse_num<std::size_t>(tok)) {
        block.push_back(*idx);
      } else {
        throw ConfigError("unknown channel '" + tok + "' in partition");
      }
    }
    blocks.push_back(std::move(block));
    names.push_back(std::move(name));
  }
  try {
    BlockPartition p(std::move(blocks), std::move(names));
    p.check_bounds(n_channels);
    return p;
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("bad partition: ") + e.what());
  }
}

std::vector<int> resolve_band(const BandSpec& band, const std::vector<int>& retained,
                              std::size_t n_samples, std::optional<double> rate) {
  std::vector<int> bins;
  if (band.hz) {
    if (!rate) throw ConfigError("band " + band.name + " uses Hz but no sampling rate is known");
    if (n_samples == 0) throw ConfigError("band " + band.name + " uses Hz but N_T is unknown");
    for (int w : retained) {
      const double f = static_cast<double>(w) * *rate / static_cast<double>(n_samples);
      if (f >= band.hz->first && f <= band.hz->second) bins.push_back(w);
    }
    if (bins.empty()) throw ConfigError("band " + band.name + " contains no retained frequency");
  } else {
    for (int w : band.bins) {
      if (std::find(retained.begin(), retained.end(), w) == retained.end())
        throw ConfigError("band " + band.name + " bin " + std::to_string(w) + " is not a retained frequency");
      bins.push_back(w);
    }
  }
  return bins;
}

void apply_config_json(const nlohmann::json& j, AnalysisConfig& cfg) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  try {
    if (j.contains("input")) cfg.input = j.at("input").get<std::string>();
    if (j.contains("format")) {
      const auto f = j.at("format").get<std::string>();
      if (f == "csv-long") cfg.format = InputFormat::csv_long;
      else if (f == "binary-f64") cfg.format = InputFormat::binary_f64;
      else if (f == "spectral-f64") cfg.format = InputFormat::spectral_f64;
      else throw ConfigError("unknown format " + f);
    }
    if (j.contains("partition")) {
      const auto& p = j.at("partition");
      if (p.is_string()) {
        cfg.partition = p.get<std::string>();
      } else {
        // [{"name": "X", "channels": [0, "ch_1"]}, ...]
        std::string text;
        for (const auto& block : p) {
          if (!text.empty()) text += ';';
          text += block.at("name").get<std::string>() + "=";
          bool first = true;
          for (const auto& c : block.at("channels")) {
            if (!first) text += ',';
            text += c.is_string() ? c.get<std::string>() : std::to_string(c.get<std::size_t>());
            first = false;
          }
        }
        cfg.partition = text;
      }
    }
    if (j.contains("bands")) cfg.bands = parse_bands(j.at("bands").get<std::string>());
    if (j.contains("measures")) {
      const auto& m = j.at("measures");
      std::vector<std::string> list;
      if (m.is_string()) list = split(m.get<std::string>(), ',');
      else list = m.get<std::vector<std::string>>();
      cfg.linear = cfg.nonlinear = cfg.all_univariate = false;
      for (const auto& item : list) {
        if (item == "linear") cfg.linear = true;
        else if (item == "nonlinear") cfg.nonlinear = true;
        else if (item == "all-univariate") cfg.all_univariate = true;
        else throw ConfigError("unknown measure " + item);
      }
    }
    if (j.contains("norm")) {
      const auto n = j.at("norm").get<std::string>();
      if (n == "block") cfg.norm = NormMode::Kind::block;
      else if (n == "channel") cfg.norm = NormMode::Kind::channel;
      else throw ConfigError("unknown norm " + n);
    }
    if (j.contains("scale")) {
      cfg.scale = parse_scale(j.at("scale").get<std::string>());
      cfg.scale_given = true;
    }
    if (j.contains("ridge")) cfg.ridge = j.at("ridge").get<double>();
    if (j.contains("allow_infinite")) cfg.allow_infinite = j.at("allow_infinite").get<bool>();
    if (j.contains("detrend")) {
      const auto d = j.at("detrend").get<std::string>();
      if (d == "mean") cfg.detrend = DetrendMode::mean;
      else if (d == "none") cfg.detrend = DetrendMode::none;
      else throw ConfigError("unknown detrend " + d);
    }
    if (j.contains("taper")) cfg.hann = j.at("taper").get<std::string>() == "hann";
    if (j.contains("sampling_rate")) cfg.sampling_rate = j.at("sampling_rate").get<double>();
    if (j.contains("n_samples")) cfg.n_samples = j.at("n_samples").get<std::size_t>();
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
    if (j.contains("dump_spectra")) cfg.dump_spectra = j.at("dump_spectra").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config file: ") + e.what());
  }
}

AnalysisResult run_analysis(const AnalysisConfig& cfg) {
  validate(cfg);
  AnalysisResult result;

  SpectralEnsemble raw;
  std::vector<std::string> channel_names;
  if (cfg.format == InputFormat::spectral_f64) {
    raw = load_spectral(cfg.input);
    if (raw.norm().kind != NormMode::Kind::raw) throw ConfigError("spectral input must be raw coefficients");
    raw = SpectralEnsemble(raw.n_segments(), raw.freq_indices(), raw.n_channels(),
                           std::vector<cdouble>(raw.coeffs().begin(), raw.coeffs().end()), NormMode::raw(),
                           cfg.n_samples, cfg.sampling_rate);
    for (std::size_t i = 0; i < raw.n_channels(); ++i) channel_names.push_back("ch_" + std::to_string(i));
  } else {
    const auto s = load_input(cfg);
    channel_names = s.channel_names();
    raw = dft(s);
  }

  const auto partition = parse_partition(cfg.partition, channel_names, raw.n_channels());
  std::optional<SpectralEnsemble> normalized;
  if (cfg.nonlinear)
    normalized = *cfg.norm == NormMode::Kind::block ? normalize_block(raw, partition) : normalize_channel(raw);

  // Per-bin spectra, then pooled bands, for each ensemble.
  std::vector<CrossSpectrum> raw_spectra = accumulate_all(raw);
  std::vector<CrossSpectrum> norm_spectra;
  if (normalized) norm_spectra = accumulate_all(*normalized);
  const std::size_t n_bins = raw_spectra.size();
  for (const auto& band : cfg.bands) {
    const FrequencyBand fb{band.name, resolve_band(band, raw.freq_indices(), raw.n_samples(), raw.sampling_rate())};
    raw_spectra.push_back(pool(std::span(raw_spectra.data(), n_bins), fb));
    if (normalized) norm_spectra.push_back(pool(std::span(norm_spectra.data(), n_bins), fb));
  }

  std::vector<Target> targets(raw_spectra.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    targets[i].raw = &raw_spectra[i];
    if (normalized) targets[i].normalized = &norm_spectra[i];
  }

  // Work pool over targets; results land in their own slots, so order is fixed.
  std::vector<std::vector<AnalysisRow>> slots(targets.size());
  std::vector<std::exception_ptr> errors(targets.size());
  std::atomic<std::size_t> next{0};
  const unsigned hw = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  const unsigned n_workers = static_cast<unsigned>(std::min<std::size_t>(hw, targets.size()));
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < targets.size();) {
      try {
        slots[i] = evaluate(targets[i], cfg, partition);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool_threads;
    for (unsigned w = 1; w < n_workers; ++w) pool_threads.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (auto& s : slots)
    for (auto& row : s) result.rows.push_back(std::move(row));

  result.spectra = std::move(raw_spectra);
  if (!cfg.scale_given && (cfg.linear || cfg.all_univariate))
    result.notes.push_back(
        "note: tests use the calibrated scale 2(N_R-1) by default; pass --scale paper-NT for the N_T "
        "scaling of the classical asymptotic statement");
  return result;
}

void write_outputs(const AnalysisResult& result, const AnalysisConfig& cfg) {
  if (cfg.out.empty()) throw ConfigError("--out is required");
  std::filesystem::create_directories(cfg.out);

  auto reports = nlohmann::json::array();
  auto tests = nlohmann::json::array();
  for (const auto& row : result.rows) {
    auto r = to_json(row.report);
    r["blocks"] = row.blocks;
    reports.push_back(std::move(r));
    if (!row.tests.empty()) {
      auto t = nlohmann::json::array();
      for (const auto& tr : row.tests) t.push_back(to_json(tr));
      tests.push_back({{"blocks", row.blocks},
                       {"kind", to_string(row.report.kind)},
                       {"scope", to_string(row.report.scope)},
                       {"freq", freq_to_json(row.report.freq)},
                       {"tests", std::move(t)}});
    }
  }
  std::ofstream(cfg.out / "reports.json") << reports.dump(2) << '\n';
  std::ofstream(cfg.out / "tests.json") << tests.dump(2) << '\n';

  std::ofstream csv(cfg.out / "connectivity.csv");
  csv << "kind,scope,blocks,freq,rho2_total,rho2_lagged,rho2_instantaneous\n";
  for (const auto& row : result.rows) {
    const auto& r = row.report;
    csv << to_string(r.kind) << ',' << to_string(r.scope) << ',' << csv_escape(row.blocks) << ','
        << csv_escape(to_string(r.freq)) << ',' << format_double(r.rho2.total) << ','
        << format_double(r.rho2.lagged) << ',' << format_double(r.rho2.instantaneous) << '\n';
  }

  if (cfg.dump_spectra) {
    auto spectra = nlohmann::json::array();
    for (const auto& s : result.spectra) spectra.push_back(to_json(s));
    std::ofstream(cfg.out / "spectra.json") << spectra.dump(2) << '\n';
  }
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const NormModeError*>(&e)) return 2;
  if (dynamic_cast<const SingularMatrixError*>(&e) || dynamic_cast<const ConsistencyError*>(&e)) return 4;
  return 3;
}

void report_error(const std::exception& e, std::ostream& err) {
  const auto* se = dynamic_cast<const Error*>(&e);
  std::string reason = e.what();
  std::replace(reason.begin(), reason.end(), '\n', ' ');
  err << "specdep: error kind=" << (se ? se->kind() : "io") << " exit=" << exit_code_for(e)
      << " reason=" << reason << '\n';
}

int cmd_analyze(const AnalysisConfig& cfg, std::ostream& err) {
  try {
    if (cfg.out.empty()) throw ConfigError("--out is required");
    const auto result = run_analysis(cfg);
    for (const auto& n : result.notes) err << n << '\n';
    write_outputs(result, cfg);
    return 0;
  } catch (const std::exception& e) {
    report_error(e, err);
    return exit_code_for(e);
  }
}

int cmd_simulate(const std::optional<std::filesystem::path>& spec, const std::filesystem::path& out,
                 std::ostream& err) {
  try {
    if (out.empty()) throw ConfigError("--out is required");
    nlohmann::json j = nlohmann::json::object();
    if (spec) {
      std::ifstream in(*spec);
      if (!in) throw ConfigError("cannot open spec " + spec->string());
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("spec is not valid JSON: ") + e.what());
      }
    }
    const std::string scenario = j.value("scenario", std::string("volume-conduction"));
    nlohmann::json sidecar{{"scenario", scenario},
                           {"prng", std::string(Philox4x32::name) + "/box-muller v" +
                                        std::to_string(NormalStream::version)}};
    SegmentSet segments;
    if (scenario == "volume-conduction") {
      const auto cfg = simulation_config_from_json(j);
      auto rec = volume_conduction(cfg);
      sidecar["config"] = to_json(cfg);
      sidecar["partition"] = {{"X", rec.partition.block(0)}, {"Y", rec.partition.block(1)}};
      segments = std::move(rec.segments);
    } else if (scenario == "white-noise" || scenario == "lagged-coupling") {
      try {
        const auto n_r = j.value("n_segments", std::size_t{200});
        const auto n_t = j.value("n_samples", std::size_t{128});
        const auto seed = j.value("seed", std::uint64_t{1});
        if (n_r < 1 || n_t < 2) throw ConfigError("need n_segments >= 1 and n_samples >= 2");
        nlohmann::json echo{{"n_segments", n_r}, {"n_samples", n_t}, {"seed", seed}};
        if (scenario == "white-noise") {
          const auto m = j.value("n_channels", std::size_t{2});
          if (m < 1) throw ConfigError("n_channels must be >= 1");
          segments = white_noise(n_r, n_t, m, seed);
          echo["n_channels"] = m;
        } else {
          const auto lag = j.value("lag", std::size_t{3});
          const auto coupling = j.value("coupling", 1.0);
          const auto noise = j.value("noise_sd", 0.1);
          if (!(noise > 0.0) && !j.value("allow_zero_noise", false))
            throw ConfigError("zero noise makes the spectra singular; set allow_zero_noise to acknowledge");
          segments = lagged_coupling(n_r, n_t, lag, coupling, noise, seed);
          echo.update({{"lag", lag}, {"coupling", coupling}, {"noise_sd", noise}});
        }
        sidecar["config"] = echo;
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad simulation spec: ") + e.what());
      }
    } else {
      throw ConfigError("unknown scenario '" + scenario + "'");
    }
    sidecar["channel_names"] = segments.channel_names();
    std::filesystem::create_directories(out);
    write_segments(segments, out / "segments.bin", SegmentFormat::binary_f64);
    std::ofstream(out / "segments.json") << sidecar.dump(2) << '\n';
    return 0;
  } catch (const std::exception& e) {
    report_error(e, err);
    return exit_code_for(e);
  }
}

int cmd_selftest(std::ostream& out, double perturb_logdet) {
  detail::set_logdet_perturbation(perturb_logdet);
  const auto results = run_selftest();
  detail::set_logdet_perturbation(0.0);
  return report_selftest(results, out) ? 0 : 1;
}

}  // namespace specdep::cli
