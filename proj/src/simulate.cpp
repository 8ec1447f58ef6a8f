#include "specdep/simulate.hpp"

#include <cmath>

#include "fft.hpp"
#include "specdep/crossspectra.hpp"
#include "specdep/errors.hpp"
#include "specdep/random.hpp"
#include "specdep/spectral.hpp"

namespace specdep {

void SimulationConfig::validate() const {
  if (n_segments < 1 || n_samples < 2) throw ConfigError("need n_segments >= 1 and n_samples >= 2");
  if (mixing_c.cols() != mixing_d.cols())
    throw ConfigError("mixing matrices C and D must share the source dimension r");
  if (mixing_c.rows() < 1 || mixing_d.rows() < 1 || mixing_c.cols() < 1)
    throw ConfigError("mixing matrices must be nonempty");
  if (!mixing_c.allFinite() || !mixing_d.allFinite()) throw ConfigError("mixing matrices must be finite");
  if (source.type == SourceSpec::Type::ar_pair) {
    if (mixing_c.cols() != 2) throw ConfigError("ar-pair source needs r = 2");
    if (source.lag < 1 || source.lag >= n_samples) throw ConfigError("ar-pair lag must lie in [1, n_samples)");
  }
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) throw ConfigError("noise_sd must be >= 0");
  if (noise_sd == 0.0 && !allow_zero_noise)
    throw ConfigError("zero noise makes the spectra singular; set allow_zero_noise to acknowledge");
}

SegmentSet white_noise(std::size_t n_segments, std::size_t n_samples, std::size_t n_channels,
                       std::uint64_t seed) {
  NormalStream rng(seed);
  std::vector<double> data(n_segments * n_samples * n_channels);
  for (auto& v : data) v = rng();
  return SegmentSet(n_segments, n_samples, n_channels, std::move(data));
}

MixedRecording volume_conduction(const SimulationConfig& cfg) {
  cfg.validate();
  const auto p = static_cast<std::size_t>(cfg.mixing_c.rows());
  const auto q = static_cast<std::size_t>(cfg.mixing_d.rows());
  const auto r = static_cast<std::size_t>(cfg.mixing_c.cols());
  const std::size_t m = p + q;
  const std::size_t n_t = cfg.n_samples;

  NormalStream rng(cfg.seed);
  std::vector<double> data(cfg.n_segments * n_t * m);
  Eigen::MatrixXd z(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(n_t));
  for (std::size_t j = 0; j < cfg.n_segments; ++j) {
    for (std::size_t t = 0; t < n_t; ++t) {
      const auto tt = static_cast<Eigen::Index>(t);
      for (std::size_t k = 0; k < r; ++k) z(static_cast<Eigen::Index>(k), tt) = rng();
      if (cfg.source.type == SourceSpec::Type::ar_pair) {
        const double lagged = t >= cfg.source.lag ? z(0, tt - static_cast<Eigen::Index>(cfg.source.lag)) : 0.0;
        z(1, tt) += cfg.source.coupling * lagged;
      }
      double* row = data.data() + (j * n_t + t) * m;
      const Eigen::VectorXd x = cfg.mixing_c * z.col(tt);
      const Eigen::VectorXd y = cfg.mixing_d * z.col(tt);
      for (std::size_t i = 0; i < p; ++i) row[i] = x(static_cast<Eigen::Index>(i)) + cfg.noise_sd * rng();
      for (std::size_t i = 0; i < q; ++i) row[p + i] = y(static_cast<Eigen::Index>(i)) + cfg.noise_sd * rng();
    }
  }

  std::vector<std::string> names;
  std::vector<std::size_t> xs, ys;
  for (std::size_t i = 0; i < p; ++i) {
    names.push_back("x" + std::to_string(i));
    xs.push_back(i);
  }
  for (std::size_t i = 0; i < q; ++i) {
    names.push_back("y" + std::to_string(i));
    ys.push_back(p + i);
  }
  return {SegmentSet(cfg.n_segments, n_t, m, std::move(data), std::move(names)),
          BlockPartition({xs, ys}, {"X", "Y"})};
}

SegmentSet lagged_coupling(std::size_t n_segments, std::size_t n_samples, std::size_t lag,
                           double coupling, double noise_sd, std::uint64_t seed) {
  if (lag < 1 || lag >= n_samples) throw ConfigError("lag must lie in [1, n_samples)");
  if (!(noise_sd >= 0.0)) throw ConfigError("noise_sd must be >= 0");
  NormalStream rng(seed);
  std::vector<double> data(n_segments * n_samples * 2);
  for (std::size_t j = 0; j < n_segments; ++j) {
    double* seg = data.data() + j * n_samples * 2;
    for (std::size_t t = 0; t < n_samples; ++t) {
      seg[2 * t] = rng();
      seg[2 * t + 1] = noise_sd * rng();
    }
    for (std::size_t t = lag; t < n_samples; ++t) seg[2 * t + 1] += coupling * seg[2 * (t - lag)];
  }
  return SegmentSet(n_segments, n_samples, 2, std::move(data), {"x", "y"});
}

namespace {

ParsevalCheck parseval_impl(const SegmentSet& s, const SpectralEnsemble& bin_coeffs, int omega) {
  const std::size_t n_t = s.n_samples();
  const std::size_t n_r = s.n_segments();
  const std::size_t m = s.n_channels();
  const auto mm = static_cast<Eigen::Index>(m);

  // Synthesize the series filtered to bins omega and N_T - omega, then take
  // its time-domain zero-lag covariance.
  detail::RealInversePlan inverse(n_t);
  std::vector<double> filtered(n_t * m);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(mm, mm);
  for (std::size_t j = 0; j < n_r; ++j) {
    for (std::size_t c = 0; c < m; ++c) {
      inverse.clear();
      inverse.set_bin(static_cast<std::size_t>(omega), bin_coeffs.at(j, 0, c));
      const double* x = inverse.execute();
      for (std::size_t t = 0; t < n_t; ++t) filtered[t * m + c] = x[t];
    }
    for (std::size_t t = 0; t < n_t; ++t) {
      const Eigen::Map<const Eigen::VectorXd> v(filtered.data() + t * m, mm);
      a.noalias() += v * v.transpose();
    }
  }
  a /= static_cast<double>(n_t) * static_cast<double>(n_r);

  ParsevalCheck out;
  out.a = a;
  out.lhs = accumulate(bin_coeffs, omega).matrix.real();
  const Eigen::MatrixXd rhs = 0.5 * static_cast<double>(n_t) * static_cast<double>(n_t) * a;
  const double scale = out.lhs.cwiseAbs().maxCoeff();
  const double diff = (out.lhs - rhs).cwiseAbs().maxCoeff();
  out.max_rel_err = scale > 0.0 ? diff / scale : diff;
  return out;
}

void check_interior(const SegmentSet& s, int omega) {
  const auto half = static_cast<int>(s.n_samples() / 2);
  if (omega < 1 || omega > half - 1)
    throw RangeError("Parseval oracle needs an interior bin in [1, " + std::to_string(half - 1) + "]");
}

}  // namespace

ParsevalCheck parseval_oracle(const SegmentSet& s, int omega) {
  check_interior(s, omega);
  const int freqs[] = {omega};
  return parseval_impl(s, dft(s, freqs), omega);
}

ParsevalCheck parseval_oracle(const SegmentSet& s, const BlockPartition& partition, int omega) {
  check_interior(s, omega);
  const int freqs[] = {omega};
  return parseval_impl(s, normalize_block(dft(s, freqs), partition), omega);
}

}  // namespace specdep
