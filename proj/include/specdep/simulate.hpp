#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>

#include "specdep/ingest.hpp"

namespace specdep {

struct SourceSpec {
  enum class Type { white, ar_pair };
  Type type = Type::white;
  /// ar_pair only: z2_t = coupling * z1_{t-lag} + white noise.
  std::size_t lag = 1;
  double coupling = 0.0;
};

/// Common-source mixing scenario: X = C Z + noise, Y = D Z + noise.
struct SimulationConfig {
  std::size_t n_segments = 200;
  std::size_t n_samples = 128;
  Eigen::MatrixXd mixing_c = Eigen::MatrixXd::Ones(1, 1);  ///< p x r
  Eigen::MatrixXd mixing_d = Eigen::MatrixXd::Ones(1, 1);  ///< q x r
  SourceSpec source;
  double noise_sd = 1.0;
  std::uint64_t seed = 1;
  /// Must be set to run with noise_sd == 0.
  bool allow_zero_noise = false;

  /// Throws ConfigError on inconsistent dimensions or unacknowledged zero noise.
  void validate() const;
};

struct MixedRecording {
  SegmentSet segments;
  /// Block 0: the p X channels; block 1: the q Y channels.
  BlockPartition partition;
};

/// i.i.d. N(0,1) samples, drawn in [segment][time][channel] order.
SegmentSet white_noise(std::size_t n_segments, std::size_t n_samples, std::size_t n_channels,
                       std::uint64_t seed);

/// Per segment and time step the draws are: r source values, p X-noise
/// values, q Y-noise values.
MixedRecording volume_conduction(const SimulationConfig& cfg);

/// Channel 0 white; channel 1 = coupling * (channel 0 delayed by `lag` within
/// each segment, zero at the head) + noise_sd * white noise.
SegmentSet lagged_coupling(std::size_t n_segments, std::size_t n_samples, std::size_t lag,
                           double coupling, double noise_sd, std::uint64_t seed);

/// Zero-lag covariance of the ideally band-filtered series versus the real part
/// of the cross-spectrum at the same bin.
struct ParsevalCheck {
  Eigen::MatrixXd a;    ///< time-domain covariance of the filtered series
  Eigen::MatrixXd lhs;  ///< Re of the cross-spectrum
  double max_rel_err = 0.0;
};

/// Requires 1 <= omega <= floor(N_T/2) - 1.
ParsevalCheck parseval_oracle(const SegmentSet& s, int omega);

/// Same identity where the bin coefficients are block-normalized before the
/// filtered series is synthesized.
ParsevalCheck parseval_oracle(const SegmentSet& s, const BlockPartition& partition, int omega);

}  // namespace specdep
