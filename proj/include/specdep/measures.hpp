#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "specdep/crossspectra.hpp"
#include "specdep/ingest.hpp"

namespace specdep {

enum class MeasureKind { linear, nonlinear };
enum class Scope { two_block, k_block, all_univariate };

const char* to_string(MeasureKind kind);
const char* to_string(Scope scope);

/// Total, lagged and instantaneous dependence, in nats.
struct MeasureTriple {
  double total = 0.0;
  double lagged = 0.0;
  double instantaneous = 0.0;
};

struct DependenceReport {
  MeasureKind kind = MeasureKind::linear;
  Scope scope = Scope::two_block;
  FreqTag freq = 0;
  std::vector<std::size_t> block_dims;

  /// Clamped measures (F or G): tiny negative jitter is set to 0.
  MeasureTriple measures;
  /// Values before clamping.
  MeasureTriple raw;
  /// 1 - exp(-measure); squared coherence or squared phase synchronization.
  MeasureTriple rho2;

  /// e.g. "perfect_dependence", "clamped_total", "ridge". "negative_lagged"
  /// marks a multichannel-block lagged value below zero, reported unclamped.
  std::vector<std::string> flags;

  std::size_t n_segments = 0;
  std::size_t n_pooled = 1;
  std::size_t n_samples = 0;

  bool has_flag(const std::string& f) const;
};

struct MeasureOptions {
  /// Adds ridge * (trace / M) * I to the joint matrix. 0 disables.
  double ridge = 0.0;
  /// Report a singular joint matrix as +infinity (flag "perfect_dependence")
  /// instead of raising SingularMatrixError.
  bool allow_infinite = false;
};

/// Linear dependence between the blocks of `partition` (two or more blocks).
DependenceReport linear_dependence(const CrossSpectrum& s, const BlockPartition& partition,
                                   const MeasureOptions& opts = {});

/// Same arithmetic on a block-normalized spectrum built with the same partition.
DependenceReport nonlinear_dependence(const CrossSpectrum& s, const BlockPartition& partition,
                                      const MeasureOptions& opts = {});

/// Linear dependence between all univariate channels (all channels when empty).
DependenceReport all_univariate_linear(const CrossSpectrum& s,
                                       std::span<const std::size_t> channels = {},
                                       const MeasureOptions& opts = {});

/// Nonlinear dependence between all univariate channels of a channel-normalized spectrum.
DependenceReport all_univariate_nonlinear(const CrossSpectrum& s,
                                          std::span<const std::size_t> channels = {},
                                          const MeasureOptions& opts = {});

/// Former general coherence and zero-lag-removed coherence (squared), kept
/// for comparison. On a block-normalized spectrum these are the phase
/// synchronization counterparts.
struct LegacyCoherence {
  double rho2_general = 0.0;
  double rho2_zero_lag_removed = 0.0;
};
LegacyCoherence legacy_2007a(const CrossSpectrum& s, const BlockPartition& partition);

/// Closed forms for two univariate series with auto-spectra sxx, syy and
/// cross-spectrum syx. Used as an oracle for the block formulas.
MeasureTriple univariate_closed_form(double sxx, double syy, cdouble syx);

/// The Hermitian sub-matrix over `channels`, in the given order.
Eigen::MatrixXcd submatrix(const Eigen::MatrixXcd& m, std::span<const std::size_t> channels);

}  // namespace specdep
