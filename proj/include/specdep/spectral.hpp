#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "specdep/ingest.hpp"

namespace specdep {

using cdouble = std::complex<double>;

/// Normalization state of a spectral ensemble.
struct NormMode {
  enum class Kind : std::uint8_t { raw = 0, block = 1, channel = 2 };

  Kind kind = Kind::raw;
  /// Set iff kind == block.
  std::optional<BlockPartition> partition;

  static NormMode raw() { return {}; }
  static NormMode block(BlockPartition p) { return {Kind::block, std::move(p)}; }
  static NormMode channel() { return {Kind::channel, std::nullopt}; }

  bool operator==(const NormMode&) const = default;
};

const char* to_string(NormMode::Kind kind);

/// Per-segment, per-frequency complex coefficients, stored [segment][frequency][channel].
class SpectralEnsemble {
 public:
  SpectralEnsemble() = default;
  SpectralEnsemble(std::size_t n_segments, std::vector<int> freq_indices,
                   std::size_t n_channels, std::vector<cdouble> coeffs,
                   NormMode norm = NormMode::raw(), std::size_t n_samples = 0,
                   std::optional<double> sampling_rate = std::nullopt);

  std::size_t n_segments() const noexcept { return n_segments_; }
  std::size_t n_freqs() const noexcept { return freq_indices_.size(); }
  std::size_t n_channels() const noexcept { return n_channels_; }
  /// Segment length N_T of the source recording; 0 when unknown (imported).
  std::size_t n_samples() const noexcept { return n_samples_; }
  std::optional<double> sampling_rate() const noexcept { return sampling_rate_; }
  const std::vector<int>& freq_indices() const noexcept { return freq_indices_; }
  const NormMode& norm() const noexcept { return norm_; }

  /// Position of discrete frequency `omega` in freq_indices, if retained.
  std::optional<std::size_t> position_of(int omega) const;

  cdouble at(std::size_t segment, std::size_t fpos, std::size_t channel) const {
    return coeffs_[index(segment, fpos, channel)];
  }
  /// Coefficient vector over all channels for one segment and frequency position.
  std::span<const cdouble> vector(std::size_t segment, std::size_t fpos) const {
    return {coeffs_.data() + index(segment, fpos, 0), n_channels_};
  }
  std::span<const cdouble> coeffs() const noexcept { return coeffs_; }

 private:
  std::size_t index(std::size_t s, std::size_t f, std::size_t m) const noexcept {
    return (s * freq_indices_.size() + f) * n_channels_ + m;
  }

  std::size_t n_segments_ = 0;
  std::size_t n_channels_ = 0;
  std::size_t n_samples_ = 0;
  std::vector<int> freq_indices_;
  std::vector<cdouble> coeffs_;
  NormMode norm_;
  std::optional<double> sampling_rate_;
};

/// Frequencies 1..floor(N_T/2).
std::vector<int> positive_half(std::size_t n_samples);

/// Unscaled DFT X_w = sum_t x_t exp(-2 pi i w t / N_T) at the given bins.
SpectralEnsemble dft(const SegmentSet& s, std::span<const int> freqs);
/// Same, at the positive-half frequencies.
SpectralEnsemble dft(const SegmentSet& s);

/// Divide each block sub-vector by its Euclidean norm.
SpectralEnsemble normalize_block(const SpectralEnsemble& e, const BlockPartition& partition);
/// Divide each coefficient by its modulus.
SpectralEnsemble normalize_channel(const SpectralEnsemble& e);

/// Binary export: "SDSPC1", u32 (N_R, F, M), u8 norm kind, interleaved f64 (re, im).
void write_spectral(const SpectralEnsemble& e, const std::filesystem::path& path);
/// Frequencies of an imported ensemble are labelled 0..F-1 unless `freq_indices`
/// is given. A block-normalized file requires the partition it was built with;
/// unit norms are re-verified on load.
SpectralEnsemble load_spectral(const std::filesystem::path& path,
                               std::optional<BlockPartition> partition = std::nullopt,
                               std::optional<std::vector<int>> freq_indices = std::nullopt);

}  // namespace specdep
