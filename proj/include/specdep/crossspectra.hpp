#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "specdep/spectral.hpp"

namespace specdep {

struct FrequencyBand {
  std::string name;
  std::vector<int> freq_indices;
};

/// A discrete bin or the name of a pooled band.
using FreqTag = std::variant<int, std::string>;
std::string to_string(const FreqTag& tag);

/// Hermitian PSD covariance of the coefficient vectors at one frequency or band.
struct CrossSpectrum {
  Eigen::MatrixXcd matrix;
  FreqTag freq = 0;
  std::size_t n_segments = 0;
  /// How many discrete frequencies were averaged (1 for a single bin).
  std::size_t n_pooled = 1;
  /// Segment length of the source recording; 0 when unknown.
  std::size_t n_samples = 0;
  NormMode norm;

  std::size_t dim() const { return static_cast<std::size_t>(matrix.rows()); }
};

/// (1/N_R) sum_j v_j v_j^H over segments, with compensated summation.
CrossSpectrum accumulate(const SpectralEnsemble& e, int omega);
/// accumulate() for every retained frequency, in ensemble order.
std::vector<CrossSpectrum> accumulate_all(const SpectralEnsemble& e);

/// Unweighted mean of the spectra whose frequencies make up `band`.
/// Spectra outside the band are ignored; every band member must be present.
CrossSpectrum pool(std::span<const CrossSpectrum> spectra, const FrequencyBand& band);

}  // namespace specdep
