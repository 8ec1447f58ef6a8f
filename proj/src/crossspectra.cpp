#include "specdep/crossspectra.hpp"

#include <set>

#include "specdep/errors.hpp"

namespace specdep {

namespace {

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) noexcept {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }
  double value() const noexcept { return sum + carry; }
};

}  // namespace

std::string to_string(const FreqTag& tag) {
  if (const auto* w = std::get_if<int>(&tag)) return std::to_string(*w);
  return std::get<std::string>(tag);
}

CrossSpectrum accumulate(const SpectralEnsemble& e, int omega) {
  const auto pos = e.position_of(omega);
  if (!pos) throw RangeError("frequency " + std::to_string(omega) + " not retained in ensemble");
  const std::size_t m = e.n_channels();
  const std::size_t n_r = e.n_segments();

  std::vector<CompensatedSum> re(m * m), im(m * m);
  for (std::size_t j = 0; j < n_r; ++j) {
    const auto v = e.vector(j, *pos);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b <= a; ++b) {
        const cdouble p = v[a] * std::conj(v[b]);
        re[a * m + b].add(p.real());
        im[a * m + b].add(p.imag());
      }
  }

  CrossSpectrum out;
  out.matrix.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  const double inv = 1.0 / static_cast<double>(n_r);
  for (std::size_t a = 0; a < m; ++a) {
    const auto ia = static_cast<Eigen::Index>(a);
    out.matrix(ia, ia) = cdouble(re[a * m + a].value() * inv, 0.0);
    for (std::size_t b = 0; b < a; ++b) {
      const auto ib = static_cast<Eigen::Index>(b);
      const cdouble z(re[a * m + b].value() * inv, im[a * m + b].value() * inv);
      out.matrix(ia, ib) = z;
      out.matrix(ib, ia) = std::conj(z);
    }
  }
  out.freq = omega;
  out.n_segments = n_r;
  out.n_pooled = 1;
  out.n_samples = e.n_samples();
  out.norm = e.norm();
  return out;
}

std::vector<CrossSpectrum> accumulate_all(const SpectralEnsemble& e) {
  std::vector<CrossSpectrum> out;
  out.reserve(e.n_freqs());
  for (int w : e.freq_indices()) out.push_back(accumulate(e, w));
  return out;
}

CrossSpectrum pool(std::span<const CrossSpectrum> spectra, const FrequencyBand& band) {
  if (band.freq_indices.empty()) throw CoverageError("band '" + band.name + "' is empty");
  const std::set<int> wanted(band.freq_indices.begin(), band.freq_indices.end());
  if (wanted.size() != band.freq_indices.size())
    throw CoverageError("band '" + band.name + "' lists a frequency twice");

  std::vector<const CrossSpectrum*> members;
  std::set<int> found;
  for (const auto& s : spectra) {
    const auto* w = std::get_if<int>(&s.freq);
    if (!w || !wanted.contains(*w)) continue;
    if (!found.insert(*w).second)
      throw CoverageError("frequency " + std::to_string(*w) + " supplied twice");
    members.push_back(&s);
  }
  for (int w : wanted)
    if (!found.contains(w))
      throw CoverageError("band '" + band.name + "' member " + std::to_string(w) + " missing");

  const CrossSpectrum& first = *members.front();
  for (const auto* s : members) {
    if (s->dim() != first.dim() || s->n_segments != first.n_segments ||
        s->n_samples != first.n_samples)
      throw DimensionError("pooled spectra differ in dimension or segment count");
    if (!(s->norm == first.norm)) throw DimensionError("pooled spectra differ in normalization");
  }

  CrossSpectrum out;
  out.matrix = Eigen::MatrixXcd::Zero(first.matrix.rows(), first.matrix.cols());
  for (const auto* s : members) out.matrix += s->matrix;
  out.matrix /= static_cast<double>(members.size());
  // Pin exact Hermitian symmetry after the sums.
  for (Eigen::Index a = 0; a < out.matrix.rows(); ++a) {
    out.matrix(a, a) = cdouble(out.matrix(a, a).real(), 0.0);
    for (Eigen::Index b = 0; b < a; ++b) out.matrix(b, a) = std::conj(out.matrix(a, b));
  }
  out.freq = band.name;
  out.n_segments = first.n_segments;
  out.n_pooled = members.size();
  out.n_samples = first.n_samples;
  out.norm = first.norm;
  return out;
}

}  // namespace specdep
