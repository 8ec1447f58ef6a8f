#pragma once
// Independent oracles and fixtures shared by the unit and acceptance tests.
// Nothing here calls the library's numerical kernels.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "specdep/crossspectra.hpp"
#include "specdep/ingest.hpp"
#include "specdep/random.hpp"

namespace testing {

using cdouble = std::complex<double>;

inline Eigen::MatrixXcd random_psd(specdep::NormalStream& rng, Eigen::Index n, Eigen::Index extra = 2) {
  Eigen::MatrixXcd g(n, n + extra);
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index k = 0; k < g.cols(); ++k) g(i, k) = cdouble(rng(), rng());
  Eigen::MatrixXcd s = g * g.adjoint() / static_cast<double>(n + extra);
  return 0.5 * (s + s.adjoint());
}

inline Eigen::MatrixXcd unit_diagonal(const Eigen::MatrixXcd& m) {
  const Eigen::VectorXd d = m.diagonal().real().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXcd out = d.asDiagonal() * m * d.asDiagonal();
  for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, i) = 1.0;
  return out;
}

// Scale each diagonal block of `m` so the block is a correlation-type matrix
// with unit trace, the shape a block-normalized spectrum has on average.
inline Eigen::MatrixXcd unit_trace_blocks(const Eigen::MatrixXcd& m, const specdep::BlockPartition& p) {
  Eigen::VectorXd scale(m.rows());
  for (const auto& block : p.blocks()) {
    double tr = 0.0;
    for (auto c : block) tr += m(c, c).real();
    for (auto c : block) scale(c) = 1.0 / std::sqrt(tr);
  }
  return scale.asDiagonal() * m * scale.asDiagonal();
}

inline specdep::CrossSpectrum wrap(Eigen::MatrixXcd m, specdep::NormMode norm = specdep::NormMode::raw()) {
  specdep::CrossSpectrum s;
  s.matrix = std::move(m);
  s.n_segments = 1;
  s.norm = std::move(norm);
  return s;
}

// Direct O(N^2) summation, no FFT.
inline cdouble direct_dft(const specdep::SegmentSet& s, std::size_t seg, std::size_t ch, int omega) {
  const double n = static_cast<double>(s.n_samples());
  cdouble acc = 0.0;
  for (std::size_t t = 0; t < s.n_samples(); ++t) {
    const double ang = -2.0 * std::numbers::pi * omega * static_cast<double>(t) / n;
    acc += s.at(seg, t, ch) * cdouble(std::cos(ang), std::sin(ang));
  }
  return acc;
}

// Determinant by cofactor (Laplace) expansion along the first row.
template <typename Scalar>
Scalar cofactor_det(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a) {
  const Eigen::Index n = a.rows();
  if (n == 1) return a(0, 0);
  Scalar det = 0.0;
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> minor(n - 1, n - 1);
    for (Eigen::Index i = 1; i < n; ++i)
      for (Eigen::Index j = 0, k = 0; j < n; ++j)
        if (j != col) minor(i - 1, k++) = a(i, j);
    const double sign = col % 2 == 0 ? 1.0 : -1.0;
    det += sign * a(0, col) * cofactor_det(minor);
  }
  return det;
}

inline specdep::SegmentSet random_segments(std::size_t n_r, std::size_t n_t, std::size_t m,
                                           std::uint64_t seed) {
  specdep::NormalStream rng(seed);
  std::vector<double> data(n_r * n_t * m);
  for (auto& v : data) v = rng();
  return specdep::SegmentSet(n_r, n_t, m, std::move(data));
}

// Chi-square survival function, independent of any incomplete-gamma library.
// Even df: Poisson tail sum. Odd df: erfc plus the half-integer series.
inline double chi2_sf_oracle(double x, int df) {
  if (x <= 0.0) return 1.0;
  const double h = x / 2.0;
  if (df % 2 == 0) {
    double term = std::exp(-h), sum = term;
    for (int k = 1; k < df / 2; ++k) {
      term *= h / k;
      sum += term;
    }
    return sum;
  }
  double sum = std::erfc(std::sqrt(h));
  double term = std::sqrt(h / std::numbers::pi) * std::exp(-h) * 2.0;
  for (int k = 1; k <= (df - 1) / 2; ++k) {
    sum += term;
    term *= h / (k + 0.5);
  }
  return sum;
}

// Chi-square(2) CDF: 1 - exp(-x/2).
inline double chi2_2_cdf(double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x / 2.0); }

// Kolmogorov-Smirnov distance of a sample from a continuous CDF.
template <typename Cdf>
double ks_distance(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("specdep-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
