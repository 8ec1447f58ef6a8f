#include "specdep/linalg.hpp"

#include <atomic>
#include <cmath>
#include <complex>
#include <limits>

#include "specdep/errors.hpp"

namespace specdep {

namespace {

std::atomic<double> g_perturbation{0.0};

template <typename Matrix>
double logdet_ldl(const Matrix& a) {
  using Scalar = typename Matrix::Scalar;
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw DimensionError("logdet_psd needs a square matrix");
  if (n == 0) return 0.0;

  double max_diag = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(std::real(a(i, i))));
  const double tol = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_diag;

  // Unit lower-triangular L (strict part) and pivots d, from the lower triangle of a.
  Matrix l = Matrix::Zero(n, n);
  Eigen::VectorXd d(n);
  double logdet = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    double dk = std::real(a(k, k));
    for (Eigen::Index j = 0; j < k; ++j) dk -= std::norm(l(k, j)) * d(j);
    if (!(dk > tol) || !std::isfinite(dk)) throw SingularMatrixError(static_cast<std::size_t>(k), dk);
    d(k) = dk;
    logdet += std::log(dk);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      Scalar s = a(i, k);
      for (Eigen::Index j = 0; j < k; ++j) {
        if constexpr (Eigen::NumTraits<Scalar>::IsComplex)
          s -= l(i, j) * std::conj(l(k, j)) * d(j);
        else
          s -= l(i, j) * l(k, j) * d(j);
      }
      l(i, k) = s / dk;
    }
  }
  return logdet + g_perturbation.load(std::memory_order_relaxed);
}

}  // namespace

double logdet_psd(const Eigen::MatrixXcd& a) { return logdet_ldl(a); }
double logdet_psd(const Eigen::MatrixXd& a) { return logdet_ldl(a); }

double hermitian_defect(const Eigen::MatrixXcd& a) {
  if (a.size() == 0) return 0.0;
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
}

namespace detail {
void set_logdet_perturbation(double delta) noexcept {
  g_perturbation.store(delta, std::memory_order_relaxed);
}
double logdet_perturbation() noexcept { return g_perturbation.load(std::memory_order_relaxed); }
}  // namespace detail

}  // namespace specdep
