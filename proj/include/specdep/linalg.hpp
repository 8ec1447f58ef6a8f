#pragma once

#include <Eigen/Core>

namespace specdep {

/// ln|A| for a Hermitian (or real symmetric) positive definite matrix.
///
/// Factorizes A = L D L^H from the lower triangle and sums ln of the pivots,
/// so the raw determinant is never formed. A pivot at or below
/// n * eps * max|diag| raises SingularMatrixError carrying the pivot index.
double logdet_psd(const Eigen::MatrixXcd& a);
double logdet_psd(const Eigen::MatrixXd& a);

/// Max |A - A^H| relative to max |A|; 0 for the zero matrix.
double hermitian_defect(const Eigen::MatrixXcd& a);

namespace detail {
/// Test hook: a constant added to every logdet_psd result. Defaults to 0.
void set_logdet_perturbation(double delta) noexcept;
double logdet_perturbation() noexcept;
}  // namespace detail

}  // namespace specdep
