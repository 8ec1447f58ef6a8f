#include <doctest.h>

#include "specdep/errors.hpp"
#include "specdep/linalg.hpp"
#include "support.hpp"

using namespace specdep;

TEST_CASE("logdet examples") {
  CHECK(logdet_psd(Eigen::MatrixXd(Eigen::MatrixXd::Identity(3, 3))) == 0.0);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 0.5;
  CHECK(std::abs(logdet_psd(d)) < 1e-15);
  CHECK(std::abs(logdet_psd(Eigen::MatrixXcd(d.cast<cdouble>()))) < 1e-15);
}

TEST_CASE("logdet matches the cofactor expansion for n <= 6") {
  specdep::NormalStream rng(5);
  for (Eigen::Index n = 1; n <= 6; ++n)
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::MatrixXcd a = testing::random_psd(rng, n);
      const double want = std::log(testing::cofactor_det(a).real());
      CHECK(testing::rel_diff(logdet_psd(a), want) < 1e-9);
      const Eigen::MatrixXd r = a.real();
      CHECK(testing::rel_diff(logdet_psd(r), std::log(testing::cofactor_det(r))) < 1e-9);
    }
}

TEST_CASE("logdet reads the lower triangle only") {
  specdep::NormalStream rng(6);
  Eigen::MatrixXcd a = testing::random_psd(rng, 4);
  const double ref = logdet_psd(a);
  a.triangularView<Eigen::StrictlyUpper>().setConstant(cdouble(99.0, -7.0));
  CHECK(logdet_psd(a) == ref);
}

TEST_CASE("logdet stays finite where the determinant underflows") {
  const Eigen::MatrixXd a = 1e-20 * Eigen::MatrixXd::Identity(40, 40);
  CHECK(logdet_psd(a) == doctest::Approx(40 * std::log(1e-20)));
}

TEST_CASE("singular and indefinite inputs") {
  Eigen::MatrixXcd rank1(2, 2);
  rank1 << 1.0, 1.0, 1.0, 1.0;
  try {
    logdet_psd(rank1);
    FAIL("expected an error");
  } catch (const SingularMatrixError& e) {
    CHECK(e.pivot() == 1);
  }
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(logdet_psd(indefinite), SingularMatrixError);
}

TEST_CASE("perturbation hook shifts every result") {
  detail::set_logdet_perturbation(0.25);
  CHECK(logdet_psd(Eigen::MatrixXd(Eigen::MatrixXd::Identity(2, 2))) == 0.25);
  detail::set_logdet_perturbation(0.0);
  CHECK(logdet_psd(Eigen::MatrixXd(Eigen::MatrixXd::Identity(2, 2))) == 0.0);
}

TEST_CASE("hermitian defect") {
  Eigen::MatrixXcd a(2, 2);
  a << 2.0, cdouble(0, 1), cdouble(0, -1), 2.0;
  CHECK(hermitian_defect(a) == 0.0);
  a(0, 1) = cdouble(1, 1);
  CHECK(hermitian_defect(a) > 0.1);
  CHECK(hermitian_defect(Eigen::MatrixXcd::Zero(3, 3)) == 0.0);
}
