#include "specdep/selftest.hpp"

#include <cmath>
#include <sstream>

#include "specdep/errors.hpp"
#include "specdep/inference.hpp"
#include "specdep/measures.hpp"
#include "specdep/random.hpp"
#include "specdep/simulate.hpp"

namespace specdep {

namespace {

Eigen::MatrixXcd random_psd(NormalStream& rng, Eigen::Index n) {
  Eigen::MatrixXcd g(n, n + 2);
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index k = 0; k < g.cols(); ++k) g(i, k) = cdouble(rng(), rng());
  Eigen::MatrixXcd s = g * g.adjoint() / static_cast<double>(n + 2);
  return 0.5 * (s + s.adjoint());
}

CrossSpectrum wrap(Eigen::MatrixXcd m, NormMode norm = NormMode::raw()) {
  CrossSpectrum s;
  s.matrix = std::move(m);
  s.n_segments = 1;
  s.norm = std::move(norm);
  return s;
}

// Rescale to unit diagonal, as a block-normalized univariate spectrum would be.
Eigen::MatrixXcd unit_diagonal(const Eigen::MatrixXcd& m) {
  const Eigen::VectorXd d = m.diagonal().real().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXcd out = d.asDiagonal() * m * d.asDiagonal();
  out.diagonal() = out.diagonal().real().cast<cdouble>();
  return out;
}

SuiteResult closed_form_parity() {
  SuiteResult r{"closed-form-parity", true, {}};
  NormalStream rng(20240101);
  const auto singles = BlockPartition::singletons(2);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Eigen::MatrixXcd m = random_psd(rng, 2);
    const auto lin = linear_dependence(wrap(m), singles);
    const auto expect = univariate_closed_form(m(0, 0).real(), m(1, 1).real(), m(1, 0));
    const Eigen::MatrixXcd u = unit_diagonal(m);
    const auto nl = nonlinear_dependence(wrap(u, NormMode::block(singles)), singles);
    const auto expect_nl = univariate_closed_form(1.0, 1.0, u(1, 0));
    for (auto [got, want] : {std::pair{lin.measures, expect}, std::pair{nl.measures, expect_nl}}) {
      worst = std::max({worst, std::abs(got.total - want.total), std::abs(got.lagged - want.lagged),
                        std::abs(got.instantaneous - want.instantaneous)});
    }
  }
  if (worst > 1e-10) {
    r.passed = false;
    r.detail = "max deviation " + std::to_string(worst);
  }
  return r;
}

SuiteResult additivity() {
  SuiteResult r{"additivity", true, {}};
  NormalStream rng(20240102);
  const BlockPartition blocks({{0, 1, 2}, {3, 4}, {5}});
  double worst = 0.0;
  double most_negative = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto s = wrap(random_psd(rng, 6));
    for (const auto& rep : {linear_dependence(s, blocks), all_univariate_linear(s)}) {
      worst = std::max(worst, std::abs(rep.measures.total - rep.measures.lagged - rep.measures.instantaneous));
      most_negative = std::min({most_negative, rep.raw.total, rep.raw.lagged, rep.raw.instantaneous});
    }
  }
  if (worst > 1e-9 || most_negative < -1e-12) {
    r.passed = false;
    r.detail = "additivity defect " + std::to_string(worst) + ", min raw measure " + std::to_string(most_negative);
  }
  return r;
}

SuiteResult parseval() {
  SuiteResult r{"parseval-oracle", true, {}};
  const auto s = white_noise(8, 64, 3, 20240103);
  const BlockPartition blocks({{0, 1}, {2}});
  double worst = 0.0;
  for (int w = 1; w < 32; ++w) {
    worst = std::max(worst, parseval_oracle(s, w).max_rel_err);
    worst = std::max(worst, parseval_oracle(s, blocks, w).max_rel_err);
  }
  if (worst > 1e-8) {
    r.passed = false;
    r.detail = "max relative error " + std::to_string(worst);
  }
  return r;
}

SuiteResult df_table() {
  SuiteResult r{"df-table", true, {}};
  struct Row {
    std::vector<std::size_t> dims;
    DfScope scope;
    int total, part;
  };
  const Row rows[] = {
      {{1, 1}, DfScope::blocks, 2, 1},
      {{3, 2, 1}, DfScope::blocks, 22, 11},
      {{2}, DfScope::all_univariate, 2, 1},
      {{3}, DfScope::all_univariate, 6, 3},
      {{4}, DfScope::all_univariate, 12, 6},
  };
  std::ostringstream bad;
  for (const auto& row : rows) {
    const int t = degrees_of_freedom(row.dims, Component::total, row.scope);
    const int l = degrees_of_freedom(row.dims, Component::lagged, row.scope);
    const int i = degrees_of_freedom(row.dims, Component::instantaneous, row.scope);
    if (t != row.total || l != row.part || i != row.part) bad << " row p0=" << row.dims[0];
  }
  if (!bad.str().empty()) {
    r.passed = false;
    r.detail = "mismatch:" + bad.str();
  }
  return r;
}

template <typename F>
SuiteResult guarded(const char* name, F&& suite) {
  try {
    return suite();
  } catch (const std::exception& e) {
    return {name, false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

std::vector<SuiteResult> run_selftest() {
  return {guarded("closed-form-parity", closed_form_parity), guarded("additivity", additivity),
          guarded("parseval-oracle", parseval), guarded("df-table", df_table)};
}

bool report_selftest(const std::vector<SuiteResult>& results, std::ostream& out) {
  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.detail.empty()) out << ": " << r.detail;
    out << '\n';
    all = all && r.passed;
  }
  return all;
}

}  // namespace specdep
