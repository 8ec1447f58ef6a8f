#include "specdep/measures.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>

#include "specdep/errors.hpp"
#include "specdep/linalg.hpp"

namespace specdep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHermitianTol = 1e-10;
constexpr double kClampTol = 1e-12;

double to_rho2(double measure) { return std::isinf(measure) ? 1.0 : -std::expm1(-measure); }

void require_hermitian(const CrossSpectrum& s) {
  if (s.matrix.rows() != s.matrix.cols()) throw DimensionError("cross-spectrum is not square");
  if (hermitian_defect(s.matrix) > kHermitianTol)
    throw ConsistencyError("cross-spectrum is not Hermitian within tolerance");
}

Eigen::MatrixXcd regularized(const CrossSpectrum& s, const MeasureOptions& opts,
                             std::vector<std::string>& flags) {
  if (opts.ridge < 0.0) throw RangeError("ridge must be nonnegative");
  Eigen::MatrixXcd m = s.matrix;
  if (opts.ridge > 0.0) {
    const double shift = opts.ridge * m.diagonal().real().sum() / static_cast<double>(m.rows());
    m.diagonal().array() += shift;
    flags.emplace_back("ridge");
  }
  return m;
}

// Clamp jitter below zero; anything materially negative is a numerical failure.
double clamp_measure(double value, double scale, const char* name, std::vector<std::string>& flags) {
  if (value >= 0.0 || std::isnan(value)) return value;
  const double tol = kClampTol * std::max(1.0, scale);
  if (value < -tol)
    throw ConsistencyError(std::string(name) + " measure is negative (" + std::to_string(value) + ")");
  flags.push_back(std::string("clamped_") + name);
  return 0.0;
}

struct LogdetTerms {
  double blocks = 0.0;     // sum of ln|S_ii|
  double re_blocks = 0.0;  // sum of ln|Re S_ii|
  double joint = 0.0;      // ln|S|
  double re_joint = 0.0;   // ln|Re S|
  double magnitude = 0.0;  // largest |term|, sets the clamping scale
};

// Total and instantaneous are bounded below by Fischer's inequality (complex
// and real PSD). Their difference is not once a block has more than one
// channel: complex within-block spectra can push Re-ratio above the complex
// ratio. Such a lagged value is kept as is and flagged.
void finish(DependenceReport& r, const LogdetTerms& t, double total, double inst, bool multichannel) {
  if (std::isinf(total) && std::isinf(inst))
    throw SingularMatrixError(0, 0.0);  // lagged part indeterminate
  const double lagged = std::isinf(total) ? kInf : total - inst;
  r.raw = {total, lagged, inst};
  r.measures.total = clamp_measure(total, t.magnitude, "total", r.flags);
  if (multichannel && lagged < -kClampTol * std::max(1.0, t.magnitude)) {
    r.measures.lagged = lagged;
    r.flags.emplace_back("negative_lagged");
  } else {
    r.measures.lagged = clamp_measure(lagged, t.magnitude, "lagged", r.flags);
  }
  r.measures.instantaneous = clamp_measure(inst, t.magnitude, "instantaneous", r.flags);
  r.rho2 = {to_rho2(r.measures.total), to_rho2(r.measures.lagged),
            to_rho2(r.measures.instantaneous)};
}

void stamp(DependenceReport& r, const CrossSpectrum& s) {
  r.freq = s.freq;
  r.n_segments = s.n_segments;
  r.n_pooled = s.n_pooled;
  r.n_samples = s.n_samples;
}

// Joint logdets, or +inf under allow_infinite when only the joint matrix is singular.
double joint_logdet(const Eigen::MatrixXcd& joint, const MeasureOptions& opts, bool& singular) {
  try {
    return logdet_psd(joint);
  } catch (const SingularMatrixError&) {
    if (!opts.allow_infinite) throw;
    singular = true;
    return -kInf;
  }
}

double joint_logdet(const Eigen::MatrixXd& joint, const MeasureOptions& opts, bool& singular) {
  try {
    return logdet_psd(joint);
  } catch (const SingularMatrixError&) {
    if (!opts.allow_infinite) throw;
    singular = true;
    return -kInf;
  }
}

DependenceReport block_dependence(const CrossSpectrum& s, const BlockPartition& partition,
                                  const MeasureOptions& opts, MeasureKind kind) {
  require_hermitian(s);
  partition.check_bounds(s.dim());

  DependenceReport r;
  r.kind = kind;
  r.scope = partition.size() == 2 ? Scope::two_block : Scope::k_block;
  r.block_dims = partition.dims();
  stamp(r, s);

  const Eigen::MatrixXcd full = regularized(s, opts, r.flags);
  LogdetTerms t;
  for (const auto& b : partition.blocks()) {
    const Eigen::MatrixXcd sb = submatrix(full, b);
    const double ld = logdet_psd(sb);
    const double ld_re = logdet_psd(Eigen::MatrixXd(sb.real()));
    t.blocks += ld;
    t.re_blocks += ld_re;
    t.magnitude = std::max({t.magnitude, std::abs(ld), std::abs(ld_re)});
  }
  const auto channels = partition.channels();
  const Eigen::MatrixXcd joint = submatrix(full, channels);
  bool singular = false;
  t.joint = joint_logdet(joint, opts, singular);
  t.re_joint = joint_logdet(Eigen::MatrixXd(joint.real()), opts, singular);
  if (singular) r.flags.emplace_back("perfect_dependence");
  if (std::isfinite(t.joint)) t.magnitude = std::max(t.magnitude, std::abs(t.joint));
  if (std::isfinite(t.re_joint)) t.magnitude = std::max(t.magnitude, std::abs(t.re_joint));

  const double total = t.blocks - t.joint;
  const double inst = t.re_blocks - t.re_joint;
  const auto dims = partition.dims();
  finish(r, t, total, inst, std::any_of(dims.begin(), dims.end(), [](std::size_t d) { return d > 1; }));
  return r;
}

std::vector<std::size_t> resolve_channels(const CrossSpectrum& s, std::span<const std::size_t> channels) {
  std::vector<std::size_t> out(channels.begin(), channels.end());
  if (out.empty())
    for (std::size_t i = 0; i < s.dim(); ++i) out.push_back(i);
  BlockPartition(std::vector<std::vector<std::size_t>>{out}).check_bounds(s.dim());
  return out;
}

// Diag / Re / full determinant route for all channels treated univariately.
DependenceReport univariate_dependence(const CrossSpectrum& s, std::span<const std::size_t> channels,
                                       const MeasureOptions& opts, MeasureKind kind) {
  require_hermitian(s);
  const auto chans = resolve_channels(s, channels);

  DependenceReport r;
  r.kind = kind;
  r.scope = Scope::all_univariate;
  r.block_dims.assign(chans.size(), 1);
  stamp(r, s);

  const Eigen::MatrixXcd full = regularized(s, opts, r.flags);
  const Eigen::MatrixXcd m = submatrix(full, chans);
  LogdetTerms t;
  double log_diag = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double d = m(i, i).real();
    if (!(d > 0.0)) throw SingularMatrixError(static_cast<std::size_t>(i), d);
    log_diag += std::log(d);
  }
  bool singular = false;
  t.joint = joint_logdet(m, opts, singular);
  t.re_joint = joint_logdet(Eigen::MatrixXd(m.real()), opts, singular);
  if (singular) r.flags.emplace_back("perfect_dependence");
  t.magnitude = std::abs(log_diag);
  if (std::isfinite(t.joint)) t.magnitude = std::max(t.magnitude, std::abs(t.joint));
  if (std::isfinite(t.re_joint)) t.magnitude = std::max(t.magnitude, std::abs(t.re_joint));

  // Under channel normalization log_diag is ~0 and this is -ln|S|, -ln|Re S|;
  // keeping the diagonal term makes the ridge shift cancel as in the linear case.
  const double total = log_diag - t.joint;
  const double inst = log_diag - t.re_joint;
  if (std::isinf(total) && std::isinf(inst)) throw SingularMatrixError(0, 0.0);
  // Lagged part directly as ln(|Re S| / |S|).
  const double lagged = std::isinf(total) ? kInf : t.re_joint - t.joint;
  r.raw = {total, lagged, inst};
  r.measures.total = clamp_measure(total, t.magnitude, "total", r.flags);
  r.measures.lagged = clamp_measure(lagged, t.magnitude, "lagged", r.flags);
  r.measures.instantaneous = clamp_measure(inst, t.magnitude, "instantaneous", r.flags);
  r.rho2 = {to_rho2(r.measures.total), to_rho2(r.measures.lagged),
            to_rho2(r.measures.instantaneous)};
  return r;
}

}  // namespace

const char* to_string(MeasureKind kind) {
  return kind == MeasureKind::linear ? "linear" : "nonlinear";
}

const char* to_string(Scope scope) {
  switch (scope) {
    case Scope::two_block: return "two-block";
    case Scope::k_block: return "k-block";
    case Scope::all_univariate: return "all-univariate";
  }
  return "unknown";
}

bool DependenceReport::has_flag(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

Eigen::MatrixXcd submatrix(const Eigen::MatrixXcd& m, std::span<const std::size_t> channels) {
  const auto n = static_cast<Eigen::Index>(channels.size());
  Eigen::MatrixXcd out(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      out(a, b) = m(static_cast<Eigen::Index>(channels[static_cast<std::size_t>(a)]),
                    static_cast<Eigen::Index>(channels[static_cast<std::size_t>(b)]));
  return out;
}

DependenceReport linear_dependence(const CrossSpectrum& s, const BlockPartition& partition,
                                   const MeasureOptions& opts) {
  if (s.norm.kind != NormMode::Kind::raw)
    throw NormModeError(std::string("linear measures need a raw spectrum, got ") +
                        to_string(s.norm.kind));
  return block_dependence(s, partition, opts, MeasureKind::linear);
}

DependenceReport nonlinear_dependence(const CrossSpectrum& s, const BlockPartition& partition,
                                      const MeasureOptions& opts) {
  if (s.norm.kind != NormMode::Kind::block || !(*s.norm.partition == partition))
    throw NormModeError("nonlinear block measures need a spectrum block-normalized with the same partition");
  return block_dependence(s, partition, opts, MeasureKind::nonlinear);
}

DependenceReport all_univariate_linear(const CrossSpectrum& s, std::span<const std::size_t> channels,
                                       const MeasureOptions& opts) {
  if (s.norm.kind != NormMode::Kind::raw)
    throw NormModeError(std::string("linear measures need a raw spectrum, got ") +
                        to_string(s.norm.kind));
  return univariate_dependence(s, channels, opts, MeasureKind::linear);
}

DependenceReport all_univariate_nonlinear(const CrossSpectrum& s,
                                          std::span<const std::size_t> channels,
                                          const MeasureOptions& opts) {
  if (s.norm.kind != NormMode::Kind::channel)
    throw NormModeError("all-univariate nonlinear measures need a channel-normalized spectrum");
  return univariate_dependence(s, channels, opts, MeasureKind::nonlinear);
}

LegacyCoherence legacy_2007a(const CrossSpectrum& s, const BlockPartition& partition) {
  if (partition.size() != 2) throw DimensionError("legacy coherence is defined for two blocks");
  require_hermitian(s);
  partition.check_bounds(s.dim());
  const Eigen::MatrixXcd sxx = submatrix(s.matrix, partition.block(0));
  const Eigen::MatrixXcd syy = submatrix(s.matrix, partition.block(1));
  const auto px = static_cast<Eigen::Index>(partition.block(0).size());
  const auto channels = partition.channels();
  const Eigen::MatrixXcd joint = submatrix(s.matrix, channels);
  const Eigen::MatrixXcd sxy = joint.topRightCorner(px, joint.cols() - px);

  // Residual of Y regressed on X: S_YY - S_YX S_XX^{-1} S_XY.
  Eigen::LDLT<Eigen::MatrixXcd> ldlt(sxx);
  if (ldlt.info() != Eigen::Success) throw SingularMatrixError(0, 0.0);
  Eigen::MatrixXcd schur = syy - sxy.adjoint() * ldlt.solve(sxy);
  schur = 0.5 * (schur + schur.adjoint()).eval();

  LegacyCoherence out;
  out.rho2_general = -std::expm1(logdet_psd(schur) - logdet_psd(syy));
  out.rho2_zero_lag_removed =
      -std::expm1(logdet_psd(joint) - logdet_psd(Eigen::MatrixXd(joint.real())));
  return out;
}

MeasureTriple univariate_closed_form(double sxx, double syy, cdouble syx) {
  const double d = sxx * syy;
  const double re2 = syx.real() * syx.real();
  const double im2 = syx.imag() * syx.imag();
  MeasureTriple m;
  m.total = -std::log1p(-(re2 + im2) / d);
  m.instantaneous = -std::log1p(-re2 / d);
  m.lagged = -std::log1p(-im2 / (d - re2));
  return m;
}

}  // namespace specdep
