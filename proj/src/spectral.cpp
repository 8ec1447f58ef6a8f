#include "specdep/spectral.hpp"

#include <cmath>
#include <fstream>
#include <string_view>

#include "binary_io.hpp"
#include "fft.hpp"
#include "specdep/errors.hpp"

namespace specdep {

namespace {

constexpr std::string_view kSpectralMagic = "SDSPC1";

void require_raw(const SpectralEnsemble& e, const char* op) {
  if (e.norm().kind != NormMode::Kind::raw)
    throw NormModeError(std::string(op) + " requires a raw ensemble, got " + to_string(e.norm().kind));
}

}  // namespace

const char* to_string(NormMode::Kind kind) {
  switch (kind) {
    case NormMode::Kind::raw: return "raw";
    case NormMode::Kind::block: return "block";
    case NormMode::Kind::channel: return "channel";
  }
  return "unknown";
}

SpectralEnsemble::SpectralEnsemble(std::size_t n_segments, std::vector<int> freq_indices,
                                   std::size_t n_channels, std::vector<cdouble> coeffs,
                                   NormMode norm, std::size_t n_samples,
                                   std::optional<double> sampling_rate)
    : n_segments_(n_segments),
      n_channels_(n_channels),
      n_samples_(n_samples),
      freq_indices_(std::move(freq_indices)),
      coeffs_(std::move(coeffs)),
      norm_(std::move(norm)),
      sampling_rate_(sampling_rate) {
  if (n_segments_ < 1 || n_channels_ < 1 || freq_indices_.empty())
    throw DimensionError("spectral ensemble needs at least one segment, frequency and channel");
  if (coeffs_.size() != n_segments_ * freq_indices_.size() * n_channels_)
    throw DimensionError("spectral coefficient count does not match shape");
  if ((norm_.kind == NormMode::Kind::block) != norm_.partition.has_value())
    throw NormModeError("block normalization needs its partition");
  if (norm_.partition) norm_.partition->check_bounds(n_channels_);
  for (const auto& c : coeffs_)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw MalformedInputError("non-finite spectral coefficient");
}

std::optional<std::size_t> SpectralEnsemble::position_of(int omega) const {
  for (std::size_t i = 0; i < freq_indices_.size(); ++i)
    if (freq_indices_[i] == omega) return i;
  return std::nullopt;
}

std::vector<int> positive_half(std::size_t n_samples) {
  std::vector<int> f;
  for (std::size_t w = 1; w <= n_samples / 2; ++w) f.push_back(static_cast<int>(w));
  return f;
}

SpectralEnsemble dft(const SegmentSet& s, std::span<const int> freqs) {
  const std::size_t n_t = s.n_samples();
  for (int w : freqs)
    if (w < 0 || static_cast<std::size_t>(w) >= n_t)
      throw RangeError("frequency index " + std::to_string(w) + " outside [0, " +
                       std::to_string(n_t - 1) + "]");
  const std::size_t n_r = s.n_segments();
  const std::size_t m = s.n_channels();
  const std::size_t n_f = freqs.size();
  std::vector<cdouble> coeffs(n_r * n_f * m);

  detail::RealForwardPlan plan(n_t);
  for (std::size_t j = 0; j < n_r; ++j)
    for (std::size_t c = 0; c < m; ++c) {
      double* in = plan.input();
      for (std::size_t t = 0; t < n_t; ++t) in[t] = s.at(j, t, c);
      plan.execute();
      for (std::size_t f = 0; f < n_f; ++f)
        coeffs[(j * n_f + f) * m + c] = plan.bin(static_cast<std::size_t>(freqs[f]));
    }
  return SpectralEnsemble(n_r, std::vector<int>(freqs.begin(), freqs.end()), m, std::move(coeffs),
                          NormMode::raw(), n_t, s.sampling_rate());
}

SpectralEnsemble dft(const SegmentSet& s) {
  const auto freqs = positive_half(s.n_samples());
  return dft(s, freqs);
}

SpectralEnsemble normalize_block(const SpectralEnsemble& e, const BlockPartition& partition) {
  require_raw(e, "normalize_block");
  partition.check_bounds(e.n_channels());
  std::vector<cdouble> coeffs(e.coeffs().begin(), e.coeffs().end());
  const std::size_t m = e.n_channels();
  const std::size_t n_f = e.n_freqs();
  for (std::size_t j = 0; j < e.n_segments(); ++j)
    for (std::size_t f = 0; f < n_f; ++f) {
      cdouble* v = coeffs.data() + (j * n_f + f) * m;
      for (std::size_t b = 0; b < partition.size(); ++b) {
        double sq = 0.0;
        for (auto c : partition.block(b)) sq += std::norm(v[c]);
        const double norm = std::sqrt(sq);
        if (!(norm > 0.0)) throw DegenerateSegmentError(j, e.freq_indices()[f], b, "block");
        for (auto c : partition.block(b)) v[c] /= norm;
      }
    }
  return SpectralEnsemble(e.n_segments(), e.freq_indices(), m, std::move(coeffs),
                          NormMode::block(partition), e.n_samples(), e.sampling_rate());
}

SpectralEnsemble normalize_channel(const SpectralEnsemble& e) {
  require_raw(e, "normalize_channel");
  std::vector<cdouble> coeffs(e.coeffs().begin(), e.coeffs().end());
  const std::size_t m = e.n_channels();
  const std::size_t n_f = e.n_freqs();
  for (std::size_t j = 0; j < e.n_segments(); ++j)
    for (std::size_t f = 0; f < n_f; ++f)
      for (std::size_t c = 0; c < m; ++c) {
        auto& z = coeffs[(j * n_f + f) * m + c];
        const double mod = std::abs(z);
        if (!(mod > 0.0)) throw DegenerateSegmentError(j, e.freq_indices()[f], c, "channel");
        z /= mod;
      }
  return SpectralEnsemble(e.n_segments(), e.freq_indices(), m, std::move(coeffs),
                          NormMode::channel(), e.n_samples(), e.sampling_rate());
}

void write_spectral(const SpectralEnsemble& e, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kSpectralMagic.data(), static_cast<std::streamsize>(kSpectralMagic.size()));
  detail::write_le(out, static_cast<std::uint32_t>(e.n_segments()));
  detail::write_le(out, static_cast<std::uint32_t>(e.n_freqs()));
  detail::write_le(out, static_cast<std::uint32_t>(e.n_channels()));
  detail::write_le(out, static_cast<std::uint8_t>(e.norm().kind));
  for (const auto& c : e.coeffs()) {
    detail::write_le(out, c.real());
    detail::write_le(out, c.imag());
  }
}

SpectralEnsemble load_spectral(const std::filesystem::path& path,
                               std::optional<BlockPartition> partition,
                               std::optional<std::vector<int>> freq_indices) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedInputError("cannot open " + path.string() + " at byte 0");
  detail::LeReader reader(in);
  reader.expect_magic(kSpectralMagic);
  const auto n_r = reader.read<std::uint32_t>();
  const auto n_f = reader.read<std::uint32_t>();
  const auto m = reader.read<std::uint32_t>();
  const auto mode_byte = reader.read<std::uint8_t>();
  if (mode_byte > 2)
    throw MalformedInputError("unknown norm mode " + std::to_string(mode_byte) + " at byte " +
                              std::to_string(reader.offset() - 1));
  std::vector<cdouble> coeffs(std::size_t{n_r} * n_f * m);
  for (auto& c : coeffs) {
    const double re = reader.read<double>();
    const double im = reader.read<double>();
    c = {re, im};
  }
  reader.expect_end();

  std::vector<int> freqs;
  if (freq_indices) {
    if (freq_indices->size() != n_f)
      throw DimensionError("frequency label count does not match file");
    freqs = *freq_indices;
  } else {
    for (std::uint32_t f = 0; f < n_f; ++f) freqs.push_back(static_cast<int>(f));
  }

  NormMode norm;
  switch (static_cast<NormMode::Kind>(mode_byte)) {
    case NormMode::Kind::raw: norm = NormMode::raw(); break;
    case NormMode::Kind::channel: norm = NormMode::channel(); break;
    case NormMode::Kind::block:
      if (!partition) throw NormModeError("block-normalized spectral file needs a partition");
      norm = NormMode::block(*partition);
      break;
  }
  SpectralEnsemble e(n_r, std::move(freqs), m, std::move(coeffs), norm);

  // Re-verify the unit-norm invariant claimed by the header.
  constexpr double kTol = 1e-10;
  for (std::size_t j = 0; j < e.n_segments(); ++j)
    for (std::size_t f = 0; f < e.n_freqs(); ++f) {
      const auto v = e.vector(j, f);
      if (norm.kind == NormMode::Kind::channel) {
        for (std::size_t c = 0; c < v.size(); ++c)
          if (std::abs(std::abs(v[c]) - 1.0) > kTol)
            throw NormModeError("coefficient is not unit modulus in channel-normalized file");
      } else if (norm.kind == NormMode::Kind::block) {
        for (const auto& b : norm.partition->blocks()) {
          double sq = 0.0;
          for (auto c : b) sq += std::norm(v[c]);
          if (std::abs(sq - 1.0) > kTol)
            throw NormModeError("block is not unit norm in block-normalized file");
        }
      }
    }
  return e;
}

}  // namespace specdep
