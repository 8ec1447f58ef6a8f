#include <doctest.h>

#include "specdep/errors.hpp"
#include "specdep/spectral.hpp"
#include "support.hpp"

using namespace specdep;

TEST_CASE("dft: [1,0,-1,0] at bin 1 is 2") {
  const SegmentSet s(1, 4, 1, {1, 0, -1, 0});
  const auto e = dft(s);
  CHECK(e.freq_indices() == std::vector<int>{1, 2});
  const auto x1 = e.at(0, *e.position_of(1), 0);
  CHECK(std::abs(x1 - cdouble(2.0, 0.0)) < 1e-14);
  CHECK(std::abs(testing::direct_dft(s, 0, 0, 1) - cdouble(2.0, 0.0)) < 1e-14);
}

TEST_CASE("dft: zero and constant segments") {
  const SegmentSet zero(2, 8, 2, std::vector<double>(32, 0.0));
  const auto ez = dft(zero);
  for (auto c : ez.coeffs()) CHECK(c == cdouble(0.0));

  const SegmentSet constant(1, 16, 1, std::vector<double>(16, 3.25));
  const auto ec = dft(detrend(constant, DetrendMode::mean));
  for (auto c : ec.coeffs()) CHECK(std::abs(c) <= 1e-12 * 16);
}

TEST_CASE("dft: fast path matches direct summation") {
  for (std::size_t n_t : {2u, 7u, 16u, 33u, 64u}) {
    const auto s = testing::random_segments(3, n_t, 2, 100 + n_t);
    std::vector<int> all(n_t);
    for (std::size_t w = 0; w < n_t; ++w) all[w] = static_cast<int>(w);
    const auto e = dft(s, all);
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t f = 0; f < n_t; ++f)
        for (std::size_t m = 0; m < 2; ++m) {
          const auto want = testing::direct_dft(s, j, m, static_cast<int>(f));
          CHECK(std::abs(e.at(j, f, m) - want) <= 1e-9 * std::max(1.0, std::abs(want)));
        }
  }
  const auto s = testing::random_segments(1, 8, 1, 1);
  const int bad[] = {8};
  CHECK_THROWS_AS(dft(s, bad), RangeError);
}

TEST_CASE("positive half keeps Nyquist") {
  CHECK(positive_half(8) == std::vector<int>{1, 2, 3, 4});
  CHECK(positive_half(7) == std::vector<int>{1, 2, 3});
}

namespace {

SpectralEnsemble one_vector(std::vector<cdouble> v) {
  const auto m = v.size();
  return SpectralEnsemble(1, {1}, m, std::move(v));
}

}  // namespace

TEST_CASE("normalize_block examples") {
  const auto a = normalize_block(one_vector({{3, 4}}), BlockPartition::singletons(1));
  CHECK(std::abs(a.at(0, 0, 0) - cdouble(0.6, 0.8)) < 1e-15);

  const auto b = normalize_block(one_vector({{3, 0}, {0, 4}}), BlockPartition(std::vector<std::vector<std::size_t>>{{0, 1}}));
  CHECK(std::abs(b.at(0, 0, 0) - cdouble(0.6, 0.0)) < 1e-15);
  CHECK(std::abs(b.at(0, 0, 1) - cdouble(0.0, 0.8)) < 1e-15);
  CHECK(b.norm().kind == NormMode::Kind::block);

  const auto again = normalize_block(SpectralEnsemble(1, {1}, 2, {b.coeffs().begin(), b.coeffs().end()}),
                                     BlockPartition(std::vector<std::vector<std::size_t>>{{0, 1}}));
  for (std::size_t m = 0; m < 2; ++m) CHECK(std::abs(again.at(0, 0, m) - b.at(0, 0, m)) <= 1e-12);

  CHECK_THROWS_AS(normalize_block(b, BlockPartition(std::vector<std::vector<std::size_t>>{{0, 1}})), NormModeError);
}

TEST_CASE("normalize_channel examples") {
  const auto a = normalize_channel(one_vector({{3, 4}, {-2, 0}}));
  CHECK(std::abs(a.at(0, 0, 0) - cdouble(0.6, 0.8)) < 1e-15);
  CHECK(std::abs(a.at(0, 0, 1) - cdouble(-1.0, 0.0)) < 1e-15);

  const auto b = normalize_channel(one_vector({{3, 0}, {0, 4}}));
  CHECK(std::abs(b.at(0, 0, 0) - cdouble(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(b.at(0, 0, 1) - cdouble(0.0, 1.0)) < 1e-15);
}

TEST_CASE("degenerate segment names its location") {
  const SpectralEnsemble e(2, {5}, 2, {{1, 0}, {1, 0}, {0, 0}, {1, 1}});
  try {
    normalize_channel(e);
    FAIL("expected an error");
  } catch (const DegenerateSegmentError& err) {
    CHECK(err.segment() == 1);
    CHECK(err.freq() == 5);
    CHECK(err.index() == 0);
  }
  try {
    normalize_block(e, BlockPartition(std::vector<std::vector<std::size_t>>{{1}, {0}}));
    FAIL("expected an error");
  } catch (const DegenerateSegmentError& err) {
    CHECK(err.segment() == 1);
    CHECK(err.index() == 1);  // block position, not channel
  }
}

TEST_CASE("property: block normalization gives unit block norms and is scale invariant") {
  const auto s = testing::random_segments(5, 32, 5, 41);
  const BlockPartition p({{0, 3}, {1}, {2, 4}});
  const auto e = dft(s);
  const auto n = normalize_block(e, p);
  for (std::size_t j = 0; j < 5; ++j)
    for (std::size_t f = 0; f < n.n_freqs(); ++f)
      for (const auto& block : p.blocks()) {
        double sq = 0.0;
        for (auto c : block) sq += std::norm(n.at(j, f, c));
        CHECK(std::abs(sq - 1.0) < 1e-12);
      }

  // Scaling a block by a positive constant changes nothing after normalization.
  std::vector<double> scaled(s.data().begin(), s.data().end());
  for (std::size_t i = 0; i < scaled.size(); ++i)
    if (i % 5 == 0 || i % 5 == 3) scaled[i] *= 7.5;
  const auto n2 = normalize_block(dft(SegmentSet(5, 32, 5, scaled)), p);
  for (std::size_t i = 0; i < n.coeffs().size(); ++i) CHECK(std::abs(n.coeffs()[i] - n2.coeffs()[i]) < 1e-12);
}

TEST_CASE("spectral export round trip") {
  testing::TempDir dir("spectral");
  const auto e = dft(testing::random_segments(3, 16, 3, 9));
  write_spectral(e, dir / "raw.spc");
  const auto back = load_spectral(dir / "raw.spc", std::nullopt, e.freq_indices());
  CHECK(back.freq_indices() == e.freq_indices());
  CHECK(std::equal(back.coeffs().begin(), back.coeffs().end(), e.coeffs().begin()));

  const auto labelled = load_spectral(dir / "raw.spc");
  CHECK(labelled.freq_indices().front() == 0);

  const BlockPartition p({{0, 1}, {2}});
  write_spectral(normalize_block(e, p), dir / "blk.spc");
  CHECK_THROWS_AS(load_spectral(dir / "blk.spc"), NormModeError);
  CHECK(load_spectral(dir / "blk.spc", p).norm().kind == NormMode::Kind::block);
  CHECK_THROWS_AS(load_spectral(dir / "blk.spc", BlockPartition({{0}, {1, 2}})), NormModeError);
}
