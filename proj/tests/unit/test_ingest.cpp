#include <doctest.h>

#include <fstream>
#include <numeric>

#include "specdep/errors.hpp"
#include "specdep/ingest.hpp"
#include "support.hpp"

using namespace specdep;

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

TEST_CASE("csv: one segment, two channels, values 0..7") {
  testing::TempDir dir("ingest");
  write_text(dir / "a.csv",
             "segment,time,a,b\n0,0,0,1\n0,1,2,3\n0,2,4,5\n0,3,6,7\n");
  const auto s = load_segments(dir / "a.csv", SegmentFormat::csv_long);
  CHECK(s.n_segments() == 1);
  CHECK(s.n_samples() == 4);
  CHECK(s.n_channels() == 2);
  for (std::size_t t = 0; t < 4; ++t)
    for (std::size_t m = 0; m < 2; ++m) CHECK(s.at(0, t, m) == static_cast<double>(2 * t + m));
  CHECK(s.channel_names() == std::vector<std::string>{"a", "b"});
  CHECK_FALSE(s.sampling_rate());
}

TEST_CASE("csv: sampling rate comment") {
  testing::TempDir dir("ingest");
  write_text(dir / "a.csv", "# sampling_rate=256\nsegment,time,x\n0,0,1\n0,1,2\n1,0,3\n1,1,4\n");
  const auto s = load_segments(dir / "a.csv", SegmentFormat::csv_long);
  REQUIRE(s.sampling_rate());
  CHECK(*s.sampling_rate() == 256.0);
  CHECK(s.n_segments() == 2);
  CHECK(s.at(1, 1, 0) == 4.0);
}

TEST_CASE("csv: malformed inputs") {
  testing::TempDir dir("ingest");
  const auto p = dir / "bad.csv";

  write_text(p, "");
  CHECK_THROWS_AS(load_segments(p, SegmentFormat::csv_long), MalformedInputError);

  write_text(p, "segment,time,a,b,c\n0,0,1,2\n0,1,3,4\n");
  CHECK_THROWS_AS(load_segments(p, SegmentFormat::csv_long), DimensionError);

  write_text(p, "segment,time,a\n0,0,1\n0,1,x\n");
  try {
    load_segments(p, SegmentFormat::csv_long);
    FAIL("expected an error");
  } catch (const MalformedInputError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  write_text(p, "segment,time,a\n0,0,1\n0,1,2\n1,0,3\n");
  CHECK_THROWS_AS(load_segments(p, SegmentFormat::csv_long), DimensionError);

  write_text(p, "segment,time,a\n0,1,1\n0,0,2\n");
  CHECK_THROWS_AS(load_segments(p, SegmentFormat::csv_long), MalformedInputError);

  write_text(p, "segment,time,a\n0,0,nan\n0,1,2\n");
  CHECK_THROWS_AS(load_segments(p, SegmentFormat::csv_long), MalformedInputError);

  CHECK_THROWS_AS(load_segments(dir / "missing.csv", SegmentFormat::csv_long), MalformedInputError);
}

TEST_CASE("binary: truncated file names the byte offset") {
  testing::TempDir dir("ingest");
  const auto s = testing::random_segments(2, 8, 3, 5);
  write_segments(s, dir / "s.bin", SegmentFormat::binary_f64);
  const auto size = std::filesystem::file_size(dir / "s.bin");
  std::filesystem::resize_file(dir / "s.bin", size - 3);
  try {
    load_segments(dir / "s.bin", SegmentFormat::binary_f64);
    FAIL("expected an error");
  } catch (const MalformedInputError& e) {
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }
  write_text(dir / "junk.bin", "NOTSEG");
  CHECK_THROWS_AS(load_segments(dir / "junk.bin", SegmentFormat::binary_f64), MalformedInputError);
}

TEST_CASE("round trip is exact in both formats") {
  testing::TempDir dir("ingest");
  auto s = testing::random_segments(3, 16, 4, 11);
  s.set_sampling_rate(128.0);
  write_segments(s, dir / "s.csv", SegmentFormat::csv_long);
  const auto from_csv = load_segments(dir / "s.csv", SegmentFormat::csv_long);
  CHECK(from_csv == s);

  write_segments(s, dir / "s.bin", SegmentFormat::binary_f64);
  const auto from_bin = load_segments(dir / "s.bin", SegmentFormat::binary_f64);
  CHECK(from_bin.n_segments() == 3);
  CHECK(std::equal(from_bin.data().begin(), from_bin.data().end(), s.data().begin()));
}

TEST_CASE("segment set validation") {
  CHECK_THROWS_AS(SegmentSet(1, 1, 1, {1.0}), DimensionError);
  CHECK_THROWS_AS(SegmentSet(1, 2, 1, {1.0}), DimensionError);
  CHECK_THROWS_AS(SegmentSet(1, 2, 1, {1.0, std::numeric_limits<double>::infinity()}), MalformedInputError);
  const SegmentSet s(1, 2, 2, {1, 2, 3, 4});
  CHECK(s.channel_names() == std::vector<std::string>{"ch_0", "ch_1"});
}

TEST_CASE("partition validation") {
  using Blocks = std::vector<std::vector<std::size_t>>;
  CHECK_THROWS_AS(BlockPartition(Blocks{}), DimensionError);
  CHECK_THROWS_AS(BlockPartition(Blocks{{0}, {}}), DimensionError);
  CHECK_THROWS_AS(BlockPartition({{0, 1}, {1}}), DimensionError);
  const BlockPartition p({{2}, {0, 1}});
  CHECK(p.names() == std::vector<std::string>{"B0", "B1"});
  CHECK(p.channels() == std::vector<std::size_t>{2, 0, 1});
  CHECK(p.dims() == std::vector<std::size_t>{1, 2});
  CHECK_NOTHROW(p.check_bounds(3));
  CHECK_THROWS_AS(p.check_bounds(2), DimensionError);
  CHECK(BlockPartition::singletons(2) == BlockPartition(Blocks{{0}, {1}}));
}

TEST_CASE("segment: windows") {
  std::vector<double> x(8);
  std::iota(x.begin(), x.end(), 0.0);

  const auto tiled = segment(x, 1, 4, 0.0);
  REQUIRE(tiled.n_segments() == 2);
  CHECK(tiled.at(0, 0, 0) == 0.0);
  CHECK(tiled.at(0, 3, 0) == 3.0);
  CHECK(tiled.at(1, 0, 0) == 4.0);
  CHECK(tiled.at(1, 3, 0) == 7.0);

  const auto half = segment(x, 1, 4, 0.5);
  REQUIRE(half.n_segments() == 3);
  // Window j starts at j * round(4 * (1 - 0.5)).
  for (std::size_t j = 0; j < 3; ++j) CHECK(half.at(j, 0, 0) == static_cast<double>(2 * j));

  CHECK_THROWS_AS(segment(std::span(x.data(), 3), 1, 4, 0.0), DimensionError);
  CHECK_THROWS_AS(segment(x, 1, 4, 1.0), RangeError);
}

TEST_CASE("detrend") {
  const SegmentSet s(1, 4, 1, {1, 2, 3, 4});
  const auto d = detrend(s, DetrendMode::mean);
  const double want[] = {-1.5, -0.5, 0.5, 1.5};
  for (std::size_t t = 0; t < 4; ++t) CHECK(d.at(0, t, 0) == doctest::Approx(want[t]).epsilon(1e-15));

  const auto again = detrend(d, DetrendMode::mean);
  for (std::size_t t = 0; t < 4; ++t) CHECK(std::abs(again.at(0, t, 0) - d.at(0, t, 0)) <= 1e-15);

  const auto r = testing::random_segments(2, 9, 2, 3);
  CHECK(detrend(r, DetrendMode::none) == r);
}

TEST_CASE("property: segment then detrend leaves zero means") {
  specdep::NormalStream rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 1 + trial % 3;
    std::vector<double> x(200 * m);
    for (auto& v : x) v = 5.0 + 3.0 * rng();
    const auto d = detrend(segment(x, m, 32, 0.25), DetrendMode::mean);
    for (std::size_t j = 0; j < d.n_segments(); ++j)
      for (std::size_t c = 0; c < m; ++c) {
        double sum = 0.0, scale = 0.0;
        for (std::size_t t = 0; t < d.n_samples(); ++t) {
          sum += d.at(j, t, c);
          scale = std::max(scale, std::abs(d.at(j, t, c)));
        }
        CHECK(std::abs(sum / 32.0) <= 1e-12 * std::max(1.0, scale));
      }
  }
}

TEST_CASE("hann taper is periodic and zero at the first sample") {
  const SegmentSet ones(1, 8, 1, std::vector<double>(8, 1.0));
  const auto h = hann_taper(ones);
  CHECK(h.at(0, 0, 0) == doctest::Approx(0.0));
  CHECK(h.at(0, 4, 0) == doctest::Approx(1.0));
  CHECK(h.at(0, 2, 0) == doctest::Approx(0.5));
  CHECK(h.at(0, 6, 0) == doctest::Approx(0.5));
}
