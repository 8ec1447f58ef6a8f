#include "specdep/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <string_view>

#include "binary_io.hpp"
#include "specdep/errors.hpp"

namespace specdep {

namespace {

constexpr std::string_view kSegmentMagic = "SDSEG1";

std::vector<std::string> default_names(std::size_t m) {
  std::vector<std::string> names;
  names.reserve(m);
  for (std::size_t i = 0; i < m; ++i) names.push_back("ch_" + std::to_string(i));
  return names;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line_no) {
  T value{};
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  if (!field.empty() && field.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || field.empty())
    throw MalformedInputError("cannot parse '" + std::string(field) + "' at line " +
                              std::to_string(line_no));
  return value;
}

SegmentSet load_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<double> rate;
  std::vector<std::string> names;
  bool have_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      // "# sampling_rate=256"
      auto body = trim(t.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string_view::npos && trim(body.substr(0, eq)) == "sampling_rate")
        rate = parse_number<double>(trim(body.substr(eq + 1)), line_no);
      continue;
    }
    const auto fields = split_commas(t);
    if (fields.size() < 3 || fields[0] != "segment" || fields[1] != "time")
      throw MalformedInputError("expected header 'segment,time,ch_0,...' at line " +
                                std::to_string(line_no));
    for (std::size_t i = 2; i < fields.size(); ++i) names.emplace_back(fields[i]);
    have_header = true;
    break;
  }
  if (!have_header) throw MalformedInputError("missing header at line " + std::to_string(line_no + 1));

  const std::size_t m = names.size();
  std::vector<double> data;
  std::size_t n_t = 0;
  std::size_t cur_segment = 0;
  std::size_t cur_time = 0;
  std::size_t rows = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split_commas(t);
    if (fields.size() != m + 2)
      throw DimensionError("line " + std::to_string(line_no) + " has " +
                           std::to_string(fields.size() - 2) + " channels, header declares " +
                           std::to_string(m));
    const auto seg = parse_number<std::size_t>(fields[0], line_no);
    const auto time = parse_number<std::size_t>(fields[1], line_no);
    if (rows == 0) {
      if (seg != 0 || time != 0)
        throw MalformedInputError("first row must be segment 0, time 0 at line " +
                                  std::to_string(line_no));
    } else if (seg == cur_segment && time == cur_time + 1) {
      // continue segment
    } else if (seg == cur_segment + 1 && time == 0) {
      if (n_t == 0) n_t = cur_time + 1;
      if (cur_time + 1 != n_t)
        throw DimensionError("segment " + std::to_string(cur_segment) + " has " +
                             std::to_string(cur_time + 1) + " samples, expected " +
                             std::to_string(n_t));
    } else {
      throw MalformedInputError("rows not sorted by (segment, time) at line " +
                                std::to_string(line_no));
    }
    cur_segment = seg;
    cur_time = time;
    for (std::size_t c = 0; c < m; ++c) data.push_back(parse_number<double>(fields[c + 2], line_no));
    ++rows;
  }
  if (rows == 0) throw MalformedInputError("no data rows at line " + std::to_string(line_no));
  if (n_t == 0) n_t = cur_time + 1;
  if (cur_time + 1 != n_t)
    throw DimensionError("segment " + std::to_string(cur_segment) + " has " +
                         std::to_string(cur_time + 1) + " samples, expected " + std::to_string(n_t));
  return SegmentSet(cur_segment + 1, n_t, m, std::move(data), std::move(names), rate);
}

SegmentSet load_binary(std::istream& in) {
  detail::LeReader reader(in);
  reader.expect_magic(kSegmentMagic);
  const auto n_r = reader.read<std::uint32_t>();
  const auto n_t = reader.read<std::uint32_t>();
  const auto m = reader.read<std::uint32_t>();
  const std::size_t count = std::size_t{n_r} * n_t * m;
  std::vector<double> data(count);
  for (auto& v : data) v = reader.read<double>();
  reader.expect_end();
  return SegmentSet(n_r, n_t, m, std::move(data));
}

}  // namespace

SegmentSet::SegmentSet(std::size_t n_segments, std::size_t n_samples, std::size_t n_channels,
                       std::vector<double> data, std::vector<std::string> channel_names,
                       std::optional<double> sampling_rate)
    : n_segments_(n_segments),
      n_samples_(n_samples),
      n_channels_(n_channels),
      data_(std::move(data)),
      channel_names_(std::move(channel_names)) {
  if (n_segments_ < 1 || n_samples_ < 2 || n_channels_ < 1)
    throw DimensionError("segment set needs N_R >= 1, N_T >= 2, M >= 1 (got " +
                         std::to_string(n_segments_) + ", " + std::to_string(n_samples_) + ", " +
                         std::to_string(n_channels_) + ")");
  if (data_.size() != n_segments_ * n_samples_ * n_channels_)
    throw DimensionError("segment data has " + std::to_string(data_.size()) +
                         " values, expected " +
                         std::to_string(n_segments_ * n_samples_ * n_channels_));
  if (channel_names_.empty()) channel_names_ = default_names(n_channels_);
  if (channel_names_.size() != n_channels_)
    throw DimensionError("channel name count does not match channel count");
  for (std::size_t i = 0; i < data_.size(); ++i)
    if (!std::isfinite(data_[i]))
      throw MalformedInputError("non-finite sample at flat index " + std::to_string(i));
  set_sampling_rate(sampling_rate);
}

void SegmentSet::set_sampling_rate(std::optional<double> rate) {
  if (rate && !(*rate > 0.0 && std::isfinite(*rate)))
    throw RangeError("sampling rate must be positive");
  sampling_rate_ = rate;
}

BlockPartition::BlockPartition(std::vector<std::vector<std::size_t>> blocks,
                               std::vector<std::string> names)
    : blocks_(std::move(blocks)), names_(std::move(names)) {
  if (blocks_.empty()) throw DimensionError("partition needs at least one block");
  std::set<std::size_t> seen;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (blocks_[b].empty()) throw DimensionError("block " + std::to_string(b) + " is empty");
    for (auto idx : blocks_[b])
      if (!seen.insert(idx).second)
        throw DimensionError("channel " + std::to_string(idx) + " appears in more than one block");
  }
  if (names_.empty()) {
    for (std::size_t b = 0; b < blocks_.size(); ++b) names_.push_back("B" + std::to_string(b));
  }
  if (names_.size() != blocks_.size()) throw DimensionError("block name count mismatch");
}

BlockPartition BlockPartition::singletons(std::size_t n_channels) {
  std::vector<std::vector<std::size_t>> blocks;
  for (std::size_t i = 0; i < n_channels; ++i) blocks.push_back({i});
  return BlockPartition(std::move(blocks));
}

std::vector<std::size_t> BlockPartition::dims() const {
  std::vector<std::size_t> d;
  for (const auto& b : blocks_) d.push_back(b.size());
  return d;
}

std::vector<std::size_t> BlockPartition::channels() const {
  std::vector<std::size_t> all;
  for (const auto& b : blocks_) all.insert(all.end(), b.begin(), b.end());
  return all;
}

void BlockPartition::check_bounds(std::size_t n_channels) const {
  for (const auto& b : blocks_)
    for (auto idx : b)
      if (idx >= n_channels)
        throw DimensionError("channel index " + std::to_string(idx) + " out of range for " +
                             std::to_string(n_channels) + " channels");
}

SegmentSet load_segments(const std::filesystem::path& path, SegmentFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedInputError("cannot open " + path.string() + " at line 0");
  return format == SegmentFormat::csv_long ? load_csv(in) : load_binary(in);
}

void write_segments(const SegmentSet& s, const std::filesystem::path& path, SegmentFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  if (format == SegmentFormat::binary_f64) {
    out.write(kSegmentMagic.data(), static_cast<std::streamsize>(kSegmentMagic.size()));
    detail::write_le(out, static_cast<std::uint32_t>(s.n_segments()));
    detail::write_le(out, static_cast<std::uint32_t>(s.n_samples()));
    detail::write_le(out, static_cast<std::uint32_t>(s.n_channels()));
    for (double v : s.data()) detail::write_le(out, v);
    return;
  }
  if (s.sampling_rate()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", *s.sampling_rate());
    out << "# sampling_rate=" << buf << '\n';
  }
  out << "segment,time";
  for (const auto& n : s.channel_names()) out << ',' << n;
  out << '\n';
  char buf[32];
  for (std::size_t j = 0; j < s.n_segments(); ++j)
    for (std::size_t t = 0; t < s.n_samples(); ++t) {
      out << j << ',' << t;
      for (std::size_t m = 0; m < s.n_channels(); ++m) {
        std::snprintf(buf, sizeof buf, "%.17g", s.at(j, t, m));
        out << ',' << buf;
      }
      out << '\n';
    }
}

SegmentSet segment(std::span<const double> continuous, std::size_t n_channels, std::size_t n_t,
                   double overlap, std::vector<std::string> channel_names,
                   std::optional<double> sampling_rate) {
  if (n_channels == 0 || continuous.size() % n_channels != 0)
    throw DimensionError("continuous data size is not a multiple of the channel count");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw RangeError("overlap must lie in [0, 1)");
  const std::size_t total = continuous.size() / n_channels;
  if (total < n_t)
    throw DimensionError("recording has " + std::to_string(total) + " samples, window needs " +
                         std::to_string(n_t));
  const auto step = static_cast<std::size_t>(std::llround(static_cast<double>(n_t) * (1.0 - overlap)));
  if (step < 1) throw RangeError("overlap leaves a step of zero samples");
  const std::size_t n_r = (total - n_t) / step + 1;
  std::vector<double> data;
  data.reserve(n_r * n_t * n_channels);
  for (std::size_t j = 0; j < n_r; ++j) {
    const auto first = continuous.begin() + static_cast<std::ptrdiff_t>(j * step * n_channels);
    data.insert(data.end(), first, first + static_cast<std::ptrdiff_t>(n_t * n_channels));
  }
  return SegmentSet(n_r, n_t, n_channels, std::move(data), std::move(channel_names), sampling_rate);
}

SegmentSet detrend(const SegmentSet& s, DetrendMode mode) {
  SegmentSet out = s;
  if (mode == DetrendMode::none) return out;
  const std::size_t n_t = s.n_samples();
  for (std::size_t j = 0; j < s.n_segments(); ++j)
    for (std::size_t m = 0; m < s.n_channels(); ++m) {
      // Two passes: the residual mean of the first pass is removed as well.
      for (int pass = 0; pass < 2; ++pass) {
        double sum = 0.0;
        for (std::size_t t = 0; t < n_t; ++t) sum += out.at(j, t, m);
        const double mean = sum / static_cast<double>(n_t);
        for (std::size_t t = 0; t < n_t; ++t) out.at(j, t, m) -= mean;
      }
    }
  return out;
}

SegmentSet hann_taper(const SegmentSet& s) {
  SegmentSet out = s;
  const std::size_t n_t = s.n_samples();
  for (std::size_t t = 0; t < n_t; ++t) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(t) /
                                          static_cast<double>(n_t));
    for (std::size_t j = 0; j < s.n_segments(); ++j)
      for (std::size_t m = 0; m < s.n_channels(); ++m) out.at(j, t, m) *= w;
  }
  return out;
}

}  // namespace specdep
