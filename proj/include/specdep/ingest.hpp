#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace specdep {

/// Real-valued segmented multichannel recording, stored [segment][time][channel].
class SegmentSet {
 public:
  SegmentSet() = default;

  /// Validates shape (N_R >= 1, N_T >= 2, M >= 1) and finiteness.
  /// Empty `channel_names` yields ch_0..ch_{M-1}.
  SegmentSet(std::size_t n_segments, std::size_t n_samples,
             std::size_t n_channels, std::vector<double> data,
             std::vector<std::string> channel_names = {},
             std::optional<double> sampling_rate = std::nullopt);

  std::size_t n_segments() const noexcept { return n_segments_; }
  std::size_t n_samples() const noexcept { return n_samples_; }
  std::size_t n_channels() const noexcept { return n_channels_; }

  double at(std::size_t segment, std::size_t t, std::size_t channel) const {
    return data_[index(segment, t, channel)];
  }
  double& at(std::size_t segment, std::size_t t, std::size_t channel) {
    return data_[index(segment, t, channel)];
  }

  std::span<const double> data() const noexcept { return data_; }
  const std::vector<std::string>& channel_names() const noexcept {
    return channel_names_;
  }
  std::optional<double> sampling_rate() const noexcept { return sampling_rate_; }
  void set_sampling_rate(std::optional<double> rate);

  bool operator==(const SegmentSet&) const = default;

 private:
  std::size_t index(std::size_t s, std::size_t t, std::size_t m) const noexcept {
    return (s * n_samples_ + t) * n_channels_ + m;
  }

  std::size_t n_segments_ = 0;
  std::size_t n_samples_ = 0;
  std::size_t n_channels_ = 0;
  std::vector<double> data_;
  std::vector<std::string> channel_names_;
  std::optional<double> sampling_rate_;
};

/// Ordered disjoint grouping of channel indices into blocks.
class BlockPartition {
 public:
  BlockPartition() = default;
  /// Checks k >= 1, every block nonempty, indices disjoint.
  explicit BlockPartition(std::vector<std::vector<std::size_t>> blocks,
                          std::vector<std::string> names = {});

  /// One block per channel 0..n-1.
  static BlockPartition singletons(std::size_t n_channels);

  std::size_t size() const noexcept { return blocks_.size(); }
  const std::vector<std::size_t>& block(std::size_t i) const { return blocks_.at(i); }
  const std::vector<std::vector<std::size_t>>& blocks() const noexcept { return blocks_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::vector<std::size_t> dims() const;
  /// Channels of all blocks, concatenated in block order.
  std::vector<std::size_t> channels() const;

  /// Throws DimensionError when an index falls outside 0..n_channels-1.
  void check_bounds(std::size_t n_channels) const;

  /// Equality ignores names: two partitions are the same grouping.
  bool operator==(const BlockPartition& other) const { return blocks_ == other.blocks_; }

 private:
  std::vector<std::vector<std::size_t>> blocks_;
  std::vector<std::string> names_;
};

enum class SegmentFormat { csv_long, binary_f64 };
enum class DetrendMode { mean, none };

SegmentSet load_segments(const std::filesystem::path& path, SegmentFormat format);
void write_segments(const SegmentSet& s, const std::filesystem::path& path,
                    SegmentFormat format);

/// Cut a continuous [T][M] recording (row-major) into windows of n_t samples.
/// The step is round(n_t * (1 - overlap)); trailing partial windows are dropped.
SegmentSet segment(std::span<const double> continuous, std::size_t n_channels,
                   std::size_t n_t, double overlap,
                   std::vector<std::string> channel_names = {},
                   std::optional<double> sampling_rate = std::nullopt);

SegmentSet detrend(const SegmentSet& s, DetrendMode mode);

/// Multiply every segment by a periodic Hann window before the transform.
SegmentSet hann_taper(const SegmentSet& s);

}  // namespace specdep
