#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fairprune {

// Per-parameter keep/prune bits, aligned with Mlp parameter order. A pruned
// bit never reverts; every prune call is recorded in the history.
class PruningMask {
 public:
  explicit PruningMask(std::size_t n) : bits_(n, 0) {}

  std::size_t size() const { return bits_.size(); }
  std::size_t pruned_count() const { return pruned_count_; }
  std::size_t active_count() const { return bits_.size() - pruned_count_; }
  double pruned_fraction() const {
    return bits_.empty() ? 0.0
                         : static_cast<double>(pruned_count_) /
                               static_cast<double>(bits_.size());
  }

  bool is_pruned(std::size_t i) const { return bits_[i] != 0; }

  // Marks the given parameter indices pruned. Indices must be in range and
  // not already pruned.
  void prune(std::span<const std::size_t> indices, std::size_t iteration);

  struct HistoryEntry {
    std::size_t iteration;
    std::vector<std::size_t> indices;
  };
  const std::vector<HistoryEntry>& history() const { return history_; }

  // 1 = pruned, 0 = keep. Also the checkpoint wire encoding.
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  // Reconstructs a mask from its wire encoding; history starts empty (the
  // per-iteration record lives in the run's iteration log, not the file).
  static PruningMask from_bits(std::vector<std::uint8_t> bits);

 private:
  std::vector<std::uint8_t> bits_;
  std::size_t pruned_count_ = 0;
  std::vector<HistoryEntry> history_;
};

}  // namespace fairprune
