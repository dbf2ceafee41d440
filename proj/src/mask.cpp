#include "fairprune/mask.hpp"

#include <string>

#include "fairprune/errors.hpp"

namespace fairprune {

void PruningMask::prune(std::span<const std::size_t> indices,
                        std::size_t iteration) {
  for (std::size_t i : indices) {
    if (i >= bits_.size())
      throw InternalError("mask index out of range: " + std::to_string(i));
    if (bits_[i])
      throw InternalError("parameter pruned twice: " + std::to_string(i));
  }
  HistoryEntry entry{iteration, {indices.begin(), indices.end()}};
  for (std::size_t i : indices) bits_[i] = 1;
  pruned_count_ += indices.size();
  history_.push_back(std::move(entry));
}

PruningMask PruningMask::from_bits(std::vector<std::uint8_t> bits) {
  PruningMask m(bits.size());
  m.bits_ = std::move(bits);
  m.pruned_count_ = 0;
  for (auto b : m.bits_) {
    if (b != 0 && b != 1) throw DataError("mask byte must be 0 or 1");
    m.pruned_count_ += b;
  }
  return m;
}

}  // namespace fairprune
