#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fairprune/dataset.hpp"
#include "fairprune/rng.hpp"

namespace fairprune {

// Mini-batch stream over a fixed index pool. Each epoch is a fresh shuffle
// drawn without replacement; a partial batch at the end of an epoch is
// dropped and the pool reshuffled, so no batch ever mixes epochs and no
// sample repeats within one epoch.
class BatchStream {
 public:
  BatchStream(const GroupedDataset& dataset, std::vector<std::size_t> indices,
              std::size_t batch_size, Rng rng, bool with_replacement = false);

  Batch next();
  std::size_t batch_size() const { return batch_size_; }

 private:
  const GroupedDataset* dataset_;
  std::vector<std::size_t> pool_;
  std::size_t batch_size_;
  std::size_t cursor_ = 0;
  Rng rng_;
  bool with_replacement_;
};

// Streams (B0, B1) pairs: B0 only group-0 samples, B1 only group-1 samples,
// each group shuffled independently. Group 0 uses child stream 0 of the seed
// and group 1 child stream 1, so a single-group run seeded the same way
// reproduces the group-0 batch sequence exactly.
class PairBatchSampler {
 public:
  PairBatchSampler(const GroupedDataset& dataset, std::size_t batch_size,
                   std::uint64_t seed, bool with_replacement = false);

  std::pair<Batch, Batch> next();

 private:
  BatchStream group0_;
  BatchStream group1_;
};

// Stream over the whole dataset (no group pairing); used by the baseline
// pruner. Seeded with child stream 0.
BatchStream pooled_batch_stream(const GroupedDataset& dataset,
                                std::size_t batch_size, std::uint64_t seed,
                                bool with_replacement = false);

std::vector<std::pair<Batch, Batch>> sample_pair_batches(
    const GroupedDataset& dataset, std::size_t batch_size, std::size_t count,
    std::uint64_t seed);

}  // namespace fairprune
