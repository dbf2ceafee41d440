#include "fairprune/sampler.hpp"

#include "fairprune/errors.hpp"

namespace fairprune {

BatchStream::BatchStream(const GroupedDataset& dataset,
                         std::vector<std::size_t> indices,
                         std::size_t batch_size, Rng rng,
                         bool with_replacement)
    : dataset_(&dataset),
      pool_(std::move(indices)),
      batch_size_(batch_size),
      rng_(rng),
      with_replacement_(with_replacement) {
  if (batch_size_ == 0) throw ConfigError("batch_size must be positive");
  if (pool_.empty()) throw DataError("batch stream over an empty sample pool");
  if (!with_replacement_ && pool_.size() < batch_size_)
    throw DataError("pool smaller than batch_size and sampling without "
                    "replacement");
  shuffle(pool_, rng_);
}

Batch BatchStream::next() {
  std::vector<std::size_t> picked;
  picked.reserve(batch_size_);
  if (with_replacement_) {
    for (std::size_t i = 0; i < batch_size_; ++i)
      picked.push_back(pool_[rng_.below(pool_.size())]);
  } else {
    if (cursor_ + batch_size_ > pool_.size()) {
      shuffle(pool_, rng_);
      cursor_ = 0;
    }
    for (std::size_t i = 0; i < batch_size_; ++i)
      picked.push_back(pool_[cursor_ + i]);
    cursor_ += batch_size_;
  }
  return dataset_->to_batch(picked);
}

PairBatchSampler::PairBatchSampler(const GroupedDataset& dataset,
                                   std::size_t batch_size, std::uint64_t seed,
                                   bool with_replacement)
    : group0_(dataset, dataset.group_indices(0), batch_size,
              Rng(seed).child(0), with_replacement),
      group1_(dataset, dataset.group_indices(1), batch_size,
              Rng(seed).child(1), with_replacement) {}

std::pair<Batch, Batch> PairBatchSampler::next() {
  Batch b0 = group0_.next();
  Batch b1 = group1_.next();
  return {std::move(b0), std::move(b1)};
}

BatchStream pooled_batch_stream(const GroupedDataset& dataset,
                                std::size_t batch_size, std::uint64_t seed,
                                bool with_replacement) {
  std::vector<std::size_t> all(dataset.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return BatchStream(dataset, std::move(all), batch_size, Rng(seed).child(0),
                     with_replacement);
}

std::vector<std::pair<Batch, Batch>> sample_pair_batches(
    const GroupedDataset& dataset, std::size_t batch_size, std::size_t count,
    std::uint64_t seed) {
  PairBatchSampler sampler(dataset, batch_size, seed);
  std::vector<std::pair<Batch, Batch>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sampler.next());
  return out;
}

}  // namespace fairprune
