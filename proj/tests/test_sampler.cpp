#include <doctest.h>

#include <map>
#include <set>

#include "fairprune/errors.hpp"
#include "fairprune/sampler.hpp"

using namespace fairprune;

namespace {

GroupedDataset tiny_dataset(std::size_t per_group) {
  GroupedDataset ds;
  ds.feature_dim = 1;
  ds.num_classes = 2;
  for (int g = 0; g <= 1; ++g)
    for (std::size_t i = 0; i < per_group; ++i) {
      Sample s;
      s.features = {static_cast<double>(g * 100 + static_cast<int>(i))};
      s.label = static_cast<int>(i % 2);
      s.group = g;
      ds.samples.push_back(s);
    }
  return ds;
}

}  // namespace

TEST_CASE("one epoch covers each group exactly once") {
  const GroupedDataset ds = tiny_dataset(4);
  const auto pairs = sample_pair_batches(ds, 2, 2, 5);
  REQUIRE(pairs.size() == 2);
  std::multiset<double> seen0, seen1, expect0, expect1;
  for (const auto& s : ds.samples)
    (s.group == 0 ? expect0 : expect1).insert(s.features[0]);
  for (const auto& [b0, b1] : pairs) {
    for (const auto& f : b0.features) seen0.insert(f[0]);
    for (const auto& f : b1.features) seen1.insert(f[0]);
  }
  CHECK(seen0 == expect0);
  CHECK(seen1 == expect1);
}

TEST_CASE("pair batches are group-pure") {
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const GroupedDataset ds = tiny_dataset(3 + rng.below(10));
    const auto pairs = sample_pair_batches(ds, 2, 6, rng.next_u64());
    for (const auto& [b0, b1] : pairs) {
      for (int g : b0.groups) CHECK(g == 0);
      for (int g : b1.groups) CHECK(g == 1);
    }
  }
}

TEST_CASE("wrapping reshuffles without duplicates inside an epoch") {
  const GroupedDataset ds = tiny_dataset(5);  // batch 2 -> 2 batches/epoch
  PairBatchSampler sampler(ds, 2, 99);
  // 6 pairs = 3 epochs of 2 batches each (last pool element dropped).
  std::vector<double> drawn;
  for (int i = 0; i < 6; ++i) {
    auto [b0, b1] = sampler.next();
    for (const auto& f : b0.features) drawn.push_back(f[0]);
  }
  for (std::size_t epoch = 0; epoch < 3; ++epoch) {
    std::set<double> unique(drawn.begin() + epoch * 4,
                            drawn.begin() + (epoch + 1) * 4);
    CHECK(unique.size() == 4);
  }
}

TEST_CASE("deterministic per seed, different across seeds") {
  const GroupedDataset ds = tiny_dataset(8);
  const auto a = sample_pair_batches(ds, 2, 4, 7);
  const auto b = sample_pair_batches(ds, 2, 4, 7);
  const auto c = sample_pair_batches(ds, 2, 4, 8);
  bool identical = true, same_as_c = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    identical &= a[i].first.features == b[i].first.features &&
                 a[i].second.features == b[i].second.features;
    same_as_c &= a[i].first.features == c[i].first.features;
  }
  CHECK(identical);
  CHECK_FALSE(same_as_c);
}

TEST_CASE("an empty group is an input error") {
  GroupedDataset ds = tiny_dataset(4).filter_group(0);
  CHECK_THROWS_AS(PairBatchSampler(ds, 2, 1), DataError);
}

TEST_CASE("a pool smaller than the batch needs replacement enabled") {
  const GroupedDataset ds = tiny_dataset(3);
  CHECK_THROWS_AS(PairBatchSampler(ds, 4, 1), DataError);
  PairBatchSampler ok(ds, 4, 1, /*with_replacement=*/true);
  auto [b0, b1] = ok.next();
  CHECK(b0.size() == 4);
  for (int g : b0.groups) CHECK(g == 0);
}

TEST_CASE("pooled stream mirrors the group-0 stream on a group-0-only set") {
  const GroupedDataset ds = tiny_dataset(6);
  const GroupedDataset only0 = ds.filter_group(0);
  PairBatchSampler paired(ds, 2, 31);
  BatchStream pooled = pooled_batch_stream(only0, 2, 31);
  for (int i = 0; i < 5; ++i) {
    auto [b0, b1] = paired.next();
    const Batch p = pooled.next();
    CHECK(b0.features == p.features);
    CHECK(b0.labels == p.labels);
  }
}
