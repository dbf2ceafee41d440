#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <filesystem>

#include "fairprune/errors.hpp"
#include "fairprune/pruner.hpp"
#include "fairprune/rng.hpp"
#include "fairprune/train.hpp"
#include "fairprune/util.hpp"
#include "support/oracles.hpp"
#include "support/quadratic_surrogate.hpp"

using namespace fairprune;

namespace {

// N = (7+1)*8 + (8+1)*4 = 100; divisible by 20 so the stock ratio presets
// land on whole iteration counts.
constexpr int kDim = 7;
constexpr int kHidden = 8;
constexpr int kClasses = 4;

GroupedDataset pruning_dataset(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.n_per_group = 120;
  cfg.feature_dim = kDim;
  cfg.num_classes = kClasses;
  cfg.seed = seed;
  return gen_synthetic_biased(cfg);
}

Mlp trained_model(const GroupedDataset& data, std::uint64_t seed) {
  Mlp m = Mlp::random_init({kDim, kHidden, kClasses}, Activation::kTanh, seed);
  TrainConfig tc;
  tc.epochs = 8;
  tc.batch_size = 32;
  tc.seed = seed + 1;
  train(m, data, tc);
  return m;
}

PruneSchedule small_schedule() {
  PruneSchedule s;
  s.target_ratio = 0.35;
  s.p_per_iteration = 0.05;
  s.beta = 0.33;
  s.batches_per_iteration = 4;
  s.batch_size = 8;
  s.seed = 77;
  return s;
}

SaliencyMap map_of(std::vector<double> values) {
  SaliencyMap m;
  m.values = std::move(values);
  return m;
}

}  // namespace

TEST_CASE("selection picks the smallest score") {
  PruningMask mask(3);
  CHECK(select_prune_set(map_of({3.0, 1.0, 2.0}), mask, 1) ==
        std::vector<std::size_t>{1});
}

TEST_CASE("selection ties break toward the lower index") {
  PruningMask mask(3);
  CHECK(select_prune_set(map_of({1.0, 1.0, 2.0}), mask, 1) ==
        std::vector<std::size_t>{0});
}

TEST_CASE("selection matches the full-sort oracle") {
  Rng rng(501);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 40 + rng.below(60);
    std::vector<double> scores(n);
    for (auto& v : scores) v = rng.uniform(-3.0, 3.0);
    PruningMask mask(n);
    std::vector<bool> pruned(n, false);
    std::vector<std::size_t> pre;
    for (std::size_t i = 0; i < n; ++i)
      if (rng.uniform() < 0.2) pre.push_back(i);
    if (!pre.empty()) mask.prune(pre, 0);
    for (std::size_t i : pre) pruned[i] = true;

    const std::size_t k = n / 4;
    const auto got = select_prune_set(map_of(scores), mask, k);
    const auto expect = testing::selection_oracle(scores, pruned, k);
    CHECK(got == expect);
  }
  PruningMask mask(3);
  CHECK_THROWS_AS(select_prune_set(map_of({1.0, 2.0, 3.0}), mask, 4),
                  ConfigError);
}

TEST_CASE("apply_mask zeroes exactly the masked coordinates") {
  Mlp m = Mlp::random_init({3, 5, 2}, Activation::kTanh, 3);
  const auto original = m.flatten();

  PruningMask empty(m.param_count());
  apply_mask(m, empty);
  CHECK(m.flatten() == original);

  PruningMask all(m.param_count());
  std::vector<std::size_t> everything(m.param_count());
  for (std::size_t i = 0; i < everything.size(); ++i) everything[i] = i;
  all.prune(everything, 1);
  Mlp zeroed = m;
  apply_mask(zeroed, all);
  for (double v : zeroed.flatten()) CHECK(v == 0.0);

  // idempotence
  PruningMask some(m.param_count());
  some.prune(std::vector<std::size_t>{1, 4, 7}, 1);
  Mlp once = m;
  apply_mask(once, some);
  Mlp twice = once;
  apply_mask(twice, some);
  CHECK(once.flatten() == twice.flatten());
}

TEST_CASE("mask bookkeeping enforces its invariants") {
  PruningMask mask(10);
  mask.prune(std::vector<std::size_t>{1, 2}, 1);
  CHECK(mask.pruned_count() == 2);
  CHECK(mask.active_count() == 8);
  CHECK(mask.is_pruned(1));
  CHECK_FALSE(mask.is_pruned(0));
  CHECK_THROWS_AS(mask.prune(std::vector<std::size_t>{2}, 2), InternalError);
  CHECK_THROWS_AS(mask.prune(std::vector<std::size_t>{10}, 2), InternalError);
  CHECK(mask.history().size() == 1);
}

TEST_CASE("zero target ratio is a no-op for every method") {
  const GroupedDataset data = pruning_dataset(601);
  PruneSchedule schedule = small_schedule();
  schedule.target_ratio = 0.0;
  for (PruneMethod method :
       {PruneMethod::kFairprune, PruneMethod::kObd, PruneMethod::kMagnitude}) {
    Mlp m = trained_model(data, 602);
    const auto before = m.flatten();
    schedule.method = method;
    const PruneResult result = prune_model(m, data, schedule, nullptr);
    CHECK(m.flatten() == before);
    CHECK(result.mask.pruned_count() == 0);
    CHECK(result.log.size() == 1);  // baseline row only
  }
}

TEST_CASE("preset ratios produce the arithmetic iteration counts") {
  const GroupedDataset data = pruning_dataset(603);

  // pr=35% at 5% per iteration -> 7 iterations
  Mlp m1 = trained_model(data, 604);
  REQUIRE(m1.param_count() == 100);
  PruneSchedule seven = small_schedule();
  const PruneResult r1 = fairprune::fairprune(m1, data, seven, nullptr);
  CHECK(r1.log.size() - 1 == 7);
  CHECK(r1.mask.pruned_count() == 35);

  // pr=50% at 10% per iteration -> 5 iterations
  Mlp m2 = trained_model(data, 605);
  PruneSchedule five = small_schedule();
  five.target_ratio = 0.5;
  five.p_per_iteration = 0.10;
  five.beta = 0.2;
  const PruneResult r2 = obd_prune(m2, data, five, nullptr);
  CHECK(r2.log.size() - 1 == 5);
  CHECK(r2.mask.pruned_count() == 50);
}

TEST_CASE("fairprune with beta 0 equals OBD restricted to group 0") {
  const GroupedDataset data = pruning_dataset(607);
  const GroupedDataset only0 = data.filter_group(0);
  PruneSchedule schedule = small_schedule();

  Mlp a = trained_model(data, 608);
  Mlp b = a;
  PruneSchedule fair = schedule;
  fair.beta = 0.0;
  const PruneResult fair_result = fairprune::fairprune(a, data, fair, nullptr);
  const PruneResult obd_result = obd_prune(b, only0, schedule, nullptr);
  CHECK(fair_result.mask.bits() == obd_result.mask.bits());
  CHECK(a.flatten() == b.flatten());
}

TEST_CASE("obd on the quadratic surrogate prunes the true smallest loss change") {
  Rng rng(502);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 30;
    const auto q = testing::QuadraticSurrogate::random(n, rng);
    const SaliencyMap map = group_saliency(q.center, q.curvature);
    PruningMask mask(n);
    const std::size_t k = 8;
    const auto picked = select_prune_set(map, mask, k);

    // Exhaustive: order coordinates by their true loss change when zeroed.
    std::vector<double> true_delta(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> theta = q.center;
      theta[i] = 0.0;
      true_delta[i] = q.loss(theta) - q.loss(q.center);
    }
    const auto expect =
        testing::selection_oracle(true_delta, std::vector<bool>(n, false), k);
    CHECK(picked == expect);
  }
}

TEST_CASE("magnitude pruning hand case and scale invariance") {
  Mlp m({1, 2}, Activation::kTanh);  // adjust params directly
  REQUIRE(m.param_count() == 4);
  m.unflatten(std::vector<double>{0.1, -5.0, 0.2, 3.0});
  PruneSchedule schedule;
  schedule.method = PruneMethod::kMagnitude;
  schedule.target_ratio = 0.25;
  schedule.p_per_iteration = 0.25;
  Mlp pruned = m;
  const PruneResult r = magnitude_prune(pruned, schedule, nullptr);
  CHECK(r.mask.is_pruned(0));
  CHECK(r.mask.pruned_count() == 1);

  // scaling all parameters leaves the selected set unchanged
  Mlp scaled = m;
  auto params = scaled.flatten();
  for (auto& v : params) v *= 2.0;
  scaled.unflatten(params);
  const PruneResult r2 = magnitude_prune(scaled, schedule, nullptr);
  CHECK(r2.mask.bits() == r.mask.bits());
}

TEST_CASE("magnitude selection matches the sort oracle") {
  Rng rng(503);
  Mlp m = Mlp::random_init({6, 9, 3}, Activation::kTanh, 71);
  PruneSchedule schedule;
  schedule.method = PruneMethod::kMagnitude;
  schedule.target_ratio = 0.3;
  schedule.p_per_iteration = 0.3;
  Mlp pruned = m;
  const PruneResult r = magnitude_prune(pruned, schedule, nullptr);

  std::vector<double> scores;
  for (double v : m.flatten()) scores.push_back(std::abs(v));
  const auto expect = testing::selection_oracle(
      scores, std::vector<bool>(scores.size(), false), r.mask.pruned_count());
  std::vector<std::size_t> got;
  for (std::size_t i = 0; i < r.mask.size(); ++i)
    if (r.mask.is_pruned(i)) got.push_back(i);
  CHECK(got == expect);
}

TEST_CASE("masks grow monotonically and pruned weights stay zero") {
  const GroupedDataset data = pruning_dataset(609);
  Mlp m = trained_model(data, 610);
  PruneSchedule schedule = small_schedule();
  schedule.target_ratio = 0.4;
  const PruneResult r = fairprune::fairprune(m, data, schedule, nullptr);

  std::set<std::size_t> seen;
  std::size_t cumulative = 0;
  for (const auto& entry : r.mask.history()) {
    for (std::size_t i : entry.indices) {
      CHECK(seen.insert(i).second);  // disjoint history
    }
    cumulative += entry.indices.size();
  }
  CHECK(cumulative == r.mask.pruned_count());
  CHECK(r.mask.pruned_count() == 40);
  const auto params = m.flatten();
  for (std::size_t i : seen) CHECK(params[i] == 0.0);
}

TEST_CASE("pruning is bit-deterministic for all methods") {
  const GroupedDataset data = pruning_dataset(611);
  for (PruneMethod method :
       {PruneMethod::kFairprune, PruneMethod::kObd, PruneMethod::kMagnitude}) {
    PruneSchedule schedule = small_schedule();
    schedule.method = method;
    Mlp a = trained_model(data, 612);
    Mlp b = trained_model(data, 612);
    const PruneResult ra = prune_model(a, data, schedule, nullptr);
    const PruneResult rb = prune_model(b, data, schedule, nullptr);
    CHECK(ra.mask.bits() == rb.mask.bits());
    CHECK(a.flatten() == b.flatten());
  }
}

TEST_CASE("fairprune needs both groups") {
  const GroupedDataset data = pruning_dataset(613).filter_group(1);
  Mlp m = trained_model(data, 614);
  CHECK_THROWS_AS(fairprune::fairprune(m, data, small_schedule(), nullptr), DataError);
}

TEST_CASE("schedule validation") {
  PruneSchedule s = small_schedule();
  s.p_per_iteration = 0.5;  // > target 0.35
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = small_schedule();
  s.target_ratio = 1.5;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = small_schedule();
  s.batches_per_iteration = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = small_schedule();
  s.target_ratio = 0.0;  // allowed: no-op schedule
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("first-order diagnostic is recorded when enabled") {
  const GroupedDataset data = pruning_dataset(615);
  Mlp m = trained_model(data, 616);
  PruneSchedule schedule = small_schedule();
  schedule.target_ratio = 0.05;
  schedule.first_order_diagnostic = true;
  const PruneResult r = fairprune::fairprune(m, data, schedule, nullptr);
  REQUIRE(r.log.size() == 2);
  CHECK(r.log[1].grad_norm_g0 > 0.0);
  CHECK(r.log[1].grad_norm_g1 > 0.0);
}

TEST_CASE("iteration log rows track the pruned fraction on the val split") {
  const GroupedDataset data = pruning_dataset(617);
  SplitSpec spec;
  spec.seed = 3;
  const Splits splits = split(data, spec);
  Mlp m = trained_model(splits.train, 618);
  PruneSchedule schedule = small_schedule();
  schedule.target_ratio = 0.2;
  schedule.p_per_iteration = 0.05;
  const PruneResult r = fairprune::fairprune(m, splits.train, schedule, &splits.val);
  REQUIRE(r.log.size() == 5);
  CHECK(r.log[0].pruned_fraction == 0.0);
  CHECK(r.log[0].report.has_value());
  for (std::size_t i = 1; i < r.log.size(); ++i) {
    CHECK(r.log[i].pruned_fraction >
          r.log[i - 1].pruned_fraction);
    CHECK(r.log[i].report.has_value());
  }
  CHECK(r.log.back().pruned_fraction == doctest::Approx(0.2));
}

TEST_CASE("iteration log csv always has nine columns per row") {
  const GroupedDataset data = pruning_dataset(619);
  PruneSchedule schedule = small_schedule();
  schedule.target_ratio = 0.1;

  for (const bool with_val : {false, true}) {
    Mlp m = trained_model(data, 620);
    const PruneResult r =
        fairprune::fairprune(m, data, schedule, with_val ? &data : nullptr);
    const auto path = std::filesystem::temp_directory_path() /
                      (with_val ? "fp_iterlog_val.csv" : "fp_iterlog_noval.csv");
    write_iteration_log_csv(path, r.log);
    std::istringstream lines(read_text_file(path));
    std::string line;
    std::size_t rows = 0;
    while (std::getline(lines, line)) {
      CHECK(split_line(line, ',').size() == 9);
      ++rows;
    }
    CHECK(rows == r.log.size() + 1);  // header + rows
  }
}
