#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fairprune/errors.hpp"
#include "fairprune/metrics.hpp"
#include "fairprune/rng.hpp"
#include "support/oracles.hpp"

using namespace fairprune;

namespace {

struct Triples {
  std::vector<int> preds, labels, groups;
};

Triples random_triples(Rng& rng, std::size_t n, int k) {
  Triples t;
  for (std::size_t i = 0; i < n; ++i) {
    t.preds.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(k))));
    t.labels.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(k))));
    t.groups.push_back(static_cast<int>(rng.below(2)));
  }
  return t;
}

}  // namespace

TEST_CASE("perfect predictions have empty error cells") {
  Rng rng(401);
  Triples t = random_triples(rng, 60, 4);
  t.preds = t.labels;
  const ConfusionTensor ct = confusion(t.preds, t.labels, t.groups, 4);
  for (int k = 0; k < 4; ++k)
    for (int g = 0; g < 2; ++g) {
      CHECK(ct.at(k, g).fn == 0);
      CHECK(ct.at(k, g).fp == 0);
    }
}

TEST_CASE("single-sample confusion by hand") {
  const std::vector<int> preds{1}, labels{0}, groups{0};
  const ConfusionTensor ct = confusion(preds, labels, groups, 2);
  CHECK(ct.at(0, 0).fn == 1);
  CHECK(ct.at(0, 0).tp == 0);
  CHECK(ct.at(1, 0).fp == 1);
  CHECK(ct.at(1, 0).tn == 0);
  for (int k = 0; k < 2; ++k) {
    CHECK(ct.at(k, 1).tp == 0);
    CHECK(ct.at(k, 1).fn == 0);
    CHECK(ct.at(k, 1).tn == 0);
    CHECK(ct.at(k, 1).fp == 0);
  }
}

TEST_CASE("confusion counts match the brute-force oracle on 1000 samples") {
  Rng rng(402);
  const Triples t = random_triples(rng, 1000, 7);
  const ConfusionTensor ct = confusion(t.preds, t.labels, t.groups, 7);
  const auto oracle = testing::count_oracle(t.preds, t.labels, t.groups, 7);
  for (int k = 0; k < 7; ++k)
    for (int g = 0; g < 2; ++g) {
      const auto& a = ct.at(k, g);
      const auto& b = oracle[static_cast<std::size_t>(k)]
                            [static_cast<std::size_t>(g)];
      CHECK(a.tp == b.tp);
      CHECK(a.fn == b.fn);
      CHECK(a.tn == b.tn);
      CHECK(a.fp == b.fp);
      CHECK(a.tp + a.fn + a.tn + a.fp == ct.group_total(g));
    }
  CHECK_THROWS_AS(
      confusion(std::vector<int>{9}, std::vector<int>{0}, std::vector<int>{0}, 3),
      ConfigError);
}

TEST_CASE("identical rate profiles give zero fairness metrics") {
  // Same predictions and labels duplicated into both groups.
  std::vector<int> preds, labels, groups;
  for (int g = 0; g < 2; ++g)
    for (int i = 0; i < 40; ++i) {
      Rng local(static_cast<std::uint64_t>(i) + 1);  // same stream per group
      preds.push_back(static_cast<int>(local.below(3)));
      labels.push_back(static_cast<int>(local.child(1).below(3)));
      groups.push_back(g);
    }
  const ConfusionTensor ct = confusion(preds, labels, groups, 3);
  CHECK(eopp0(ct).value == 0.0);
  CHECK(eopp1(ct).value == 0.0);
  CHECK(eodd(ct).value == 0.0);
}

TEST_CASE("eopp1 hand case") {
  ConfusionTensor ct(2);
  // class 0: TPR g1 = 1.0 (10/10), TPR g0 = 0.8 (8/10)
  ct.at(0, 1) = {10, 0, 5, 5};
  ct.at(0, 0) = {8, 2, 5, 5};
  // class 1: TPR 0.5 for both groups
  ct.at(1, 1) = {5, 5, 10, 0};
  ct.at(1, 0) = {5, 5, 8, 2};
  CHECK(eopp1(ct).value == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(eopp1(ct).skipped_classes == 0);
}

TEST_CASE("eodd as displayed lets opposite differences cancel") {
  // g1: 5 pos (4 hit), 5 neg (1 false alarm) => TPR .8, FPR .2
  // g0: 4 pos (2 hit), 4 neg (2 false alarms) => TPR .5, FPR .5
  std::vector<int> preds, labels, groups;
  auto add = [&](int n, int label, int pred, int group) {
    for (int i = 0; i < n; ++i) {
      preds.push_back(pred);
      labels.push_back(label);
      groups.push_back(group);
    }
  };
  add(4, 1, 1, 1);  // g1 true positives (class 1 = "positive")
  add(1, 1, 0, 1);
  add(1, 0, 1, 1);  // g1 false positive
  add(4, 0, 0, 1);
  add(2, 1, 1, 0);
  add(2, 1, 0, 0);
  add(2, 0, 1, 0);
  add(2, 0, 0, 0);
  const ConfusionTensor ct = confusion(preds, labels, groups, 2);
  // dTPR = +0.3 and dFPR = -0.3 cancel exactly under the displayed formula.
  CHECK(eodd(ct, EoddVariant::kSignedSum).value ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eodd(ct, EoddVariant::kAbsoluteSum).value ==
        doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("fairness metrics match the formula oracle on random tensors") {
  Rng rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(9));
    const std::size_t n = 20 + rng.below(481);
    const Triples t = random_triples(rng, n, k);
    const ConfusionTensor ct = confusion(t.preds, t.labels, t.groups, k);
    const auto oracle = testing::fairness_oracle(t.preds, t.labels, t.groups, k);
    CHECK(std::abs(eopp0(ct).value - oracle.eopp0) <= 1e-12);
    CHECK(std::abs(eopp1(ct).value - oracle.eopp1) <= 1e-12);
    CHECK(std::abs(eodd(ct).value - oracle.eodd) <= 1e-12);
    CHECK(eopp0(ct).skipped_classes == oracle.skip0);
    CHECK(eopp1(ct).skipped_classes == oracle.skip1);
    CHECK(eodd(ct).skipped_classes == oracle.skipodd);
  }
}

TEST_CASE("accuracy block: perfect predictions score 1.0 with zero diff") {
  Rng rng(405);
  Triples t = random_triples(rng, 50, 3);
  t.preds = t.labels;
  const AccuracyBlock block =
      accuracy_block(confusion(t.preds, t.labels, t.groups, 3));
  CHECK(block.g0.f1 == 1.0);
  CHECK(block.g1.f1 == 1.0);
  CHECK(block.avg.precision == 1.0);
  CHECK(block.diff.recall == 0.0);
}

TEST_CASE("a class absent from a group is excluded from its macro average") {
  // group 0 has labels {0,1}, group 1 has labels {0} only.
  const std::vector<int> labels{0, 1, 0, 0};
  const std::vector<int> preds{0, 1, 0, 1};
  const std::vector<int> groups{0, 0, 1, 1};
  const AccuracyBlock block =
      accuracy_block(confusion(preds, labels, groups, 2));
  // group 1: only class 0 participates; recall 1/2, precision 1/1.
  CHECK(block.g1.recall == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(block.g1.precision == doctest::Approx(1.0).epsilon(1e-12));
  // group 0 is perfect on both classes.
  CHECK(block.g0.f1 == 1.0);
}

TEST_CASE("accuracy block matches a hand-rolled oracle on random cases") {
  Rng rng(406);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(5));
    const Triples t = random_triples(rng, 30 + rng.below(100), k);
    const AccuracyBlock block =
        accuracy_block(confusion(t.preds, t.labels, t.groups, k));
    for (int g = 0; g < 2; ++g) {
      const auto oracle =
          testing::prf_oracle(t.preds, t.labels, t.groups, k, g);
      const GroupAccuracy& got = g == 0 ? block.g0 : block.g1;
      CHECK(std::abs(got.precision - oracle.precision) <= 1e-12);
      CHECK(std::abs(got.recall - oracle.recall) <= 1e-12);
      CHECK(std::abs(got.f1 - oracle.f1) <= 1e-12);
    }
  }
}

TEST_CASE("group swap leaves every fairness metric unchanged") {
  Rng rng(407);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(6));
    Triples t = random_triples(rng, 100, k);
    const FairnessReport a = make_report(t.preds, t.labels, t.groups, k);
    for (auto& g : t.groups) g = 1 - g;
    const FairnessReport b = make_report(t.preds, t.labels, t.groups, k);
    CHECK(a.eopp0 == b.eopp0);
    CHECK(a.eopp1 == b.eopp1);
    CHECK(a.eodd == b.eodd);
    CHECK(a.f1_diff == b.f1_diff);
    CHECK(a.precision_diff == b.precision_diff);
    CHECK(a.recall_diff == b.recall_diff);
    CHECK(a.f1_g0 == b.f1_g1);
  }
}

TEST_CASE("metrics depend only on the multiset of triples") {
  Rng rng(408);
  Triples t = random_triples(rng, 80, 4);
  const FairnessReport a = make_report(t.preds, t.labels, t.groups, 4);
  std::vector<std::size_t> perm(t.preds.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  shuffle(perm, rng);
  Triples shuffled;
  for (std::size_t i : perm) {
    shuffled.preds.push_back(t.preds[i]);
    shuffled.labels.push_back(t.labels[i]);
    shuffled.groups.push_back(t.groups[i]);
  }
  const FairnessReport b =
      make_report(shuffled.preds, shuffled.labels, shuffled.groups, 4);
  CHECK(a.eopp0 == b.eopp0);
  CHECK(a.eopp1 == b.eopp1);
  CHECK(a.eodd == b.eodd);
  CHECK(a.f1_avg == b.f1_avg);
}

TEST_CASE("fairness metrics respect their class-count bounds") {
  Rng rng(409);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(8));
    const Triples t = random_triples(rng, 60, k);
    const ConfusionTensor ct = confusion(t.preds, t.labels, t.groups, k);
    const MetricValue e0 = eopp0(ct);
    const MetricValue e1 = eopp1(ct);
    const MetricValue ed = eodd(ct);
    CHECK(e0.value >= 0.0);
    CHECK(e0.value <= k - e0.skipped_classes);
    CHECK(e1.value >= 0.0);
    CHECK(e1.value <= k - e1.skipped_classes);
    CHECK(ed.value >= 0.0);
    CHECK(ed.value <= 2 * (k - ed.skipped_classes));
  }
}

TEST_CASE("all-skipped tensor reports zero with full skip count") {
  // Single class: one-vs-rest negatives never exist.
  ConfusionTensor ct(1);
  ct.at(0, 0) = {5, 0, 0, 0};
  ct.at(0, 1) = {7, 0, 0, 0};
  const MetricValue e0 = eopp0(ct);
  CHECK(e0.value == 0.0);
  CHECK(e0.skipped_classes == 1);
  CHECK(eodd(ct).skipped_classes == 1);
}
