#pragma once

#include <span>
#include <vector>

namespace fairprune {

// One-vs-rest confusion counts for every (class, group) pair.
struct ClassGroupCounts {
  long long tp = 0;
  long long fn = 0;
  long long tn = 0;
  long long fp = 0;
};

class ConfusionTensor {
 public:
  explicit ConfusionTensor(int num_classes);

  int num_classes() const { return num_classes_; }
  ClassGroupCounts& at(int cls, int group);
  const ClassGroupCounts& at(int cls, int group) const;
  long long group_total(int group) const;

 private:
  int num_classes_;
  std::vector<ClassGroupCounts> counts_;  // [cls * 2 + group]
};

ConfusionTensor confusion(std::span<const int> preds,
                          std::span<const int> labels,
                          std::span<const int> groups, int num_classes);

// Scalar fairness metric plus the number of classes skipped because a rate
// denominator was zero for either group.
struct MetricValue {
  double value = 0.0;
  int skipped_classes = 0;
};

// Sum over classes of |TNR_k^1 - TNR_k^0|.
MetricValue eopp0(const ConfusionTensor& ct);
// Sum over classes of |TPR_k^1 - TPR_k^0|.
MetricValue eopp1(const ConfusionTensor& ct);

enum class EoddVariant {
  // |dTPR + dFPR| per class, exactly as displayed; the two differences can
  // cancel.
  kSignedSum,
  // |dTPR| + |dFPR| per class, the common alternative, for comparison.
  kAbsoluteSum,
};

MetricValue eodd(const ConfusionTensor& ct,
                 EoddVariant variant = EoddVariant::kSignedSum);

struct GroupAccuracy {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Macro-averaged over the classes present in each group's labels. For a
// present class with no predicted positives, precision (and then F1 if
// degenerate) falls back to 0.
struct AccuracyBlock {
  GroupAccuracy g0;
  GroupAccuracy g1;
  GroupAccuracy avg;   // mean of the two groups
  GroupAccuracy diff;  // absolute difference
};

AccuracyBlock accuracy_block(const ConfusionTensor& ct);

// Flat report combining the fairness metrics and per-group accuracy.
struct FairnessReport {
  double eopp0 = 0.0;
  double eopp1 = 0.0;
  double eodd = 0.0;
  int eopp0_skipped = 0;
  int eopp1_skipped = 0;
  int eodd_skipped = 0;
  double precision_g0 = 0.0, recall_g0 = 0.0, f1_g0 = 0.0;
  double precision_g1 = 0.0, recall_g1 = 0.0, f1_g1 = 0.0;
  double precision_avg = 0.0, recall_avg = 0.0, f1_avg = 0.0;
  double precision_diff = 0.0, recall_diff = 0.0, f1_diff = 0.0;
};

FairnessReport make_report(std::span<const int> preds,
                           std::span<const int> labels,
                           std::span<const int> groups, int num_classes,
                           EoddVariant variant = EoddVariant::kSignedSum);

}  // namespace fairprune
