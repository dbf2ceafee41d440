#include "fairprune/metrics.hpp"

#include <cmath>
#include <string>

#include "fairprune/errors.hpp"

namespace fairprune {

ConfusionTensor::ConfusionTensor(int num_classes)
    : num_classes_(num_classes),
      counts_(static_cast<std::size_t>(num_classes) * 2) {
  if (num_classes < 1) throw ConfigError("ConfusionTensor needs K >= 1");
}

ClassGroupCounts& ConfusionTensor::at(int cls, int group) {
  return counts_.at(static_cast<std::size_t>(cls) * 2 +
                    static_cast<std::size_t>(group));
}

const ClassGroupCounts& ConfusionTensor::at(int cls, int group) const {
  return counts_.at(static_cast<std::size_t>(cls) * 2 +
                    static_cast<std::size_t>(group));
}

long long ConfusionTensor::group_total(int group) const {
  // Any class row partitions the group's samples.
  const auto& c = at(0, group);
  return c.tp + c.fn + c.tn + c.fp;
}

ConfusionTensor confusion(std::span<const int> preds,
                          std::span<const int> labels,
                          std::span<const int> groups, int num_classes) {
  if (preds.size() != labels.size() || preds.size() != groups.size())
    throw ConfigError("confusion: input lengths disagree");
  ConfusionTensor ct(num_classes);
  for (std::size_t s = 0; s < preds.size(); ++s) {
    const int y = labels[s];
    const int yhat = preds[s];
    const int c = groups[s];
    if (y < 0 || y >= num_classes)
      throw ConfigError("confusion: label out of range at sample " +
                        std::to_string(s));
    if (yhat < 0 || yhat >= num_classes)
      throw ConfigError("confusion: prediction out of range at sample " +
                        std::to_string(s));
    if (c != 0 && c != 1)
      throw ConfigError("confusion: group out of range at sample " +
                        std::to_string(s));
    for (int k = 0; k < num_classes; ++k) {
      auto& cell = ct.at(k, c);
      if (y == k && yhat == k)
        ++cell.tp;
      else if (y == k)
        ++cell.fn;
      else if (yhat == k)
        ++cell.fp;
      else
        ++cell.tn;
    }
  }
  return ct;
}

namespace {

struct Rates {
  double tpr = 0.0, tnr = 0.0, fpr = 0.0;
  bool tpr_ok = false, tnr_ok = false;
};

Rates class_rates(const ConfusionTensor& ct, int cls, int group) {
  const auto& c = ct.at(cls, group);
  Rates r;
  if (c.tp + c.fn > 0) {
    r.tpr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    r.tpr_ok = true;
  }
  if (c.tn + c.fp > 0) {
    r.tnr = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
    r.fpr = static_cast<double>(c.fp) / static_cast<double>(c.tn + c.fp);
    r.tnr_ok = true;
  }
  return r;
}

}  // namespace

MetricValue eopp0(const ConfusionTensor& ct) {
  MetricValue out;
  for (int k = 0; k < ct.num_classes(); ++k) {
    const Rates r0 = class_rates(ct, k, 0);
    const Rates r1 = class_rates(ct, k, 1);
    if (!r0.tnr_ok || !r1.tnr_ok) {
      ++out.skipped_classes;
      continue;
    }
    out.value += std::abs(r1.tnr - r0.tnr);
  }
  return out;
}

MetricValue eopp1(const ConfusionTensor& ct) {
  MetricValue out;
  for (int k = 0; k < ct.num_classes(); ++k) {
    const Rates r0 = class_rates(ct, k, 0);
    const Rates r1 = class_rates(ct, k, 1);
    if (!r0.tpr_ok || !r1.tpr_ok) {
      ++out.skipped_classes;
      continue;
    }
    out.value += std::abs(r1.tpr - r0.tpr);
  }
  return out;
}

MetricValue eodd(const ConfusionTensor& ct, EoddVariant variant) {
  MetricValue out;
  for (int k = 0; k < ct.num_classes(); ++k) {
    const Rates r0 = class_rates(ct, k, 0);
    const Rates r1 = class_rates(ct, k, 1);
    if (!r0.tpr_ok || !r1.tpr_ok || !r0.tnr_ok || !r1.tnr_ok) {
      ++out.skipped_classes;
      continue;
    }
    // Grouping the two rate differences keeps group-swap symmetry exact in
    // floating point: each difference negates exactly under a swap.
    const double dtpr = r1.tpr - r0.tpr;
    const double dfpr = r1.fpr - r0.fpr;
    if (variant == EoddVariant::kSignedSum)
      out.value += std::abs(dtpr + dfpr);
    else
      out.value += std::abs(dtpr) + std::abs(dfpr);
  }
  return out;
}

namespace {

GroupAccuracy group_accuracy(const ConfusionTensor& ct, int group) {
  GroupAccuracy acc;
  int present = 0;
  for (int k = 0; k < ct.num_classes(); ++k) {
    const auto& c = ct.at(k, group);
    if (c.tp + c.fn == 0) continue;  // class absent from this group's labels
    ++present;
    const double recall =
        static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    const double precision =
        c.tp + c.fp > 0
            ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp)
            : 0.0;
    const double f1 = precision + recall > 0.0
                          ? 2.0 * precision * recall / (precision + recall)
                          : 0.0;
    acc.precision += precision;
    acc.recall += recall;
    acc.f1 += f1;
  }
  if (present > 0) {
    acc.precision /= present;
    acc.recall /= present;
    acc.f1 /= present;
  }
  return acc;
}

}  // namespace

AccuracyBlock accuracy_block(const ConfusionTensor& ct) {
  AccuracyBlock block;
  block.g0 = group_accuracy(ct, 0);
  block.g1 = group_accuracy(ct, 1);
  block.avg.precision = 0.5 * (block.g0.precision + block.g1.precision);
  block.avg.recall = 0.5 * (block.g0.recall + block.g1.recall);
  block.avg.f1 = 0.5 * (block.g0.f1 + block.g1.f1);
  block.diff.precision = std::abs(block.g0.precision - block.g1.precision);
  block.diff.recall = std::abs(block.g0.recall - block.g1.recall);
  block.diff.f1 = std::abs(block.g0.f1 - block.g1.f1);
  return block;
}

FairnessReport make_report(std::span<const int> preds,
                           std::span<const int> labels,
                           std::span<const int> groups, int num_classes,
                           EoddVariant variant) {
  const ConfusionTensor ct = confusion(preds, labels, groups, num_classes);
  const MetricValue e0 = eopp0(ct);
  const MetricValue e1 = eopp1(ct);
  const MetricValue ed = eodd(ct, variant);
  const AccuracyBlock acc = accuracy_block(ct);

  FairnessReport r;
  r.eopp0 = e0.value;
  r.eopp1 = e1.value;
  r.eodd = ed.value;
  r.eopp0_skipped = e0.skipped_classes;
  r.eopp1_skipped = e1.skipped_classes;
  r.eodd_skipped = ed.skipped_classes;
  r.precision_g0 = acc.g0.precision;
  r.recall_g0 = acc.g0.recall;
  r.f1_g0 = acc.g0.f1;
  r.precision_g1 = acc.g1.precision;
  r.recall_g1 = acc.g1.recall;
  r.f1_g1 = acc.g1.f1;
  r.precision_avg = acc.avg.precision;
  r.recall_avg = acc.avg.recall;
  r.f1_avg = acc.avg.f1;
  r.precision_diff = acc.diff.precision;
  r.recall_diff = acc.diff.recall;
  r.f1_diff = acc.diff.f1;
  return r;
}

}  // namespace fairprune
