#include "fairprune/saliency.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fairprune/errors.hpp"
#include "fairprune/util.hpp"

namespace fairprune {

namespace {

// Shared kernel: 0.5 * theta^2 * (h0 - beta * h1). group_saliency routes
// through it with beta = 0 so both paths produce bit-identical values for
// identical inputs.
std::vector<double> combined_values(std::span<const double> theta,
                                    std::span<const double> h0,
                                    std::span<const double> h1, double beta) {
  std::vector<double> out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double weighted = beta == 0.0 ? h0[i] : h0[i] - beta * h1[i];
    out[i] = 0.5 * (theta[i] * theta[i]) * weighted;
  }
  return out;
}

}  // namespace

SaliencyMap group_saliency(std::span<const double> theta,
                           std::span<const double> h_diag) {
  if (theta.size() != h_diag.size())
    throw ConfigError("group_saliency: length mismatch");
  SaliencyMap map;
  map.kind = SaliencyKind::kGroupSaliency;
  map.beta = 0.0;
  map.values = combined_values(theta, h_diag, h_diag, 0.0);
  return map;
}

SaliencyMap fairprune_score(std::span<const double> theta,
                            std::span<const double> h0,
                            std::span<const double> h1, double beta) {
  if (theta.size() != h0.size() || theta.size() != h1.size())
    throw ConfigError("fairprune_score: length mismatch");
  if (beta < 0.0) throw ConfigError("fairprune_score: beta must be >= 0");
  SaliencyMap map;
  map.kind = SaliencyKind::kCombinedScore;
  map.beta = beta;
  map.values = combined_values(theta, h0, h1, beta);
  return map;
}

SaliencyAccumulator::SaliencyAccumulator(std::size_t n)
    : sum_h0_(n, 0.0), sum_h1_(n, 0.0) {}

void SaliencyAccumulator::accumulate(std::span<const double> h0_batch,
                                     std::span<const double> h1_batch) {
  if (h0_batch.size() != sum_h0_.size() || h1_batch.size() != sum_h1_.size())
    throw ConfigError("accumulate: length mismatch");
  for (std::size_t i = 0; i < sum_h0_.size(); ++i) {
    if (!std::isfinite(h0_batch[i]) || !std::isfinite(h1_batch[i]))
      throw InternalError("accumulate: non-finite curvature");
    sum_h0_[i] += h0_batch[i];
    sum_h1_[i] += h1_batch[i];
  }
  ++pairs_;
}

std::vector<double> SaliencyAccumulator::mean_h0() const {
  if (pairs_ == 0) throw ConfigError("empty accumulator");
  std::vector<double> out(sum_h0_);
  for (double& v : out) v /= static_cast<double>(pairs_);
  return out;
}

std::vector<double> SaliencyAccumulator::mean_h1() const {
  if (pairs_ == 0) throw ConfigError("empty accumulator");
  std::vector<double> out(sum_h1_);
  for (double& v : out) v /= static_cast<double>(pairs_);
  return out;
}

SaliencyMap SaliencyAccumulator::finalize(std::span<const double> theta,
                                          double beta,
                                          const PruningMask* mask) const {
  if (pairs_ == 0) throw ConfigError("finalize: empty accumulator");
  if (mask && mask->size() != theta.size())
    throw ConfigError("finalize: mask length mismatch");
  SaliencyMap map = fairprune_score(theta, mean_h0(), mean_h1(), beta);
  map.batches_accumulated = pairs_;
  if (mask) {
    for (std::size_t i = 0; i < map.values.size(); ++i)
      if (mask->is_pruned(i))
        map.values[i] = std::numeric_limits<double>::infinity();
  }
  return map;
}

std::vector<SaliencyRow> export_saliency_distribution(
    const SaliencyMap& group0, const SaliencyMap& group1,
    std::size_t span_offset, std::size_t span_count) {
  if (group0.size() != group1.size())
    throw ConfigError("saliency maps disagree in length");
  if (span_count == 0) throw ConfigError("empty layer selection");
  if (span_offset + span_count > group0.size())
    throw ConfigError("layer selection out of range");

  auto normalize = [&](const SaliencyMap& map, int group,
                       std::vector<SaliencyRow>& rows) {
    double lo = map.values[span_offset];
    double hi = lo;
    for (std::size_t i = span_offset; i < span_offset + span_count; ++i) {
      lo = std::min(lo, map.values[i]);
      hi = std::max(hi, map.values[i]);
    }
    const double range = hi - lo;
    for (std::size_t i = span_offset; i < span_offset + span_count; ++i) {
      const double v = range > 0.0 ? (map.values[i] - lo) / range : 0.0;
      rows.push_back({i, group, v});
    }
  };

  std::vector<SaliencyRow> rows;
  rows.reserve(2 * span_count);
  normalize(group0, 0, rows);
  normalize(group1, 1, rows);
  return rows;
}

void write_saliency_csv(const std::filesystem::path& path,
                        std::span<const SaliencyRow> rows) {
  std::ostringstream out;
  out << "param_index,group,normalized_saliency\n";
  for (const auto& r : rows)
    out << r.param_index << ',' << r.group << ','
        << format_double(r.normalized_saliency) << '\n';
  write_text_file(path, out.str());
}

}  // namespace fairprune
