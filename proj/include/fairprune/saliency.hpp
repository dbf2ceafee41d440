#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "fairprune/mask.hpp"

namespace fairprune {

enum class SaliencyKind { kGroupSaliency, kCombinedScore };

// One score per parameter, aligned with Mlp parameter order. For
// kGroupSaliency, values[i] = 0.5 * h_ii * theta_i^2, the estimated loss
// increase from zeroing parameter i. For kCombinedScore, values[i] =
// 0.5 * theta_i^2 * (h0_ii - beta * h1_ii); smaller means a better pruning
// candidate.
struct SaliencyMap {
  std::vector<double> values;
  SaliencyKind kind = SaliencyKind::kGroupSaliency;
  double beta = 0.0;
  std::size_t batches_accumulated = 0;

  std::size_t size() const { return values.size(); }
};

SaliencyMap group_saliency(std::span<const double> theta,
                           std::span<const double> h_diag);

// beta >= 0 trades off sparing the unprivileged group's loss (h0) against
// spending the privileged group's (h1). beta = 0 degenerates to
// group_saliency(theta, h0).
SaliencyMap fairprune_score(std::span<const double> theta,
                            std::span<const double> h0,
                            std::span<const double> h1, double beta);

// Streams per-group curvature diagonals over mini-batch pairs and averages
// them. theta is held fixed during an iteration, so averaging the diagonals
// and applying theta^2 once at finalize equals averaging the saliencies.
class SaliencyAccumulator {
 public:
  explicit SaliencyAccumulator(std::size_t n);

  void accumulate(std::span<const double> h0_batch,
                  std::span<const double> h1_batch);

  std::size_t pair_count() const { return pairs_; }
  std::vector<double> mean_h0() const;
  std::vector<double> mean_h1() const;

  // Combined score on the averaged diagonals. Parameters already pruned in
  // `mask` get a +infinity sentinel so they are never reselected.
  SaliencyMap finalize(std::span<const double> theta, double beta,
                       const PruningMask* mask = nullptr) const;

 private:
  std::vector<double> sum_h0_;
  std::vector<double> sum_h1_;
  std::size_t pairs_ = 0;
};

struct SaliencyRow {
  std::size_t param_index;
  int group;
  double normalized_saliency;
};

// Per-group saliency over one parameter span (typically one layer's weights
// and biases), min-max normalized to [0,1] within the span per group. A
// degenerate (constant) span maps to all zeros. Two rows per parameter, one
// per group.
std::vector<SaliencyRow> export_saliency_distribution(
    const SaliencyMap& group0, const SaliencyMap& group1,
    std::size_t span_offset, std::size_t span_count);

// CSV with header param_index,group,normalized_saliency.
void write_saliency_csv(const std::filesystem::path& path,
                        std::span<const SaliencyRow> rows);

}  // namespace fairprune
