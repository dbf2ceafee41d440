#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fairprune/dataset.hpp"
#include "fairprune/mask.hpp"
#include "fairprune/metrics.hpp"
#include "fairprune/mlp.hpp"
#include "fairprune/saliency.hpp"

namespace fairprune {

enum class PruneMethod { kFairprune, kObd, kMagnitude };

std::string prune_method_name(PruneMethod m);
PruneMethod prune_method_from_name(const std::string& name);

struct PruneSchedule {
  PruneMethod method = PruneMethod::kFairprune;
  // Total fraction of the original parameter count to remove (pr).
  double target_ratio = 0.35;
  // Fraction of the ORIGINAL parameter count removed per iteration (p).
  double p_per_iteration = 0.05;
  double beta = 0.33;
  std::size_t batches_per_iteration = 25;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
  // When set, the magnitude of the averaged per-group gradient (the
  // first-order term the saliency expansion drops) is recorded per iteration.
  bool first_order_diagnostic = false;

  void validate() const;
};

struct IterationRow {
  std::size_t iteration = 0;
  double pruned_fraction = 0.0;
  // Metrics on the validation split, when one was supplied.
  std::optional<FairnessReport> report;
  // First-order diagnostic, when enabled: L2 norm of the mean per-group
  // gradient over the iteration's batches. Never enters any score.
  double grad_norm_g0 = 0.0;
  double grad_norm_g1 = 0.0;
};

struct PruneResult {
  PruningMask mask;
  std::vector<IterationRow> log;  // row 0 is the pre-prune baseline
};

// The k active (unpruned) indices with smallest score; ties broken toward the
// lower index.
std::vector<std::size_t> select_prune_set(const SaliencyMap& map,
                                          const PruningMask& mask,
                                          std::size_t k);

// Pins masked coordinates to exactly zero; leaves the rest untouched.
void apply_mask(Mlp& model, const PruningMask& mask);

// Iterative fairness-aware pruning: per iteration, sample paired per-group
// mini-batches, average each group's curvature diagonal, score with
// 0.5*theta^2*(h0 - beta*h1), remove the lowest-scoring parameters, repeat
// until target_ratio is reached. No retraining between iterations.
PruneResult fairprune(Mlp& model, const GroupedDataset& train_set,
                      const PruneSchedule& schedule,
                      const GroupedDataset* val = nullptr);

// Saliency pruning without fairness constraints: batches come from the whole
// training set and the score is 0.5*theta^2*h over the pooled curvature.
PruneResult obd_prune(Mlp& model, const GroupedDataset& train_set,
                      const PruneSchedule& schedule,
                      const GroupedDataset* val = nullptr);

// |theta| scoring under the same schedule machinery.
PruneResult magnitude_prune(Mlp& model, const PruneSchedule& schedule,
                            const GroupedDataset* val = nullptr);

// Dispatch on schedule.method.
PruneResult prune_model(Mlp& model, const GroupedDataset& train_set,
                        const PruneSchedule& schedule,
                        const GroupedDataset* val = nullptr);

// iteration,pruned_fraction,eopp0,eopp1,eodd,f1_g0,f1_g1,f1_avg,f1_diff
void write_iteration_log_csv(const std::filesystem::path& path,
                             const std::vector<IterationRow>& log);

// iteration,grad_norm_g0,grad_norm_g1 (first-order diagnostic)
void write_first_order_csv(const std::filesystem::path& path,
                           const std::vector<IterationRow>& log);

}  // namespace fairprune
