#pragma once

#include <cstdint>
#include <vector>

#include "fairprune/dataset.hpp"
#include "fairprune/mask.hpp"
#include "fairprune/mlp.hpp"

namespace fairprune {

struct TrainConfig {
  std::size_t epochs = 40;
  std::size_t batch_size = 32;
  double learning_rate = 1e-2;
  // Single step-decay event, mirroring "decay by 10x at 80% of epochs".
  double lr_decay_factor = 0.1;
  double lr_decay_at_fraction = 0.8;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainResult {
  // Full-training-set loss before epoch 1 and after each epoch
  // (length epochs + 1).
  std::vector<double> loss_history;
};

// Adam on mean cross-entropy. Deterministic given (seed, config, data).
// When a mask is given, masked parameters are pinned to exactly zero for the
// whole run.
TrainResult train(Mlp& model, const GroupedDataset& dataset,
                  const TrainConfig& cfg, const PruningMask* mask = nullptr);

}  // namespace fairprune
