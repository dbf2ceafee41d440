#include "fairprune/train.hpp"

#include <cmath>

#include "fairprune/derivatives.hpp"
#include "fairprune/errors.hpp"
#include "fairprune/rng.hpp"

namespace fairprune {

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("train batch_size must be positive");
  if (learning_rate <= 0.0) throw ConfigError("learning_rate must be > 0");
  if (lr_decay_factor <= 0.0 || lr_decay_factor > 1.0)
    throw ConfigError("lr_decay_factor must be in (0, 1]");
  if (lr_decay_at_fraction < 0.0 || lr_decay_at_fraction > 1.0)
    throw ConfigError("lr_decay_at_fraction must be in [0, 1]");
}

TrainResult train(Mlp& model, const GroupedDataset& dataset,
                  const TrainConfig& cfg, const PruningMask* mask) {
  cfg.validate();
  dataset.validate();
  if (dataset.size() == 0) throw DataError("cannot train on an empty dataset");
  if (mask && mask->size() != model.param_count())
    throw ConfigError("mask length does not match parameter count");

  const std::size_t n_params = model.param_count();
  auto apply_pin = [&] {
    if (!mask) return;
    auto params = model.params();
    for (std::size_t i = 0; i < n_params; ++i)
      if (mask->is_pruned(i)) params[i] = 0.0;
  };
  apply_pin();

  const Batch full = dataset.to_batch();
  TrainResult result;
  result.loss_history.push_back(loss_ce(model, full));

  std::vector<double> m(n_params, 0.0), v(n_params, 0.0);
  Rng order_rng(Rng::derive(cfg.seed, "batch-order"));
  std::vector<std::size_t> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  const std::size_t decay_epoch = static_cast<std::size_t>(
      std::floor(cfg.lr_decay_at_fraction * static_cast<double>(cfg.epochs)));
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = epoch >= decay_epoch
                          ? cfg.learning_rate * cfg.lr_decay_factor
                          : cfg.learning_rate;
    shuffle(order, order_rng);
    for (std::size_t start = 0; start < order.size();
         start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, order.size() - start);
      const Batch batch = dataset.to_batch(
          std::span<const std::size_t>(order).subspan(start, len));
      const GradVector grad = backward(model, batch);
      ++step;
      const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
      auto params = model.params();
      for (std::size_t i = 0; i < n_params; ++i) {
        if (mask && mask->is_pruned(i)) continue;
        m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * grad[i];
        v[i] = cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * grad[i] * grad[i];
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
      }
      apply_pin();
    }
    result.loss_history.push_back(loss_ce(model, full));
  }
  return result;
}

}  // namespace fairprune
