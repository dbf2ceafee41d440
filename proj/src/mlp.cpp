#include "fairprune/mlp.hpp"

#include <cmath>

#include "fairprune/errors.hpp"
#include "fairprune/rng.hpp"

namespace fairprune {

std::string activation_name(Activation a) {
  return a == Activation::kTanh ? "tanh" : "relu";
}

Activation activation_from_name(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  throw ConfigError("unknown activation: " + name);
}

void Batch::validate(std::size_t feature_dim, int num_classes) const {
  if (labels.size() != features.size() || groups.size() != features.size())
    throw ConfigError("batch arrays disagree in length");
  for (std::size_t s = 0; s < features.size(); ++s) {
    if (features[s].size() != feature_dim)
      throw ConfigError("batch feature dimension mismatch at sample " +
                        std::to_string(s));
    if (labels[s] < 0 || labels[s] >= num_classes)
      throw ConfigError("batch label out of range at sample " +
                        std::to_string(s));
    if (groups[s] != 0 && groups[s] != 1)
      throw ConfigError("batch group out of range at sample " +
                        std::to_string(s));
  }
}

Mlp::Mlp(std::vector<int> layer_sizes, Activation activation)
    : sizes_(std::move(layer_sizes)), activation_(activation) {
  if (sizes_.size() < 2) throw ConfigError("Mlp needs at least input and output sizes");
  for (int s : sizes_)
    if (s <= 0) throw ConfigError("Mlp layer sizes must be positive");
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const auto fan_in = static_cast<std::size_t>(sizes_[l]);
    const auto fan_out = static_cast<std::size_t>(sizes_[l + 1]);
    weight_offsets_.push_back(n);
    n += fan_in * fan_out;
    bias_offsets_.push_back(n);
    n += fan_out;
  }
  params_.assign(n, 0.0);
}

Mlp Mlp::random_init(std::vector<int> layer_sizes, Activation activation,
                     std::uint64_t seed) {
  Mlp m(std::move(layer_sizes), activation);
  Rng rng(seed);
  for (std::size_t l = 0; l < m.layer_count(); ++l) {
    const int fan_in = m.sizes_[l];
    const int fan_out = m.sizes_[l + 1];
    // He-style scale for relu, Xavier-style for tanh.
    const double scale = activation == Activation::kRelu
                             ? std::sqrt(2.0 / fan_in)
                             : std::sqrt(1.0 / fan_in);
    const std::size_t w0 = m.weight_offsets_[l];
    for (int j = 0; j < fan_out; ++j)
      for (int i = 0; i < fan_in; ++i)
        m.params_[w0 + static_cast<std::size_t>(j) * fan_in + i] =
            scale * rng.normal();
    // biases start at zero
  }
  return m;
}

void Mlp::unflatten(std::span<const double> v) {
  if (v.size() != params_.size())
    throw ConfigError("parameter vector length mismatch: expected " +
                      std::to_string(params_.size()) + ", got " +
                      std::to_string(v.size()));
  params_.assign(v.begin(), v.end());
}

Mlp::ParamSpan Mlp::weight_span(std::size_t layer) const {
  if (layer >= layer_count()) throw ConfigError("layer index out of range");
  const auto fan_in = static_cast<std::size_t>(sizes_[layer]);
  const auto fan_out = static_cast<std::size_t>(sizes_[layer + 1]);
  return {weight_offsets_[layer], fan_in * fan_out};
}

Mlp::ParamSpan Mlp::bias_span(std::size_t layer) const {
  if (layer >= layer_count()) throw ConfigError("layer index out of range");
  return {bias_offsets_[layer], static_cast<std::size_t>(sizes_[layer + 1])};
}

Mlp::ParamSpan Mlp::layer_span(std::size_t layer) const {
  auto w = weight_span(layer);
  auto b = bias_span(layer);
  return {w.offset, w.count + b.count};
}

double Mlp::weight(std::size_t layer, int out_unit, int in_unit) const {
  const auto fan_in = static_cast<std::size_t>(sizes_[layer]);
  return params_[weight_offsets_[layer] +
                 static_cast<std::size_t>(out_unit) * fan_in +
                 static_cast<std::size_t>(in_unit)];
}

double Mlp::bias(std::size_t layer, int out_unit) const {
  return params_[bias_offsets_[layer] + static_cast<std::size_t>(out_unit)];
}

std::vector<std::vector<double>> Mlp::forward(const Batch& batch) const {
  batch.validate(static_cast<std::size_t>(input_dim()), num_classes());
  std::vector<std::vector<double>> logits(batch.size());
  std::vector<double> cur, next;
  for (std::size_t s = 0; s < batch.size(); ++s) {
    cur = batch.features[s];
    for (std::size_t l = 0; l < layer_count(); ++l) {
      const int fan_in = sizes_[l];
      const int fan_out = sizes_[l + 1];
      next.assign(static_cast<std::size_t>(fan_out), 0.0);
      const std::size_t w0 = weight_offsets_[l];
      const std::size_t b0 = bias_offsets_[l];
      for (int j = 0; j < fan_out; ++j) {
        double z = params_[b0 + static_cast<std::size_t>(j)];
        const std::size_t row = w0 + static_cast<std::size_t>(j) * fan_in;
        for (int i = 0; i < fan_in; ++i) z += params_[row + i] * cur[i];
        const bool hidden = l + 1 < layer_count();
        if (hidden)
          next[j] = activation_ == Activation::kTanh ? std::tanh(z)
                                                     : (z > 0.0 ? z : 0.0);
        else
          next[j] = z;
      }
      cur.swap(next);
    }
    logits[s] = cur;
  }
  return logits;
}

int Mlp::predict_row(std::span<const double> logits) {
  int best = 0;
  for (std::size_t k = 1; k < logits.size(); ++k)
    if (logits[k] > logits[best]) best = static_cast<int>(k);
  return best;
}

std::vector<int> Mlp::predict(const Batch& batch) const {
  auto logits = forward(batch);
  std::vector<int> preds(logits.size());
  for (std::size_t s = 0; s < logits.size(); ++s)
    preds[s] = predict_row(logits[s]);
  return preds;
}

}  // namespace fairprune
