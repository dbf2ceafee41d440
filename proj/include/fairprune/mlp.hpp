#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fairprune {

enum class Activation { kTanh, kRelu };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

// One mini-batch of samples. Feature vectors stand in for images; the group
// value is the binary sensitive attribute and is never an input to inference.
struct Batch {
  std::vector<std::vector<double>> features;  // S rows of d values
  std::vector<int> labels;                    // in [0, K)
  std::vector<int> groups;                    // in {0, 1}

  std::size_t size() const { return features.size(); }
  void validate(std::size_t feature_dim, int num_classes) const;
};

// Fully connected classifier over a flat, deterministically ordered parameter
// vector.
//
// Parameter order: for each layer l (0-based), the weight matrix row-major
// (fan_out rows by fan_in columns; entry (j,i) connects input i to unit j),
// followed by the fan_out biases. Layers are concatenated in order, so
//   N = sum over layers of (fan_in + 1) * fan_out.
// Hidden layers apply the configured activation; the last layer emits raw
// logits.
class Mlp {
 public:
  Mlp(std::vector<int> layer_sizes, Activation activation);

  static Mlp random_init(std::vector<int> layer_sizes, Activation activation,
                         std::uint64_t seed);

  int input_dim() const { return sizes_.front(); }
  int num_classes() const { return sizes_.back(); }
  std::size_t layer_count() const { return sizes_.size() - 1; }
  const std::vector<int>& layer_sizes() const { return sizes_; }
  Activation activation() const { return activation_; }

  std::size_t param_count() const { return params_.size(); }
  std::span<const double> params() const { return params_; }
  std::span<double> params() { return params_; }

  std::vector<double> flatten() const { return params_; }
  void unflatten(std::span<const double> v);

  struct ParamSpan {
    std::size_t offset;
    std::size_t count;
  };
  ParamSpan weight_span(std::size_t layer) const;
  ParamSpan bias_span(std::size_t layer) const;
  ParamSpan layer_span(std::size_t layer) const;  // weights plus biases

  double weight(std::size_t layer, int out_unit, int in_unit) const;
  double bias(std::size_t layer, int out_unit) const;

  // Logits, one row of K entries per sample.
  std::vector<std::vector<double>> forward(const Batch& batch) const;

  // Argmax with ties broken toward the lowest class index.
  static int predict_row(std::span<const double> logits);
  std::vector<int> predict(const Batch& batch) const;

 private:
  std::vector<int> sizes_;
  Activation activation_;
  std::vector<double> params_;
  std::vector<std::size_t> weight_offsets_;
  std::vector<std::size_t> bias_offsets_;
};

}  // namespace fairprune
