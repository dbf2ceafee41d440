#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fairprune/mlp.hpp"

namespace fairprune {

struct Sample {
  std::vector<double> features;
  int label = 0;
  int group = 0;
};

enum class Provenance { kCsv, kSynthetic };

// Samples with class labels and a binary group attribute. Immutable after
// construction by convention; all consumers take it by const reference.
struct GroupedDataset {
  std::vector<Sample> samples;
  std::size_t feature_dim = 0;
  int num_classes = 0;
  Provenance provenance = Provenance::kSynthetic;
  std::uint64_t seed = 0;

  std::size_t size() const { return samples.size(); }
  std::size_t group_count(int group) const;
  std::vector<std::size_t> group_indices(int group) const;

  Batch to_batch() const;
  Batch to_batch(std::span<const std::size_t> indices) const;

  // Dataset with only the given group's samples, original order preserved.
  GroupedDataset filter_group(int group) const;

  void validate() const;
  void validate_for_pruning() const;  // additionally: both groups non-empty
};

struct SplitSpec {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
  std::uint64_t seed = 0;

  void validate() const;  // fractions positive, sum to 1 within 1e-9
};

struct Splits {
  GroupedDataset train;
  GroupedDataset val;
  GroupedDataset test;
};

// Synthetic generator configuration. Group 1 receives an extra informative
// ("spurious") coordinate correlated with the label; group 0 gets pure noise
// there, so a vanilla-trained model ends up more accurate on group 1.
struct SynthConfig {
  std::size_t n_per_group = 1000;
  std::size_t feature_dim = 6;  // last coordinate is the spurious one
  int num_classes = 2;
  double class_signal = 1.5;
  double spurious_strength_g0 = 0.0;
  double spurious_strength_g1 = 2.0;
  double label_noise_g0 = 0.05;
  double label_noise_g1 = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CsvSchema {
  std::string label_column = "label";
  std::string group_column = "group";
  // Empty means: every other column, in header order.
  std::vector<std::string> feature_columns;
};

GroupedDataset load_csv(const std::filesystem::path& path,
                        const CsvSchema& schema = {});
void save_csv(const GroupedDataset& dataset,
              const std::filesystem::path& path);

GroupedDataset gen_synthetic_biased(const SynthConfig& cfg);

// Deterministic shuffle then partition; floor sizes for val/test, remainder
// goes to train.
Splits split(const GroupedDataset& dataset, const SplitSpec& spec);

}  // namespace fairprune
