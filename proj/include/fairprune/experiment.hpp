#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairprune/dataset.hpp"
#include "fairprune/metrics.hpp"
#include "fairprune/mlp.hpp"
#include "fairprune/pruner.hpp"
#include "fairprune/train.hpp"

namespace fairprune {

using json = nlohmann::json;

struct ModelSpec {
  std::vector<int> hidden_sizes = {16};
  Activation activation = Activation::kTanh;
};

enum class DataSource { kCsv, kSynthetic };

struct DatasetSpec {
  DataSource source = DataSource::kSynthetic;
  std::string csv_path;
  SynthConfig synth;
};

struct MetricOptions {
  EoddVariant eodd_variant = EoddVariant::kSignedSum;
};

struct GridSpec {
  std::vector<double> betas = {0.0, 0.1, 0.2, 0.33, 0.5, 1.0};
  std::vector<double> ratios = {0.35};
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  // Best-cell scalarization: maximize f1_avg - lambda * eopp1 over validation
  // medians.
  double trade_off_lambda = 1.0;
};

// One experiment, fully determined by this config plus nothing else. The
// single global seed fans out to every stochastic component through named
// derivations, so a config file pins every emitted artifact byte-for-byte.
struct ExperimentConfig {
  DatasetSpec dataset;
  SplitSpec split;  // seed field ignored here; derived from the global seed
  ModelSpec model;
  TrainConfig train;
  PruneSchedule prune;
  MetricOptions metrics;
  GridSpec grid;
  std::string output_dir = "out";
  std::uint64_t seed = 1;

  std::uint64_t gen_seed() const;
  std::uint64_t split_seed() const;
  std::uint64_t init_seed() const;
  std::uint64_t train_seed() const;
  std::uint64_t prune_seed() const;
  std::uint64_t saliency_export_seed() const;

  json to_json() const;
  static ExperimentConfig from_json(const json& j);
  static ExperimentConfig load_file(const std::filesystem::path& path,
                                    std::optional<std::uint64_t> seed_override);

  // Derived-seed copy of this config with `seed` replaced (grid cells).
  ExperimentConfig with_seed(std::uint64_t s) const;
};

json report_to_json(const FairnessReport& r);
FairnessReport report_from_json(const json& j);

// Table-style human-readable block; Eopp0 is printed x10^-3.
std::string render_report_block(const std::string& title,
                                const FairnessReport& r);

// Dataset acquisition honoring the config source and derived generator seed.
GroupedDataset obtain_dataset(const ExperimentConfig& cfg);
Splits make_splits(const ExperimentConfig& cfg, const GroupedDataset& dataset);
Mlp build_model(const ExperimentConfig& cfg, std::size_t feature_dim,
                int num_classes);

// Rescans the output directory and records a content hash for every artifact
// plus the config hash and tool version.
void write_manifest(const ExperimentConfig& cfg,
                    const std::filesystem::path& out_dir);

struct GridRow {
  double beta = 0.0;
  double ratio = 0.0;
  std::uint64_t seed = 0;
  FairnessReport val;
  FairnessReport test;
};

struct GridCell {
  double beta = 0.0;
  double ratio = 0.0;
  double val_f1_avg_median = 0.0;
  double val_eopp1_median = 0.0;
  bool pareto = false;  // non-dominated in (f1_avg up, eopp1 down)
};

struct GridResult {
  std::vector<GridRow> rows;    // sorted by (beta, ratio, seed)
  std::vector<GridCell> cells;  // sorted by (beta, ratio)
  double best_beta = 0.0;
  double best_ratio = 0.0;
  std::vector<FairnessReport> best_test_reports;  // one per grid seed
};

void cmd_gen_data(const ExperimentConfig& cfg,
                  const std::filesystem::path& out_dir);
void cmd_train(const ExperimentConfig& cfg,
               const std::filesystem::path& out_dir);
void cmd_prune(const ExperimentConfig& cfg,
               const std::filesystem::path& checkpoint,
               const std::filesystem::path& out_dir);
FairnessReport cmd_eval(const ExperimentConfig& cfg,
                        const std::filesystem::path& checkpoint,
                        const std::string& split_name,
                        const std::filesystem::path& out_dir);
GridResult cmd_grid(const ExperimentConfig& cfg,
                    const std::filesystem::path& out_dir);
void cmd_report(const std::filesystem::path& run_dir,
                const std::filesystem::path& out_dir);

}  // namespace fairprune
