#include "fairprune/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "fairprune/checkpoint.hpp"
#include "fairprune/derivatives.hpp"
#include "fairprune/errors.hpp"
#include "fairprune/evaluate.hpp"
#include "fairprune/rng.hpp"
#include "fairprune/sampler.hpp"
#include "fairprune/util.hpp"

namespace fairprune {

namespace {

constexpr const char* kToolVersion = "fairprune 0.1.0";

void expect_keys(const json& j, std::initializer_list<const char*> allowed,
                 const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown config key '" + key + "' in " + where);
  }
}

double median(std::vector<double> v) {
  if (v.empty()) throw InternalError("median of empty vector");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return std::string(buf);
}

}  // namespace

std::uint64_t ExperimentConfig::gen_seed() const {
  return Rng::derive(seed, "gen");
}
std::uint64_t ExperimentConfig::split_seed() const {
  return Rng::derive(seed, "split");
}
std::uint64_t ExperimentConfig::init_seed() const {
  return Rng::derive(seed, "init");
}
std::uint64_t ExperimentConfig::train_seed() const {
  return Rng::derive(seed, "train");
}
std::uint64_t ExperimentConfig::prune_seed() const {
  return Rng::derive(seed, "prune");
}
std::uint64_t ExperimentConfig::saliency_export_seed() const {
  return Rng::derive(seed, "saliency-export");
}

ExperimentConfig ExperimentConfig::with_seed(std::uint64_t s) const {
  ExperimentConfig c = *this;
  c.seed = s;
  return c;
}

json ExperimentConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["dataset"]["source"] =
      dataset.source == DataSource::kCsv ? "csv" : "synthetic";
  j["dataset"]["csv_path"] = dataset.csv_path;
  j["dataset"]["synth"] = {
      {"n_per_group", dataset.synth.n_per_group},
      {"feature_dim", dataset.synth.feature_dim},
      {"num_classes", dataset.synth.num_classes},
      {"class_signal", dataset.synth.class_signal},
      {"spurious_strength_g0", dataset.synth.spurious_strength_g0},
      {"spurious_strength_g1", dataset.synth.spurious_strength_g1},
      {"label_noise_g0", dataset.synth.label_noise_g0},
      {"label_noise_g1", dataset.synth.label_noise_g1},
  };
  j["split"] = {{"train", split.train}, {"val", split.val}, {"test", split.test}};
  j["model"] = {{"hidden_sizes", model.hidden_sizes},
                {"activation", activation_name(model.activation)}};
  j["train"] = {{"epochs", train.epochs},
                {"batch_size", train.batch_size},
                {"learning_rate", train.learning_rate},
                {"lr_decay_factor", train.lr_decay_factor},
                {"lr_decay_at_fraction", train.lr_decay_at_fraction}};
  j["prune"] = {{"method", prune_method_name(prune.method)},
                {"target_ratio", prune.target_ratio},
                {"p_per_iteration", prune.p_per_iteration},
                {"beta", prune.beta},
                {"batches_per_iteration", prune.batches_per_iteration},
                {"batch_size", prune.batch_size},
                {"first_order_diagnostic", prune.first_order_diagnostic}};
  j["metrics"] = {{"eodd_variant",
                   metrics.eodd_variant == EoddVariant::kSignedSum
                       ? "signed_sum"
                       : "absolute_sum"}};
  j["grid"] = {{"betas", grid.betas},
               {"ratios", grid.ratios},
               {"seeds", grid.seeds},
               {"trade_off_lambda", grid.trade_off_lambda}};
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  expect_keys(j, {"seed", "output_dir", "dataset", "split", "model", "train",
                  "prune", "metrics", "grid"},
              "config root");
  c.seed = j.value("seed", c.seed);
  c.output_dir = j.value("output_dir", c.output_dir);

  if (j.contains("dataset")) {
    const auto& d = j.at("dataset");
    expect_keys(d, {"source", "csv_path", "synth"}, "dataset");
    const std::string source = d.value("source", "synthetic");
    if (source == "csv")
      c.dataset.source = DataSource::kCsv;
    else if (source == "synthetic")
      c.dataset.source = DataSource::kSynthetic;
    else
      throw ConfigError("dataset.source must be 'csv' or 'synthetic'");
    c.dataset.csv_path = d.value("csv_path", "");
    if (d.contains("synth")) {
      const auto& s = d.at("synth");
      expect_keys(s,
                  {"n_per_group", "feature_dim", "num_classes", "class_signal",
                   "spurious_strength_g0", "spurious_strength_g1",
                   "label_noise_g0", "label_noise_g1"},
                  "dataset.synth");
      auto& sc = c.dataset.synth;
      sc.n_per_group = s.value("n_per_group", sc.n_per_group);
      sc.feature_dim = s.value("feature_dim", sc.feature_dim);
      sc.num_classes = s.value("num_classes", sc.num_classes);
      sc.class_signal = s.value("class_signal", sc.class_signal);
      sc.spurious_strength_g0 =
          s.value("spurious_strength_g0", sc.spurious_strength_g0);
      sc.spurious_strength_g1 =
          s.value("spurious_strength_g1", sc.spurious_strength_g1);
      sc.label_noise_g0 = s.value("label_noise_g0", sc.label_noise_g0);
      sc.label_noise_g1 = s.value("label_noise_g1", sc.label_noise_g1);
    }
  }
  if (j.contains("split")) {
    const auto& s = j.at("split");
    expect_keys(s, {"train", "val", "test"}, "split");
    c.split.train = s.value("train", c.split.train);
    c.split.val = s.value("val", c.split.val);
    c.split.test = s.value("test", c.split.test);
  }
  if (j.contains("model")) {
    const auto& m = j.at("model");
    expect_keys(m, {"hidden_sizes", "activation"}, "model");
    c.model.hidden_sizes =
        m.value("hidden_sizes", c.model.hidden_sizes);
    c.model.activation =
        activation_from_name(m.value("activation", std::string("tanh")));
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    expect_keys(t,
                {"epochs", "batch_size", "learning_rate", "lr_decay_factor",
                 "lr_decay_at_fraction"},
                "train");
    c.train.epochs = t.value("epochs", c.train.epochs);
    c.train.batch_size = t.value("batch_size", c.train.batch_size);
    c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
    c.train.lr_decay_factor =
        t.value("lr_decay_factor", c.train.lr_decay_factor);
    c.train.lr_decay_at_fraction =
        t.value("lr_decay_at_fraction", c.train.lr_decay_at_fraction);
  }
  if (j.contains("prune")) {
    const auto& p = j.at("prune");
    expect_keys(p,
                {"method", "target_ratio", "p_per_iteration", "beta",
                 "batches_per_iteration", "batch_size",
                 "first_order_diagnostic"},
                "prune");
    c.prune.method =
        prune_method_from_name(p.value("method", std::string("fairprune")));
    c.prune.target_ratio = p.value("target_ratio", c.prune.target_ratio);
    c.prune.p_per_iteration =
        p.value("p_per_iteration", c.prune.p_per_iteration);
    c.prune.beta = p.value("beta", c.prune.beta);
    c.prune.batches_per_iteration =
        p.value("batches_per_iteration", c.prune.batches_per_iteration);
    c.prune.batch_size = p.value("batch_size", c.prune.batch_size);
    c.prune.first_order_diagnostic =
        p.value("first_order_diagnostic", c.prune.first_order_diagnostic);
  }
  if (j.contains("metrics")) {
    const auto& m = j.at("metrics");
    expect_keys(m, {"eodd_variant"}, "metrics");
    const std::string variant = m.value("eodd_variant", "signed_sum");
    if (variant == "signed_sum")
      c.metrics.eodd_variant = EoddVariant::kSignedSum;
    else if (variant == "absolute_sum")
      c.metrics.eodd_variant = EoddVariant::kAbsoluteSum;
    else
      throw ConfigError("eodd_variant must be 'signed_sum' or 'absolute_sum'");
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    expect_keys(g, {"betas", "ratios", "seeds", "trade_off_lambda"}, "grid");
    c.grid.betas = g.value("betas", c.grid.betas);
    c.grid.ratios = g.value("ratios", c.grid.ratios);
    c.grid.seeds = g.value("seeds", c.grid.seeds);
    c.grid.trade_off_lambda =
        g.value("trade_off_lambda", c.grid.trade_off_lambda);
  }
  return c;
}

ExperimentConfig ExperimentConfig::load_file(
    const std::filesystem::path& path,
    std::optional<std::uint64_t> seed_override) {
  if (!std::filesystem::exists(path))
    throw ConfigError("config file not found: " + path.string());
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path.string() + ": " +
                      e.what());
  }
  ExperimentConfig c = from_json(j);
  if (seed_override) c.seed = *seed_override;
  return c;
}

json report_to_json(const FairnessReport& r) {
  return json{{"eopp0", r.eopp0},
              {"eopp1", r.eopp1},
              {"eodd", r.eodd},
              {"eopp0_skipped", r.eopp0_skipped},
              {"eopp1_skipped", r.eopp1_skipped},
              {"eodd_skipped", r.eodd_skipped},
              {"precision_g0", r.precision_g0},
              {"recall_g0", r.recall_g0},
              {"f1_g0", r.f1_g0},
              {"precision_g1", r.precision_g1},
              {"recall_g1", r.recall_g1},
              {"f1_g1", r.f1_g1},
              {"precision_avg", r.precision_avg},
              {"recall_avg", r.recall_avg},
              {"f1_avg", r.f1_avg},
              {"precision_diff", r.precision_diff},
              {"recall_diff", r.recall_diff},
              {"f1_diff", r.f1_diff}};
}

FairnessReport report_from_json(const json& j) {
  FairnessReport r;
  r.eopp0 = j.at("eopp0").get<double>();
  r.eopp1 = j.at("eopp1").get<double>();
  r.eodd = j.at("eodd").get<double>();
  r.eopp0_skipped = j.at("eopp0_skipped").get<int>();
  r.eopp1_skipped = j.at("eopp1_skipped").get<int>();
  r.eodd_skipped = j.at("eodd_skipped").get<int>();
  r.precision_g0 = j.at("precision_g0").get<double>();
  r.recall_g0 = j.at("recall_g0").get<double>();
  r.f1_g0 = j.at("f1_g0").get<double>();
  r.precision_g1 = j.at("precision_g1").get<double>();
  r.recall_g1 = j.at("recall_g1").get<double>();
  r.f1_g1 = j.at("f1_g1").get<double>();
  r.precision_avg = j.at("precision_avg").get<double>();
  r.recall_avg = j.at("recall_avg").get<double>();
  r.f1_avg = j.at("f1_avg").get<double>();
  r.precision_diff = j.at("precision_diff").get<double>();
  r.recall_diff = j.at("recall_diff").get<double>();
  r.f1_diff = j.at("f1_diff").get<double>();
  return r;
}

std::string render_report_block(const std::string& title,
                                const FairnessReport& r) {
  std::ostringstream out;
  out << title << "\n";
  out << "  group        precision  recall     f1\n";
  auto line = [&](const char* name, double p, double rec, double f1) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "  %-11s  %-9.3f  %-9.3f  %.3f\n", name, p,
                  rec, f1);
    out << buf;
  };
  line("g0", r.precision_g0, r.recall_g0, r.f1_g0);
  line("g1", r.precision_g1, r.recall_g1, r.f1_g1);
  line("avg", r.precision_avg, r.recall_avg, r.f1_avg);
  line("diff", r.precision_diff, r.recall_diff, r.f1_diff);
  out << "  eopp0 (x1e-3): " << fixed3(r.eopp0 * 1000.0)
      << "  eopp1: " << fixed3(r.eopp1) << "  eodd: " << fixed3(r.eodd)
      << "\n";
  out << "  skipped classes (eopp0/eopp1/eodd): " << r.eopp0_skipped << "/"
      << r.eopp1_skipped << "/" << r.eodd_skipped << "\n";
  return out.str();
}

GroupedDataset obtain_dataset(const ExperimentConfig& cfg) {
  if (cfg.dataset.source == DataSource::kCsv) {
    if (cfg.dataset.csv_path.empty())
      throw ConfigError("dataset.source is csv but csv_path is empty");
    return load_csv(cfg.dataset.csv_path);
  }
  SynthConfig synth = cfg.dataset.synth;
  synth.seed = cfg.gen_seed();
  return gen_synthetic_biased(synth);
}

Splits make_splits(const ExperimentConfig& cfg,
                   const GroupedDataset& dataset) {
  SplitSpec spec = cfg.split;
  spec.seed = cfg.split_seed();
  return split(dataset, spec);
}

Mlp build_model(const ExperimentConfig& cfg, std::size_t feature_dim,
                int num_classes) {
  std::vector<int> sizes;
  sizes.push_back(static_cast<int>(feature_dim));
  for (int h : cfg.model.hidden_sizes) sizes.push_back(h);
  sizes.push_back(num_classes);
  return Mlp::random_init(sizes, cfg.model.activation, cfg.init_seed());
}

void write_manifest(const ExperimentConfig& cfg,
                    const std::filesystem::path& out_dir) {
  json artifacts = json::object();
  std::vector<std::filesystem::path> files;
  for (const auto& entry :
       std::filesystem::recursive_directory_iterator(out_dir))
    if (entry.is_regular_file() &&
        entry.path().filename() != "manifest.json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files)
    artifacts[std::filesystem::relative(f, out_dir).generic_string()] =
        hash_file_hex(f);

  json manifest;
  manifest["version"] = kToolVersion;
  manifest["config_hash"] = hash_bytes_hex(cfg.to_json().dump(2));
  manifest["sampler"] = "without-replacement epochs";
  manifest["artifacts"] = artifacts;
  write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

namespace {

void ensure_out_dir(const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create output dir: " + out_dir.string());
}

void write_config_copy(const ExperimentConfig& cfg,
                       const std::filesystem::path& out_dir) {
  write_text_file(out_dir / "config.json", cfg.to_json().dump(2) + "\n");
}

struct PreparedData {
  GroupedDataset full;
  Splits splits;
};

PreparedData prepare_data(const ExperimentConfig& cfg) {
  PreparedData d{obtain_dataset(cfg), {}};
  d.full.validate();
  d.splits = make_splits(cfg, d.full);
  return d;
}

const GroupedDataset& pick_split(const Splits& s, const std::string& name) {
  if (name == "train") return s.train;
  if (name == "val") return s.val;
  if (name == "test") return s.test;
  throw ConfigError("unknown split: " + name);
}

void write_train_history_csv(const std::filesystem::path& path,
                             const std::vector<double>& history) {
  std::ostringstream out;
  out << "epoch,train_loss\n";
  for (std::size_t i = 0; i < history.size(); ++i)
    out << i << ',' << format_double(history[i]) << '\n';
  write_text_file(path, out.str());
}

}  // namespace

void cmd_gen_data(const ExperimentConfig& cfg,
                  const std::filesystem::path& out_dir) {
  ensure_out_dir(out_dir);
  const PreparedData data = prepare_data(cfg);
  save_csv(data.full, out_dir / "full.csv");
  save_csv(data.splits.train, out_dir / "train.csv");
  save_csv(data.splits.val, out_dir / "val.csv");
  save_csv(data.splits.test, out_dir / "test.csv");
  write_config_copy(cfg, out_dir);
  write_manifest(cfg, out_dir);
}

void cmd_train(const ExperimentConfig& cfg,
               const std::filesystem::path& out_dir) {
  ensure_out_dir(out_dir);
  const PreparedData data = prepare_data(cfg);
  Mlp model = build_model(cfg, data.full.feature_dim, data.full.num_classes);
  TrainConfig tc = cfg.train;
  tc.seed = cfg.train_seed();
  const TrainResult result = train(model, data.splits.train, tc);
  save_checkpoint(out_dir / "model.ckpt", model, cfg.seed);
  write_train_history_csv(out_dir / "train_history.csv", result.loss_history);
  write_config_copy(cfg, out_dir);
  write_manifest(cfg, out_dir);
}

void cmd_prune(const ExperimentConfig& cfg,
               const std::filesystem::path& checkpoint,
               const std::filesystem::path& out_dir) {
  ensure_out_dir(out_dir);
  Checkpoint ckpt = load_checkpoint(checkpoint);
  const PreparedData data = prepare_data(cfg);
  PruneSchedule schedule = cfg.prune;
  schedule.seed = cfg.prune_seed();
  const PruneResult result =
      prune_model(ckpt.model, data.splits.train, schedule, &data.splits.val);
  save_checkpoint(out_dir / "pruned.ckpt", ckpt.model, cfg.seed, &result.mask);
  write_iteration_log_csv(out_dir / "iterations.csv", result.log);
  if (schedule.first_order_diagnostic)
    write_first_order_csv(out_dir / "first_order.csv", result.log);
  write_config_copy(cfg, out_dir);
  write_manifest(cfg, out_dir);
}

FairnessReport cmd_eval(const ExperimentConfig& cfg,
                        const std::filesystem::path& checkpoint,
                        const std::string& split_name,
                        const std::filesystem::path& out_dir) {
  ensure_out_dir(out_dir);
  const Checkpoint ckpt = load_checkpoint(checkpoint);
  const PreparedData data = prepare_data(cfg);
  const GroupedDataset& part = pick_split(data.splits, split_name);
  const FairnessReport report =
      evaluate_model(ckpt.model, part, cfg.metrics.eodd_variant);
  write_text_file(out_dir / ("report_" + split_name + ".json"),
                  report_to_json(report).dump(2) + "\n");
  write_config_copy(cfg, out_dir);
  write_manifest(cfg, out_dir);
  return report;
}

GridResult cmd_grid(const ExperimentConfig& cfg,
                    const std::filesystem::path& out_dir) {
  if (cfg.grid.betas.empty() || cfg.grid.ratios.empty() ||
      cfg.grid.seeds.empty())
    throw ConfigError("grid lists must be non-empty");
  ensure_out_dir(out_dir);

  GridResult grid;
  for (std::uint64_t s : cfg.grid.seeds) {
    const ExperimentConfig cell_cfg = cfg.with_seed(s);
    const PreparedData data = prepare_data(cell_cfg);
    Mlp base =
        build_model(cell_cfg, data.full.feature_dim, data.full.num_classes);
    TrainConfig tc = cell_cfg.train;
    tc.seed = cell_cfg.train_seed();
    train(base, data.splits.train, tc);

    for (double beta : cfg.grid.betas) {
      for (double ratio : cfg.grid.ratios) {
        Mlp model = base;
        PruneSchedule schedule = cell_cfg.prune;
        schedule.beta = beta;
        schedule.target_ratio = ratio;
        schedule.seed = cell_cfg.prune_seed();
        prune_model(model, data.splits.train, schedule, nullptr);
        GridRow row;
        row.beta = beta;
        row.ratio = ratio;
        row.seed = s;
        row.val = evaluate_model(model, data.splits.val,
                                 cfg.metrics.eodd_variant);
        row.test = evaluate_model(model, data.splits.test,
                                  cfg.metrics.eodd_variant);
        grid.rows.push_back(std::move(row));
      }
    }
  }
  std::sort(grid.rows.begin(), grid.rows.end(),
            [](const GridRow& a, const GridRow& b) {
              if (a.beta != b.beta) return a.beta < b.beta;
              if (a.ratio != b.ratio) return a.ratio < b.ratio;
              return a.seed < b.seed;
            });

  // Cell medians on validation, then Pareto flags.
  for (double beta : cfg.grid.betas) {
    for (double ratio : cfg.grid.ratios) {
      std::vector<double> f1s, eopps;
      for (const auto& row : grid.rows)
        if (row.beta == beta && row.ratio == ratio) {
          f1s.push_back(row.val.f1_avg);
          eopps.push_back(row.val.eopp1);
        }
      GridCell cell;
      cell.beta = beta;
      cell.ratio = ratio;
      cell.val_f1_avg_median = median(f1s);
      cell.val_eopp1_median = median(eopps);
      grid.cells.push_back(cell);
    }
  }
  std::sort(grid.cells.begin(), grid.cells.end(),
            [](const GridCell& a, const GridCell& b) {
              if (a.beta != b.beta) return a.beta < b.beta;
              return a.ratio < b.ratio;
            });
  for (auto& cell : grid.cells) {
    cell.pareto = true;
    for (const auto& other : grid.cells) {
      const bool better_or_equal =
          other.val_f1_avg_median >= cell.val_f1_avg_median &&
          other.val_eopp1_median <= cell.val_eopp1_median;
      const bool strictly_better =
          other.val_f1_avg_median > cell.val_f1_avg_median ||
          other.val_eopp1_median < cell.val_eopp1_median;
      if (better_or_equal && strictly_better) {
        cell.pareto = false;
        break;
      }
    }
  }

  // Documented scalarization: maximize f1_avg - lambda * eopp1 on validation
  // medians; ties to the earlier cell in (beta, ratio) order.
  const GridCell* best = nullptr;
  double best_score = 0.0;
  for (const auto& cell : grid.cells) {
    const double score = cell.val_f1_avg_median -
                         cfg.grid.trade_off_lambda * cell.val_eopp1_median;
    if (!best || score > best_score) {
      best = &cell;
      best_score = score;
    }
  }
  grid.best_beta = best->beta;
  grid.best_ratio = best->ratio;
  for (const auto& row : grid.rows)
    if (row.beta == best->beta && row.ratio == best->ratio)
      grid.best_test_reports.push_back(row.test);

  // grid.csv: one row per (beta, ratio, seed) with val and test metrics.
  {
    std::ostringstream out;
    out << "beta,pruning_ratio,seed";
    const char* metrics_cols[] = {"eopp0",  "eopp1", "eodd",
                                  "f1_g0",  "f1_g1", "f1_avg",
                                  "f1_diff","recall_avg"};
    for (const char* prefix : {"val", "test"})
      for (const char* m : metrics_cols) out << ',' << prefix << '_' << m;
    out << '\n';
    auto emit = [&](const FairnessReport& r) {
      out << ',' << format_double(r.eopp0) << ',' << format_double(r.eopp1)
          << ',' << format_double(r.eodd) << ',' << format_double(r.f1_g0)
          << ',' << format_double(r.f1_g1) << ',' << format_double(r.f1_avg)
          << ',' << format_double(r.f1_diff) << ','
          << format_double(r.recall_avg);
    };
    for (const auto& row : grid.rows) {
      out << format_double(row.beta) << ',' << format_double(row.ratio) << ','
          << row.seed;
      emit(row.val);
      emit(row.test);
      out << '\n';
    }
    write_text_file(out_dir / "grid.csv", out.str());
  }

  // frontier.csv: per-cell validation medians plus the Pareto flag.
  {
    std::ostringstream out;
    out << "beta,pruning_ratio,val_f1_avg_median,val_eopp1_median,pareto\n";
    for (const auto& cell : grid.cells)
      out << format_double(cell.beta) << ',' << format_double(cell.ratio)
          << ',' << format_double(cell.val_f1_avg_median) << ','
          << format_double(cell.val_eopp1_median) << ','
          << (cell.pareto ? 1 : 0) << '\n';
    write_text_file(out_dir / "frontier.csv", out.str());
  }

  // best.json: the selected cell and its per-seed test reports.
  {
    json best_json;
    best_json["beta"] = grid.best_beta;
    best_json["pruning_ratio"] = grid.best_ratio;
    best_json["selection"] = "max f1_avg - lambda*eopp1 on validation medians";
    best_json["trade_off_lambda"] = cfg.grid.trade_off_lambda;
    json tests = json::array();
    for (const auto& r : grid.best_test_reports) tests.push_back(report_to_json(r));
    best_json["test_reports"] = tests;
    std::vector<double> test_eopp1, test_f1;
    for (const auto& r : grid.best_test_reports) {
      test_eopp1.push_back(r.eopp1);
      test_f1.push_back(r.f1_avg);
    }
    best_json["test_eopp1_median"] = median(test_eopp1);
    best_json["test_f1_avg_median"] = median(test_f1);
    write_text_file(out_dir / "best.json", best_json.dump(2) + "\n");
  }

  write_config_copy(cfg, out_dir);
  write_manifest(cfg, out_dir);
  return grid;
}

void cmd_report(const std::filesystem::path& run_dir,
                const std::filesystem::path& out_dir) {
  if (!std::filesystem::exists(run_dir / "config.json"))
    throw DataError("missing artifact: " + (run_dir / "config.json").string());
  ensure_out_dir(out_dir);
  const ExperimentConfig cfg =
      ExperimentConfig::load_file(run_dir / "config.json", std::nullopt);

  std::ostringstream summary;
  summary << "run summary (" << kToolVersion << ")\n";
  summary << "sampler: without-replacement epochs\n\n";

  bool any_report = false;
  for (const char* split_name : {"train", "val", "test"}) {
    const auto path = run_dir / ("report_" + std::string(split_name) + ".json");
    if (!std::filesystem::exists(path)) continue;
    any_report = true;
    const FairnessReport r = report_from_json(json::parse(read_text_file(path)));
    summary << render_report_block(std::string(split_name) + " split", r)
            << "\n";
  }

  if (std::filesystem::exists(run_dir / "iterations.csv")) {
    write_text_file(out_dir / "iteration_curves.csv",
                    read_text_file(run_dir / "iterations.csv"));
    summary << "iteration curves: iteration_curves.csv\n";
  }

  if (std::filesystem::exists(run_dir / "frontier.csv")) {
    // Beta trade-off curve: validation medians by (ratio, beta).
    const std::string frontier = read_text_file(run_dir / "frontier.csv");
    std::istringstream lines(frontier);
    std::string line;
    std::getline(lines, line);  // header
    struct Entry { double beta, ratio, f1, eopp1; };
    std::vector<Entry> entries;
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      const auto cells = split_line(line, ',');
      if (cells.size() < 5)
        throw DataError("frontier.csv: malformed row '" + line + "'");
      Entry e{};
      if (!parse_double(cells[0], e.beta) || !parse_double(cells[1], e.ratio) ||
          !parse_double(cells[2], e.f1) || !parse_double(cells[3], e.eopp1))
        throw DataError("frontier.csv: non-numeric row '" + line + "'");
      entries.push_back(e);
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      if (a.ratio != b.ratio) return a.ratio < b.ratio;
      return a.beta < b.beta;
    });
    std::ostringstream out;
    out << "pruning_ratio,beta,val_f1_avg_median,val_eopp1_median\n";
    for (const auto& e : entries)
      out << format_double(e.ratio) << ',' << format_double(e.beta) << ','
          << format_double(e.f1) << ',' << format_double(e.eopp1) << '\n';
    write_text_file(out_dir / "beta_tradeoff.csv", out.str());
    summary << "beta trade-off curve: beta_tradeoff.csv\n";
  }

  // Saliency distribution over the first layer, recomputed from the
  // checkpoint on the training split.
  const auto ckpt_path = std::filesystem::exists(run_dir / "pruned.ckpt")
                             ? run_dir / "pruned.ckpt"
                             : run_dir / "model.ckpt";
  if (std::filesystem::exists(ckpt_path)) {
    const Checkpoint ckpt = load_checkpoint(ckpt_path);
    const PreparedData data = prepare_data(cfg);
    PairBatchSampler sampler(data.splits.train, cfg.prune.batch_size,
                             cfg.saliency_export_seed());
    SaliencyAccumulator acc(ckpt.model.param_count());
    for (std::size_t b = 0; b < cfg.prune.batches_per_iteration; ++b) {
      const auto [b0, b1] = sampler.next();
      acc.accumulate(hessian_diag(ckpt.model, b0),
                     hessian_diag(ckpt.model, b1));
    }
    const auto theta = ckpt.model.params();
    const SaliencyMap s0 = group_saliency(theta, acc.mean_h0());
    const SaliencyMap s1 = group_saliency(theta, acc.mean_h1());
    const auto span = ckpt.model.layer_span(0);
    const auto rows =
        export_saliency_distribution(s0, s1, span.offset, span.count);
    write_saliency_csv(out_dir / "saliency_distribution.csv", rows);
    summary << "saliency distribution (layer 0): saliency_distribution.csv\n";
  }

  if (!any_report)
    summary << "no eval reports found in " << run_dir.generic_string() << "\n";
  write_text_file(out_dir / "summary.txt", summary.str());
  write_manifest(cfg, out_dir);
}

}  // namespace fairprune
