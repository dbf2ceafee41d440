#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fairprune/errors.hpp"
#include "fairprune/experiment.hpp"
#include "fairprune/util.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config = true) {
  auto* c = cmd->add_option("--config", opts.config_path, "Experiment config JSON");
  if (needs_config) c->required();
  cmd->add_option("--out", opts.out_dir,
                  "Output directory (default: config output_dir)");
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&opts](std::uint64_t s) { opts.seed = s; },
      "Override the config's global seed");
}

std::filesystem::path resolve_out(const fairprune::ExperimentConfig& cfg,
                                  const CommonOpts& opts) {
  return opts.out_dir.empty() ? std::filesystem::path(cfg.output_dir)
                              : std::filesystem::path(opts.out_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fairness-aware second-order pruning for small classifiers"};
  app.require_subcommand(1);

  CommonOpts gen_opts, train_opts, prune_opts, eval_opts, grid_opts;
  std::string checkpoint_path, eval_checkpoint, eval_split = "test";
  std::string report_run_dir, report_out_dir;

  auto* gen = app.add_subcommand("gen-data", "Generate or split dataset CSVs");
  add_common(gen, gen_opts);

  auto* tr = app.add_subcommand("train", "Train a model and write a checkpoint");
  add_common(tr, train_opts);

  auto* pr = app.add_subcommand("prune", "Prune a trained checkpoint");
  add_common(pr, prune_opts);
  pr->add_option("--checkpoint", checkpoint_path, "Input checkpoint")
      ->required();

  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on a split");
  add_common(ev, eval_opts);
  ev->add_option("--checkpoint", eval_checkpoint, "Input checkpoint")
      ->required();
  ev->add_option("--split", eval_split, "train|val|test (default test)");

  auto* gr = app.add_subcommand("grid",
                                "Run the (beta, ratio, seed) grid search");
  add_common(gr, grid_opts);

  auto* rp = app.add_subcommand("report", "Render summary and plot CSVs");
  rp->add_option("--run-dir", report_run_dir, "Directory with run artifacts")
      ->required();
  rp->add_option("--out", report_out_dir,
                 "Output directory (default: run dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  using fairprune::ExperimentConfig;
  try {
    if (gen->parsed()) {
      auto cfg = ExperimentConfig::load_file(gen_opts.config_path, gen_opts.seed);
      fairprune::cmd_gen_data(cfg, resolve_out(cfg, gen_opts));
    } else if (tr->parsed()) {
      auto cfg = ExperimentConfig::load_file(train_opts.config_path, train_opts.seed);
      fairprune::cmd_train(cfg, resolve_out(cfg, train_opts));
    } else if (pr->parsed()) {
      auto cfg = ExperimentConfig::load_file(prune_opts.config_path, prune_opts.seed);
      fairprune::cmd_prune(cfg, checkpoint_path, resolve_out(cfg, prune_opts));
    } else if (ev->parsed()) {
      auto cfg = ExperimentConfig::load_file(eval_opts.config_path, eval_opts.seed);
      const auto report = fairprune::cmd_eval(cfg, eval_checkpoint, eval_split,
                                              resolve_out(cfg, eval_opts));
      std::cout << fairprune::render_report_block(eval_split + " split", report);
    } else if (gr->parsed()) {
      auto cfg = ExperimentConfig::load_file(grid_opts.config_path, grid_opts.seed);
      const auto result = fairprune::cmd_grid(cfg, resolve_out(cfg, grid_opts));
      std::cout << "grid cells: " << result.cells.size()
                << "  best beta: " << result.best_beta
                << "  best ratio: " << result.best_ratio << "\n";
    } else if (rp->parsed()) {
      const std::filesystem::path run_dir(report_run_dir);
      const std::filesystem::path out =
          report_out_dir.empty() ? run_dir : std::filesystem::path(report_out_dir);
      fairprune::cmd_report(run_dir, out);
      std::cout << fairprune::read_text_file(out / "summary.txt");
    }
  } catch (const fairprune::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const fairprune::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
