#include "fairprune/pruner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fairprune/derivatives.hpp"
#include "fairprune/errors.hpp"
#include "fairprune/evaluate.hpp"
#include "fairprune/sampler.hpp"
#include "fairprune/util.hpp"

namespace fairprune {

std::string prune_method_name(PruneMethod m) {
  switch (m) {
    case PruneMethod::kFairprune: return "fairprune";
    case PruneMethod::kObd: return "obd";
    case PruneMethod::kMagnitude: return "magnitude";
  }
  throw InternalError("unknown prune method");
}

PruneMethod prune_method_from_name(const std::string& name) {
  if (name == "fairprune") return PruneMethod::kFairprune;
  if (name == "obd") return PruneMethod::kObd;
  if (name == "magnitude") return PruneMethod::kMagnitude;
  throw ConfigError("unknown prune method: " + name);
}

void PruneSchedule::validate() const {
  if (target_ratio < 0.0 || target_ratio > 1.0)
    throw ConfigError("target_ratio must be in [0, 1]");
  if (p_per_iteration <= 0.0 || p_per_iteration > 1.0)
    throw ConfigError("p_per_iteration must be in (0, 1]");
  if (target_ratio > 0.0 && p_per_iteration > target_ratio)
    throw ConfigError("p_per_iteration must not exceed target_ratio");
  if (beta < 0.0) throw ConfigError("beta must be >= 0");
  if (batches_per_iteration == 0)
    throw ConfigError("batches_per_iteration must be >= 1");
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
}

std::vector<std::size_t> select_prune_set(const SaliencyMap& map,
                                          const PruningMask& mask,
                                          std::size_t k) {
  if (map.size() != mask.size())
    throw ConfigError("select_prune_set: map/mask length mismatch");
  if (k > mask.active_count())
    throw ConfigError("select_prune_set: k exceeds active parameter count");
  std::vector<std::size_t> active;
  active.reserve(mask.active_count());
  for (std::size_t i = 0; i < map.size(); ++i)
    if (!mask.is_pruned(i)) active.push_back(i);
  // (score, index) lexicographic: ties go to the lower index.
  std::partial_sort(active.begin(), active.begin() + static_cast<std::ptrdiff_t>(k),
                    active.end(), [&](std::size_t a, std::size_t b) {
                      if (map.values[a] != map.values[b])
                        return map.values[a] < map.values[b];
                      return a < b;
                    });
  std::vector<std::size_t> out(active.begin(),
                               active.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(out.begin(), out.end());
  return out;
}

void apply_mask(Mlp& model, const PruningMask& mask) {
  if (mask.size() != model.param_count())
    throw ConfigError("apply_mask: length mismatch");
  auto params = model.params();
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask.is_pruned(i)) params[i] = 0.0;
}

namespace {

struct LoopPlan {
  std::size_t target_count = 0;
  std::size_t per_iteration = 0;
};

LoopPlan plan_loop(std::size_t n_params, const PruneSchedule& schedule) {
  LoopPlan plan;
  plan.target_count = static_cast<std::size_t>(
      std::floor(schedule.target_ratio * static_cast<double>(n_params)));
  plan.per_iteration = static_cast<std::size_t>(
      std::floor(schedule.p_per_iteration * static_cast<double>(n_params)));
  // Tiny models: keep making progress rather than stalling.
  if (plan.per_iteration == 0) plan.per_iteration = 1;
  return plan;
}

IterationRow make_row(std::size_t iteration, const PruningMask& mask,
                      const Mlp& model, const GroupedDataset* val) {
  IterationRow row;
  row.iteration = iteration;
  row.pruned_fraction = mask.pruned_fraction();
  if (val) row.report = evaluate_model(model, *val);
  return row;
}

// One generic prune loop; the method only changes how scores are produced.
template <class ScoreFn>
PruneResult prune_loop(Mlp& model, const PruneSchedule& schedule,
                       const GroupedDataset* val, ScoreFn&& score_iteration) {
  schedule.validate();
  const std::size_t n = model.param_count();
  const LoopPlan plan = plan_loop(n, schedule);

  PruneResult result{PruningMask(n), {}};
  result.log.push_back(make_row(0, result.mask, model, val));

  std::size_t iteration = 0;
  while (result.mask.pruned_count() < plan.target_count) {
    ++iteration;
    const std::size_t remaining = plan.target_count - result.mask.pruned_count();
    const std::size_t k = std::min(plan.per_iteration, remaining);

    IterationRow row;
    const SaliencyMap map = score_iteration(model, result.mask, row);
    const std::vector<std::size_t> picked =
        select_prune_set(map, result.mask, k);
    result.mask.prune(picked, iteration);
    apply_mask(model, result.mask);

    IterationRow evaluated = make_row(iteration, result.mask, model, val);
    evaluated.grad_norm_g0 = row.grad_norm_g0;
    evaluated.grad_norm_g1 = row.grad_norm_g1;
    result.log.push_back(std::move(evaluated));
  }
  return result;
}

}  // namespace

PruneResult fairprune(Mlp& model, const GroupedDataset& train_set,
                      const PruneSchedule& schedule,
                      const GroupedDataset* val) {
  train_set.validate_for_pruning();
  PairBatchSampler sampler(train_set, schedule.batch_size, schedule.seed);
  return prune_loop(
      model, schedule, val,
      [&](const Mlp& m, const PruningMask& mask, IterationRow& row) {
        SaliencyAccumulator acc(m.param_count());
        GradVector g0_sum, g1_sum;
        for (std::size_t b = 0; b < schedule.batches_per_iteration; ++b) {
          const auto [b0, b1] = sampler.next();
          acc.accumulate(hessian_diag(m, b0), hessian_diag(m, b1));
          if (schedule.first_order_diagnostic) {
            const GradVector g0 = backward(m, b0);
            const GradVector g1 = backward(m, b1);
            if (g0_sum.empty()) {
              g0_sum.assign(m.param_count(), 0.0);
              g1_sum.assign(m.param_count(), 0.0);
            }
            for (std::size_t i = 0; i < g0.size(); ++i) {
              g0_sum[i] += g0[i];
              g1_sum[i] += g1[i];
            }
          }
        }
        if (schedule.first_order_diagnostic && !g0_sum.empty()) {
          const double inv =
              1.0 / static_cast<double>(schedule.batches_per_iteration);
          for (auto& v : g0_sum) v *= inv;
          for (auto& v : g1_sum) v *= inv;
          row.grad_norm_g0 = grad_l2_norm(g0_sum);
          row.grad_norm_g1 = grad_l2_norm(g1_sum);
        }
        return acc.finalize(m.params(), schedule.beta, &mask);
      });
}

PruneResult obd_prune(Mlp& model, const GroupedDataset& train_set,
                      const PruneSchedule& schedule,
                      const GroupedDataset* val) {
  train_set.validate();
  if (train_set.size() == 0) throw DataError("cannot prune on an empty dataset");
  BatchStream stream =
      pooled_batch_stream(train_set, schedule.batch_size, schedule.seed);
  return prune_loop(
      model, schedule, val,
      [&](const Mlp& m, const PruningMask& mask, IterationRow&) {
        SaliencyAccumulator acc(m.param_count());
        for (std::size_t b = 0; b < schedule.batches_per_iteration; ++b) {
          const HessDiagVector h = hessian_diag(m, stream.next());
          acc.accumulate(h, h);
        }
        // beta = 0: score is the plain pooled saliency.
        return acc.finalize(m.params(), 0.0, &mask);
      });
}

PruneResult magnitude_prune(Mlp& model, const PruneSchedule& schedule,
                            const GroupedDataset* val) {
  return prune_loop(
      model, schedule, val,
      [&](const Mlp& m, const PruningMask& mask, IterationRow&) {
        SaliencyMap map;
        map.kind = SaliencyKind::kGroupSaliency;
        map.values.resize(m.param_count());
        const auto params = m.params();
        for (std::size_t i = 0; i < map.values.size(); ++i)
          map.values[i] = mask.is_pruned(i)
                              ? std::numeric_limits<double>::infinity()
                              : std::abs(params[i]);
        return map;
      });
}

PruneResult prune_model(Mlp& model, const GroupedDataset& train_set,
                        const PruneSchedule& schedule,
                        const GroupedDataset* val) {
  switch (schedule.method) {
    case PruneMethod::kFairprune:
      return fairprune(model, train_set, schedule, val);
    case PruneMethod::kObd:
      return obd_prune(model, train_set, schedule, val);
    case PruneMethod::kMagnitude:
      return magnitude_prune(model, schedule, val);
  }
  throw InternalError("unknown prune method");
}

void write_iteration_log_csv(const std::filesystem::path& path,
                             const std::vector<IterationRow>& log) {
  std::ostringstream out;
  out << "iteration,pruned_fraction,eopp0,eopp1,eodd,f1_g0,f1_g1,f1_avg,"
         "f1_diff\n";
  for (const auto& row : log) {
    out << row.iteration << ',' << format_double(row.pruned_fraction);
    if (row.report) {
      const auto& r = *row.report;
      out << ',' << format_double(r.eopp0) << ',' << format_double(r.eopp1)
          << ',' << format_double(r.eodd) << ',' << format_double(r.f1_g0)
          << ',' << format_double(r.f1_g1) << ',' << format_double(r.f1_avg)
          << ',' << format_double(r.f1_diff);
    } else {
      out << ",,,,,,,";
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

void write_first_order_csv(const std::filesystem::path& path,
                           const std::vector<IterationRow>& log) {
  std::ostringstream out;
  out << "iteration,grad_norm_g0,grad_norm_g1\n";
  for (const auto& row : log) {
    if (row.iteration == 0) continue;
    out << row.iteration << ',' << format_double(row.grad_norm_g0) << ','
        << format_double(row.grad_norm_g1) << '\n';
  }
  write_text_file(path, out.str());
}

}  // namespace fairprune
