#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fairprune/mlp.hpp"

namespace fairprune {

// Length-N arrays aligned with Mlp parameter order.
using GradVector = std::vector<double>;
using HessDiagVector = std::vector<double>;

// Mean softmax cross-entropy over the batch, log-sum-exp stabilized.
double loss_ce(const std::vector<std::vector<double>>& logits,
               std::span<const int> labels);
double loss_ce(const Mlp& model, const Batch& batch);

// Exact analytic gradient of loss_ce(forward(model, batch)).
GradVector backward(const Mlp& model, const Batch& batch);

// Gauss-Newton diagonal curvature estimate. Per sample, the softmax
// cross-entropy output curvature p_k(1-p_k) is propagated down through
// squared weights and squared activation slopes, then reduced as a mean over
// the batch. Elementwise nonnegative by construction; the activation-second-
// derivative term of the exact recursion is dropped, which is what keeps the
// estimate usable when a group's loss is not at its own minimum.
HessDiagVector hessian_diag(const Mlp& model, const Batch& batch);

// Central-difference estimate of the loss curvature per coordinate.
// Verification oracle for hessian_diag; slow, tests and diagnostics only.
HessDiagVector hessian_diag_fd(const Mlp& model, const Batch& batch,
                               double step);

// Per-sample mean gradient restricted to one group's samples; diagnostic for
// the first-order term that the saliency expansion drops.
double grad_l2_norm(std::span<const double> g);

namespace fd {

using Objective = std::function<double(std::span<const double>)>;

// Central differences, one coordinate at a time.
std::vector<double> gradient(const Objective& f, std::span<const double> x,
                             double step);
std::vector<double> hessian_diag(const Objective& f, std::span<const double> x,
                                 double step);

}  // namespace fd

}  // namespace fairprune
