#include "fairprune/derivatives.hpp"

#include <algorithm>
#include <cmath>

#include "fairprune/errors.hpp"

namespace fairprune {

namespace {

void softmax_row(std::span<const double> logits, std::vector<double>& p) {
  p.resize(logits.size());
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  double sum = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    p[k] = std::exp(logits[k] - mx);
    sum += p[k];
  }
  for (double& v : p) v /= sum;
}

// Activations and preactivations for one sample, layer by layer.
struct LayerTrace {
  std::vector<std::vector<double>> pre;   // z per layer
  std::vector<std::vector<double>> post;  // activation(z); last layer = z
};

void forward_trace(const Mlp& m, std::span<const double> input,
                   LayerTrace& t) {
  const auto& sizes = m.layer_sizes();
  t.pre.resize(m.layer_count());
  t.post.resize(m.layer_count());
  const double* cur = input.data();
  for (std::size_t l = 0; l < m.layer_count(); ++l) {
    const int fan_in = sizes[l];
    const int fan_out = sizes[l + 1];
    t.pre[l].assign(static_cast<std::size_t>(fan_out), 0.0);
    t.post[l].assign(static_cast<std::size_t>(fan_out), 0.0);
    const bool hidden = l + 1 < m.layer_count();
    for (int j = 0; j < fan_out; ++j) {
      double z = m.bias(l, j);
      for (int i = 0; i < fan_in; ++i) z += m.weight(l, j, i) * cur[i];
      t.pre[l][static_cast<std::size_t>(j)] = z;
      double a = z;
      if (hidden)
        a = m.activation() == Activation::kTanh ? std::tanh(z)
                                                : (z > 0.0 ? z : 0.0);
      t.post[l][static_cast<std::size_t>(j)] = a;
    }
    cur = t.post[l].data();
  }
}

double act_slope(Activation act, double z, double a) {
  if (act == Activation::kTanh) return 1.0 - a * a;
  return z > 0.0 ? 1.0 : 0.0;
}

}  // namespace

double loss_ce(const std::vector<std::vector<double>>& logits,
               std::span<const int> labels) {
  if (logits.size() != labels.size())
    throw ConfigError("loss_ce: logits/labels length mismatch");
  if (logits.empty()) throw ConfigError("loss_ce: empty batch");
  double total = 0.0;
  for (std::size_t s = 0; s < logits.size(); ++s) {
    const auto& row = logits[s];
    const int y = labels[s];
    if (y < 0 || static_cast<std::size_t>(y) >= row.size())
      throw ConfigError("loss_ce: label out of range");
    double mx = row[0];
    for (double v : row) mx = std::max(mx, v);
    double sum = 0.0;
    for (double v : row) sum += std::exp(v - mx);
    total += mx + std::log(sum) - row[static_cast<std::size_t>(y)];
  }
  return total / static_cast<double>(logits.size());
}

double loss_ce(const Mlp& model, const Batch& batch) {
  return loss_ce(model.forward(batch), batch.labels);
}

GradVector backward(const Mlp& model, const Batch& batch) {
  batch.validate(static_cast<std::size_t>(model.input_dim()),
                 model.num_classes());
  const auto& sizes = model.layer_sizes();
  GradVector grad(model.param_count(), 0.0);
  const double inv_s = 1.0 / static_cast<double>(batch.size());

  LayerTrace trace;
  std::vector<double> p;
  std::vector<double> delta, delta_prev;
  for (std::size_t s = 0; s < batch.size(); ++s) {
    forward_trace(model, batch.features[s], trace);
    const std::size_t top = model.layer_count() - 1;
    softmax_row(trace.post[top], p);
    delta = p;
    delta[static_cast<std::size_t>(batch.labels[s])] -= 1.0;
    for (double& v : delta) v *= inv_s;

    for (std::size_t l = model.layer_count(); l-- > 0;) {
      const int fan_in = sizes[l];
      const int fan_out = sizes[l + 1];
      const auto wspan = model.weight_span(l);
      const auto bspan = model.bias_span(l);
      const std::vector<double>& below =
          l == 0 ? batch.features[s] : trace.post[l - 1];
      for (int j = 0; j < fan_out; ++j) {
        const double dj = delta[static_cast<std::size_t>(j)];
        const std::size_t row = wspan.offset + static_cast<std::size_t>(j) * fan_in;
        for (int i = 0; i < fan_in; ++i) grad[row + i] += dj * below[i];
        grad[bspan.offset + static_cast<std::size_t>(j)] += dj;
      }
      if (l == 0) break;
      delta_prev.assign(static_cast<std::size_t>(fan_in), 0.0);
      for (int i = 0; i < fan_in; ++i) {
        double acc = 0.0;
        for (int j = 0; j < fan_out; ++j)
          acc += model.weight(l, j, i) * delta[static_cast<std::size_t>(j)];
        acc *= act_slope(model.activation(), trace.pre[l - 1][i],
                         trace.post[l - 1][i]);
        delta_prev[static_cast<std::size_t>(i)] = acc;
      }
      delta.swap(delta_prev);
    }
  }
  return grad;
}

HessDiagVector hessian_diag(const Mlp& model, const Batch& batch) {
  batch.validate(static_cast<std::size_t>(model.input_dim()),
                 model.num_classes());
  const auto& sizes = model.layer_sizes();
  HessDiagVector h(model.param_count(), 0.0);
  const double inv_s = 1.0 / static_cast<double>(batch.size());

  LayerTrace trace;
  std::vector<double> p;
  std::vector<double> u, u_prev;
  for (std::size_t s = 0; s < batch.size(); ++s) {
    forward_trace(model, batch.features[s], trace);
    const std::size_t top = model.layer_count() - 1;
    softmax_row(trace.post[top], p);
    u.resize(p.size());
    for (std::size_t k = 0; k < p.size(); ++k)
      u[k] = p[k] * (1.0 - p[k]) * inv_s;

    for (std::size_t l = model.layer_count(); l-- > 0;) {
      const int fan_in = sizes[l];
      const int fan_out = sizes[l + 1];
      const auto wspan = model.weight_span(l);
      const auto bspan = model.bias_span(l);
      const std::vector<double>& below =
          l == 0 ? batch.features[s] : trace.post[l - 1];
      for (int j = 0; j < fan_out; ++j) {
        const double uj = u[static_cast<std::size_t>(j)];
        const std::size_t row = wspan.offset + static_cast<std::size_t>(j) * fan_in;
        for (int i = 0; i < fan_in; ++i) h[row + i] += uj * below[i] * below[i];
        h[bspan.offset + static_cast<std::size_t>(j)] += uj;
      }
      if (l == 0) break;
      u_prev.assign(static_cast<std::size_t>(fan_in), 0.0);
      for (int i = 0; i < fan_in; ++i) {
        double acc = 0.0;
        for (int j = 0; j < fan_out; ++j) {
          const double w = model.weight(l, j, i);
          acc += w * w * u[static_cast<std::size_t>(j)];
        }
        const double slope = act_slope(model.activation(), trace.pre[l - 1][i],
                                       trace.post[l - 1][i]);
        u_prev[static_cast<std::size_t>(i)] = slope * slope * acc;
      }
      u.swap(u_prev);
    }
  }
  return h;
}

HessDiagVector hessian_diag_fd(const Mlp& model, const Batch& batch,
                               double step) {
  if (!(step > 0.0)) throw ConfigError("hessian_diag_fd: step must be > 0");
  Mlp probe = model;
  auto objective = [&probe, &batch](std::span<const double> theta) {
    probe.unflatten(theta);
    return loss_ce(probe, batch);
  };
  return fd::hessian_diag(objective, model.params(), step);
}

double grad_l2_norm(std::span<const double> g) {
  double acc = 0.0;
  for (double v : g) acc += v * v;
  return std::sqrt(acc);
}

namespace fd {

std::vector<double> gradient(const Objective& f, std::span<const double> x,
                             double step) {
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + step;
    const double fp = f(probe);
    probe[i] = orig - step;
    const double fm = f(probe);
    probe[i] = orig;
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

std::vector<double> hessian_diag(const Objective& f, std::span<const double> x,
                                 double step) {
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> h(x.size());
  const double f0 = f(probe);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + step;
    const double fp = f(probe);
    probe[i] = orig - step;
    const double fm = f(probe);
    probe[i] = orig;
    h[i] = (fp - 2.0 * f0 + fm) / (step * step);
  }
  return h;
}

}  // namespace fd

}  // namespace fairprune
