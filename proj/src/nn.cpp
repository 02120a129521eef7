#include "raiju/nn.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "raiju/environment.hpp"
#include "raiju/catalog.hpp"
#include "raiju/errors.hpp"

namespace raiju::nn {
namespace {

void require_input(const ParamSet& params, std::size_t length, int batch) {
  if (length != static_cast<std::size_t>(batch) * params.shape.in) {
    throw ContractViolation("input length " + std::to_string(length) + " does not match batch " +
                            std::to_string(batch) + " x " + std::to_string(params.shape.in));
  }
}

}  // namespace

ParamSet ParamSet::zeros(kernels::DenseShape shape) {
  if (shape.in <= 0 || shape.hidden <= 0 || shape.out <= 0) {
    throw ContractViolation("network dimensions must be positive");
  }
  ParamSet p;
  p.shape = shape;
  p.w1.assign(static_cast<std::size_t>(shape.hidden) * shape.in, 0.0);
  p.b1.assign(static_cast<std::size_t>(shape.hidden), 0.0);
  p.w2.assign(static_cast<std::size_t>(shape.out) * shape.hidden, 0.0);
  p.b2.assign(static_cast<std::size_t>(shape.out), 0.0);
  return p;
}

double& ParamSet::flat(std::size_t index) {
  for (std::vector<double>* t : {&w1, &b1, &w2, &b2}) {
    if (index < t->size()) return (*t)[index];
    index -= t->size();
  }
  throw ContractViolation("flat parameter index out of range");
}

double ParamSet::flat(std::size_t index) const { return const_cast<ParamSet&>(*this).flat(index); }

bool ParamSet::same_shape(const ParamSet& other) const {
  return shape.in == other.shape.in && shape.hidden == other.shape.hidden &&
         shape.out == other.shape.out && w1.size() == other.w1.size() &&
         b1.size() == other.b1.size() && w2.size() == other.w2.size() &&
         b2.size() == other.b2.size();
}

bool ParamSet::all_finite() const {
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  return finite(w1) && finite(b1) && finite(w2) && finite(b2);
}

std::array<ParamSet::Tensor, 4> ParamSet::tensors() {
  return {Tensor{"w1", shape.hidden, shape.in, &w1}, Tensor{"b1", shape.hidden, 1, &b1},
          Tensor{"w2", shape.out, shape.hidden, &w2}, Tensor{"b2", shape.out, 1, &b2}};
}

bool ParamSet::operator==(const ParamSet& other) const {
  return same_shape(other) && w1 == other.w1 && b1 == other.b1 && w2 == other.w2 && b2 == other.b2;
}

ParamSet init_params(kernels::DenseShape shape, Rng& rng) {
  ParamSet p = ParamSet::zeros(shape);
  auto fill = [&rng](std::vector<double>& v, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& x : v) x = (2.0 * rng.uniform() - 1.0) * bound;
  };
  fill(p.w1, shape.in);
  fill(p.b1, shape.in);
  fill(p.w2, shape.hidden);
  fill(p.b2, shape.hidden);
  return p;
}

kernels::DenseShape actor_shape(int hidden) { return {kObsSize, hidden, kNumActions}; }
kernels::DenseShape critic_shape(int hidden) { return {kObsSize, hidden, 1}; }

ForwardCache forward(const ParamSet& params, std::span<const double> inputs, int batch,
                     kernels::Exec exec) {
  require_input(params, inputs.size(), batch);
  ForwardCache cache;
  cache.batch = batch;
  cache.inputs.assign(inputs.begin(), inputs.end());
  cache.hidden.resize(static_cast<std::size_t>(batch) * params.shape.hidden);
  cache.output.resize(static_cast<std::size_t>(batch) * params.shape.out);
  kernels::forward(exec, params.shape, params.view(), cache.inputs, batch, cache.hidden, cache.output);
  return cache;
}

std::vector<double> actor_forward(const ParamSet& params, std::span<const double> obs) {
  return forward(params, obs, 1).output;
}

double critic_forward(const ParamSet& params, std::span<const double> obs) {
  if (params.shape.out != 1) throw ContractViolation("critic network must have one output");
  return forward(params, obs, 1).output.front();
}

GradSet backward(const ParamSet& params, const ForwardCache& cache,
                 std::span<const double> output_grad, kernels::Exec exec) {
  if (output_grad.size() != cache.output.size()) {
    throw ContractViolation("output gradient shape does not match forward output");
  }
  GradSet g = ParamSet::zeros(params.shape);
  std::vector<double> scratch(static_cast<std::size_t>(cache.batch) * params.shape.hidden);
  kernels::backward(exec, params.shape, params.view(), cache.inputs, cache.hidden, output_grad,
                    cache.batch, g.mutable_view(), scratch);
  return g;
}

std::vector<double> log_softmax(std::span<const double> logits) {
  if (logits.empty()) throw ContractViolation("softmax of an empty vector");
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double z : logits) total += std::exp(z - top);
  const double log_total = std::log(total);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - top - log_total;
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw ContractViolation("softmax of an empty vector");
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - top);
    total += p[i];
  }
  for (double& x : p) x /= total;
  return p;
}

PolicyStats policy_stats(std::span<const double> logits, int action_id) {
  if (action_id < 0 || static_cast<std::size_t>(action_id) >= logits.size()) {
    throw ContractViolation("action id outside the logit vector");
  }
  PolicyStats s;
  s.probs = softmax(logits);
  const std::vector<double> logp = log_softmax(logits);
  s.log_prob = logp[static_cast<std::size_t>(action_id)];
  double h = 0.0;
  for (std::size_t i = 0; i < logp.size(); ++i) {
    if (s.probs[i] > 0.0) h -= s.probs[i] * logp[i];
  }
  s.entropy = std::max(h, 0.0);
  return s;
}

int sample_action(std::span<const double> probs, Rng& rng) {
  if (probs.empty()) throw ContractViolation("cannot sample from an empty distribution");
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  // Rounding left u above the final cumulative sum: take the last positive entry.
  for (std::size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

int argmax(std::span<const double> values) {
  if (values.empty()) throw ContractViolation("argmax of an empty vector");
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

GradSet finite_diff_grad(const LossFn& loss, const ParamSet& params, double eps,
                         std::span<const std::size_t> coordinates, kernels::Exec exec,
                         Stencil stencil) {
  GradSet g = ParamSet::zeros(params.shape);
  std::vector<std::size_t> all;
  if (coordinates.empty()) {
    all.resize(params.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    coordinates = all;
  }
  const long n = static_cast<long>(coordinates.size());
  const bool threaded = exec == kernels::Exec::Parallel && n > 1;
#pragma omp parallel if (threaded)
  {
    ParamSet probe = params;
#pragma omp for schedule(static)
    for (long c = 0; c < n; ++c) {
      const std::size_t idx = coordinates[static_cast<std::size_t>(c)];
      const double original = params.flat(idx);
      const auto at = [&](double delta) {
        probe.flat(idx) = original + delta;
        return loss(probe);
      };
      if (stencil == Stencil::Central2) {
        g.flat(idx) = (at(eps) - at(-eps)) / (2.0 * eps);
      } else {
        g.flat(idx) = (8.0 * (at(eps) - at(-eps)) - (at(2.0 * eps) - at(-2.0 * eps))) / (12.0 * eps);
      }
      probe.flat(idx) = original;
    }
  }
  return g;
}

}  // namespace raiju::nn
