#pragma once

#include <array>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "raiju/kernels.hpp"
#include "raiju/rng.hpp"

namespace raiju::nn {

inline constexpr int kHiddenUnits = 256;

/// Weights of a dense in -> hidden (tanh) -> out network, row-major.
struct ParamSet {
  kernels::DenseShape shape;
  std::vector<double> w1;  // hidden x in
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // out x hidden
  std::vector<double> b2;  // out

  static ParamSet zeros(kernels::DenseShape shape);

  std::size_t size() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
  /// Flat view across w1, b1, w2, b2 in that order.
  double& flat(std::size_t index);
  double flat(std::size_t index) const;

  bool same_shape(const ParamSet& other) const;
  bool all_finite() const;

  kernels::DenseWeights view() const { return {w1, b1, w2, b2}; }
  kernels::DenseGrads mutable_view() { return {w1, b1, w2, b2}; }

  struct Tensor {
    std::string_view name;
    int rows;
    int cols;
    std::vector<double>* data;
  };
  std::array<Tensor, 4> tensors();

  bool operator==(const ParamSet& other) const;
};

/// Gradients carry the exact layout of the parameters they belong to.
using GradSet = ParamSet;

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every weight and bias.
ParamSet init_params(kernels::DenseShape shape, Rng& rng);

kernels::DenseShape actor_shape(int hidden = kHiddenUnits);
kernels::DenseShape critic_shape(int hidden = kHiddenUnits);

/// Activations saved for backward.
struct ForwardCache {
  int batch = 0;
  std::vector<double> inputs;  // batch x in
  std::vector<double> hidden;  // batch x hidden, post-tanh
  std::vector<double> output;  // batch x out
};

ForwardCache forward(const ParamSet& params, std::span<const double> inputs, int batch,
                     kernels::Exec exec = kernels::Exec::Parallel);

/// Policy logits for one observation.
std::vector<double> actor_forward(const ParamSet& params, std::span<const double> obs);
/// State value for one observation.
double critic_forward(const ParamSet& params, std::span<const double> obs);

/// Exact gradient of sum_t <output_grad[t], output[t]> w.r.t. every parameter.
GradSet backward(const ParamSet& params, const ForwardCache& cache,
                 std::span<const double> output_grad,
                 kernels::Exec exec = kernels::Exec::Parallel);

struct PolicyStats {
  std::vector<double> probs;
  double log_prob = 0.0;
  double entropy = 0.0;
};

/// Max-shifted softmax.
std::vector<double> softmax(std::span<const double> logits);
std::vector<double> log_softmax(std::span<const double> logits);
PolicyStats policy_stats(std::span<const double> logits, int action_id);

int sample_action(std::span<const double> probs, Rng& rng);
/// Lowest index among the maxima.
int argmax(std::span<const double> values);

using LossFn = std::function<double(const ParamSet&)>;

enum class Stencil {
  Central2,  // (L(p + h) - L(p - h)) / 2h
  Central4,  // (-L(p + 2h) + 8 L(p + h) - 8 L(p - h) + L(p - 2h)) / 12h
};

/// Finite-difference gradient. When `coordinates` is non-empty only those
/// flat indices are evaluated; the rest stay zero.
GradSet finite_diff_grad(const LossFn& loss, const ParamSet& params, double eps = 1e-5,
                         std::span<const std::size_t> coordinates = {},
                         kernels::Exec exec = kernels::Exec::Parallel,
                         Stencil stencil = Stencil::Central2);

}  // namespace raiju::nn
