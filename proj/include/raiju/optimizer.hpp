#pragma once

#include <cstdint>
#include <string_view>

#include "raiju/nn.hpp"

namespace raiju::nn {

enum class OptimizerKind { Adam, Sgd };

std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view text);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment accumulators, shaped like the parameters.
struct OptimizerState {
  ParamSet first_moment;
  ParamSet second_moment;
  std::int64_t step = 0;

  static OptimizerState for_params(const ParamSet& params);
  bool operator==(const OptimizerState&) const = default;
};

/// Bias-corrected Adam (or plain gradient descent) update in place.
void optimizer_step(ParamSet& params, const GradSet& grads, double learning_rate,
                    OptimizerState& state, const OptimizerConfig& config = {});

}  // namespace raiju::nn
