#include "raiju/optimizer.hpp"

#include <cmath>

#include "raiju/errors.hpp"

namespace raiju::nn {

std::string_view to_string(OptimizerKind kind) { return kind == OptimizerKind::Adam ? "adam" : "sgd"; }

OptimizerKind parse_optimizer(std::string_view text) {
  if (text == "adam") return OptimizerKind::Adam;
  if (text == "sgd") return OptimizerKind::Sgd;
  throw ParseError("optimizer", "expected adam or sgd, got \"" + std::string(text) + "\"");
}

OptimizerState OptimizerState::for_params(const ParamSet& params) {
  return OptimizerState{ParamSet::zeros(params.shape), ParamSet::zeros(params.shape), 0};
}

void optimizer_step(ParamSet& params, const GradSet& grads, double learning_rate,
                    OptimizerState& state, const OptimizerConfig& config) {
  if (!params.same_shape(grads) || !params.same_shape(state.first_moment) ||
      !params.same_shape(state.second_moment)) {
    throw ContractViolation("optimizer_step: parameter, gradient and state shapes differ");
  }
  ++state.step;
  const std::size_t n = params.size();
  if (config.kind == OptimizerKind::Sgd) {
    for (std::size_t i = 0; i < n; ++i) params.flat(i) -= learning_rate * grads.flat(i);
    return;
  }
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);

  auto update = [&](std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                    std::vector<double>& v) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  };
  ParamSet& m = state.first_moment;
  ParamSet& v = state.second_moment;
  update(params.w1, grads.w1, m.w1, v.w1);
  update(params.b1, grads.b1, m.b1, v.b1);
  update(params.w2, grads.w2, m.w2, v.w2);
  update(params.b2, grads.b2, m.b2, v.b2);
}

}  // namespace raiju::nn
