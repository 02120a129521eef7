#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace raiju {

struct GradcheckOptions {
  int seeds = 20;
  std::uint64_t base_seed = 1;
  int batch = 8;
  int small_hidden = 16;      // fully checked network width
  int sampled_coordinates = 100;  // per network at full width
  double fd_eps = 1e-3;  // fourth-order stencil step
  double tolerance = 1e-4;
  // Negative control: scales part of the analytic gradient before comparing.
  bool inject_fault = false;
};

struct GradcheckTrial {
  std::string family;  // "a2c" or "ppo"
  std::uint64_t seed = 0;
  int hidden = 0;
  std::size_t coordinates = 0;
  double max_rel_error = 0.0;
};

struct GradcheckReport {
  std::vector<GradcheckTrial> trials;
  double max_rel_error = 0.0;
  bool passed = false;
};

/// Compares analytic gradients of the A2C and PPO losses with fourth-order
/// central differences on random batches. Per coordinate the error is
/// |a - n| / max(|a|, |n|, 1e-6).
GradcheckReport run_gradcheck(const GradcheckOptions& options);

}  // namespace raiju
