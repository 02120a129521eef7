#pragma once

#include <cstddef>
#include <span>

namespace raiju::kernels {

/// Layer sizes of a one-hidden-layer tanh network.
struct DenseShape {
  int in = 0;
  int hidden = 0;
  int out = 0;
};

/// Read-only view of the four parameter tensors (row-major).
struct DenseWeights {
  std::span<const double> w1;  // hidden x in
  std::span<const double> b1;  // hidden
  std::span<const double> w2;  // out x hidden
  std::span<const double> b2;  // out
};

/// Writable view for gradients; same layout as DenseWeights.
struct DenseGrads {
  std::span<double> w1;
  std::span<double> b1;
  std::span<double> w2;
  std::span<double> b2;
};

enum class Exec { Serial, Parallel };

// Both variants accumulate every output element in the same order, so their
// results are bitwise identical; the parallel one only splits independent
// rows across threads.

namespace serial {
/// hidden[t] = tanh(w1 x[t] + b1); out[t] = w2 hidden[t] + b2, for t < batch.
void forward(DenseShape s, DenseWeights w, std::span<const double> x, int batch,
             std::span<double> hidden, std::span<double> out);

/// Gradients of sum_t <d_out[t], out[t]>; overwrites `g`.
/// `scratch` needs batch * hidden entries.
void backward(DenseShape s, DenseWeights w, std::span<const double> x,
              std::span<const double> hidden, std::span<const double> d_out, int batch,
              DenseGrads g, std::span<double> scratch);
}  // namespace serial

namespace parallel {
void forward(DenseShape s, DenseWeights w, std::span<const double> x, int batch,
             std::span<double> hidden, std::span<double> out);
void backward(DenseShape s, DenseWeights w, std::span<const double> x,
              std::span<const double> hidden, std::span<const double> d_out, int batch,
              DenseGrads g, std::span<double> scratch);
}  // namespace parallel

void forward(Exec exec, DenseShape s, DenseWeights w, std::span<const double> x, int batch,
             std::span<double> hidden, std::span<double> out);
void backward(Exec exec, DenseShape s, DenseWeights w, std::span<const double> x,
              std::span<const double> hidden, std::span<const double> d_out, int batch,
              DenseGrads g, std::span<double> scratch);

/// Below this many multiply-adds the parallel kernels stay on one thread.
inline constexpr long kParallelThreshold = 1L << 16;

/// Thread cap from RAIJU_SIM_THREADS (0 when unset or invalid).
int thread_cap_from_env();

}  // namespace raiju::kernels
