#include "raiju/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <string>

namespace raiju::kernels {
namespace {

using std::size_t;

// Per-row work units. Serial and parallel drivers call the same units, which
// is what keeps the two paths bitwise equal.

void forward_sample(DenseShape s, const DenseWeights& w, std::span<const double> x,
                    std::span<double> hidden, std::span<double> out, int t) {
  const double* xt = x.data() + static_cast<size_t>(t) * s.in;
  double* ht = hidden.data() + static_cast<size_t>(t) * s.hidden;
  double* yt = out.data() + static_cast<size_t>(t) * s.out;
  for (int j = 0; j < s.hidden; ++j) {
    const double* row = w.w1.data() + static_cast<size_t>(j) * s.in;
    double z = w.b1[j];
    for (int i = 0; i < s.in; ++i) z += row[i] * xt[i];
    ht[j] = std::tanh(z);
  }
  for (int k = 0; k < s.out; ++k) {
    const double* row = w.w2.data() + static_cast<size_t>(k) * s.hidden;
    double y = w.b2[k];
    for (int j = 0; j < s.hidden; ++j) y += row[j] * ht[j];
    yt[k] = y;
  }
}

// dW2[k, :] and db2[k].
void output_row_grad(DenseShape s, std::span<const double> hidden, std::span<const double> d_out,
                     int batch, DenseGrads& g, int k) {
  double* gw = g.w2.data() + static_cast<size_t>(k) * s.hidden;
  for (int j = 0; j < s.hidden; ++j) gw[j] = 0.0;
  double gb = 0.0;
  for (int t = 0; t < batch; ++t) {
    const double dy = d_out[static_cast<size_t>(t) * s.out + k];
    if (dy == 0.0) continue;
    const double* ht = hidden.data() + static_cast<size_t>(t) * s.hidden;
    for (int j = 0; j < s.hidden; ++j) gw[j] += dy * ht[j];
    gb += dy;
  }
  g.b2[k] = gb;
}

// Back through tanh for hidden unit j, then dW1[j, :] and db1[j].
void hidden_unit_grad(DenseShape s, const DenseWeights& w, std::span<const double> x,
                      std::span<const double> hidden, std::span<const double> d_out, int batch,
                      DenseGrads& g, std::span<double> scratch, int j) {
  for (int t = 0; t < batch; ++t) {
    const double* dyt = d_out.data() + static_cast<size_t>(t) * s.out;
    double dh = 0.0;
    for (int k = 0; k < s.out; ++k) dh += w.w2[static_cast<size_t>(k) * s.hidden + j] * dyt[k];
    const double h = hidden[static_cast<size_t>(t) * s.hidden + j];
    scratch[static_cast<size_t>(t) * s.hidden + j] = dh * (1.0 - h * h);
  }
  double* gw = g.w1.data() + static_cast<size_t>(j) * s.in;
  for (int i = 0; i < s.in; ++i) gw[i] = 0.0;
  double gb = 0.0;
  for (int t = 0; t < batch; ++t) {
    const double dz = scratch[static_cast<size_t>(t) * s.hidden + j];
    const double* xt = x.data() + static_cast<size_t>(t) * s.in;
    for (int i = 0; i < s.in; ++i) gw[i] += dz * xt[i];
    gb += dz;
  }
  g.b1[j] = gb;
}

long forward_work(DenseShape s, int batch) {
  return static_cast<long>(batch) * s.hidden * (s.in + s.out);
}

int thread_count() {
  const int cap = thread_cap_from_env();
  const int max = omp_get_max_threads();
  return cap > 0 && cap < max ? cap : max;
}

}  // namespace

int thread_cap_from_env() {
  const char* text = std::getenv("RAIJU_SIM_THREADS");
  if (text == nullptr) return 0;
  char* end = nullptr;
  const long v = std::strtol(text, &end, 10);
  if (end == text || *end != '\0' || v <= 0) return 0;
  return static_cast<int>(v);
}

namespace serial {

void forward(DenseShape s, DenseWeights w, std::span<const double> x, int batch,
             std::span<double> hidden, std::span<double> out) {
  for (int t = 0; t < batch; ++t) forward_sample(s, w, x, hidden, out, t);
}

void backward(DenseShape s, DenseWeights w, std::span<const double> x,
              std::span<const double> hidden, std::span<const double> d_out, int batch,
              DenseGrads g, std::span<double> scratch) {
  for (int k = 0; k < s.out; ++k) output_row_grad(s, hidden, d_out, batch, g, k);
  for (int j = 0; j < s.hidden; ++j) hidden_unit_grad(s, w, x, hidden, d_out, batch, g, scratch, j);
}

}  // namespace serial

namespace parallel {

void forward(DenseShape s, DenseWeights w, std::span<const double> x, int batch,
             std::span<double> hidden, std::span<double> out) {
  const bool wide = forward_work(s, batch) >= kParallelThreshold && batch > 1;
#pragma omp parallel for schedule(static) if (wide) num_threads(thread_count())
  for (int t = 0; t < batch; ++t) forward_sample(s, w, x, hidden, out, t);
}

void backward(DenseShape s, DenseWeights w, std::span<const double> x,
              std::span<const double> hidden, std::span<const double> d_out, int batch,
              DenseGrads g, std::span<double> scratch) {
  const bool wide = forward_work(s, batch) >= kParallelThreshold;
#pragma omp parallel if (wide) num_threads(thread_count())
  {
#pragma omp for schedule(static) nowait
    for (int k = 0; k < s.out; ++k) output_row_grad(s, hidden, d_out, batch, g, k);
#pragma omp for schedule(static)
    for (int j = 0; j < s.hidden; ++j) hidden_unit_grad(s, w, x, hidden, d_out, batch, g, scratch, j);
  }
}

}  // namespace parallel

void forward(Exec exec, DenseShape s, DenseWeights w, std::span<const double> x, int batch,
             std::span<double> hidden, std::span<double> out) {
  if (exec == Exec::Serial) {
    serial::forward(s, w, x, batch, hidden, out);
  } else {
    parallel::forward(s, w, x, batch, hidden, out);
  }
}

void backward(Exec exec, DenseShape s, DenseWeights w, std::span<const double> x,
              std::span<const double> hidden, std::span<const double> d_out, int batch,
              DenseGrads g, std::span<double> scratch) {
  if (exec == Exec::Serial) {
    serial::backward(s, w, x, hidden, d_out, batch, g, scratch);
  } else {
    parallel::backward(s, w, x, hidden, d_out, batch, g, scratch);
  }
}

}  // namespace raiju::kernels
