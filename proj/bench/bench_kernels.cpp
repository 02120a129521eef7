// Serial reference vs OpenMP kernels on the actor network (11 -> 256 -> 99).
#include <benchmark/benchmark.h>

#include <vector>

#include "raiju/kernels.hpp"
#include "raiju/nn.hpp"
#include "raiju/rng.hpp"

namespace {

using raiju::kernels::Exec;

struct Fixture {
  raiju::nn::ParamSet params;
  std::vector<double> x;
  std::vector<double> hidden;
  std::vector<double> out;
  std::vector<double> d_out;
  std::vector<double> scratch;
  raiju::nn::GradSet grads;

  explicit Fixture(int batch) {
    raiju::Rng rng(42);
    params = raiju::nn::init_params(raiju::nn::actor_shape(), rng);
    const auto s = params.shape;
    x.resize(static_cast<std::size_t>(batch) * s.in);
    for (double& v : x) v = rng.uniform() * 2.0 - 1.0;
    hidden.resize(static_cast<std::size_t>(batch) * s.hidden);
    out.resize(static_cast<std::size_t>(batch) * s.out);
    d_out.resize(out.size());
    for (double& v : d_out) v = rng.uniform() - 0.5;
    scratch.resize(hidden.size());
    grads = raiju::nn::ParamSet::zeros(s);
  }
};

void forward(benchmark::State& state, Exec exec) {
  const int batch = static_cast<int>(state.range(0));
  Fixture f(batch);
  for (auto _ : state) {
    raiju::kernels::forward(exec, f.params.shape, f.params.view(), f.x, batch, f.hidden, f.out);
    benchmark::DoNotOptimize(f.out.data());
  }
  state.SetItemsProcessed(state.iterations() * batch);
}

void backward(benchmark::State& state, Exec exec) {
  const int batch = static_cast<int>(state.range(0));
  Fixture f(batch);
  raiju::kernels::forward(Exec::Serial, f.params.shape, f.params.view(), f.x, batch, f.hidden, f.out);
  for (auto _ : state) {
    raiju::kernels::backward(exec, f.params.shape, f.params.view(), f.x, f.hidden, f.d_out, batch,
                             f.grads.mutable_view(), f.scratch);
    benchmark::DoNotOptimize(f.grads.w1.data());
  }
  state.SetItemsProcessed(state.iterations() * batch);
}

void finite_diff(benchmark::State& state, Exec exec) {
  raiju::Rng rng(7);
  const auto params = raiju::nn::init_params(raiju::nn::actor_shape(32), rng);
  std::vector<double> x(16 * 11);
  for (double& v : x) v = rng.uniform();
  const auto loss = [&](const raiju::nn::ParamSet& p) {
    const auto c = raiju::nn::forward(p, x, 16, Exec::Serial);
    double s = 0.0;
    for (double o : c.output) s += o * o;
    return s;
  };
  for (auto _ : state) {
    auto g = raiju::nn::finite_diff_grad(loss, params, 1e-5, {}, exec);
    benchmark::DoNotOptimize(g.w1.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(forward, serial, Exec::Serial)->Arg(1)->Arg(64)->Arg(512)->Arg(4096);
BENCHMARK_CAPTURE(forward, parallel, Exec::Parallel)->Arg(1)->Arg(64)->Arg(512)->Arg(4096);
BENCHMARK_CAPTURE(backward, serial, Exec::Serial)->Arg(64)->Arg(512)->Arg(4096);
BENCHMARK_CAPTURE(backward, parallel, Exec::Parallel)->Arg(64)->Arg(512)->Arg(4096);
BENCHMARK_CAPTURE(finite_diff, serial, Exec::Serial);
BENCHMARK_CAPTURE(finite_diff, parallel, Exec::Parallel);

BENCHMARK_MAIN();
