// Serial reference kernels vs their OpenMP counterparts, plus a full
// forward/backward pass at the network sizes the agents use.

#include <benchmark/benchmark.h>

#include "tddr/numerics/kernels.hpp"
#include "tddr/numerics/mlp.hpp"

using namespace tddr;

namespace {

struct Fixture {
  Matrix x, dy, y, dx;
  Vec w, b, dw, db;
  LayerView layer;

  Fixture(std::size_t batch, std::size_t width) : x(batch, width), dy(batch, width), y(batch, width),
        dx(batch, width), w(width * width), b(width), dw(width * width), db(width) {
    SeededRng rng(1);
    for (double& v : x.flat()) v = rng.uniform(-1, 1);
    for (double& v : dy.flat()) v = rng.uniform(-1, 1);
    for (double& v : w) v = rng.uniform(-1, 1);
    layer = LayerView{width, width, w, b};
  }
};

template <Exec E>
void BM_AffineForward(benchmark::State& state) {
  Fixture f(state.range(0), state.range(1));
  for (auto _ : state) {
    if constexpr (E == Exec::Serial) kernels::serial::affine_forward(f.x, f.layer, f.y);
    else kernels::parallel::affine_forward(f.x, f.layer, f.y);
    benchmark::DoNotOptimize(f.y.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1) * state.range(1));
}

template <Exec E>
void BM_InputGrad(benchmark::State& state) {
  Fixture f(state.range(0), state.range(1));
  for (auto _ : state) {
    if constexpr (E == Exec::Serial) kernels::serial::input_grad(f.dy, f.layer, f.dx);
    else kernels::parallel::input_grad(f.dy, f.layer, f.dx);
    benchmark::DoNotOptimize(f.dx.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1) * state.range(1));
}

template <Exec E>
void BM_ParamGrad(benchmark::State& state) {
  Fixture f(state.range(0), state.range(1));
  for (auto _ : state) {
    if constexpr (E == Exec::Serial) kernels::serial::accumulate_param_grad(f.dy, f.x, f.dw, f.db);
    else kernels::parallel::accumulate_param_grad(f.dy, f.x, f.dw, f.db);
    benchmark::DoNotOptimize(f.dw.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1) * state.range(1));
}

template <Exec E>
void BM_MlpForwardBackward(benchmark::State& state) {
  const std::size_t batch = state.range(0), width = state.range(1);
  Mlp net({8, width, width, 1});
  SeededRng rng(2);
  net.init_fan_in(rng);
  net.set_exec(E);
  Matrix x(batch, 8), dy(batch, 1, 1.0);
  for (double& v : x.flat()) v = rng.uniform(-1, 1);
  Vec grads(net.num_params());
  Mlp::Cache cache;
  for (auto _ : state) {
    net.forward(x, cache);
    benchmark::DoNotOptimize(net.backward(cache, dy, grads));
  }
}

}  // namespace

#define SIZES ->Args({64, 64})->Args({256, 64})->Args({256, 256})
BENCHMARK(BM_AffineForward<Exec::Serial>) SIZES;
BENCHMARK(BM_AffineForward<Exec::Parallel>) SIZES;
BENCHMARK(BM_InputGrad<Exec::Serial>) SIZES;
BENCHMARK(BM_InputGrad<Exec::Parallel>) SIZES;
BENCHMARK(BM_ParamGrad<Exec::Serial>) SIZES;
BENCHMARK(BM_ParamGrad<Exec::Parallel>) SIZES;
BENCHMARK(BM_MlpForwardBackward<Exec::Serial>) SIZES;
BENCHMARK(BM_MlpForwardBackward<Exec::Parallel>) SIZES;
BENCHMARK_MAIN();
