// Copyright 2026 The qnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "qnet/cluster.hpp"
#include "qnet/homodyne.hpp"
#include "qnet/resource.hpp"
#include "qnet/secret_sharing.hpp"

namespace {

using namespace qnet;

void BM_PixelCovariance(benchmark::State& state) {
  const auto spec = resource::make_resource(resource::paper_profile(), resource::kPaperDetectionLoss);
  for (auto _ : state) benchmark::DoNotOptimize(resource::build_pixel_covariance(spec));
}
BENCHMARK(BM_PixelCovariance);

void BM_EigenmodeExtract(benchmark::State& state) {
  const auto v = resource::build_pixel_covariance(resource::make_resource(resource::paper_profile()));
  for (auto _ : state) benchmark::DoNotOptimize(eigenmode_extract(v));
}
BENCHMARK(BM_EigenmodeExtract);

void BM_ClusterObjective(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto g = cluster::builtin_graph("diagonal_square", n);
  const auto p = resource::paper_profile();
  const auto o = cluster::OrthogonalFreedom::identity(n);
  for (auto _ : state) benchmark::DoNotOptimize(cluster::cluster_objective(g, p, o.matrix()));
}
BENCHMARK(BM_ClusterObjective)->Arg(4)->Arg(8)->Arg(12);

void BM_Optimize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto g = cluster::builtin_graph("diagonal_square", n);
  const auto p = resource::paper_profile();
  cluster::OptimizerConfig config;
  config.max_evals = 4000;
  config.restarts = 0;
  for (auto _ : state) benchmark::DoNotOptimize(cluster::optimize_orthogonal(g, p, config).objective);
}
BENCHMARK(BM_Optimize)->Arg(4)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_PhaseSweep(benchmark::State& state) {
  const auto spec = resource::make_resource(resource::paper_profile(), resource::kPaperDetectionLoss);
  const auto v = resource::build_pixel_covariance(spec);
  const auto g = cluster::builtin_graph("linear", 4);
  const auto lo = cluster::nullifier_lo(g, homodyne::network_lo_unitary(cluster::cluster_unitary(g), spec), 0);
  const auto grid = homodyne::theta_grid();
  for (auto _ : state) benchmark::DoNotOptimize(homodyne::phase_sweep(v, lo.lo, grid));
}
BENCHMARK(BM_PhaseSweep);

void BM_ProtocolRun(benchmark::State& state) {
  const auto net = sharing::default_network();
  const auto p = resource::paper_profile();
  for (auto _ : state) benchmark::DoNotOptimize(sharing::protocol_run(net, p));
}
BENCHMARK(BM_ProtocolRun);

}  // namespace

BENCHMARK_MAIN();
