// Copyright 2026 The qrcsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <vector>

#include "qrc/fock.hpp"
#include "qrc/learn.hpp"
#include "qrc/tasks.hpp"

namespace {

using namespace qrc;

// Euler-Maruyama STEOM step on a K-node Task I chain.
void BM_StepperStep(benchmark::State& st) {
  TaskISpec spec;
  spec.qrc.K = static_cast<std::size_t>(st.range(0));
  const Model model(build_task1_chain(spec, 1, sample_random_qrc(spec.qrc)));
  Stepper s(model, true);
  s.set_state(vacuum(model.n_modes()));
  std::vector<double> dW(2 * model.n_channels());
  const NoiseStream noise(1, 0);
  std::uint64_t k = 0;
  for (auto _ : st) {
    noise.increments(k++, model.n_channels(), 1e-3, dW.data());
    s.step(1e-3, dW.data());
    benchmark::DoNotOptimize(s.doubled_mean().data());
  }
  st.counters["modes"] = static_cast<double>(model.n_modes());
}
BENCHMARK(BM_StepperStep)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

// Deterministic drift evaluation alone.
void BM_Drift(benchmark::State& st) {
  TaskISpec spec;
  spec.qrc.K = static_cast<std::size_t>(st.range(0));
  const Model model(build_task1_chain(spec, 2, sample_random_qrc(spec.qrc)));
  CumulantState s = vacuum(model.n_modes());
  for (Eigen::Index i = 0; i < s.mu.size(); ++i) s.mu(i) = cplx(0.3, -0.1 * static_cast<double>(i));
  const CVec m = doubled_mean(s);
  const CMat c = doubled_cumulants(s);
  CVec dm(m.size());
  CMat dc(c.rows(), c.cols() / 2);
  for (auto _ : st) {
    model.drift_doubled(m, c, dm, dc);
    benchmark::DoNotOptimize(dm.data());
  }
}
BENCHMARK(BM_Drift)->Arg(2)->Arg(8);

// One heterodyne SME step of the two-mode Fock reference at cutoff n.
void BM_FockStep(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const FockModel fm(build_benchmark_chain(), {n, n});
  RhoMat rho = fm.vacuum();
  std::vector<double> dW(2 * fm.chain().channels.size());
  const NoiseStream noise(1, 0);
  std::uint64_t k = 0;
  for (auto _ : st) {
    noise.increments(k++, fm.chain().channels.size(), 1e-3, dW.data());
    fm.step(rho, 1e-3, dW.data());
    benchmark::DoNotOptimize(rho.data());
  }
  st.counters["dim"] = static_cast<double>(fm.dim());
}
BENCHMARK(BM_FockStep)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

// Softmax readout training on a synthetic two-blob dataset.
void BM_Train(benchmark::State& st) {
  Dataset d;
  d.n_classes = 2;
  const Eigen::Index n = 400;
  d.X.resize(2, n);
  const NoiseStream noise(9, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int label = i % 2 + 1;
    d.X(0, i) = (label == 1 ? -1.0 : 1.0) + noise.normal(static_cast<std::uint64_t>(i), 0, 0);
    d.X(1, i) = noise.normal(static_cast<std::uint64_t>(i), 0, 1);
    d.labels.push_back(label);
    d.q.push_back(static_cast<int>(i));
    d.t.push_back(0.0);
  }
  for (auto _ : st) benchmark::DoNotOptimize(train(d).loss);
}
BENCHMARK(BM_Train)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
