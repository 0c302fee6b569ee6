// bench/bench_kernels.cc

// Copyright 2025  breathdet contributors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial vs parallel timing for the three hot kernels. The parallel
// variants must match the serial ones bitwise; these benchmarks report the
// speedup actually bought by the extra threads.

#include <benchmark/benchmark.h>

#include <vector>

#include "breathdet/breath_template.h"
#include "breathdet/cepstral.h"
#include "breathdet/config.h"
#include "breathdet/pattern.h"
#include "breathdet/svm.h"
#include "breathdet/synth.h"
#include "breathdet/types.h"

namespace {

using namespace breathdet;

AudioBuffer bench_scene(double dur_s) {
  SceneScript script;
  script.duration_s = dur_s;
  script.seed = 42;
  double t = 0.5;
  while (t + 1.0 <= dur_s - 0.5) {
    SceneSegment seg;
    seg.kind = "inhale";
    seg.start_s = t;
    seg.duration_s = 1.0;
    seg.level = 0.3;
    script.segments.push_back(seg);
    t += 3.0;
  }
  return render_scene(script).audio;
}

BreathTemplate bench_template(const ToolConfig &cfg) {
  std::vector<AudioBuffer> exemplars;
  for (int i = 0; i < 4; ++i) {
    SceneSegment seg;
    seg.kind = "inhale";
    seg.duration_s = 1.0;
    seg.level = 0.3;
    Rng rng(900 + i);
    AudioBuffer ex;
    ex.samples = gen_inhale(seg, cfg.frontend.sample_rate, &rng);
    ex.sample_rate = cfg.frontend.sample_rate;
    exemplars.push_back(ex);
  }
  return build_template(exemplars, cfg.frontend, cfg.mel,
                        cfg.pattern.target_subframes);
}

void BM_cepstrogram(benchmark::State &state) {
  const ToolConfig cfg;
  const AudioBuffer buf = bench_scene(30.0);
  const Exec exec = state.range(0) ? Exec::parallel : Exec::serial;
  for (auto _ : state) {
    Cepstrogram c = compute_cepstrogram(buf, cfg.frontend, cfg.mel, exec);
    benchmark::DoNotOptimize(c.m.data.data());
  }
}
BENCHMARK(BM_cepstrogram)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_breath_index_track(benchmark::State &state) {
  const ToolConfig cfg;
  const AudioBuffer buf = bench_scene(30.0);
  const BreathTemplate tmpl = bench_template(cfg);
  const Cepstrogram c =
      compute_cepstrogram(buf, cfg.frontend, cfg.mel, Exec::parallel);
  const Exec exec = state.range(0) ? Exec::parallel : Exec::serial;
  for (auto _ : state) {
    IndexSeries series = breath_index_track(c, tmpl, true, exec);
    benchmark::DoNotOptimize(series.values.data());
  }
}
BENCHMARK(BM_breath_index_track)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_kernel_matrix(benchmark::State &state) {
  Rng rng(7);
  Matrix a(600, 15), b(600, 15);
  for (double &v : a.data) v = rng.gauss();
  for (double &v : b.data) v = rng.gauss();
  const Exec exec = state.range(0) ? Exec::parallel : Exec::serial;
  for (auto _ : state) {
    Matrix k = kernel_matrix(a, b, 0.6, 3, exec);
    benchmark::DoNotOptimize(k.data.data());
  }
}
BENCHMARK(BM_kernel_matrix)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
