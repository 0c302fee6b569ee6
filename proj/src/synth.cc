// src/synth.cc

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

#include "breathdet/synth.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "breathdet/error.h"
#include "json.hpp"

namespace breathdet {

using nlohmann::json;

std::uint64_t Rng::next_u64() {
  // splitmix64: passes BigCrush, two multiplies per draw, trivially portable.
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::gauss() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = std::max(uniform(), 1e-300);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(th);
  have_spare_ = true;
  return r * std::cos(th);
}

namespace {

struct Biquad {
  double b0, b1, b2, a1, a2;
};

enum class FilterKind { lowpass, highpass, bandpass };

// RBJ audio-EQ cookbook coefficients.
Biquad design_biquad(FilterKind kind, double fc, double q, int rate) {
  const double w0 = 2.0 * std::numbers::pi * fc / rate;
  const double cw = std::cos(w0);
  const double sw = std::sin(w0);
  const double al = sw / (2.0 * q);
  double b0, b1, b2;
  switch (kind) {
    case FilterKind::lowpass:
      b0 = (1.0 - cw) / 2.0;
      b1 = 1.0 - cw;
      b2 = (1.0 - cw) / 2.0;
      break;
    case FilterKind::highpass:
      b0 = (1.0 + cw) / 2.0;
      b1 = -(1.0 + cw);
      b2 = (1.0 + cw) / 2.0;
      break;
    default:
      b0 = al;
      b1 = 0.0;
      b2 = -al;
      break;
  }
  const double a0 = 1.0 + al;
  return {b0 / a0, b1 / a0, b2 / a0, -2.0 * cw / a0, (1.0 - al) / a0};
}

// Direct form I, zero initial state per call.
std::vector<double> filt(const Biquad &f, const std::vector<double> &x) {
  std::vector<double> y(x.size());
  double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = f.b0 * x[i] + f.b1 * x1 + f.b2 * x2 - f.a1 * y1 - f.a2 * y2;
    x2 = x1;
    x1 = x[i];
    y2 = y1;
    y1 = y[i];
  }
  return y;
}

std::vector<double> gauss_vec(Rng *rng, std::size_t n) {
  std::vector<double> out(n);
  for (double &v : out) v = rng->gauss();
  return out;
}

// Raised-cosine fades on the first `attack` and last `release` samples,
// each capped at half the segment.
void apply_rcenv(std::vector<double> *x, std::size_t attack,
                 std::size_t release) {
  const std::size_t n = x->size();
  const std::size_t a = std::min(attack, n / 2);
  const std::size_t r = std::min(release, n / 2);
  for (std::size_t i = 0; i < a; ++i)
    (*x)[i] *= 0.5 * (1.0 - std::cos(std::numbers::pi * i / a));
  for (std::size_t i = 0; i < r; ++i)
    (*x)[n - r + i] *=
        0.5 * (1.0 - std::cos(std::numbers::pi * (r - i) / r));
}

double rms_of(const std::vector<double> &x, std::size_t lo, std::size_t hi) {
  if (hi <= lo) return 0.0;
  double acc = 0.0;
  for (std::size_t i = lo; i < hi; ++i) acc += x[i] * x[i];
  return std::sqrt(acc / static_cast<double>(hi - lo));
}

std::size_t seg_samples(double dur_s, int rate) {
  return static_cast<std::size_t>(std::llround(dur_s * rate));
}

std::vector<double> render_inhale(const SceneSegment &seg, double dur_s,
                                  int rate, Rng *rng) {
  const std::size_t n = seg_samples(dur_s, rate);
  std::vector<double> x = gauss_vec(rng, n);
  x = filt(design_biquad(FilterKind::highpass, seg.band_lo_hz, 0.707, rate),
           x);
  x = filt(design_biquad(FilterKind::lowpass, seg.band_hi_hz, 0.707, rate),
           x);
  if (seg.res_hz > 0.0) {
    const std::vector<double> res = filt(
        design_biquad(FilterKind::bandpass, seg.res_hz, seg.res_q, rate), x);
    for (std::size_t i = 0; i < n; ++i) x[i] += seg.res_mix * res[i];
  }
  const std::size_t fade =
      static_cast<std::size_t>(seg.attack_ms / 1000.0 * rate);
  apply_rcenv(&x, fade, fade);
  // Level targets the central 80 percent so the fades do not bias it.
  const double r = rms_of(x, static_cast<std::size_t>(0.1 * n),
                          static_cast<std::size_t>(0.9 * n));
  if (r > 0.0)
    for (double &v : x) v *= seg.level / r;
  if (seg.click_level > 0.0) {
    // Two valve clicks close to the end of the draw.
    const std::size_t m = static_cast<std::size_t>(0.002 * rate);
    const double tau = 0.0005 * rate;
    for (double t0 : {dur_s - 0.040, dur_s - 0.015}) {
      const long long i0 = static_cast<long long>(t0 * rate);
      if (i0 >= 0 && static_cast<std::size_t>(i0) + m <= n)
        for (std::size_t i = 0; i < m; ++i)
          x[i0 + i] += seg.click_level * seg.level * rng->gauss() *
                       std::exp(-static_cast<double>(i) / tau);
    }
  }
  return x;
}

}  // namespace

std::vector<double> gen_inhale(const SceneSegment &seg, int rate, Rng *rng) {
  if (seg.onset_trim_s <= 0.0)
    return render_inhale(seg, seg.duration_s, rate, rng);
  // Steady-state cut: synthesize past the requested span, drop the attack.
  const std::vector<double> full =
      render_inhale(seg, seg.onset_trim_s + seg.duration_s + 0.1, rate, rng);
  const std::size_t i0 = seg_samples(seg.onset_trim_s, rate);
  const std::size_t want = seg_samples(seg.duration_s, rate);
  std::vector<double> out(want, 0.0);
  for (std::size_t i = 0; i < want && i0 + i < full.size(); ++i)
    out[i] = full[i0 + i];
  return out;
}

std::vector<double> gen_exhale(const SceneSegment &seg, int rate, Rng *rng) {
  const std::size_t n = seg_samples(seg.duration_s, rate);
  std::vector<double> x =
      filt(design_biquad(FilterKind::lowpass, 800.0, 0.707, rate),
           gauss_vec(rng, n));
  apply_rcenv(&x, static_cast<std::size_t>(0.05 * rate),
              static_cast<std::size_t>(0.05 * rate));
  const double r = rms_of(x, 0, n);
  if (r > 0.0)
    for (double &v : x) v *= seg.level / r;
  return x;
}

std::vector<double> gen_speech_proxy(const SceneSegment &seg, int rate,
                                     Rng *rng) {
  const std::size_t n = seg_samples(seg.duration_s, rate);
  std::vector<double> x(n, 0.0);
  const Biquad f1 = design_biquad(FilterKind::bandpass, 700.0, 5.0, rate);
  const Biquad f2 = design_biquad(FilterKind::bandpass, 1200.0, 5.0, rate);
  const Biquad fh = design_biquad(FilterKind::highpass, 2000.0, 0.707, rate);
  std::size_t i = 0;
  bool voiced = true;
  while (i < n) {
    std::vector<double> piece;
    std::size_t m;
    if (voiced) {
      // Sawtooth through two formant-like resonators.
      m = std::min(static_cast<std::size_t>((0.2 + 0.2 * rng->uniform()) *
                                            rate),
                   n - i);
      std::vector<double> saw(m);
      for (std::size_t k = 0; k < m; ++k) {
        const double t = static_cast<double>(k) / rate;
        saw[k] = 2.0 * std::fmod(120.0 * t, 1.0) - 1.0;
      }
      const std::vector<double> v1 = filt(f1, saw);
      const std::vector<double> v2 = filt(f2, saw);
      piece.resize(m);
      for (std::size_t k = 0; k < m; ++k) piece[k] = v1[k] + v2[k];
    } else {
      // Unvoiced burst: high-passed noise.
      m = std::min(static_cast<std::size_t>((0.05 + 0.10 * rng->uniform()) *
                                            rate),
                   n - i);
      piece = filt(fh, gauss_vec(rng, m));
    }
    apply_rcenv(&piece, static_cast<std::size_t>(0.01 * rate),
                static_cast<std::size_t>(0.01 * rate));
    const double r = rms_of(piece, 0, piece.size());
    if (r > 0.0)
      for (double &v : piece) v *= seg.level / r;
    for (std::size_t k = 0; k < m; ++k) x[i + k] = piece[k];
    i += m;
    voiced = !voiced;
  }
  return x;
}

std::vector<double> gen_alarm(const SceneSegment &seg, int rate, Rng *rng) {
  const std::size_t n = seg_samples(seg.duration_s, rate);
  std::vector<double> x(n, 0.0);
  const double period = rate / 28.0;  // low-pressure bell strike rate
  const std::size_t m = static_cast<std::size_t>(0.002 * rate);
  const double tau = 0.0004 * rate;
  double t = 0.0;
  while (static_cast<std::size_t>(t) + m <= n) {
    const std::size_t i0 = static_cast<std::size_t>(t);
    for (std::size_t i = 0; i < m; ++i)
      x[i0 + i] += rng->gauss() * std::exp(-static_cast<double>(i) / tau);
    t += period;
  }
  const double r = rms_of(x, 0, n);
  if (r > 0.0)
    for (double &v : x) v *= seg.level / r;
  return x;
}

RenderedScene render_scene(const SceneScript &script) {
  if (script.duration_s <= 0.0 || script.sample_rate <= 0)
    throw Error(ErrorCode::InvalidArgument, "scene needs positive extent");
  const int rate = script.sample_rate;
  const std::size_t n = seg_samples(script.duration_s, rate);

  // Silence is declarative gap only; alarm_overlay may cover anything else.
  std::vector<std::pair<double, double>> occupied;
  for (const SceneSegment &seg : script.segments) {
    if (seg.kind == "alarm_overlay" || seg.kind == "silence") continue;
    occupied.emplace_back(seg.start_s, seg.start_s + seg.duration_s);
  }
  std::sort(occupied.begin(), occupied.end());
  for (std::size_t i = 1; i < occupied.size(); ++i)
    if (occupied[i].first < occupied[i - 1].second)
      throw Error(ErrorCode::OverlapError,
                  "segments overlap near " +
                      std::to_string(occupied[i].first) + " s");

  RenderedScene scene;
  scene.audio.samples.assign(n, 0.0);
  scene.audio.sample_rate = rate;

  for (std::size_t idx = 0; idx < script.segments.size(); ++idx) {
    const SceneSegment &seg = script.segments[idx];
    if (seg.duration_s <= 0.0 || seg.start_s < 0.0)
      throw Error(ErrorCode::InvalidArgument, "bad segment extent");
    Rng rng(script.seed * 1000003ULL + idx);
    std::vector<double> piece;
    if (seg.kind == "inhale") {
      piece = gen_inhale(seg, rate, &rng);
      scene.truth.starts.push_back(seg.start_s);
      scene.truth.ends.push_back(seg.start_s + seg.duration_s);
    } else if (seg.kind == "exhale_pause") {
      piece = gen_exhale(seg, rate, &rng);
    } else if (seg.kind == "speech_proxy") {
      piece = gen_speech_proxy(seg, rate, &rng);
    } else if (seg.kind == "alarm_overlay") {
      piece = gen_alarm(seg, rate, &rng);
    } else if (seg.kind == "silence") {
      continue;
    } else {
      throw Error(ErrorCode::InvalidArgument,
                  "unknown segment kind: " + seg.kind);
    }
    const std::size_t i0 = static_cast<std::size_t>(seg.start_s * rate);
    const std::size_t m = std::min(piece.size(), i0 < n ? n - i0 : 0);
    for (std::size_t i = 0; i < m; ++i)
      scene.audio.samples[i0 + i] += piece[i];
  }

  double pk = 0.0;
  for (double v : scene.audio.samples) pk = std::max(pk, std::fabs(v));
  if (pk > 1.0) {
    scene.scale = 0.99 / pk;
    for (double &v : scene.audio.samples) v *= scene.scale;
  }
  return scene;
}

namespace {

void check_script_keys(const json &j, const std::vector<std::string> &known,
                       const std::string &where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw Error(ErrorCode::InvalidArgument,
                  "unknown key \"" + it.key() + "\" in " + where);
}

}  // namespace

SceneScript load_scene_script(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::CorruptFile, "cannot open " + path);
  SceneScript script;
  try {
    json j = json::parse(in);
    check_script_keys(j, {"duration_s", "rate", "seed", "segments"},
                      "scene script");
    if (j.contains("rate")) script.sample_rate = j.at("rate").get<int>();
    if (j.contains("seed")) script.seed = j.at("seed").get<std::uint64_t>();
    for (const json &s : j.at("segments")) {
      check_script_keys(s,
                        {"kind", "start_s", "dur_s", "level", "band_lo_hz",
                         "band_hi_hz", "res_hz", "res_q", "res_mix",
                         "attack_ms", "click_level", "onset_trim_s"},
                        "segment");
      SceneSegment seg;
      seg.kind = s.at("kind").get<std::string>();
      seg.start_s = s.at("start_s").get<double>();
      seg.duration_s = s.at("dur_s").get<double>();
      if (s.contains("level")) seg.level = s.at("level").get<double>();
      if (s.contains("band_lo_hz"))
        seg.band_lo_hz = s.at("band_lo_hz").get<double>();
      if (s.contains("band_hi_hz"))
        seg.band_hi_hz = s.at("band_hi_hz").get<double>();
      if (s.contains("res_hz")) seg.res_hz = s.at("res_hz").get<double>();
      if (s.contains("res_q")) seg.res_q = s.at("res_q").get<double>();
      if (s.contains("res_mix")) seg.res_mix = s.at("res_mix").get<double>();
      if (s.contains("attack_ms"))
        seg.attack_ms = s.at("attack_ms").get<double>();
      if (s.contains("click_level"))
        seg.click_level = s.at("click_level").get<double>();
      if (s.contains("onset_trim_s"))
        seg.onset_trim_s = s.at("onset_trim_s").get<double>();
      script.segments.push_back(seg);
    }
    if (j.contains("duration_s")) {
      script.duration_s = j.at("duration_s").get<double>();
    } else {
      // Scene extent defaults to the furthest scripted segment end.
      for (const SceneSegment &seg : script.segments)
        script.duration_s =
            std::max(script.duration_s, seg.start_s + seg.duration_s);
    }
  } catch (const Error &) {
    throw;
  } catch (const json::exception &e) {
    throw Error(ErrorCode::CorruptFile,
                std::string("scene script parse failure: ") + e.what());
  }
  return script;
}

void save_ground_truth(const std::string &path, const GroundTruth &truth) {
  json inhales = json::array();
  for (std::size_t i = 0; i < truth.starts.size(); ++i)
    inhales.push_back(
        json{{"start_s", truth.starts[i]}, {"end_s", truth.ends[i]}});
  json j{{"version", "gt1"}, {"inhales", inhales}};
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::CorruptFile, "cannot write " + path);
  out << j.dump(2) << "\n";
}

GroundTruth load_ground_truth(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::CorruptFile, "cannot open " + path);
  GroundTruth truth;
  try {
    json j = json::parse(in);
    if (j.at("version").get<std::string>() != "gt1")
      throw Error(ErrorCode::CorruptFile, "not a gt1 file: " + path);
    for (const json &iv : j.at("inhales")) {
      truth.starts.push_back(iv.at("start_s").get<double>());
      truth.ends.push_back(iv.at("end_s").get<double>());
    }
  } catch (const Error &) {
    throw;
  } catch (const json::exception &e) {
    throw Error(ErrorCode::CorruptFile,
                std::string("ground truth parse failure: ") + e.what());
  }
  return truth;
}

}  // namespace breathdet
