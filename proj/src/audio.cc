// src/audio.cc

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

#include "breathdet/audio.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "breathdet/error.h"

namespace breathdet {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

std::uint32_t read_u32(const unsigned char *p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char *p) {
  return static_cast<std::uint16_t>(p[0] |
                                    (static_cast<std::uint16_t>(p[1]) << 8));
}

void write_u32(std::ofstream &out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char *>(b), 4);
}

void write_u16(std::ofstream &out, std::uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff)};
  out.write(reinterpret_cast<const char *>(b), 2);
}

}  // namespace

AudioBuffer load_wav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::CorruptHeader, "cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw Error(ErrorCode::CorruptHeader, "not a RIFF/WAVE file: " + path);

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char *data = nullptr;
  std::size_t data_len = 0;
  bool have_fmt = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char *hdr = bytes.data() + pos;
    std::uint32_t chunk_len = read_u32(hdr + 4);
    std::size_t body = pos + 8;
    if (body + chunk_len > bytes.size())
      throw Error(ErrorCode::CorruptHeader, "truncated chunk in " + path);
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (chunk_len < 16)
        throw Error(ErrorCode::CorruptHeader, "short fmt chunk in " + path);
      format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = bytes.data() + body;
      data_len = chunk_len;
    }
    pos = body + chunk_len + (chunk_len & 1);  // chunks are word aligned
  }
  if (!have_fmt || data == nullptr)
    throw Error(ErrorCode::CorruptHeader, "missing fmt/data chunk in " + path);
  if (rate == 0) throw Error(ErrorCode::CorruptHeader, "zero sample rate");
  if (channels < 1 || channels > 2)
    throw Error(ErrorCode::UnsupportedFormat,
                "unsupported channel count " + std::to_string(channels));
  if (!((format == kFormatPcm && bits == 16) ||
        (format == kFormatFloat && bits == 32)))
    throw Error(ErrorCode::UnsupportedFormat,
                "only PCM16 and float32 WAV are supported");

  std::size_t bytes_per_sample = bits / 8;
  std::size_t frame_bytes = bytes_per_sample * channels;
  std::size_t num_frames = data_len / frame_bytes;
  if (num_frames == 0) throw Error(ErrorCode::EmptyAudio, "no samples");

  AudioBuffer buf;
  buf.sample_rate = static_cast<int>(rate);
  buf.samples.resize(num_frames);
  for (std::size_t i = 0; i < num_frames; ++i) {
    double acc = 0.0;
    for (std::uint16_t c = 0; c < channels; ++c) {
      const unsigned char *p = data + i * frame_bytes + c * bytes_per_sample;
      if (format == kFormatPcm) {
        std::int16_t v = static_cast<std::int16_t>(read_u16(p));
        acc += v / 32768.0;
      } else {
        float f;
        std::memcpy(&f, p, 4);
        acc += f;
      }
    }
    buf.samples[i] = acc / channels;
  }
  return buf;
}

void save_wav_pcm16(const AudioBuffer &buf, const std::string &path) {
  if (buf.sample_rate <= 0)
    throw Error(ErrorCode::InvalidArgument, "buffer has no sample rate");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::CorruptFile, "cannot write " + path);
  std::uint32_t data_len = static_cast<std::uint32_t>(buf.samples.size() * 2);
  out.write("RIFF", 4);
  write_u32(out, 36 + data_len);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32(out, 16);
  write_u16(out, kFormatPcm);
  write_u16(out, 1);
  write_u32(out, static_cast<std::uint32_t>(buf.sample_rate));
  write_u32(out, static_cast<std::uint32_t>(buf.sample_rate) * 2);
  write_u16(out, 2);
  write_u16(out, 16);
  out.write("data", 4);
  write_u32(out, data_len);
  for (double s : buf.samples) {
    long v = std::lround(s * 32768.0);
    v = std::clamp(v, -32768L, 32767L);
    write_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
}

AudioBuffer resample(const AudioBuffer &buf, int target_rate) {
  if (target_rate <= 0)
    throw Error(ErrorCode::InvalidArgument, "target rate must be positive");
  if (buf.sample_rate <= 0)
    throw Error(ErrorCode::InvalidArgument, "buffer has no sample rate");
  if (target_rate == buf.sample_rate) return buf;

  const double ratio = static_cast<double>(target_rate) / buf.sample_rate;
  const std::size_t out_len = static_cast<std::size_t>(
      std::llround(buf.samples.size() * ratio));
  AudioBuffer out;
  out.sample_rate = target_rate;
  out.samples.resize(out_len, 0.0);

  // Kernel cutoff shrinks when downsampling so aliases stay attenuated.
  const double cutoff = std::min(1.0, ratio);
  const int zero_crossings = 32;
  const double half_width = zero_crossings / cutoff;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(buf.samples.size());

  for (std::size_t i = 0; i < out_len; ++i) {
    const double center = i / ratio;
    std::ptrdiff_t lo = static_cast<std::ptrdiff_t>(
        std::ceil(center - half_width));
    std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(
        std::floor(center + half_width));
    lo = std::max<std::ptrdiff_t>(lo, 0);
    hi = std::min(hi, n - 1);
    double acc = 0.0;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      const double d = center - j;
      double s;
      if (std::abs(d) < 1e-12) {
        s = cutoff;
      } else {
        const double a = M_PI * cutoff * d;
        s = cutoff * std::sin(a) / a;
      }
      const double w = 0.5 * (1.0 + std::cos(M_PI * d / half_width));
      acc += buf.samples[j] * s * w;
    }
    out.samples[i] = acc;
  }
  return out;
}

void peak_normalize(AudioBuffer *buf, double peak) {
  double mx = 0.0;
  for (double s : buf->samples) mx = std::max(mx, std::abs(s));
  if (mx <= 0.0) return;
  const double g = peak / mx;
  for (double &s : buf->samples) s *= g;
}

}  // namespace breathdet
