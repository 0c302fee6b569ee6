// src/events.cc

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

#include "breathdet/events.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "breathdet/error.h"

namespace breathdet {

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::ofstream open_out(const std::string &path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::CorruptFile, "cannot write " + path);
  return out;
}

std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_double(const std::string &s, const std::string &path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size())
      throw Error(ErrorCode::CorruptFile, "bad number in " + path);
    return v;
  } catch (const Error &) {
    throw;
  } catch (...) {
    throw Error(ErrorCode::CorruptFile, "bad number in " + path);
  }
}

}  // namespace

std::vector<RateEntry> breathing_rates(
    const std::vector<BreathEvent> &events) {
  std::vector<RateEntry> rates;
  for (std::size_t i = 1; i < events.size(); ++i) {
    const double gap = events[i].start_s - events[i - 1].start_s;
    if (gap <= 0.0)
      throw Error(ErrorCode::NonMonotonic,
                  "event starts must strictly increase");
    RateEntry entry;
    entry.event_time_s = events[i].start_s;
    entry.rate_bpm = 60.0 / gap;
    rates.push_back(entry);
  }
  return rates;
}

void screen_outliers(std::vector<RateEntry> *rates, double min_bpm,
                     double max_bpm) {
  for (RateEntry &entry : *rates)
    entry.flagged = entry.rate_bpm < min_bpm || entry.rate_bpm > max_bpm;
}

std::vector<HistogramBin> fixed_histogram(const std::vector<double> &values,
                                          double lo, double hi,
                                          double bin_width) {
  if (!(bin_width > 0.0) || !(hi > lo))
    throw Error(ErrorCode::InvalidArgument, "bad histogram bounds");
  const std::size_t n_bins =
      static_cast<std::size_t>(std::ceil((hi - lo) / bin_width));
  std::vector<HistogramBin> bins(n_bins);
  for (std::size_t i = 0; i < n_bins; ++i) {
    bins[i].lo = lo + i * bin_width;
    bins[i].hi = std::min(lo + (i + 1) * bin_width, hi);
  }
  for (double v : values) {
    std::ptrdiff_t idx =
        static_cast<std::ptrdiff_t>(std::floor((v - lo) / bin_width));
    if (idx < 0) idx = 0;
    if (idx >= static_cast<std::ptrdiff_t>(n_bins)) idx = n_bins - 1;
    ++bins[idx].count;
  }
  return bins;
}

void write_events_csv(const std::vector<BreathEvent> &events,
                      const std::string &path) {
  std::ofstream out = open_out(path);
  out << "event_time_s,end_time_s,duration_s,peak_value,detector\n";
  for (const BreathEvent &e : events)
    out << fmt6(e.start_s) << ',' << fmt6(e.end_s) << ','
        << fmt6(e.duration_s) << ',' << fmt6(e.peak_value) << ','
        << e.detector << '\n';
}

std::vector<BreathEvent> read_events_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::CorruptFile, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::CorruptFile, "empty file: " + path);
  if (line == "event_time_s,end_time_s,duration_s,peak_value,detector\r")
    line.pop_back();
  if (line != "event_time_s,end_time_s,duration_s,peak_value,detector")
    throw Error(ErrorCode::CorruptFile, "unexpected header in " + path);
  std::vector<BreathEvent> events;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 5)
      throw Error(ErrorCode::CorruptFile, "bad row in " + path);
    BreathEvent e;
    e.start_s = parse_double(f[0], path);
    e.end_s = parse_double(f[1], path);
    e.duration_s = parse_double(f[2], path);
    e.peak_value = parse_double(f[3], path);
    e.detector = f[4];
    events.push_back(e);
  }
  return events;
}

void write_rates_csv(const std::vector<RateEntry> &rates,
                     const std::string &path) {
  std::ofstream out = open_out(path);
  out << "event_time_s,rate_bpm,flagged\n";
  for (const RateEntry &r : rates)
    out << fmt6(r.event_time_s) << ',' << fmt6(r.rate_bpm) << ','
        << (r.flagged ? 1 : 0) << '\n';
}

void write_durations_csv(const std::vector<BreathEvent> &events,
                         const std::string &path) {
  std::ofstream out = open_out(path);
  out << "event_time_s,duration_s\n";
  for (const BreathEvent &e : events)
    out << fmt6(e.start_s) << ',' << fmt6(e.duration_s) << '\n';
}

void write_hist_csv(const std::vector<HistogramBin> &bins,
                    const std::string &path) {
  std::ofstream out = open_out(path);
  out << "bin_lo,bin_hi,count\n";
  for (const HistogramBin &b : bins)
    out << fmt6(b.lo) << ',' << fmt6(b.hi) << ',' << b.count << '\n';
}

void write_index_csv(const std::vector<double> &times,
                     const std::vector<double> &scores,
                     const std::string &path) {
  if (times.size() != scores.size())
    throw Error(ErrorCode::DimensionMismatch, "index column length mismatch");
  std::ofstream out = open_out(path);
  out << "time_s,score\n";
  for (std::size_t i = 0; i < times.size(); ++i)
    out << fmt6(times[i]) << ',' << fmt6(scores[i]) << '\n';
}

}  // namespace breathdet
