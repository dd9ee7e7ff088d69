/* Copyright 2026 The Protoseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "protoseg/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <set>

#include "protoseg/errors.hpp"
#include "protoseg/numerics.hpp"

namespace protoseg {
namespace {

constexpr double kImageSide = 550.0;
constexpr int kBoxesPerCluster = 4;

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

ClasswiseDetections make_clustered_detections(int n, int classes,
                                              std::uint64_t seed,
                                              double pre_score_threshold) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, 1.0);

  const int clusters = std::max(1, n / kBoxesPerCluster);
  std::vector<CenterBox> centers(clusters);
  for (auto& c : centers) {
    c.w = 16.0 + 80.0 * unit(rng);
    c.h = 16.0 + 80.0 * unit(rng);
    c.cx = c.w / 2 + (kImageSide - c.w) * unit(rng);
    c.cy = c.h / 2 + (kImageSide - c.h) * unit(rng);
  }
  std::vector<Box> boxes(n);
  for (int i = 0; i < n; ++i) {
    const CenterBox& c = centers[static_cast<std::size_t>(i) % clusters];
    // Redraw boxes that land (almost) entirely outside the image.
    do {
      CenterBox b;
      b.cx = c.cx + 0.8 * c.w * jitter(rng);
      b.cy = c.cy + 0.8 * c.h * jitter(rng);
      b.w = c.w * std::exp(0.2 * jitter(rng));
      b.h = c.h * std::exp(0.2 * jitter(rng));
      boxes[i] = clamp_box(Box::from_center(b), kImageSide, kImageSide);
    } while (boxes[i].width() < 1.0 || boxes[i].height() < 1.0);
  }

  ClasswiseDetections dets(classes);
  std::vector<double> scores(n);
  for (int c = 0; c < classes; ++c) {
    for (double& s : scores) s = unit(rng);
    auto& cand = dets[c];
    cand.class_id = c + 1;
    for (std::size_t i : argsort_desc(scores)) {
      if (scores[i] <= pre_score_threshold) break;
      cand.indices.push_back(i);
      cand.scores.push_back(scores[i]);
      cand.boxes.push_back(boxes[i]);
    }
  }
  return dets;
}

double kept_set_jaccard(const KeptPerClass& a, const KeptPerClass& b) {
  if (a.size() != b.size()) throw DimensionError("kept_set_jaccard: class count differs");
  std::size_t inter = 0, uni = 0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    std::set<std::size_t> sa(a[c].begin(), a[c].end());
    std::set<std::size_t> sb(b[c].begin(), b[c].end());
    for (std::size_t v : sa) inter += sb.count(v);
    uni += sa.size() + sb.size();
  }
  uni -= inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

NmsBenchReport bench_nms(int n, int classes, int repeats, std::uint64_t seed,
                         double iou_threshold) {
  if (n < 1 || n > 10000) throw InputError("bench_nms: n must lie in [1, 10000]");
  if (classes < 1 || repeats < 1) {
    throw InputError("bench_nms: classes and repeats must be >= 1");
  }
  NmsConfig cfg;
  cfg.iou_threshold = iou_threshold;
  cfg.top_n = n;
  const auto dets = make_clustered_detections(n, classes, seed, cfg.pre_score_threshold);

  using Clock = std::chrono::steady_clock;
  auto time_ms = [&](NmsKind kind, KeptPerClass& result) {
    const auto start = Clock::now();
    result = run_nms(dets, cfg, kind);
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  };

  KeptPerClass fast, traditional;
  std::vector<double> fast_ms, traditional_ms;
  for (int r = 0; r < repeats; ++r) {
    // Alternate the order so neither variant always runs on a warm cache.
    if (r % 2 == 0) {
      fast_ms.push_back(time_ms(NmsKind::kFast, fast));
      traditional_ms.push_back(time_ms(NmsKind::kTraditional, traditional));
    } else {
      traditional_ms.push_back(time_ms(NmsKind::kTraditional, traditional));
      fast_ms.push_back(time_ms(NmsKind::kFast, fast));
    }
  }

  NmsBenchReport report;
  report.n = n;
  report.classes = classes;
  report.repeats = repeats;
  report.seed = seed;
  report.fast_median_ms = median(fast_ms);
  report.traditional_median_ms = median(traditional_ms);
  report.speedup = report.fast_median_ms > 0
                       ? report.traditional_median_ms / report.fast_median_ms
                       : 0.0;
  report.agreement = kept_set_jaccard(fast, traditional);
  for (const auto& k : fast) report.fast_kept += k.size();
  for (const auto& k : traditional) report.traditional_kept += k.size();
  return report;
}

}  // namespace protoseg
