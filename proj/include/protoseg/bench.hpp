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
#ifndef PROTOSEG_BENCH_HPP_
#define PROTOSEG_BENCH_HPP_

#include <cstdint>

#include "protoseg/nms.hpp"

namespace protoseg {

struct NmsBenchReport {
  int n = 0;
  int classes = 0;
  int repeats = 0;
  std::uint64_t seed = 0;
  double fast_median_ms = 0;
  double traditional_median_ms = 0;
  // traditional_median_ms / fast_median_ms
  double speedup = 0;
  // Pooled Jaccard index of the kept sets: sum |F & T| / sum |F | T|.
  double agreement = 0;
  std::size_t fast_kept = 0;
  std::size_t traditional_kept = 0;
};

// n boxes scattered in clusters over a 550 px image, shared by all classes,
// with independent uniform scores per class. Deterministic for a seed.
ClasswiseDetections make_clustered_detections(int n, int classes,
                                              std::uint64_t seed,
                                              double pre_score_threshold);

double kept_set_jaccard(const KeptPerClass& a, const KeptPerClass& b);

// Times both NMS variants on one seeded problem. n must be in [1, 10000].
NmsBenchReport bench_nms(int n, int classes, int repeats, std::uint64_t seed,
                         double iou_threshold = 0.5);

}  // namespace protoseg

#endif  // PROTOSEG_BENCH_HPP_
