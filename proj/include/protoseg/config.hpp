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
#ifndef PROTOSEG_CONFIG_HPP_
#define PROTOSEG_CONFIG_HPP_

#include <filesystem>
#include <string>

#include "json.hpp"
#include "protoseg/geometry.hpp"
#include "protoseg/losses.hpp"
#include "protoseg/nms.hpp"

namespace protoseg {

enum class RescoreMode { kOff, kOracle };

struct PostprocessOptions {
  NmsKind nms_kind = NmsKind::kFast;
  RescoreMode rescore = RescoreMode::kOff;
  double mask_threshold = 0.5;
  int crop_padding = 1;
  // Optional second confidence cut applied after NMS; 0 keeps everything.
  double final_score_threshold = 0.0;
  bool enforce_relu = false;
};

struct DisplayOptions {
  double score_threshold = 0.3;
  double alpha = 0.45;
};

// Everything a run needs. The JSON form has the sections "anchors", "nms",
// "loss_weights", "postprocess" and "display"; unknown keys are rejected.
struct PipelineConfig {
  AnchorConfig anchors;
  NmsConfig nms;
  LossWeights loss_weights;
  PostprocessOptions postprocess;
  DisplayOptions display;

  void validate() const;
};

NmsKind parse_nms_kind(const std::string& name);
RescoreMode parse_rescore_mode(const std::string& name);
std::string to_string(NmsKind kind);
std::string to_string(RescoreMode mode);

// Strict parsers: any key not listed in the schema raises InputError.
AnchorConfig anchor_config_from_json(const nlohmann::json& j);
nlohmann::json anchor_config_to_json(const AnchorConfig& cfg);
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& cfg);
PipelineConfig load_config(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace protoseg

#endif  // PROTOSEG_CONFIG_HPP_
