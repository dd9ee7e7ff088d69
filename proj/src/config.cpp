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
#include "protoseg/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <string_view>

#include "protoseg/errors.hpp"

namespace protoseg {

using nlohmann::json;

namespace {

void require_object(const json& j, std::string_view where) {
  if (!j.is_object()) throw InputError(std::string(where) + ": expected a JSON object");
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed,
                    std::string_view where) {
  require_object(j, where);
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw InputError(std::string(where) + ": unknown key \"" + item.key() + "\"");
    }
  }
}

template <typename T>
void read_if(const json& j, const char* key, T& out, std::string_view where) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string(where) + "." + key + ": " + e.what());
  }
}

}  // namespace

void PipelineConfig::validate() const {
  anchors.validate();
  nms.validate();
  loss_weights.validate();
  if (!(postprocess.mask_threshold >= 0.0 && postprocess.mask_threshold <= 1.0)) {
    throw InputError("postprocess.mask_threshold must lie in [0, 1]");
  }
  if (postprocess.crop_padding < 0) throw InputError("postprocess.crop_padding must be >= 0");
  if (!(display.alpha >= 0.0 && display.alpha <= 1.0)) {
    throw InputError("display.alpha must lie in [0, 1]");
  }
}

NmsKind parse_nms_kind(const std::string& name) {
  if (name == "fast") return NmsKind::kFast;
  if (name == "traditional") return NmsKind::kTraditional;
  throw InputError("unknown NMS kind \"" + name + "\" (fast|traditional)");
}

RescoreMode parse_rescore_mode(const std::string& name) {
  if (name == "off") return RescoreMode::kOff;
  if (name == "oracle") return RescoreMode::kOracle;
  throw InputError("unknown rescore mode \"" + name + "\" (off|oracle)");
}

std::string to_string(NmsKind kind) {
  return kind == NmsKind::kFast ? "fast" : "traditional";
}

std::string to_string(RescoreMode mode) {
  return mode == RescoreMode::kOff ? "off" : "oracle";
}

AnchorConfig anchor_config_from_json(const json& j) {
  constexpr std::string_view where = "anchors";
  reject_unknown(j,
                 {"input_size", "level_strides", "base_scales", "aspect_ratios",
                  "scales_per_level", "variances", "scale_multiplier"},
                 where);
  AnchorConfig cfg;
  read_if(j, "input_size", cfg.input_size, where);
  read_if(j, "level_strides", cfg.level_strides, where);
  read_if(j, "base_scales", cfg.base_scales, where);
  read_if(j, "aspect_ratios", cfg.aspect_ratios, where);
  read_if(j, "scales_per_level", cfg.scales_per_level, where);
  read_if(j, "scale_multiplier", cfg.scale_multiplier, where);
  if (j.contains("variances")) {
    std::vector<double> v;
    read_if(j, "variances", v, where);
    if (v.size() != 2) throw InputError("anchors.variances: expected [center, size]");
    cfg.variances = {v[0], v[1]};
  }
  cfg.validate();
  return cfg;
}

json anchor_config_to_json(const AnchorConfig& cfg) {
  return {{"input_size", cfg.input_size},
          {"level_strides", cfg.level_strides},
          {"base_scales", cfg.base_scales},
          {"aspect_ratios", cfg.aspect_ratios},
          {"scales_per_level", cfg.scales_per_level},
          {"variances", {cfg.variances.center, cfg.variances.size}},
          {"scale_multiplier", cfg.scale_multiplier}};
}

PipelineConfig config_from_json(const json& j) {
  reject_unknown(j, {"anchors", "nms", "loss_weights", "postprocess", "display"}, "config");
  PipelineConfig cfg;
  if (j.contains("anchors")) cfg.anchors = anchor_config_from_json(j["anchors"]);
  if (j.contains("nms")) {
    const json& n = j["nms"];
    reject_unknown(n, {"iou_threshold", "top_n", "pre_score_threshold", "max_total_detections"},
                   "nms");
    read_if(n, "iou_threshold", cfg.nms.iou_threshold, "nms");
    read_if(n, "top_n", cfg.nms.top_n, "nms");
    read_if(n, "pre_score_threshold", cfg.nms.pre_score_threshold, "nms");
    read_if(n, "max_total_detections", cfg.nms.max_total_detections, "nms");
  }
  if (j.contains("loss_weights")) {
    const json& w = j["loss_weights"];
    reject_unknown(w, {"cls", "box", "mask", "sem"}, "loss_weights");
    read_if(w, "cls", cfg.loss_weights.cls, "loss_weights");
    read_if(w, "box", cfg.loss_weights.box, "loss_weights");
    read_if(w, "mask", cfg.loss_weights.mask, "loss_weights");
    read_if(w, "sem", cfg.loss_weights.sem, "loss_weights");
  }
  if (j.contains("postprocess")) {
    const json& p = j["postprocess"];
    reject_unknown(p,
                   {"nms", "rescore", "mask_threshold", "crop_padding",
                    "final_score_threshold", "enforce_relu"},
                   "postprocess");
    std::string name;
    if (p.contains("nms")) {
      read_if(p, "nms", name, "postprocess");
      cfg.postprocess.nms_kind = parse_nms_kind(name);
    }
    if (p.contains("rescore")) {
      read_if(p, "rescore", name, "postprocess");
      cfg.postprocess.rescore = parse_rescore_mode(name);
    }
    read_if(p, "mask_threshold", cfg.postprocess.mask_threshold, "postprocess");
    read_if(p, "crop_padding", cfg.postprocess.crop_padding, "postprocess");
    read_if(p, "final_score_threshold", cfg.postprocess.final_score_threshold, "postprocess");
    read_if(p, "enforce_relu", cfg.postprocess.enforce_relu, "postprocess");
  }
  if (j.contains("display")) {
    const json& d = j["display"];
    reject_unknown(d, {"score_threshold", "alpha"}, "display");
    read_if(d, "score_threshold", cfg.display.score_threshold, "display");
    read_if(d, "alpha", cfg.display.alpha, "display");
  }
  cfg.validate();
  return cfg;
}

json config_to_json(const PipelineConfig& cfg) {
  return {{"anchors", anchor_config_to_json(cfg.anchors)},
          {"nms",
           {{"iou_threshold", cfg.nms.iou_threshold},
            {"top_n", cfg.nms.top_n},
            {"pre_score_threshold", cfg.nms.pre_score_threshold},
            {"max_total_detections", cfg.nms.max_total_detections}}},
          {"loss_weights",
           {{"cls", cfg.loss_weights.cls},
            {"box", cfg.loss_weights.box},
            {"mask", cfg.loss_weights.mask},
            {"sem", cfg.loss_weights.sem}}},
          {"postprocess",
           {{"nms", to_string(cfg.postprocess.nms_kind)},
            {"rescore", to_string(cfg.postprocess.rescore)},
            {"mask_threshold", cfg.postprocess.mask_threshold},
            {"crop_padding", cfg.postprocess.crop_padding},
            {"final_score_threshold", cfg.postprocess.final_score_threshold},
            {"enforce_relu", cfg.postprocess.enforce_relu}}},
          {"display",
           {{"score_threshold", cfg.display.score_threshold},
            {"alpha", cfg.display.alpha}}}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

PipelineConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_json_file(path));
}

}  // namespace protoseg
