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
#include "protoseg/dataset_io.hpp"

#include <fstream>
#include <sstream>

#include "protoseg/config.hpp"
#include "protoseg/errors.hpp"

namespace protoseg {

using nlohmann::json;

namespace {

template <typename T>
T field(const json& j, const char* key, const char* where) {
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(std::string(where) + ": missing \"" + key + "\"");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string(where) + "." + key + ": " + e.what());
  }
}

Box box_from_xywh(const std::vector<double>& v, const char* where) {
  if (v.size() != 4 || v[2] < 0 || v[3] < 0) {
    throw FormatError(std::string(where) + ": bbox must be [x, y, w, h] with w, h >= 0");
  }
  return {v[0], v[1], v[0] + v[2], v[1] + v[3]};
}

json box_to_xywh(const Box& b) { return {b.x1, b.y1, b.width(), b.height()}; }

}  // namespace

json rle_to_json(const RleMask& rle) {
  return {{"size", {rle.height, rle.width}}, {"counts", rle.counts}};
}

RleMask rle_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("mask: expected an RLE object");
  const auto size = field<std::vector<std::size_t>>(j, "size", "mask");
  if (size.size() != 2) throw FormatError("mask.size: expected [h, w]");
  if (!j.contains("counts") || !j["counts"].is_array()) {
    throw FormatError("mask.counts: expected an uncompressed list of run lengths");
  }
  RleMask rle{size[0], size[1], field<std::vector<std::uint32_t>>(j, "counts", "mask")};
  rle.validate();
  return rle;
}

json detection_to_json(const DetectionRecord& det) {
  return {{"image_id", det.image_id},       {"category", det.category},
          {"score", det.score},             {"final_score", det.final_score},
          {"bbox", box_to_xywh(det.box)},   {"mask", rle_to_json(det.mask)}};
}

DetectionRecord detection_from_json(const json& j) {
  constexpr const char* where = "detection";
  if (!j.is_object()) throw FormatError("detection: expected a JSON object");
  DetectionRecord det;
  det.image_id = field<int>(j, "image_id", where);
  det.category = field<int>(j, "category", where);
  det.score = field<double>(j, "score", where);
  det.final_score = field<double>(j, "final_score", where);
  if (!(det.score >= 0 && det.score <= 1) || !(det.final_score >= 0 && det.final_score <= 1)) {
    throw FormatError("detection: scores must lie in [0, 1]");
  }
  det.box = box_from_xywh(field<std::vector<double>>(j, "bbox", where), where);
  det.mask = rle_from_json(field<json>(j, "mask", where));
  return det;
}

std::string format_detection_dump(std::span<const DetectionRecord> dets) {
  std::string out;
  for (const auto& d : dets) {
    out += detection_to_json(d).dump();
    out += '\n';
  }
  return out;
}

std::vector<DetectionRecord> parse_detection_dump(const std::string& text) {
  std::vector<DetectionRecord> dets;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      dets.push_back(detection_from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw FormatError("detection dump line " + std::to_string(number) + ": " + e.what());
    }
  }
  return dets;
}

void write_detection_dump(const std::filesystem::path& path,
                          std::span<const DetectionRecord> dets) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << format_detection_dump(dets);
}

std::vector<DetectionRecord> read_detection_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_detection_dump(buffer.str());
}

GroundTruthSet ground_truth_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("gt: expected a JSON object");
  GroundTruthSet gts;
  for (const auto& img : field<json>(j, "images", "gt")) {
    GtImage image;
    image.id = field<int>(img, "id", "gt.images");
    image.width = field<std::size_t>(img, "width", "gt.images");
    image.height = field<std::size_t>(img, "height", "gt.images");
    if (img.contains("file_name")) image.file_name = field<std::string>(img, "file_name", "gt.images");
    gts.images.push_back(image);
  }
  for (const auto& ann : field<json>(j, "annotations", "gt")) {
    GtAnnotation a;
    a.id = ann.value("id", static_cast<int>(gts.annotations.size()) + 1);
    a.image_id = field<int>(ann, "image_id", "gt.annotations");
    a.category_id = field<int>(ann, "category_id", "gt.annotations");
    if (ann.value("iscrowd", 0) != 0) {
      throw FormatError("gt.annotations: crowd regions are not supported");
    }
    if (ann.contains("segmentation")) {
      a.mask = rle_decode(rle_from_json(ann["segmentation"]));
    }
    if (ann.contains("bbox")) {
      a.box = box_from_xywh(field<std::vector<double>>(ann, "bbox", "gt.annotations"),
                            "gt.annotations");
    } else if (!a.mask.data.empty()) {
      a.box = a.mask.bounding_box();
    } else {
      throw FormatError("gt.annotations: need a bbox or a segmentation");
    }
    gts.annotations.push_back(std::move(a));
  }
  if (j.contains("categories")) {
    for (const auto& cat : j["categories"]) gts.categories.push_back(field<int>(cat, "id", "gt.categories"));
  }
  gts.validate();
  return gts;
}

json ground_truth_to_json(const GroundTruthSet& gts) {
  json images = json::array(), annotations = json::array(), categories = json::array();
  for (const auto& img : gts.images) {
    images.push_back({{"id", img.id},
                      {"width", img.width},
                      {"height", img.height},
                      {"file_name", img.file_name}});
  }
  for (const auto& a : gts.annotations) {
    json ann = {{"id", a.id},
                {"image_id", a.image_id},
                {"category_id", a.category_id},
                {"bbox", box_to_xywh(a.box)},
                {"iscrowd", 0}};
    if (!a.mask.data.empty()) {
      ann["segmentation"] = rle_to_json(rle_encode(a.mask));
      ann["area"] = a.mask.area();
    } else {
      ann["area"] = a.box.area();
    }
    annotations.push_back(std::move(ann));
  }
  for (int c : gts.categories) categories.push_back({{"id", c}, {"name", "class_" + std::to_string(c)}});
  return {{"images", images}, {"annotations", annotations}, {"categories", categories}};
}

GroundTruthSet load_ground_truth(const std::filesystem::path& path) {
  return ground_truth_from_json(read_json_file(path));
}

EvalDetection to_eval_detection(const DetectionRecord& det, bool use_final_score) {
  return {det.image_id, det.category, use_final_score ? det.final_score : det.score, det.box,
          rle_decode(det.mask)};
}

json ap_report_to_json(const ApReport& report) {
  json per_class = json::object();
  for (const auto& [cat, ap] : report.per_class) per_class[std::to_string(cat)] = ap;
  json out = {{"AP", report.ap},
              {"AP50", report.ap50},
              {"AP75", report.ap75},
              {"thresholds", report.thresholds},
              {"per_class", per_class}};
  if (report.ap_small) out["AP_small"] = *report.ap_small;
  if (report.ap_medium) out["AP_medium"] = *report.ap_medium;
  if (report.ap_large) out["AP_large"] = *report.ap_large;
  return out;
}

}  // namespace protoseg
