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
// protoseg command line: postprocess, nms-bench, eval, viz, rle.
// Exit codes: 0 success, 1 input error, 2 internal error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "protoseg/bench.hpp"
#include "protoseg/config.hpp"
#include "protoseg/dataset_io.hpp"
#include "protoseg/errors.hpp"
#include "protoseg/image_io.hpp"
#include "protoseg/pipeline.hpp"
#include "protoseg/visualize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitInternal = 2;

void write_text(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw protoseg::InputError("cannot open " + out_path + " for writing");
  out << text;
}

// A directory with a manifest is one dump; otherwise its sorted
// subdirectories holding manifests are.
std::vector<fs::path> expand_dumps(const std::vector<std::string>& inputs) {
  std::vector<fs::path> dumps;
  for (const auto& input : inputs) {
    const fs::path p(input);
    if (fs::exists(p / "manifest.json")) {
      dumps.push_back(p);
      continue;
    }
    if (!fs::is_directory(p)) throw protoseg::InputError(input + " is not a dump directory");
    std::vector<fs::path> children;
    for (const auto& entry : fs::directory_iterator(p)) {
      if (entry.is_directory() && fs::exists(entry.path() / "manifest.json")) {
        children.push_back(entry.path());
      }
    }
    if (children.empty()) throw protoseg::InputError(input + " contains no image dumps");
    std::sort(children.begin(), children.end());
    dumps.insert(dumps.end(), children.begin(), children.end());
  }
  return dumps;
}

protoseg::PipelineConfig config_or_default(const std::string& path) {
  return path.empty() ? protoseg::PipelineConfig{} : protoseg::load_config(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Post-processing toolkit for prototype-based instance segmentation"};
  app.require_subcommand(1);

  // postprocess
  auto* post = app.add_subcommand("postprocess", "Turn raw head dumps into detections");
  std::vector<std::string> dump_dirs;
  std::string config_path, nms_name, rescore_name, gt_path, out_path;
  post->add_option("dumps", dump_dirs, "Dump directories, or parents of them")->required();
  post->add_option("--config", config_path, "JSON config file");
  post->add_option("--nms", nms_name, "fast | traditional (overrides config)");
  post->add_option("--rescore", rescore_name, "off | oracle (overrides config)");
  post->add_option("--gt", gt_path, "Ground truth JSON, needed by --rescore oracle");
  post->add_option("--out", out_path, "Detection dump (JSON lines); stdout if omitted");

  // nms-bench
  auto* bench = app.add_subcommand("nms-bench", "Time fast against traditional NMS");
  int bench_n = 1000, bench_classes = 80, bench_repeats = 5;
  std::uint64_t bench_seed = 1;
  double bench_iou = 0.5;
  std::string bench_out;
  bench->add_option("--n", bench_n, "Detections per class")->check(CLI::Range(1, 10000));
  bench->add_option("--classes", bench_classes, "Number of classes")->check(CLI::PositiveNumber);
  bench->add_option("--repeats", bench_repeats, "Timed repetitions")->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_seed, "Seed for the synthetic boxes");
  bench->add_option("--iou", bench_iou, "IoU threshold");
  bench->add_option("--out", bench_out, "Report JSON; stdout if omitted");

  // eval
  auto* evalc = app.add_subcommand("eval", "COCO-style AP of a detection dump");
  std::string eval_dets, eval_gt, eval_kind = "mask", eval_rank = "final_score", eval_out;
  bool eval_areas = false;
  evalc->add_option("--dets", eval_dets, "Detection dump (JSON lines)")->required();
  evalc->add_option("--gt", eval_gt, "Ground truth JSON")->required();
  evalc->add_option("--iou", eval_kind, "mask | box")->check(CLI::IsMember({"mask", "box"}));
  evalc->add_option("--rank-by", eval_rank, "final_score | score")
      ->check(CLI::IsMember({"final_score", "score"}));
  evalc->add_flag("--area-breakdown", eval_areas, "Also report small/medium/large AP");
  evalc->add_option("--out", eval_out, "Report JSON; stdout if omitted");

  // viz
  auto* viz = app.add_subcommand("viz", "Overlay detections on an image");
  std::string viz_image, viz_dets, viz_out, viz_config;
  int viz_image_id = 0;
  double viz_threshold = -1.0;
  viz->add_option("--image", viz_image, "Input PNG or PPM")->required();
  viz->add_option("--dets", viz_dets, "Detection dump (JSON lines)")->required();
  viz->add_option("--image-id", viz_image_id, "Which image's detections to draw");
  viz->add_option("--threshold", viz_threshold, "Score threshold (default from config, 0.3)");
  viz->add_option("--config", viz_config, "JSON config file");
  viz->add_option("--out", viz_out, "Output PNG")->required();

  // rle
  auto* rle = app.add_subcommand("rle", "Convert between mask images and RLE JSON");
  std::string rle_mode, rle_in, rle_out;
  rle->add_option("mode", rle_mode, "encode | decode")
      ->required()
      ->check(CLI::IsMember({"encode", "decode"}));
  rle->add_option("--in", rle_in, "Mask image (encode) or RLE JSON (decode)")->required();
  rle->add_option("--out", rle_out, "RLE JSON (encode, stdout if omitted) or PNG (decode)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*post) {
      protoseg::PipelineConfig cfg = config_or_default(config_path);
      if (!nms_name.empty()) cfg.postprocess.nms_kind = protoseg::parse_nms_kind(nms_name);
      if (!rescore_name.empty()) {
        cfg.postprocess.rescore = protoseg::parse_rescore_mode(rescore_name);
      }
      std::optional<protoseg::GroundTruthSet> gts;
      if (cfg.postprocess.rescore == protoseg::RescoreMode::kOracle) {
        if (gt_path.empty()) throw protoseg::InputError("--rescore oracle requires --gt");
        gts = protoseg::load_ground_truth(gt_path);
      }
      std::vector<protoseg::DetectionRecord> all;
      for (const auto& dir : expand_dumps(dump_dirs)) {
        const auto dump = protoseg::load_image_dump(dir);
        std::optional<protoseg::OracleGtIouPredictor> oracle;
        if (gts) oracle = protoseg::oracle_for_image(*gts, dump.manifest.image_id);
        auto result = protoseg::run_postprocess(dump, cfg, oracle ? &*oracle : nullptr);
        if (result.clamped_predictions) {
          std::cerr << dir.string() << ": " << result.clamped_predictions
                    << " IoU predictions clamped to [0, 1]\n";
        }
        all.insert(all.end(), result.detections.begin(), result.detections.end());
      }
      write_text(out_path, protoseg::format_detection_dump(all));
    } else if (*bench) {
      const auto r =
          protoseg::bench_nms(bench_n, bench_classes, bench_repeats, bench_seed, bench_iou);
      const json report = {{"n", r.n},
                           {"classes", r.classes},
                           {"repeats", r.repeats},
                           {"seed", r.seed},
                           {"fast_median_ms", r.fast_median_ms},
                           {"traditional_median_ms", r.traditional_median_ms},
                           {"speedup", r.speedup},
                           {"agreement", r.agreement},
                           {"fast_kept", r.fast_kept},
                           {"traditional_kept", r.traditional_kept}};
      write_text(bench_out, report.dump(2) + "\n");
    } else if (*evalc) {
      const auto gts = protoseg::load_ground_truth(eval_gt);
      const auto records = protoseg::read_detection_dump(eval_dets);
      std::vector<protoseg::EvalDetection> dets;
      dets.reserve(records.size());
      for (const auto& r : records) {
        dets.push_back(protoseg::to_eval_detection(r, eval_rank == "final_score"));
      }
      protoseg::EvalOptions options;
      options.area_breakdown = eval_areas;
      const auto kind = eval_kind == "box" ? protoseg::IouKind::kBox : protoseg::IouKind::kMask;
      const auto report = protoseg::evaluate_ap(dets, gts, kind, options);
      write_text(eval_out, protoseg::ap_report_to_json(report).dump(2) + "\n");
    } else if (*viz) {
      const auto cfg = config_or_default(viz_config);
      protoseg::VisualizeOptions options;
      options.score_threshold = viz_threshold >= 0 ? viz_threshold : cfg.display.score_threshold;
      options.alpha = cfg.display.alpha;
      const auto image = protoseg::read_image(viz_image);
      auto records = protoseg::read_detection_dump(viz_dets);
      std::erase_if(records, [&](const auto& r) { return r.image_id != viz_image_id; });
      protoseg::write_png(viz_out, protoseg::visualize(image, records, options));
    } else if (*rle) {
      if (rle_mode == "encode") {
        const auto image = protoseg::read_image(rle_in);
        protoseg::BinaryMask mask(image.height, image.width);
        for (std::size_t y = 0; y < image.height; ++y) {
          for (std::size_t x = 0; x < image.width; ++x) mask.at(y, x) = image.at(y, x)[0] > 127;
        }
        write_text(rle_out, protoseg::rle_to_json(protoseg::rle_encode(mask)).dump() + "\n");
      } else {
        if (rle_out.empty()) throw protoseg::InputError("rle decode requires --out");
        const auto mask =
            protoseg::rle_decode(protoseg::rle_from_json(protoseg::read_json_file(rle_in)));
        protoseg::RgbImage image(mask.width, mask.height);
        for (std::size_t i = 0; i < mask.data.size(); ++i) {
          const std::uint8_t v = mask.data[i] ? 255 : 0;
          image.pixels[3 * i] = image.pixels[3 * i + 1] = image.pixels[3 * i + 2] = v;
        }
        protoseg::write_png(rle_out, image);
      }
    }
  } catch (const protoseg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return 0;
}
