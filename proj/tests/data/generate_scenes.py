# Copyright 2026 The Protoseg Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================
"""Synthetic scenes and pseudo network outputs for end-to-end tests.

Each scene is a handful of rectangles, ellipses and triangles. Shapes are
rasterised on the prototype grid, and the image-resolution ground truth is
that grid mask sampled bilinearly at half-pixel centres and thresholded at
0.5, i.e. what a perfect network reproduces after upsampling. The exported
head outputs encode the scene exactly: one prototype channel per instance,
one-hot coefficients, near-delta confidences on the best anchors and
regressors that decode to the ground-truth boxes.

Usage:
  generate_scenes.py gen-scenes --seed 1 --count 20 --out tests/data/scenes
"""

import argparse
import json
import math
import pathlib
import struct

import numpy as np
from PIL import Image

INPUT_SIZE = 128
PROTO_SIZE = 32
NUM_CLASSES = 3
NUM_PROTOTYPES = 6
MAX_INSTANCES = NUM_PROTOTYPES - 1
ANCHORS = {
    "input_size": INPUT_SIZE,
    "level_strides": [8, 16, 32, 64],
    "base_scales": [16.0, 32.0, 64.0, 128.0],
    "aspect_ratios": [1.0, 0.5, 2.0],
    "scales_per_level": [1.0],
    "variances": [0.1, 0.2],
    "scale_multiplier": 1.0,
}
PROTO_STRENGTH = 20.0
PROTO_BIAS = 5.0
COEFF = 0.99
BACKGROUND_LOGIT = 10.0
PLANTED_LOGITS = (8.0, 6.0, 4.0)
OTHER_CLASS_LOGIT = -4.0
SAME_CLASS_MAX_IOU = 0.3


def write_tensor(path, array, dtype_code=1):
    """Writes a .ytns file: magic, version, dtype, rank, LE u32 dims, LE payload."""
    np_type = {1: "<f4", 2: "<f8", 3: "u1"}[dtype_code]
    array = np.ascontiguousarray(array, dtype=np_type)
    header = b"YTNS" + bytes([1, dtype_code, array.ndim])
    header += b"".join(struct.pack("<I", d) for d in array.shape)
    path.write_bytes(header + array.tobytes())


def rle_counts(mask):
    """Column-major run lengths starting with a run of zeros."""
    flat = mask.T.reshape(-1).astype(np.uint8)
    counts, current, run = [], 0, 0
    for v in flat:
        if v != current:
            counts.append(run)
            current, run = v, 0
        run += 1
    counts.append(run)
    return [int(c) for c in counts]


def upsample_threshold(mask, factor):
    """Half-pixel bilinear upsampling of a 0/1 grid, then > 0.5."""
    h, w = mask.shape

    def taps(n_out, n_in):
        src = np.clip((np.arange(n_out) + 0.5) / factor - 0.5, 0, n_in - 1)
        lo = np.floor(src).astype(int)
        return lo, np.minimum(lo + 1, n_in - 1), src - lo

    ylo, yhi, fy = taps(h * factor, h)
    xlo, xhi, fx = taps(w * factor, w)
    m = mask.astype(np.float64)
    fy, fx = fy[:, None], fx[None, :]
    top = (1 - fx) * m[ylo][:, xlo] + fx * m[ylo][:, xhi]
    bottom = (1 - fx) * m[yhi][:, xlo] + fx * m[yhi][:, xhi]
    return ((1 - fy) * top + fy * bottom) > 0.5


def render_shape(rng, kind):
    """Binary PROTO_SIZE^2 grid of one shape, sampled at pixel centres."""
    ys, xs = np.mgrid[0:PROTO_SIZE, 0:PROTO_SIZE] + 0.5
    cx, cy = rng.uniform(5, PROTO_SIZE - 5, size=2)
    rx, ry = rng.uniform(3, 9, size=2)
    if kind == "rectangle":
        return (np.abs(xs - cx) <= rx) & (np.abs(ys - cy) <= ry)
    if kind == "ellipse":
        return ((xs - cx) / rx) ** 2 + ((ys - cy) / ry) ** 2 <= 1.0
    angle = rng.uniform(0, 2 * math.pi)
    pts = [(cx + rx * math.cos(angle + k * 2 * math.pi / 3),
            cy + ry * math.sin(angle + k * 2 * math.pi / 3)) for k in range(3)]
    sides = []
    for i in range(3):
        (px, py), (qx, qy) = pts[i], pts[(i + 1) % 3]
        sides.append((qx - px) * (ys - py) - (qy - py) * (xs - px))
    inside = (sides[0] >= 0) & (sides[1] >= 0) & (sides[2] >= 0)
    return inside | ((sides[0] <= 0) & (sides[1] <= 0) & (sides[2] <= 0))


def tight_box(mask):
    rows, cols = np.nonzero(mask)
    return [float(cols.min()), float(rows.min()), float(cols.max() + 1), float(rows.max() + 1)]


def box_iou(a, b):
    iw = max(0.0, min(a[2], b[2]) - max(a[0], b[0]))
    ih = max(0.0, min(a[3], b[3]) - max(a[1], b[1]))
    inter = iw * ih
    union = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter
    return inter / union if union > 0 else 0.0


def generate_anchors():
    """Centre-form anchors in level, row, column, scale, ratio order."""
    out = []
    for stride, base in zip(ANCHORS["level_strides"], ANCHORS["base_scales"]):
        grid = math.ceil(INPUT_SIZE / stride)
        for row in range(grid):
            for col in range(grid):
                for scale in ANCHORS["scales_per_level"]:
                    for ratio in ANCHORS["aspect_ratios"]:
                        side = base * scale * ANCHORS["scale_multiplier"]
                        out.append(((col + 0.5) * stride, (row + 0.5) * stride,
                                    side * math.sqrt(ratio), side / math.sqrt(ratio)))
    return np.array(out)


def encode_box(anchor, box):
    vc, vs = ANCHORS["variances"]
    acx, acy, aw, ah = anchor
    gw, gh = box[2] - box[0], box[3] - box[1]
    gcx, gcy = box[0] + gw / 2, box[1] + gh / 2
    return [(gcx - acx) / (vc * aw), (gcy - acy) / (vc * ah),
            math.log(gw / aw) / vs, math.log(gh / ah) / vs]


def make_scene(rng, max_instances):
    """Instances with classes, proto-grid masks, image masks and boxes."""
    factor = INPUT_SIZE // PROTO_SIZE
    instances = []
    target = int(rng.integers(1, max_instances + 1))
    attempts = 0
    while len(instances) < target and attempts < 200:
        attempts += 1
        kind = ("rectangle", "ellipse", "triangle")[int(rng.integers(0, 3))]
        proto_mask = render_shape(rng, kind)
        if proto_mask.sum() < 12:
            continue
        image_mask = upsample_threshold(proto_mask, factor)
        box = tight_box(image_mask)
        category = int(rng.integers(1, NUM_CLASSES + 1))
        if any(i["category"] == category and box_iou(i["box"], box) >= SAME_CLASS_MAX_IOU
               for i in instances):
            continue
        instances.append({"kind": kind, "category": category, "proto_mask": proto_mask,
                          "image_mask": image_mask, "box": box})
    return instances


def export_outputs(instances, anchors, rng, noise_level=0.0):
    """Prototypes, coefficients, confidences and regressors for one scene."""
    n = len(anchors)
    protos = np.zeros((PROTO_SIZE, PROTO_SIZE, NUM_PROTOTYPES))
    coeffs = np.zeros((n, NUM_PROTOTYPES))
    conf = np.zeros((n, NUM_CLASSES + 1))
    conf[:, 0] = BACKGROUND_LOGIT
    loc = np.zeros((n, 4))
    protos[:, :, -1] = PROTO_BIAS
    corners = np.stack([anchors[:, 0] - anchors[:, 2] / 2, anchors[:, 1] - anchors[:, 3] / 2,
                        anchors[:, 0] + anchors[:, 2] / 2, anchors[:, 1] + anchors[:, 3] / 2], 1)
    used = set()
    for idx, inst in enumerate(instances):
        protos[:, :, idx] = np.where(inst["proto_mask"], PROTO_STRENGTH, 0.0)
        ious = np.array([box_iou(c, inst["box"]) for c in corners])
        order = [a for a in np.argsort(-ious, kind="stable") if a not in used]
        for rank, logit in enumerate(PLANTED_LOGITS):
            a = int(order[rank])
            used.add(a)
            conf[a, :] = OTHER_CLASS_LOGIT
            conf[a, 0] = 0.0
            conf[a, inst["category"]] = logit
            coeffs[a, idx] = COEFF
            coeffs[a, -1] = -COEFF
            loc[a] = encode_box(anchors[a], inst["box"])
    if noise_level > 0:
        protos += noise_level * rng.standard_normal(protos.shape)
    return protos, coeffs, conf, loc


def render_image(rng, instances):
    image = rng.integers(90, 140, size=(INPUT_SIZE, INPUT_SIZE, 3)).astype(np.uint8)
    palette = {1: (200, 60, 50), 2: (50, 170, 80), 3: (60, 90, 210)}
    for inst in instances:
        image[inst["image_mask"]] = palette[inst["category"]]
    return image


def gen_scenes(seed, count, out, noise_level, max_instances):
    out = pathlib.Path(out)
    (out / "images").mkdir(parents=True, exist_ok=True)
    anchors = generate_anchors()
    gt = {"images": [], "annotations": [],
          "categories": [{"id": c, "name": f"class_{c}"} for c in range(1, NUM_CLASSES + 1)]}
    for s in range(count):
        image_id = s + 1
        rng = np.random.default_rng([seed, s])
        instances = make_scene(rng, max_instances)
        name = f"scene_{image_id:02d}"
        Image.fromarray(render_image(rng, instances)).save(out / "images" / f"{name}.png")
        gt["images"].append({"id": image_id, "width": INPUT_SIZE, "height": INPUT_SIZE,
                             "file_name": f"images/{name}.png"})
        for inst in instances:
            x1, y1, x2, y2 = inst["box"]
            gt["annotations"].append({
                "id": len(gt["annotations"]) + 1, "image_id": image_id,
                "category_id": inst["category"], "bbox": [x1, y1, x2 - x1, y2 - y1],
                "area": int(inst["image_mask"].sum()), "iscrowd": 0,
                "segmentation": {"size": [INPUT_SIZE, INPUT_SIZE],
                                 "counts": rle_counts(inst["image_mask"])}})
        protos, coeffs, conf, loc = export_outputs(instances, anchors, rng, noise_level)
        dump = out / "dumps" / name
        dump.mkdir(parents=True, exist_ok=True)
        manifest = {"image_id": image_id, "input_size": INPUT_SIZE, "k": NUM_PROTOTYPES,
                    "c": NUM_CLASSES, "tanh_applied": True, "image_width": INPUT_SIZE,
                    "image_height": INPUT_SIZE, "anchors": ANCHORS}
        (dump / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
        write_tensor(dump / "proto.ytns", protos)
        write_tensor(dump / "coeff.ytns", coeffs)
        write_tensor(dump / "conf.ytns", conf)
        write_tensor(dump / "loc.ytns", loc)
    (out / "gt.json").write_text(json.dumps(gt) + "\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    scenes = sub.add_parser("gen-scenes", help="write scenes, gt.json and image dumps")
    scenes.add_argument("--seed", type=int, default=1)
    scenes.add_argument("--count", type=int, default=20)
    scenes.add_argument("--out", required=True)
    scenes.add_argument("--noise", type=float, default=0.0,
                        help="std-dev of Gaussian noise added to the prototypes")
    scenes.add_argument("--max-instances", type=int, default=4)
    args = parser.parse_args()
    if not 1 <= args.max_instances <= MAX_INSTANCES:
        parser.error(f"--max-instances must lie in [1, {MAX_INSTANCES}]")
    gen_scenes(args.seed, args.count, args.out, args.noise, args.max_instances)


if __name__ == "__main__":
    main()
