#!/usr/bin/env python3
"""Regenerates the committed test fixtures under tests/fixtures.

Everything is seeded, so rerunning the script reproduces the same bytes.
The golden evaluation numbers are computed by a from-scratch Python
implementation of the matching and AP math, independent of the C++ code.

--training additionally writes the large training-count dataset (half a
million annotations, ~40 MB); that file is for manual poking and is not
committed.
"""

import argparse
import json
import random
from pathlib import Path

CATEGORIES = [
    "paragraph_title", "image", "text", "number", "abstract", "content",
    "figure_title", "formula", "table", "table_title", "reference", "doc_title",
    "footnote", "header", "algorithm", "footer", "seal", "chart_title", "chart",
    "formula_number", "header_image", "footer_image", "aside_text",
]

VALIDATION_COUNTS = [
    715, 230, 3342, 430, 15, 7, 161, 1961, 127, 109, 32, 35, 38, 430, 10, 245,
    52, 247, 303, 359, 171, 27, 32,
]
TRAINING_COUNTS = [
    42158, 11455, 217257, 25217, 2067, 643, 8136, 113145, 6258, 5553, 2217,
    4276, 3566, 25001, 289, 11546, 3144, 11138, 10849, 15668, 6599, 1654, 2093,
]


def categories_block():
    return [{"id": i, "name": n} for i, n in enumerate(CATEGORIES)]


def qscore(rng, lo=0.05, hi=0.99):
    """Scores quantized to 1e-3 so dense-grid cross-checks stay exact."""
    return rng.randint(int(lo * 1000), int(hi * 1000)) / 1000.0


def rand_box(rng, width, height, max_w=220, max_h=90):
    bw = rng.randint(20, max_w)
    bh = rng.randint(10, max_h)
    x = rng.randint(0, int(width) - bw)
    y = rng.randint(0, int(height) - bh)
    return [x, y, bw, bh]


def write_json(path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(obj, f, separators=(",", ":"))
        f.write("\n")


def counts_dataset(counts, seed, n_images, width=1000, height=1400):
    rng = random.Random(seed)
    images = [
        {"id": i + 1, "width": width, "height": height, "file_name": f"page_{i + 1:04d}.png"}
        for i in range(n_images)
    ]
    annotations = []
    ann_id = 1
    slot = 0
    for cat_id, count in enumerate(counts):
        for _ in range(count):
            box = rand_box(rng, width, height)
            annotations.append({
                "id": ann_id,
                "image_id": (slot % n_images) + 1,
                "category_id": cat_id,
                "bbox": box,
                "area": box[2] * box[3],
                "iscrowd": 0,
            })
            ann_id += 1
            slot += 1
    return {"images": images, "annotations": annotations, "categories": categories_block()}


# ---------------------------------------------------------------------------
# Independent evaluation oracle (pure Python, no shared code with the C++).


def iou(a, b):
    ax2, ay2 = a[0] + a[2], a[1] + a[3]
    bx2, by2 = b[0] + b[2], b[1] + b[3]
    iw = min(ax2, bx2) - max(a[0], b[0])
    ih = min(ay2, by2) - max(a[1], b[1])
    if iw <= 0 or ih <= 0:
        inter = 0.0
    else:
        inter = iw * ih
    union = a[2] * a[3] + b[2] * b[3] - inter
    if union <= 0:
        return 0.0
    return inter / union


def match_class(dets, gts, cat, thr):
    """Returns per-detection flags ('tp'/'fp'/'ign') in input order plus npos."""
    flags = {}
    npos = sum(1 for g in gts if g["category_id"] == cat and not g.get("iscrowd", 0))
    by_image = {}
    for gi, g in enumerate(gts):
        if g["category_id"] == cat:
            by_image.setdefault(g["image_id"], []).append(gi)
    order = sorted(
        (i for i, d in enumerate(dets) if d["category_id"] == cat),
        key=lambda i: (-dets[i]["score"], i),
    )
    taken = set()
    for di in order:
        d = dets[di]
        best, best_iou = None, 0.0
        for gi in by_image.get(d["image_id"], []):
            g = gts[gi]
            ignored = bool(g.get("iscrowd", 0))
            if not ignored and gi in taken:
                continue
            ov = iou(d["bbox"], g["bbox"])
            if ov < thr:
                continue
            if best is None or ov > best_iou or (
                ov == best_iou and bool(gts[best].get("iscrowd", 0)) and not ignored
            ):
                best, best_iou = gi, ov
        if best is None:
            flags[di] = "fp"
        elif gts[best].get("iscrowd", 0):
            flags[di] = "ign"
        else:
            flags[di] = "tp"
            taken.add(best)
    return flags, npos, order


def class_ap(dets, gts, cat, thr, mode):
    flags, npos, order = match_class(dets, gts, cat, thr)
    if npos == 0:
        return None
    prec, rec = [], []
    tp = fp = 0
    for di in order:
        if flags[di] == "ign":
            continue
        if flags[di] == "tp":
            tp += 1
        else:
            fp += 1
        prec.append(tp / (tp + fp))
        rec.append(tp / npos)
    if mode == "allpoint":
        ap = 0.0
        prev = 0.0
        for i in range(len(prec)):
            pmax = max(prec[j] for j in range(len(prec)) if rec[j] >= rec[i])
            ap += (rec[i] - prev) * pmax
            prev = rec[i]
        return ap
    total = 0.0
    for k in range(101):
        r = k / 100.0
        vals = [prec[j] for j in range(len(prec)) if rec[j] >= r]
        if vals:
            total += max(vals)
    return total / 101.0


def map50(dets, gts, thr, mode):
    aps = []
    for cat in range(23):
        ap = class_ap(dets, gts, cat, thr, mode)
        if ap is not None:
            aps.append(ap)
    return sum(aps) / len(aps) if aps else 0.0


# ---------------------------------------------------------------------------


def make_smoke(fix, rng):
    cats = [0, 1, 2, 7, 8, 11]

    def gt_split(image_ids, file_prefix, anns_per_image):
        images = [
            {"id": i, "width": 800, "height": 1100, "file_name": f"{file_prefix}_{i}.png"}
            for i in image_ids
        ]
        annotations = []
        ann_id = 1
        for i in image_ids:
            for _ in range(rng.randint(*anns_per_image)):
                box = rand_box(rng, 800, 1100)
                annotations.append({
                    "id": ann_id,
                    "image_id": i,
                    "category_id": rng.choice(cats),
                    "bbox": box,
                    "area": box[2] * box[3],
                    "iscrowd": 0,
                })
                ann_id += 1
        return {"images": images, "annotations": annotations, "categories": categories_block()}

    train = gt_split(range(1, 9), "train", (4, 7))
    val = gt_split(range(101, 107), "val", (4, 6))
    write_json(fix / "smoke_train.json", train)
    write_json(fix / "smoke_val.json", val)

    val_dets = []
    for ann in val["annotations"]:
        if rng.random() < 0.85:
            x, y, w, h = ann["bbox"]
            jit = lambda: rng.randint(-6, 6)
            box = [max(0, x + jit()), max(0, y + jit()), max(8, w + jit()), max(8, h + jit())]
            val_dets.append({
                "image_id": ann["image_id"],
                "category_id": ann["category_id"],
                "bbox": box,
                "score": qscore(rng, 0.35, 0.99),
            })
    for _ in range(8):
        img = rng.choice(val["images"])
        val_dets.append({
            "image_id": img["id"],
            "category_id": rng.choice(cats),
            "bbox": rand_box(rng, 800, 1100),
            "score": qscore(rng, 0.05, 0.6),
        })
    write_json(fix / "smoke_val_dets.json", val_dets)

    unl_images = [
        {"id": i, "width": 800, "height": 1100, "file_name": f"unl_{i}.png"}
        for i in range(201, 207)
    ]
    write_json(
        fix / "smoke_unl_images.json",
        {"images": unl_images, "annotations": [], "categories": categories_block()},
    )
    unl_dets = []
    for img in unl_images:
        for _ in range(rng.randint(4, 6)):
            box = rand_box(rng, 800, 1100)
            cat = rng.choice(cats)
            unl_dets.append({
                "image_id": img["id"],
                "category_id": cat,
                "bbox": box,
                "score": qscore(rng, 0.2, 0.99),
            })
            if rng.random() < 0.3:
                unl_dets.append({
                    "image_id": img["id"],
                    "category_id": cat,
                    "bbox": [box[0] + 3, box[1] + 3, box[2], box[3]],
                    "score": qscore(rng, 0.1, 0.5),
                })
    write_json(fix / "smoke_unl_dets.json", unl_dets)
    return train, val


def make_eval_fixture(fix, rng):
    images = [{"id": i, "width": 600, "height": 800, "file_name": f"eval_{i}.png"} for i in (1, 2, 3)]
    gts = []
    ann_id = 1
    for cat, count in ((0, 4), (1, 3), (2, 3)):
        for _ in range(count):
            img = rng.choice(images)
            box = rand_box(rng, 600, 800)
            gts.append({
                "id": ann_id,
                "image_id": img["id"],
                "category_id": cat,
                "bbox": box,
                "area": box[2] * box[3],
                "iscrowd": 0,
            })
            ann_id += 1
    crowd_box = rand_box(rng, 600, 800)
    gts.append({
        "id": ann_id,
        "image_id": 2,
        "category_id": 0,
        "bbox": crowd_box,
        "area": crowd_box[2] * crowd_box[3],
        "iscrowd": 1,
    })
    gt_doc = {"images": images, "annotations": gts, "categories": categories_block()}
    write_json(fix / "eval_fixture_gt.json", gt_doc)

    dets = []
    for g in gts:
        if rng.random() < 0.8:
            x, y, w, h = g["bbox"]
            jit = lambda: rng.randint(-8, 8)
            dets.append({
                "image_id": g["image_id"],
                "category_id": g["category_id"],
                "bbox": [max(0, x + jit()), max(0, y + jit()), max(8, w + jit()), max(8, h + jit())],
                "score": qscore(rng, 0.2, 0.99),
            })
    for _ in range(5):
        dets.append({
            "image_id": rng.choice(images)["id"],
            "category_id": rng.choice([0, 1, 2]),
            "bbox": rand_box(rng, 600, 800),
            "score": qscore(rng, 0.05, 0.7),
        })
    # one detection for a class with no ground truth at all; it must not
    # enter the class mean
    dets.append({"image_id": 1, "category_id": 3, "bbox": [5, 5, 40, 20], "score": 0.9})
    write_json(fix / "eval_fixture_dets.json", dets)

    golden = {"iou_threshold": 0.5, "per_class": []}
    for mode in ("coco101", "allpoint"):
        golden[f"map50_{mode}"] = map50(dets, gts, 0.5, mode)
    for cat in range(23):
        ap_c = class_ap(dets, gts, cat, 0.5, "coco101")
        if ap_c is None:
            continue
        golden["per_class"].append({
            "id": cat,
            "ap_coco101": ap_c,
            "ap_allpoint": class_ap(dets, gts, cat, 0.5, "allpoint"),
        })
    write_json(fix / "golden_eval.json", golden)


def make_distill(fix, rng):
    rows, p_dim, d_dim = 16, 4, 6
    student = [[rng.uniform(-1, 1) for _ in range(p_dim)] for _ in range(rows)]
    w0 = [[rng.uniform(-1, 1) for _ in range(p_dim)] for _ in range(d_dim)]
    b0 = [rng.uniform(-0.5, 0.5) for _ in range(d_dim)]
    teacher = []
    for srow in student:
        trow = []
        for d in range(d_dim):
            v = b0[d] + sum(w0[d][p] * srow[p] for p in range(p_dim))
            trow.append(v + rng.uniform(-0.01, 0.01))
        teacher.append(trow)

    def write_csv(path, mat):
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            for row in mat:
                f.write(",".join(repr(v) for v in row) + "\n")

    write_csv(fix / "distill_student.csv", student)
    write_csv(fix / "distill_teacher.csv", teacher)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--training", action="store_true",
                        help="also write the large training-count dataset")
    parser.add_argument("--training-out", default="/tmp/category_counts_training.json")
    args = parser.parse_args()

    root = Path(__file__).resolve().parents[1]
    fix = root / "tests" / "fixtures"

    write_json(fix / "category_counts_validation.json", counts_dataset(VALIDATION_COUNTS, seed=11, n_images=24))
    make_smoke(fix, random.Random(23))
    make_eval_fixture(fix, random.Random(37))
    make_distill(fix, random.Random(51))

    if args.training:
        write_json(Path(args.training_out), counts_dataset(TRAINING_COUNTS, seed=13, n_images=256))

    print(f"fixtures written under {fix}")


if __name__ == "__main__":
    main()
