"""Synthetic references and model outputs for the end-to-end pipeline tests.

Writes into crates/rqa/tests/fixtures:
  references/scene_XX.png   64x64 photo-like scenes
  tags.csv                  content tags per reference
  text_outputs.jsonl        answers of two language models, 5 tasks per image
  pose_outputs.csv          3-step trajectories of two action models; one uses two arms

Distorted answers drift from the reference answer by a per-image severity
that grows with the distortion id's position in its category, plus jitter.
"""

import csv
import hashlib
import json
import math
import pathlib

import numpy as np
from PIL import Image

OUT = pathlib.Path(__file__).resolve().parents[2] / "crates" / "rqa" / "tests" / "fixtures"
N_REFS = 10
SIZE = 64
TASKS = 5
TEXT_MODELS = ["vlm-a", "vlm-b"]
POSE_MODELS = ["vla-a", "vla-b"]
VOCAB = (
    "pick place move push pull open close cover insert stack the a red blue green yellow cup bowl block "
    "drawer tray lid towel sponge bottle left right onto into from table shelf near far top bottom"
).split()


def rng_for(*key):
    digest = hashlib.sha256("/".join(map(str, key)).encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "little"))


def reference_image(k):
    r = rng_for("image", k)
    y, x = np.mgrid[0:SIZE, 0:SIZE].astype(float)
    base = np.stack([40 + 2.5 * x, 60 + 2.0 * y, 120 + 1.2 * (x - y)], axis=-1)
    cx, cy, rad = r.uniform(18, 46), r.uniform(18, 46), r.uniform(8, 16)
    disk = 1 / (1 + np.exp((np.hypot(x - cx, y - cy) - rad) / 1.5))
    colour = r.uniform(30, 230, size=3)
    img = base * (1 - disk[..., None]) + colour * disk[..., None]
    img += r.normal(0, 6, size=img.shape)
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


def severity(image_id):
    dist_id = int(image_id.rsplit("_d", 1)[1])
    within = (dist_id - 1) % 5
    return min(1.0, 0.12 + 0.15 * within + rng_for("sev", image_id).uniform(0, 0.3))


def image_ids(ref):
    return [ref] + [f"{ref}_d{d:02}" for d in range(1, 31)]


def perturb_text(words, sev, r):
    out = []
    for w in words:
        u = r.uniform()
        if u < 0.15 * sev:
            continue
        out.append(VOCAB[r.integers(len(VOCAB))] if u < 0.6 * sev else w)
    return " ".join(out) or words[0]


def main():
    (OUT / "references").mkdir(parents=True, exist_ok=True)
    refs = [f"scene_{k:02}" for k in range(1, N_REFS + 1)]
    for k, name in enumerate(refs):
        Image.fromarray(reference_image(k)).save(OUT / "references" / f"{name}.png")

    with open(OUT / "tags.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["reference", "sim2real", "perspective", "main_object", "background"])
        for k, name in enumerate(refs):
            w.writerow([name, "simulation" if k % 3 == 0 else "real", "first" if k % 2 == 0 else "third", k % 5 + 1, (2 * k) % 5 + 1])

    with open(OUT / "text_outputs.jsonl", "w") as f:
        for ref in refs:
            for model in TEXT_MODELS:
                for task in range(TASKS):
                    r = rng_for("answer", ref, model, task)
                    words = [VOCAB[i] for i in r.integers(len(VOCAB), size=r.integers(8, 15))]
                    for image_id in image_ids(ref):
                        text = " ".join(words) if image_id == ref else perturb_text(words, severity(image_id), rng_for("t", image_id, model, task))
                        f.write(json.dumps({"image_id": image_id, "model_id": model, "task_index": task, "text": text}) + "\n")

    with open(OUT / "pose_outputs.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["image_id", "model_id", "task_index", "arm_id", "step", "x", "y", "z", "roll", "pitch", "yaw", "gripper"])
        for ref in refs:
            for model in POSE_MODELS:
                arms = ["left", "right"] if model == "vla-b" else [""]
                for task in range(TASKS):
                    for arm in arms:
                        r = rng_for("pose", ref, model, task, arm)
                        start = np.concatenate([r.uniform(-300, 300, 3), r.uniform(-math.pi, math.pi, 3)])
                        goal = start + np.concatenate([r.uniform(-200, 200, 3), r.uniform(-0.8, 0.8, 3)])
                        grip = float(r.integers(2))
                        for image_id in image_ids(ref):
                            sev = 0.0 if image_id == ref else severity(image_id)
                            j = rng_for("p", image_id, model, task, arm)
                            end = goal + np.concatenate([j.normal(0, 120 * sev, 3), j.normal(0, 0.6 * sev, 3)])
                            g = 1.0 - grip if j.uniform() < 0.4 * sev else grip
                            for step in range(3):
                                p = start + (end - start) * step / 2
                                w.writerow([image_id, model, task, arm, step, *(f"{v:.3f}" for v in p), g])


if __name__ == "__main__":
    main()
