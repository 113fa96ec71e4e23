"""Weakly supervised localization scoring: heatmap -> boxes -> IoU -> error rate.

Boxes come from an 0.01..1.00 threshold sweep (step 0.01) over the map,
binarized at >= t, labeled with 8-connectivity.  The smallest threshold
whose component count matches the ground-truth box count wins; if no
threshold matches exactly, the closest count wins (ties to the smaller
threshold) and surplus components are dropped smallest-area first.
Predictions and ground truth are paired greedily by globally maximal IoU;
an image counts as positive only if every ground-truth box got a match
with IoU above 0.5.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy import ndimage

from sigsal.errors import InvalidShape, InvalidValue, NoComponents, NoData
from sigsal.numutil import as_tensor
from sigsal.saliency import SaliencyMap
from sigsal.tensorio import read_tensor

_EIGHT_CONNECTED = np.ones((3, 3), dtype=int)
_THRESHOLDS = [round(i / 100.0, 2) for i in range(1, 101)]


class BBox(NamedTuple):
    """Axis-aligned pixel rectangle, inclusive corners."""

    x_min: int
    y_min: int
    x_max: int
    y_max: int

    @property
    def area(self):
        return (self.x_max - self.x_min + 1) * (self.y_max - self.y_min + 1)


@dataclass(frozen=True)
class Component:
    """One 8-connected region: pixel count, bounding box, member pixels."""

    area: int
    bbox: BBox
    pixels: np.ndarray  # [n, 2] array of (y, x), row-major sorted


@dataclass(frozen=True)
class WsolRecord:
    image_id: str
    map: SaliencyMap
    gt_boxes: tuple

    def __post_init__(self):
        if len(self.gt_boxes) < 1:
            raise InvalidValue(f"{self.image_id}: needs at least one ground-truth box")
        h, w = self.map.values.shape
        for box in self.gt_boxes:
            _check_box(box, w, h)


@dataclass(frozen=True)
class WsolReport:
    records: tuple  # per-image result dicts
    error_rate: float


def _check_box(box, width=None, height=None):
    if box.x_min > box.x_max or box.y_min > box.y_max:
        raise InvalidValue(f"degenerate box {box}")
    if width is not None and not (0 <= box.x_min and box.x_max < width):
        raise InvalidValue(f"box {box} outside image width {width}")
    if height is not None and not (0 <= box.y_min and box.y_max < height):
        raise InvalidValue(f"box {box} outside image height {height}")


def _binary_mask(mask):
    arr = np.asarray(mask)
    if arr.ndim != 2:
        raise InvalidShape(f"mask must be rank 2, got rank {arr.ndim}")
    if not np.isin(arr, (0, 1)).all():
        raise InvalidValue("mask entries must be 0 or 1")
    return arr.astype(bool)


def connected_components(mask):
    """8-connected components, ordered by (area desc, y_min, x_min)."""
    mask = _binary_mask(mask)
    labels, count = ndimage.label(mask, structure=_EIGHT_CONNECTED)
    if count == 0:
        return []
    areas = np.bincount(labels.ravel())[1:]
    comps = []
    for label, slc in enumerate(ndimage.find_objects(labels), start=1):
        ys, xs = slc
        bbox = BBox(x_min=xs.start, y_min=ys.start, x_max=xs.stop - 1, y_max=ys.stop - 1)
        pixels = np.argwhere(labels[slc] == label)
        pixels += (ys.start, xs.start)
        comps.append(Component(area=int(areas[label - 1]), bbox=bbox, pixels=pixels))
    comps.sort(key=lambda c: (-c.area, c.bbox.y_min, c.bbox.x_min))
    return comps


def _map_values(saliency):
    values = saliency.values if isinstance(saliency, SaliencyMap) else as_tensor(saliency, rank=2)
    if values.min() < 0.0 or values.max() > 1.0:
        raise InvalidValue("map values must lie in [0, 1]")
    return values


def _component_count(values, threshold):
    return ndimage.label(values >= threshold, structure=_EIGHT_CONNECTED)[1]


def _sweep(values, target_count):
    """(threshold, boxes, raw component count) for the best sweep threshold."""
    counts = [_component_count(values, t) for t in _THRESHOLDS]
    if not any(counts):
        raise NoComponents("no threshold produced any component")
    best_i = min(range(len(_THRESHOLDS)), key=lambda i: (abs(counts[i] - target_count), i))
    threshold = _THRESHOLDS[best_i]
    comps = connected_components((values >= threshold).astype(np.uint8))
    boxes = [c.bbox for c in comps[:target_count]]  # surplus drops smallest areas
    return threshold, boxes, counts[best_i]


def boxes_from_map(saliency, target_count):
    """Threshold sweep returning (threshold, predicted boxes)."""
    if target_count < 1:
        raise InvalidValue("target_count must be >= 1")
    threshold, boxes, _ = _sweep(_map_values(saliency), int(target_count))
    return threshold, boxes


def iou(a, b):
    """Intersection-over-union of two boxes with inclusive pixel areas."""
    _check_box(a)
    _check_box(b)
    ix = min(a.x_max, b.x_max) - max(a.x_min, b.x_min) + 1
    iy = min(a.y_max, b.y_max) - max(a.y_min, b.y_min) + 1
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    return inter / (a.area + b.area - inter)


def match_and_score(pred, gt, threshold=0.5):
    """Greedy globally-max-IoU matching; positive iff every gt box clears 0.5."""
    pairs = [(iou(p, g), i, j) for i, p in enumerate(pred) for j, g in enumerate(gt)]
    matched = []
    used_pred, used_gt = set(), set()
    while pairs:
        score, i, j = max(pairs, key=lambda t: (t[0], -t[1], -t[2]))
        matched.append(score)
        used_pred.add(i)
        used_gt.add(j)
        pairs = [t for t in pairs if t[1] != i and t[2] != j]
    positive = len(used_gt) == len(gt) and all(score > threshold for score in matched)
    return matched, positive


def evaluate(records):
    """Score a stream of records; error rate = negatives / total."""
    results = []
    negatives = 0
    for rec in records:
        values = _map_values(rec.map)
        entry = {"id": rec.image_id, "target_count": len(rec.gt_boxes)}
        try:
            threshold, boxes, raw_count = _sweep(values, len(rec.gt_boxes))
        except NoComponents:
            entry.update(threshold=None, boxes=[], component_count=0, ious=[], positive=False)
            negatives += 1
            results.append(entry)
            continue
        ious, positive = match_and_score(boxes, list(rec.gt_boxes))
        if not positive:
            negatives += 1
        entry.update(
            threshold=threshold,
            boxes=[list(b) for b in boxes],
            component_count=raw_count,
            ious=ious,
            positive=positive,
        )
        results.append(entry)
    if not results:
        raise NoData("no records to evaluate")
    return WsolReport(records=tuple(results), error_rate=negatives / len(results))


def load_manifest(path):
    """Manifest JSON -> list of WsolRecord; relative map paths resolve
    against the manifest's directory."""
    base = Path(path).parent
    with open(path) as fh:
        doc = json.load(fh)
    records = []
    for entry in doc["records"]:
        map_path = Path(entry["map"])
        if not map_path.is_absolute():
            map_path = base / map_path
        values = read_tensor(map_path)
        boxes = tuple(BBox(*(int(v) for v in quad)) for quad in entry["gt"])
        records.append(WsolRecord(entry["id"], SaliencyMap(values), boxes))
    return records


def report_to_dict(report):
    total = len(report.records)
    positives = sum(1 for r in report.records if r["positive"])
    return {
        "total": total,
        "positives": positives,
        "error_rate": report.error_rate,
        "records": list(report.records),
    }
