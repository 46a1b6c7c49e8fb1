"""Multi-code scene rendering, synthetic finger occlusion, and seeded selection trials."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import encoder, scanner
from .matrix import ModuleMatrix

ROTATIONS = (0, 45, 90, 135, 180, 225, 270, 315)
DIAMOND_ROTATION = 45  # sends the bottom-right (envelope) corner to the bottom
_SUBSAMPLES = 4  # per axis


class SceneOverlapError(Exception):
    """Two placements overlap after rotation, quiet zones included."""


@dataclass(frozen=True)
class Placement:
    matrix: ModuleMatrix
    origin: tuple[int, int]  # (x, y) pixels of the rotated bounding box top-left
    scale: int = 4
    rotation: int = 0
    quiet_zone: int = 4

    def __post_init__(self):
        if self.rotation % 360 not in ROTATIONS:
            raise ValueError(f"rotation must be one of {ROTATIONS}")

    @property
    def symbol_px(self) -> int:
        return (self.matrix.side + 2 * self.quiet_zone) * self.scale

    @property
    def extent(self) -> tuple[int, int]:
        theta = math.radians(self.rotation % 360)
        span = self.symbol_px * (abs(math.cos(theta)) + abs(math.sin(theta)))
        span = int(math.ceil(span - 1e-9))
        return span, span

    def to_scene_xy(self, sym_x: float, sym_y: float) -> tuple[float, float]:
        """Forward-map symbol pixel coordinates into scene pixel coordinates."""
        theta = math.radians(self.rotation % 360)
        cos_t, sin_t = math.cos(theta), math.sin(theta)
        half = self.symbol_px / 2.0
        dx, dy = sym_x - half, sym_y - half
        w, h = self.extent
        return (
            cos_t * dx - sin_t * dy + w / 2.0 + self.origin[0],
            sin_t * dx + cos_t * dy + h / 2.0 + self.origin[1],
        )


@dataclass(frozen=True)
class Occluder:
    center: tuple[float, float]  # pixels
    radii: tuple[float, float]
    luminance: int = 80


@dataclass(frozen=True)
class Scene:
    width: int
    height: int
    placements: tuple[Placement, ...] = ()
    occluders: tuple[Occluder, ...] = ()


def single_symbol_scene(matrix: ModuleMatrix, scale: int = 4, rotation: int = 0,
                        quiet_zone: int = 4) -> Scene:
    p = Placement(matrix, (0, 0), scale, rotation, quiet_zone)
    w, h = p.extent
    return Scene(w, h, (p,))


def _render_placement(p: Placement) -> np.ndarray:
    """Inverse-mapped, supersampled nearest-neighbor raster of one placement."""
    w, h = p.extent
    theta = math.radians(p.rotation % 360)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    s = p.symbol_px
    side = p.matrix.side
    q = p.quiet_zone
    modules = p.matrix.modules

    ys, xs = np.indices((h, w), dtype=np.float64)
    dark = np.zeros((h, w), dtype=np.uint16)
    offsets = (np.arange(_SUBSAMPLES) + 0.5) / _SUBSAMPLES - 0.5
    for oy in offsets:
        for ox in offsets:
            dx = xs + 0.5 + ox - w / 2.0
            dy = ys + 0.5 + oy - h / 2.0
            ux = cos_t * dx + sin_t * dy + s / 2.0
            uy = -sin_t * dx + cos_t * dy + s / 2.0
            col = np.floor(ux / p.scale).astype(np.int64) - q
            row = np.floor(uy / p.scale).astype(np.int64) - q
            inside = (0 <= row) & (row < side) & (0 <= col) & (col < side)
            hit = np.zeros((h, w), dtype=bool)
            hit[inside] = modules[row[inside], col[inside]]
            dark += hit
    total = _SUBSAMPLES * _SUBSAMPLES
    return np.rint(255.0 * (total - dark) / total).astype(np.uint8)


def render(scene: Scene) -> np.ndarray:
    """Deterministic raster: background 255, dark modules 0, occluders painted last."""
    boxes = []
    for p in scene.placements:
        w, h = p.extent
        x0, y0 = p.origin
        if x0 < 0 or y0 < 0 or x0 + w > scene.width or y0 + h > scene.height:
            raise SceneOverlapError("placement extends outside the canvas")
        boxes.append((x0, y0, x0 + w, y0 + h))
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            a, b = boxes[i], boxes[j]
            if a[0] < b[2] and b[0] < a[2] and a[1] < b[3] and b[1] < a[3]:
                raise SceneOverlapError(f"placements {i} and {j} overlap")

    canvas = np.full((scene.height, scene.width), 255, dtype=np.uint8)
    for p, (x0, y0, x1, y1) in zip(scene.placements, boxes):
        canvas[y0:y1, x0:x1] = _render_placement(p)
    for occ in scene.occluders:
        ys, xs = np.indices(canvas.shape, dtype=np.float64)
        cx, cy = occ.center
        rx, ry = occ.radii
        mask = ((xs + 0.5 - cx) / rx) ** 2 + ((ys + 0.5 - cy) / ry) ** 2 <= 1.0
        canvas[mask] = occ.luminance
    return canvas


def occluder_for(placement: Placement, envelope_side: int, luminance: int = 80) -> Occluder:
    """Circular occluder covering the placement's corner envelope plus a 1-module margin."""
    side = placement.matrix.side
    q = placement.quiet_zone
    center_mod = side - envelope_side / 2.0
    sym = ((q + center_mod) * placement.scale, (q + center_mod) * placement.scale)
    cx, cy = placement.to_scene_xy(*sym)
    radius = (envelope_side / 2.0 + 1.0) * math.sqrt(2.0) * placement.scale
    return Occluder((cx, cy), (radius, radius), luminance)


def occlude_corner(scene: Scene, placement_index: int, artifact, luminance: int = 80) -> Scene:
    """New scene with the artifact's occlusion envelope covered at one placement."""
    if not 0 <= placement_index < len(scene.placements):
        raise IndexError("placement index out of range")
    placement = scene.placements[placement_index]
    if placement.matrix.side != artifact.spec.side:
        raise ValueError("placement does not hold the artifact's matrix")
    occ = occluder_for(placement, artifact.envelope.side_modules, luminance)
    return replace(scene, occluders=scene.occluders + (occ,))


@dataclass(frozen=True)
class TrialStats:
    trials: int
    target_hit: int
    other_hit: int
    none: int
    per_code_histogram: tuple[int, ...]
    mode: str
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "trials": self.trials,
            "target_hit": self.target_hit,
            "other_hit": self.other_hit,
            "none": self.none,
            "histogram": list(self.per_code_histogram),
            "mode": self.mode,
            "seed": self.seed,
        }


def grid_scene(matrices: list[ModuleMatrix], scale: int = 4, gap_modules: int = 8,
               quiet_zone: int = 4) -> Scene:
    """Codes in a row with a fixed gap between quiet zones."""
    placements = []
    x = 0
    height = 0
    for m in matrices:
        p = Placement(m, (x, 0), scale, 0, quiet_zone)
        placements.append(p)
        w, h = p.extent
        x += w + gap_modules * scale
        height = max(height, h)
    width = x - gap_modules * scale if matrices else 0
    return Scene(width, height, tuple(placements))


def run_selection_trials(n_codes: int, mode: str, target: int, trials: int,
                         base_seed: int, scale: int = 4) -> TrialStats:
    """Seeded arbitrary-policy scans of a multi-code scene; pqr mode occludes the target.

    Decodability is independent of the seed, so the scan pipeline runs once and
    each trial applies its seeded selection to the same hypothesis outcomes.
    """
    if n_codes < 2:
        raise ValueError("n_codes must be >= 2")
    if not 0 <= target < n_codes:
        raise ValueError("target must index one of the codes")
    if mode not in ("plain", "pqr"):
        raise ValueError("mode must be 'plain' or 'pqr'")

    payloads = [f"option-{i}".encode() for i in range(n_codes)]
    if mode == "plain":
        matrices = [encoder.generate(p, encoder.EcLevel.M) for p in payloads]
        scene = grid_scene(matrices, scale)
    else:
        from .peacock import peacock

        artifacts = [peacock(p, encoder.EcLevel.M) for p in payloads]
        scene = grid_scene([a.matrix for a in artifacts], scale)
        scene = occlude_corner(scene, target, artifacts[target])

    pipeline = scanner.scan_pipeline(render(scene))
    histogram = [0] * n_codes
    target_hit = other_hit = none = 0
    index = {p: i for i, p in enumerate(payloads)}
    for i in range(trials):
        report = scanner.select_outcome(pipeline, "arbitrary", base_seed + i)
        code = index.get(report.payload) if report.outcome == "decoded" else None
        if code is None:
            none += 1
        else:
            histogram[code] += 1
            if code == target:
                target_hit += 1
            else:
                other_hit += 1
    return TrialStats(trials, target_hit, other_hit, none, tuple(histogram), mode, base_seed)
