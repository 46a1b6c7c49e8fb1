"""Reference scanner: finder detection, triple-hypothesis geometry, alignment-guided
grid fitting, decode, and the selection policies that model commodity behavior.

The whole pipeline up to decoding is independent of policy and seed; policies only
choose among hypotheses that already decoded. `scan_pipeline` exposes that split so
simulations can reuse one pass across many seeded selections.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import encoder, gf256
from .encoder import EcLevel, FORMAT_BITS_TO_LEVEL, StructureError

POLICIES = ("strict_single", "arbitrary", "first_found")


@dataclass(frozen=True)
class Tolerances:
    """Detector tolerances, stated once so defeat properties can be stress-tested."""

    run_ratio: float = 0.5            # each finder segment within 50% of nominal
    merge_radius_modules: float = 2.0
    angle_cos_max: float = 0.2
    size_ratio_max: float = 1.4
    length_ratio_max: float = 1.3
    dimension_tol: float = 0.35       # modules, version rounding residual
    align_window_modules: float = 4.0
    cross_total_tol: float = 0.4      # vertical vs horizontal finder extent


DEFAULT_TOLERANCES = Tolerances()


@dataclass
class FinderCandidate:
    cx: float
    cy: float
    module_px: float
    hits: int


@dataclass
class TripleHypothesis:
    corner: FinderCandidate
    arm_a: FinderCandidate
    arm_b: FinderCandidate
    est_version: int
    est_module_px: float


class GridModel:
    """Maps module coordinates (x = col + 0.5, y = row + 0.5) to pixel coordinates."""

    def __init__(self, matrix: np.ndarray, anchors: int):
        self.h = matrix
        self.anchors = anchors  # 3 = affine, 4 = projective

    def map_point(self, mx: float, my: float) -> tuple[float, float]:
        h = self.h
        w = h[2, 0] * mx + h[2, 1] * my + h[2, 2]
        return (
            (h[0, 0] * mx + h[0, 1] * my + h[0, 2]) / w,
            (h[1, 0] * mx + h[1, 1] * my + h[1, 2]) / w,
        )

    def map_grid(self, mx: np.ndarray, my: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        h = self.h
        w = h[2, 0] * mx + h[2, 1] * my + h[2, 2]
        return (
            (h[0, 0] * mx + h[0, 1] * my + h[0, 2]) / w,
            (h[1, 0] * mx + h[1, 1] * my + h[1, 2]) / w,
        )


@dataclass(frozen=True)
class Decoded:
    payload: bytes
    version: int
    ec: EcLevel
    errors_corrected: int


@dataclass(frozen=True)
class DecodeFailed:
    stage: str  # format | rs | structure


@dataclass(frozen=True)
class HypothesisCensus:
    finders: int
    triples: int
    decoded: int
    format_failures: int = 0
    rs_failures: int = 0
    structure_failures: int = 0


@dataclass(frozen=True)
class ScanReport:
    outcome: str  # decoded | not_found | no_unique_code | decode_failed
    payload: bytes | None
    version: int | None
    ec: EcLevel | None
    errors_corrected: int | None
    census: HypothesisCensus
    policy: str
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "payload_hex": self.payload.hex() if self.payload is not None else None,
            "version": self.version,
            "ec": self.ec.value if self.ec is not None else None,
            "errors_corrected": self.errors_corrected,
            "census": {
                "finders": self.census.finders,
                "triples": self.census.triples,
                "decoded": self.census.decoded,
            },
            "policy": self.policy,
            "seed": self.seed,
        }


def binarize(bitmap: np.ndarray) -> np.ndarray:
    """Global min/max midpoint threshold. True is dark; constant images are all light."""
    bitmap = np.asarray(bitmap, dtype=np.uint8)
    lo = int(bitmap.min())
    hi = int(bitmap.max())
    if lo == hi:
        return np.zeros(bitmap.shape, dtype=bool)
    return bitmap <= (lo + hi) / 2.0


def _row_runs(row: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Start indices and lengths of maximal same-color runs along a 1-D bool array."""
    boundaries = np.flatnonzero(row[1:] != row[:-1]) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [row.size]))
    return starts, ends - starts


def _ratio_ok(runs, nominal, module: float, tol: float) -> bool:
    for run, weight in zip(runs, nominal):
        if abs(run - weight * module) > tol * weight * module:
            return False
    return True


def _walk(binary: np.ndarray, y: int, x: int, dy: int, dx: int, value: bool, cap: int) -> int:
    """Count consecutive pixels of a color from (y, x) exclusive along a direction."""
    h, w = binary.shape
    n = 0
    y += dy
    x += dx
    while 0 <= y < h and 0 <= x < w and binary[y, x] == value and n <= cap:
        n += 1
        y += dy
        x += dx
    return n


def _cross_check(binary, cy: int, cx: int, dy: int, dx: int, total_h: float, tol: float):
    """1:1:3:1:1 re-scan through a candidate center along (dy, dx).

    Returns (center offset along the axis in steps, total steps) or None.
    """
    if not binary[cy, cx]:
        return None
    cap = int(total_h) + 7
    up_core = _walk(binary, cy, cx, -dy, -dx, True, cap)
    dn_core = _walk(binary, cy, cx, dy, dx, True, cap)
    core = up_core + dn_core + 1
    up_light = _walk(binary, cy - dy * up_core, cx - dx * up_core, -dy, -dx, False, cap)
    dn_light = _walk(binary, cy + dy * dn_core, cx + dx * dn_core, dy, dx, False, cap)
    up_ring = _walk(
        binary, cy - dy * (up_core + up_light), cx - dx * (up_core + up_light), -dy, -dx, True, cap
    )
    dn_ring = _walk(
        binary, cy + dy * (dn_core + dn_light), cx + dx * (dn_core + dn_light), dy, dx, True, cap
    )
    if not (up_ring and up_light and core and dn_light and dn_ring):
        return None
    total = float(up_ring + up_light + core + dn_light + dn_ring)
    module = total / 7.0
    lim = tol * module
    if (
        abs(up_ring - module) > lim
        or abs(up_light - module) > lim
        or abs(core - 3.0 * module) > 3.0 * lim
        or abs(dn_light - module) > lim
        or abs(dn_ring - module) > lim
    ):
        return None
    center = (dn_core - up_core) / 2.0
    return center, total


def locate_finders(binary: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> list[FinderCandidate]:
    """Find 1:1:3:1:1 row runs, confirm vertically then diagonally, merge repeats."""
    h, w = binary.shape
    ratio = tol.run_ratio
    candidates: list[FinderCandidate] = []
    for y in range(h):
        starts_a, lengths_a = _row_runs(binary[y])
        starts = starts_a.tolist()
        lengths = lengths_a.tolist()
        first_dark = 0 if binary[y, starts[0]] else 1
        for i in range(first_dark, len(starts) - 4, 2):
            r0, r1, r2, r3, r4 = lengths[i : i + 5]
            total_h = r0 + r1 + r2 + r3 + r4
            module = total_h / 7.0
            if module < 1.0:
                continue
            lim = ratio * module
            if (
                abs(r0 - module) > lim
                or abs(r1 - module) > lim
                or abs(r2 - 3.0 * module) > 3.0 * lim
                or abs(r3 - module) > lim
                or abs(r4 - module) > lim
            ):
                continue
            cx = starts[i + 2] + r2 / 2.0
            px = min(w - 1, int(cx))
            vert = _cross_check(binary, y, px, 1, 0, total_h, ratio)
            if vert is None:
                continue
            v_center, total_v = vert
            if abs(total_v - total_h) >= tol.cross_total_tol * total_h:
                continue
            cy = y + 0.5 + v_center
            py = min(h - 1, int(cy))
            if _cross_check(binary, py, px, 1, 1, total_h, ratio) is None:
                continue
            if _cross_check(binary, py, px, 1, -1, total_h, ratio) is None:
                continue
            merged = False
            for cand in candidates:
                radius = tol.merge_radius_modules * cand.module_px
                if (cand.cx - cx) ** 2 + (cand.cy - cy) ** 2 <= radius * radius:
                    n = cand.hits
                    cand.cx = (cand.cx * n + cx) / (n + 1)
                    cand.cy = (cand.cy * n + cy) / (n + 1)
                    cand.module_px = (cand.module_px * n + module) / (n + 1)
                    cand.hits = n + 1
                    merged = True
                    break
            if not merged:
                candidates.append(FinderCandidate(cx, cy, module, 1))
    return [c for c in candidates if c.hits >= 2]


def _module_pitch_along(
    binary, cx: float, cy: float, ux: float, uy: float, cap_px: float, step: float = 0.25
) -> float | None:
    """Module pitch from the 1:1:3:1:1 crossing of a finder along a module axis.

    The crossing is averaged over a few parallel lines: on rotated symbols the
    rasterized edges form staircases whose phase would otherwise bias a single
    center-line measurement by up to a pixel.
    """
    norm = math.hypot(ux, uy)
    if norm == 0:
        return None
    ux, uy = ux / norm, uy / norm

    def reach(x0: float, y0: float, sx: float, sy: float) -> float | None:
        # Walk out of the center core, across the light ring, across the dark ring.
        pos = 0.0
        for phase in (True, False, True):
            span = 0.0
            while span <= cap_px:
                pos += step
                xi = int(x0 + sx * pos)
                yi = int(y0 + sy * pos)
                if not (0 <= yi < binary.shape[0] and 0 <= xi < binary.shape[1]):
                    return None
                if binary[yi, xi] != phase:
                    break
                span += step
            else:
                return None
            pos -= step
        return pos + step / 2.0

    totals = []
    for k in (-0.471, 0.0, 0.471):
        x0 = cx - uy * k
        y0 = cy + ux * k
        xi, yi = int(x0), int(y0)
        if not (0 <= yi < binary.shape[0] and 0 <= xi < binary.shape[1]) or not binary[yi, xi]:
            continue
        forward = reach(x0, y0, ux, uy)
        backward = reach(x0, y0, -ux, -uy)
        if forward is not None and backward is not None:
            totals.append(forward + backward)
    if not totals:
        return None
    return sum(totals) / len(totals) / 7.0


def _timing_matches(binary: np.ndarray, grid: "GridModel", side: int) -> bool:
    """True when both timing tracks alternate exactly as a symbol of this side would."""
    coords = np.arange(8, side - 8) + 0.5
    expected = np.arange(8, side - 8) % 2 == 0
    h, w = binary.shape
    for mx, my in ((coords, np.full_like(coords, 6.5)), (np.full_like(coords, 6.5), coords)):
        xs, ys = grid.map_grid(mx, my)
        xi = np.floor(xs).astype(int)
        yi = np.floor(ys).astype(int)
        if ((xi < 0) | (xi >= w) | (yi < 0) | (yi >= h)).any():
            return False
        if not np.array_equal(binary[yi, xi], expected):
            return False
    return True


def _triple_version(
    corner, a, b, lu: float, lv: float, binary: np.ndarray | None, tol: Tolerances
) -> tuple[int, float] | None:
    """Version and module pitch for a normalized triple, or None to reject.

    A coarse pitch from finder crossings brackets the version; each bracketed
    version is verified against the timing tracks through an affine grid, which
    pins the pitch far more precisely than edge measurements on rotated rasters.
    Triples without a verifiable timing track (scene accidents, distracted
    corners) fall back to the coarse estimate under the dimension tolerance.
    """
    sizes = (corner.module_px, a.module_px, b.module_px)
    coarse = None
    if binary is not None:
        cap = 6.0 * corner.module_px
        crossings = []
        for cand in (corner, a, b):
            for dx, dy in ((a.cx - corner.cx, a.cy - corner.cy), (b.cx - corner.cx, b.cy - corner.cy)):
                p = _module_pitch_along(binary, cand.cx, cand.cy, dx, dy, cap)
                if p is not None:
                    crossings.append(p)
        if crossings:
            # Median: a finder whose surroundings are damaged (a distracted
            # corner) corrupts at most one crossing per direction.
            crossings.sort()
            mid = len(crossings) // 2
            coarse = (
                crossings[mid]
                if len(crossings) % 2
                else (crossings[mid - 1] + crossings[mid]) / 2.0
            )
    if coarse is None:
        coarse = sum(sizes) / 3.0

    arm = (lu + lv) / 2.0
    side_coarse = arm / coarse + 7.0
    if binary is not None:
        versions = sorted(
            (v for v in range(encoder.MIN_VERSION, encoder.MAX_VERSION + 1)
             if abs(side_coarse - (4 * v + 17)) <= 3.0),
            key=lambda v: abs(side_coarse - (4 * v + 17)),
        )
        for v in versions:
            side = 4 * v + 17
            src = [(3.5, 3.5), (side - 3.5, 3.5), (3.5, side - 3.5)]
            dst = [(corner.cx, corner.cy), (a.cx, a.cy), (b.cx, b.cy)]
            grid = GridModel(_solve_affine(src, dst), 3)
            if _timing_matches(binary, grid, side):
                return v, arm / (side - 7.0)

    version = round((side_coarse - 17.0) / 4.0)
    if not encoder.MIN_VERSION <= version <= encoder.MAX_VERSION:
        return None
    if abs(side_coarse - (4 * version + 17)) > tol.dimension_tol:
        return None
    return version, coarse


def enumerate_triples(
    cands: list[FinderCandidate],
    binary: np.ndarray | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> list[TripleHypothesis]:
    """All right-angle corner assignments of 3-subsets that pass the geometry gates."""
    hypotheses: list[TripleHypothesis] = []
    seen: set[tuple[int, frozenset[int]]] = set()
    for trio in combinations(range(len(cands)), 3):
        for k in range(3):
            corner = cands[trio[k]]
            a = cands[trio[(k + 1) % 3]]
            b = cands[trio[(k + 2) % 3]]
            ux, uy = a.cx - corner.cx, a.cy - corner.cy
            vx, vy = b.cx - corner.cx, b.cy - corner.cy
            lu = math.hypot(ux, uy)
            lv = math.hypot(vx, vy)
            if lu == 0 or lv == 0:
                continue
            if abs(ux * vx + uy * vy) / (lu * lv) > tol.angle_cos_max:
                continue
            if max(lu, lv) / min(lu, lv) > tol.length_ratio_max:
                continue
            sizes = (corner.module_px, a.module_px, b.module_px)
            if max(sizes) / min(sizes) > tol.size_ratio_max:
                continue
            cross = ux * vy - uy * vx
            if cross == 0:
                continue
            if cross < 0:
                a, b = b, a
                lu, lv = lv, lu
            est = _triple_version(corner, a, b, lu, lv, binary, tol)
            if est is None:
                continue
            version, pitch = est
            key = (trio[k], frozenset((id(a), id(b))))
            if key in seen:
                continue
            seen.add(key)
            hypotheses.append(TripleHypothesis(corner, a, b, version, pitch))
    hypotheses.sort(key=lambda t: (t.corner.cy, t.corner.cx, t.arm_a.cy, t.arm_a.cx))
    return hypotheses


def _solve_affine(src: list[tuple[float, float]], dst: list[tuple[float, float]]) -> np.ndarray:
    m = np.array([[x, y, 1.0] for x, y in src])
    px = np.linalg.solve(m, np.array([p[0] for p in dst]))
    py = np.linalg.solve(m, np.array([p[1] for p in dst]))
    return np.array([px, py, [0.0, 0.0, 1.0]])


def _solve_homography(src, dst) -> np.ndarray:
    rows = []
    rhs = []
    for (mx, my), (x, y) in zip(src, dst):
        rows.append([mx, my, 1, 0, 0, 0, -x * mx, -x * my])
        rhs.append(x)
        rows.append([0, 0, 0, mx, my, 1, -y * mx, -y * my])
        rhs.append(y)
    sol = np.linalg.solve(np.array(rows, dtype=float), np.array(rhs, dtype=float))
    return np.array(
        [[sol[0], sol[1], sol[2]], [sol[3], sol[4], sol[5]], [sol[6], sol[7], 1.0]]
    )


def find_alignment(
    binary: np.ndarray,
    proj_x: float,
    proj_y: float,
    scale_x: float,
    scale_y: float,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[float, float] | None:
    """Nearest 1:1:1 alignment-ratio structure to the projection inside the window.

    scale_x/scale_y are one module's image footprint along each axis (wider than
    the module pitch on rotated symbols); the window spans +/-4 modules.
    """
    h, w = binary.shape
    win_x = tol.align_window_modules * scale_x
    win_y = tol.align_window_modules * scale_y
    y0 = max(0, int(proj_y - win_y))
    y1 = min(h, int(math.ceil(proj_y + win_y)) + 1)
    x0 = max(0, int(proj_x - win_x))
    x1 = min(w, int(math.ceil(proj_x + win_x)) + 1)
    if y0 >= y1 or x0 >= x1:
        return None

    best: tuple[float, int, float, float] | None = None  # (distance, scan order, cx, cy)
    order = 0
    cap_v = int(2 * scale_y) + 1
    for y in range(y0, y1):
        starts, lengths = _row_runs(binary[y, x0:x1])
        first_dark = 0 if binary[y, x0 + starts[0]] else 1
        # A candidate is a dark run flanked by light runs, all about one module.
        for i in range(first_dark + 2, len(starts), 2):
            if i - 1 < 0 or i + 1 >= len(starts):
                continue
            runs = (lengths[i - 1], lengths[i], lengths[i + 1])
            if not _ratio_ok(runs, (1.0, 1.0, 1.0), scale_x, tol.run_ratio):
                continue
            cx = x0 + starts[i] + lengths[i] / 2.0
            px = min(w - 1, int(cx))
            up = _walk(binary, y, px, -1, 0, True, cap_v)
            dn = _walk(binary, y, px, 1, 0, True, cap_v)
            dark_v = up + dn + 1
            if abs(dark_v - scale_y) > tol.run_ratio * scale_y:
                continue
            up_l = _walk(binary, y - up, px, -1, 0, False, cap_v)
            dn_l = _walk(binary, y + dn, px, 1, 0, False, cap_v)
            if abs(up_l - scale_y) > tol.run_ratio * scale_y:
                continue
            if abs(dn_l - scale_y) > tol.run_ratio * scale_y:
                continue
            cy = y + 0.5 + (dn - up) / 2.0
            if abs(cx - proj_x) > win_x or abs(cy - proj_y) > win_y:
                continue
            dist = math.hypot(cx - proj_x, cy - proj_y)
            order += 1
            if best is None or (dist, order) < (best[0], best[1]):
                best = (dist, order, cx, cy)
    if best is None:
        return None
    return best[2], best[3]


def fit_grid(
    binary: np.ndarray, hyp: TripleHypothesis, tol: Tolerances = DEFAULT_TOLERANCES
) -> GridModel:
    """Affine model from the finder centers, refined by one alignment anchor when found."""
    side = 4 * hyp.est_version + 17
    src = [(3.5, 3.5), (side - 3.5, 3.5), (3.5, side - 3.5)]
    dst = [
        (hyp.corner.cx, hyp.corner.cy),
        (hyp.arm_a.cx, hyp.arm_a.cy),
        (hyp.arm_b.cx, hyp.arm_b.cy),
    ]
    affine = _solve_affine(src, dst)
    grid = GridModel(affine, 3)
    if hyp.est_version < 2:
        return grid
    proj = grid.map_point(side - 6.5, side - 6.5)
    scale_x = abs(affine[0, 0]) + abs(affine[0, 1])  # one module's image footprint
    scale_y = abs(affine[1, 0]) + abs(affine[1, 1])
    found = find_alignment(binary, proj[0], proj[1], scale_x, scale_y, tol)
    if found is None:
        return grid
    try:
        hom = _solve_homography(src + [(side - 6.5, side - 6.5)], dst + [found])
    except np.linalg.LinAlgError:
        return grid
    return GridModel(hom, 4)


def sample_grid(binary: np.ndarray, grid: GridModel, side: int) -> np.ndarray:
    """Sample module centers through the grid model; out-of-image reads light."""
    cols, rows = np.meshgrid(np.arange(side) + 0.5, np.arange(side) + 0.5)
    xs, ys = grid.map_grid(cols, rows)
    xi = np.floor(xs).astype(int)
    yi = np.floor(ys).astype(int)
    h, w = binary.shape
    valid = (0 <= xi) & (xi < w) & (0 <= yi) & (yi < h)
    out = np.zeros((side, side), dtype=bool)
    out[valid] = binary[yi[valid], xi[valid]]
    return out


def _read_format(sampled: np.ndarray) -> tuple[EcLevel, int] | None:
    side = sampled.shape[0]
    for cells in encoder.format_cells(side):
        word = 0
        for i, (r, c) in enumerate(cells):
            if sampled[r, c]:
                word |= 1 << i
        decoded = gf256.bch_decode_format(word)
        if decoded is not None:
            return FORMAT_BITS_TO_LEVEL[decoded[0]], decoded[1]
    return None


def decode_grid(binary: np.ndarray, grid: GridModel, est_version: int) -> Decoded | DecodeFailed:
    """Sample, read format, unmask, extract, de-interleave, correct, validate."""
    side = 4 * est_version + 17
    sampled = sample_grid(binary, grid, side)
    fmt = _read_format(sampled)
    if fmt is None:
        return DecodeFailed("format")
    level, mask_id = fmt
    spec = encoder.symbol_spec(est_version, level)
    stream = encoder.extract_codewords(sampled, est_version, mask_id)
    blocks = encoder.deinterleave(stream, spec)
    data = bytearray()
    corrected = 0
    for block in blocks:
        try:
            fixed, errors = gf256.rs_decode(
                block.data + block.ec, len(block.ec), max_errors=block.capacity_t
            )
        except gf256.DecodeFailure:
            return DecodeFailed("rs")
        data.extend(fixed)
        corrected += errors
    try:
        payload = encoder.parse_payload(bytes(data), est_version)
    except StructureError:
        return DecodeFailed("structure")
    return Decoded(payload, est_version, level, corrected)


@dataclass
class PipelineResult:
    binary: np.ndarray
    candidates: list[FinderCandidate]
    hypotheses: list[TripleHypothesis]
    outcomes: list[Decoded | DecodeFailed]
    census: HypothesisCensus


def scan_pipeline(bitmap: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> PipelineResult:
    """Seed- and policy-independent part of a scan: locate, enumerate, fit, decode."""
    binary = binarize(bitmap)
    candidates = locate_finders(binary, tol)
    hypotheses = enumerate_triples(candidates, binary, tol)
    outcomes: list[Decoded | DecodeFailed] = []
    stage_counts = {"format": 0, "rs": 0, "structure": 0}
    decoded = 0
    for hyp in hypotheses:
        grid = fit_grid(binary, hyp, tol)
        outcome = decode_grid(binary, grid, hyp.est_version)
        if isinstance(outcome, Decoded):
            decoded += 1
        else:
            stage_counts[outcome.stage] += 1
        outcomes.append(outcome)
    census = HypothesisCensus(
        finders=len(candidates),
        triples=len(hypotheses),
        decoded=decoded,
        format_failures=stage_counts["format"],
        rs_failures=stage_counts["rs"],
        structure_failures=stage_counts["structure"],
    )
    return PipelineResult(binary, candidates, hypotheses, outcomes, census)


def select_outcome(
    result: PipelineResult, policy: str = "strict_single", seed: int = 0
) -> ScanReport:
    """Apply a selection policy to a finished pipeline pass."""
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    census = result.census

    def report(outcome: str, dec: Decoded | None = None) -> ScanReport:
        return ScanReport(
            outcome=outcome,
            payload=dec.payload if dec else None,
            version=dec.version if dec else None,
            ec=dec.ec if dec else None,
            errors_corrected=dec.errors_corrected if dec else None,
            census=census,
            policy=policy,
            seed=seed,
        )

    if not result.hypotheses:
        return report("not_found")
    pairs = list(zip(result.hypotheses, result.outcomes))
    decoded = [(h, d) for h, d in pairs if isinstance(d, Decoded)]
    if not decoded:
        return report("decode_failed")

    if policy == "strict_single":
        if len(decoded) == 1:
            return report("decoded", decoded[0][1])
        payloads = {d.payload for _, d in decoded}
        sets = [{id(h.corner), id(h.arm_a), id(h.arm_b)} for h, _ in decoded]
        disjoint = any(
            not (sets[i] & sets[j]) for i in range(len(sets)) for j in range(i + 1, len(sets))
        )
        if len(payloads) == 1 and not disjoint:
            return report("decoded", decoded[0][1])
        return report("no_unique_code")

    if policy == "arbitrary":
        order = list(range(len(pairs)))
        random.Random(seed).shuffle(order)
        for i in order:
            if isinstance(pairs[i][1], Decoded):
                return report("decoded", pairs[i][1])
        return report("decode_failed")

    # first_found: deterministic raster order by corner position.
    decoded.sort(key=lambda hd: (hd[0].corner.cy, hd[0].corner.cx))
    return report("decoded", decoded[0][1])


def scan(
    bitmap: np.ndarray,
    policy: str = "strict_single",
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ScanReport:
    """One-frame scan: binarize, locate, enumerate, fit and decode, then select."""
    return select_outcome(scan_pipeline(bitmap, tol), policy, seed)
