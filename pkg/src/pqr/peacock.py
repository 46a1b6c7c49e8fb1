"""Damage a QR matrix with a distracter pattern so scanners fail until the corner
is occluded.

The distracter is a fourth finder pattern at the finderless corner plus a cluster
of fake 5x5 alignment replicas. One replica sits two modules from the true
bottom-right alignment center, inside the scanner's search window, so the true
finder triple refines its grid against a displaced anchor and decoding fails.
The replicas are interleaved with the fourth finder so the whole distracter fits
an occlusion envelope of 10 modules; every stamped cell that lands on the finder
or its separator carries the color already there except at a few cells chosen to
leave one full finder scan row, its center column, and its diagonal intact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import encoder, scanner, scene as scene_mod
from .encoder import EcLevel, SymbolSpec
from .matrix import ModuleMatrix


class InfeasibleError(Exception):
    """No distracter satisfies both the confusion guarantee and the damage budget."""


# Distracter geometry in offsets from the finderless corner (offset k means
# index side-1-k). The fourth finder spans offsets 0..6 with its separator at
# offset 7. Replica stamping order matters: the second replica overwrites part
# of the first and restores the finder's scan row at offset 4.
_FAKE_OFFSETS = ((2, 6), (4, 6))
_CONFUSER_OFFSET = (4, 6)
_TRUE_CENTER_OFFSET = (6, 6)
ENVELOPE_SIDE = 10


@dataclass(frozen=True)
class OcclusionEnvelope:
    corner: str
    side_modules: int


@dataclass(frozen=True)
class DistracterSpec:
    fourth_finder_origin: tuple[int, int]
    fake_alignment_centers: tuple[tuple[int, int], ...]
    suppressed_true_centers: tuple[tuple[int, int], ...]
    envelope: OcclusionEnvelope


@dataclass(frozen=True)
class DamageReport:
    modules_changed: int
    per_block_errors: tuple[tuple[int, int, int], ...]  # (block, codewords hit, capacity_t)
    feasible: bool


@dataclass(frozen=True)
class CertificationResult:
    finder_candidates: int
    uncovered_upright_defeated: bool
    uncovered_diamond_defeated: bool
    occluded_upright_decoded: bool
    occluded_diamond_decoded: bool

    @property
    def passed(self) -> bool:
        return (
            self.finder_candidates == 4
            and self.uncovered_upright_defeated
            and self.uncovered_diamond_defeated
            and self.occluded_upright_decoded
            and self.occluded_diamond_decoded
        )


@dataclass
class PqrArtifact:
    matrix: ModuleMatrix
    payload: bytes
    spec: SymbolSpec
    distracter: DistracterSpec
    report: DamageReport
    orientation_hint: str = "diamond"
    requested_ec: EcLevel | None = None
    certification: CertificationResult | None = None

    @property
    def envelope(self) -> OcclusionEnvelope:
        return self.distracter.envelope


def envelope_cells(spec_side: int, side_modules: int):
    """(row, col) cells of the corner square an occluding finger is assumed to fill."""
    e = min(side_modules, spec_side)
    lo = spec_side - e
    for r in range(lo, spec_side):
        for c in range(lo, spec_side):
            yield r, c


def _count_envelope_damage(spec: SymbolSpec, side_modules: int):
    """Distinct codewords per block touched by the envelope, plus module count."""
    _, fmap = encoder._function_template(spec.version)
    order_index = {rc: i for i, rc in enumerate(encoder.placement_order(spec.version))}
    owner = encoder.interleaved_owner(spec)
    touched: dict[int, set[int]] = {}
    modules = 0
    for r, c in envelope_cells(spec.side, side_modules):
        modules += 1
        if fmap[r, c]:
            continue
        bit = order_index[(r, c)]
        cw = bit // 8
        if cw < len(owner):  # remainder bits map to no codeword
            block, pos = owner[cw]
            touched.setdefault(block, set()).add(pos)
    n_blocks = sum(shape.count for shape in spec.block_layout)
    capacities = [s.capacity_t for s in spec.block_layout for _ in range(s.count)]
    per_block = tuple(
        (b, len(touched.get(b, ())), capacities[b]) for b in range(n_blocks)
    )
    return modules, per_block


def plan_distracter(spec: SymbolSpec) -> DistracterSpec:
    """Deterministic distracter layout with the smallest feasible envelope."""
    if spec.version < 2:
        raise InfeasibleError("version 1 has no alignment pattern to confuse")
    side = spec.side
    _, per_block = _count_envelope_damage(spec, ENVELOPE_SIDE)
    if any(hit > cap for _, hit, cap in per_block):
        raise InfeasibleError(
            f"envelope damage exceeds capacity at version {spec.version}-{spec.ec.value}"
        )
    fakes = tuple((side - 1 - dr, side - 1 - dc) for dr, dc in _FAKE_OFFSETS)
    return DistracterSpec(
        fourth_finder_origin=(side - 7, side - 7),
        fake_alignment_centers=fakes,
        suppressed_true_centers=((side - 7, side - 7),),
        envelope=OcclusionEnvelope("bottom_right", ENVELOPE_SIDE),
    )


def damage_report(matrix: ModuleMatrix, spec: SymbolSpec, d: DistracterSpec) -> DamageReport:
    """Charge every codeword the envelope touches; function modules carry no damage."""
    if matrix.side != spec.side:
        raise ValueError("matrix does not match spec")
    modules, per_block = _count_envelope_damage(spec, d.envelope.side_modules)
    feasible = all(hit <= cap for _, hit, cap in per_block)
    return DamageReport(modules, per_block, feasible)


def _stamp_square(modules: np.ndarray, painted: np.ndarray, cr: int, cc: int, radius_colors) -> None:
    side = modules.shape[0]
    radius = len(radius_colors) - 1
    for dr in range(-radius, radius + 1):
        for dc in range(-radius, radius + 1):
            r, c = cr + dr, cc + dc
            if 0 <= r < side and 0 <= c < side:
                modules[r, c] = radius_colors[max(abs(dr), abs(dc))]
                painted[r, c] = True


def apply_distracter(matrix: ModuleMatrix, d: DistracterSpec) -> ModuleMatrix:
    """Stamp the fourth finder, separator, and fake replicas; mark them as function.

    Replicas stamp in listed order over the finder; their overlapping cells agree
    in color except where the layout deliberately sacrifices one finder scan row.
    Any cell of a suppressed true alignment pattern the stamps did not cover is
    cleared to light, so no alignment-ratio structure survives near the true
    center in any presentation rotation.
    """
    out = matrix.copy()
    side = out.side
    painted = np.zeros((side, side), dtype=bool)
    r0, c0 = d.fourth_finder_origin
    for c in range(max(0, c0 - 1), side):
        if 0 <= r0 - 1 < side:
            out.modules[r0 - 1, c] = False
            painted[r0 - 1, c] = True
    for r in range(max(0, r0 - 1), side):
        if 0 <= c0 - 1 < side:
            out.modules[r, c0 - 1] = False
            painted[r, c0 - 1] = True
    _stamp_square(out.modules, painted, r0 + 3, c0 + 3, (True, True, False, True))
    for cr, cc in d.fake_alignment_centers:
        _stamp_square(out.modules, painted, cr, cc, (True, False, True))
    for cr, cc in d.suppressed_true_centers:
        for dr in range(-2, 3):
            for dc in range(-2, 3):
                r, c = cr + dr, cc + dc
                if 0 <= r < side and 0 <= c < side and not painted[r, c]:
                    out.modules[r, c] = False
                    painted[r, c] = True
    out.function_map |= painted
    return out


def _single_scene(matrix: ModuleMatrix, rotation: int, scale: int = 4) -> scene_mod.Scene:
    return scene_mod.single_symbol_scene(matrix, scale=scale, rotation=rotation)


def certify(artifact: PqrArtifact, scale: int = 4, luminance: int = 80) -> CertificationResult:
    """Self-scan the artifact: uncovered renders must defeat every hypothesis,
    occluded renders must decode the payload, upright and diamond alike."""
    results = {}
    finder_candidates = 0
    for rotation in (0, scene_mod.DIAMOND_ROTATION):
        sc = _single_scene(artifact.matrix, rotation, scale)
        pipe = scanner.scan_pipeline(scene_mod.render(sc))
        if rotation == 0:
            finder_candidates = pipe.census.finders
        results[("uncovered", rotation)] = pipe.census.decoded == 0
        occluded = scene_mod.occlude_corner(sc, 0, artifact, luminance=luminance)
        report = scanner.scan(scene_mod.render(occluded), "strict_single", 0)
        results[("occluded", rotation)] = (
            report.outcome == "decoded" and report.payload == artifact.payload
        )
    return CertificationResult(
        finder_candidates=finder_candidates,
        uncovered_upright_defeated=results[("uncovered", 0)],
        uncovered_diamond_defeated=results[("uncovered", scene_mod.DIAMOND_ROTATION)],
        occluded_upright_decoded=results[("occluded", 0)],
        occluded_diamond_decoded=results[("occluded", scene_mod.DIAMOND_ROTATION)],
    )


def build_artifact(payload: bytes, spec: SymbolSpec, requested_ec: EcLevel | None = None) -> PqrArtifact:
    """Plan, encode, stamp, and report for one (version, EC); no certification."""
    plan = plan_distracter(spec)
    stream = encoder.interleave(encoder.split_blocks(encoder.encode_payload(payload, spec), spec))
    matrix, _ = encoder.place_and_mask(stream, spec)
    report = damage_report(matrix, spec, plan)
    damaged = apply_distracter(matrix, plan)
    return PqrArtifact(
        matrix=damaged,
        payload=payload,
        spec=spec,
        distracter=plan,
        report=report,
        requested_ec=requested_ec,
    )


def peacock(payload: bytes, ec_preference: EcLevel | str = EcLevel.M, min_version: int = 2) -> PqrArtifact:
    """Search versions and EC levels until a distracter plan is feasible and the
    constructed artifact certifies; returns the certified artifact.

    At each version the requested level is tried first, then stronger levels.
    A combination whose plan is feasible but whose self-certification fails is
    treated as infeasible and the search continues.
    """
    ec_preference = EcLevel(ec_preference)
    min_version = max(2, min_version)
    levels = [lv for lv in (EcLevel.L, EcLevel.M, EcLevel.Q, EcLevel.H)
              if lv.strength >= ec_preference.strength]
    fits_anywhere = False
    for version in range(min_version, encoder.MAX_VERSION + 1):
        for level in levels:
            spec = encoder.symbol_spec(version, level)
            if len(payload) > spec.max_payload_bytes:
                continue
            fits_anywhere = True
            try:
                artifact = build_artifact(payload, spec, requested_ec=ec_preference)
            except InfeasibleError:
                continue
            cert = certify(artifact)
            if cert.passed:
                artifact.certification = cert
                return artifact
    if not fits_anywhere:
        raise encoder.CapacityExceeded(
            f"payload of {len(payload)} bytes fits no version in [{min_version}, {encoder.MAX_VERSION}]"
        )
    raise InfeasibleError("no in-scope (version, EC) yields a feasible, certifiable distracter")


def feasibility_frontier() -> dict[tuple[int, str], bool]:
    """Plan-level feasibility of every in-scope (version, EC) combination."""
    out = {}
    for version in range(2, encoder.MAX_VERSION + 1):
        for level in EcLevel:
            spec = encoder.symbol_spec(version, level)
            try:
                plan_distracter(spec)
                out[(version, level.value)] = True
            except InfeasibleError:
                out[(version, level.value)] = False
    return out


def sidecar_report(artifact: PqrArtifact) -> dict:
    """JSON-ready summary: version, EC, envelope, per-block damage, certification."""
    cert = artifact.certification
    return {
        "version": artifact.spec.version,
        "ec": artifact.spec.ec.value,
        "requested_ec": artifact.requested_ec.value if artifact.requested_ec else None,
        "envelope_side_modules": artifact.envelope.side_modules,
        "modules_changed": artifact.report.modules_changed,
        "feasible": artifact.report.feasible,
        "per_block": [
            {"block": b, "codewords_hit": hit, "capacity_t": cap}
            for b, hit, cap in artifact.report.per_block_errors
        ],
        "orientation_hint": artifact.orientation_hint,
        "certification": None
        if cert is None
        else {
            "finder_candidates": cert.finder_candidates,
            "uncovered_upright_defeated": cert.uncovered_upright_defeated,
            "uncovered_diamond_defeated": cert.uncovered_diamond_defeated,
            "occluded_upright_decoded": cert.occluded_upright_decoded,
            "occluded_diamond_decoded": cert.occluded_diamond_decoded,
            "passed": cert.passed,
        },
    }
