import random

import numpy as np
import pytest

from pqr import encoder, scanner, scene
from pqr.scanner import DEFAULT_TOLERANCES


# ---- binarize ----

def test_binarize_constant_image_is_all_light():
    assert not scanner.binarize(np.full((5, 5), 255, dtype=np.uint8)).any()
    assert not scanner.binarize(np.full((5, 5), 0, dtype=np.uint8)).any()


def test_binarize_two_tone_partition():
    img = np.array([[0, 255, 0], [255, 0, 255]], dtype=np.uint8)
    assert np.array_equal(scanner.binarize(img), img == 0)


def test_binarize_idempotent_on_two_tone():
    img = np.array([[10, 200], [200, 10]], dtype=np.uint8)
    first = scanner.binarize(img)
    again = scanner.binarize(np.where(first, 0, 255).astype(np.uint8))
    assert np.array_equal(first, again)


def test_binarize_occluder_luminances_are_equivalent():
    # Against 0/255 content the midpoint threshold reads 0, 80 and 120 alike.
    base = np.array([[0, 255, 80], [120, 255, 0]], dtype=np.uint8)
    for lum in (0, 80, 120):
        img = base.copy()
        img[0, 2] = lum
        img[1, 0] = lum
        assert np.array_equal(scanner.binarize(img), scanner.binarize(base))


# ---- finder detection ----

def test_locate_finders_blank_image():
    assert scanner.locate_finders(np.zeros((50, 50), dtype=bool)) == []


def test_locate_finders_plain_geometry(plain_bitmap):
    cands = scanner.locate_finders(scanner.binarize(plain_bitmap))
    assert len(cands) == 3
    w = plain_bitmap.shape[1]
    expected = {(30.0, 30.0), (w - 30.0, 30.0), (30.0, w - 30.0)}
    for cand in cands:
        assert any(abs(cand.cx - ex) <= 0.5 and abs(cand.cy - ey) <= 0.5 for ex, ey in expected)
        assert cand.hits >= 2
        assert abs(cand.module_px - 4.0) < 0.5


def test_locate_finders_pqr_has_four(pqr_artifact):
    bmp = scene.render(scene.single_symbol_scene(pqr_artifact.matrix))
    cands = scanner.locate_finders(scanner.binarize(bmp))
    assert len(cands) == 4


# ---- triples ----

def test_enumerate_triples_needs_three_candidates():
    c = scanner.FinderCandidate(10.0, 10.0, 4.0, 5)
    assert scanner.enumerate_triples([c, c]) == []


def test_enumerate_triples_plain_yields_one(plain_bitmap):
    binary = scanner.binarize(plain_bitmap)
    cands = scanner.locate_finders(binary)
    triples = scanner.enumerate_triples(cands, binary)
    assert len(triples) == 1
    hyp = triples[0]
    assert hyp.est_version == 1
    # Normalized right-handed: corner at top-left of the implied symbol.
    assert abs(hyp.est_module_px - 4.0) < 0.1


def test_enumerate_triples_square_corners_yield_four(pqr_artifact):
    bmp = scene.render(scene.single_symbol_scene(pqr_artifact.matrix))
    binary = scanner.binarize(bmp)
    cands = scanner.locate_finders(binary)
    triples = scanner.enumerate_triples(cands, binary)
    assert len(triples) == 4
    corners = {(round(t.corner.cx), round(t.corner.cy)) for t in triples}
    assert len(corners) == 4  # each omitted corner yields one valid L


def test_enumerate_triples_geometry_rejects_bad_angle():
    cands = [
        scanner.FinderCandidate(0.0, 0.0, 4.0, 5),
        scanner.FinderCandidate(100.0, 0.0, 4.0, 5),
        scanner.FinderCandidate(100.0, 100.0, 4.0, 5),
    ]
    # Only the right angle (at the middle candidate) passes; without a bitmap
    # the fallback residual gate still applies, side = 100/4 + 7 = 32 -> none.
    triples = scanner.enumerate_triples(cands, None)
    assert all(abs(t.corner.cx - 100.0) < 1 and abs(t.corner.cy) < 1 for t in triples)


# ---- grid fitting ----

def test_fit_grid_v2_alignment_refines_to_four_anchors():
    matrix = encoder.generate(b"grid", "M", min_version=2)
    bmp = scene.render(scene.single_symbol_scene(matrix))
    binary = scanner.binarize(bmp)
    hyp = scanner.enumerate_triples(scanner.locate_finders(binary), binary)[0]
    grid = scanner.fit_grid(binary, hyp)
    assert grid.anchors == 4
    side = matrix.side
    for (mx, my), cand in zip(
        [(3.5, 3.5), (side - 3.5, 3.5), (3.5, side - 3.5)],
        [hyp.corner, hyp.arm_a, hyp.arm_b],
    ):
        x, y = grid.map_point(mx, my)
        assert abs(x - cand.cx) < 0.5 and abs(y - cand.cy) < 0.5
    # The alignment anchor sits at the true center.
    ax, ay = grid.map_point(side - 6.5, side - 6.5)
    assert abs(ax - (4 + side - 6.5) * 4) < 1.0
    assert abs(ay - (4 + side - 6.5) * 4) < 1.0


def test_fit_grid_v1_is_affine_only(plain_bitmap):
    binary = scanner.binarize(plain_bitmap)
    hyp = scanner.enumerate_triples(scanner.locate_finders(binary), binary)[0]
    grid = scanner.fit_grid(binary, hyp)
    assert grid.anchors == 3


def test_fit_grid_pqr_true_triple_is_confused(pqr_artifact):
    """The nearest window match is a fake center, displacing the fourth corner."""
    bmp = scene.render(scene.single_symbol_scene(pqr_artifact.matrix))
    binary = scanner.binarize(bmp)
    cands = scanner.locate_finders(binary)
    side = pqr_artifact.spec.side
    true_triple = None
    for hyp in scanner.enumerate_triples(cands, binary):
        cx, cy = hyp.corner.cx, hyp.corner.cy
        if abs(cx - 30.0) < 2 and abs(cy - 30.0) < 2:
            true_triple = hyp
    assert true_triple is not None
    grid = scanner.fit_grid(binary, true_triple)
    assert grid.anchors == 4
    affine = scanner.GridModel(
        scanner._solve_affine(
            [(3.5, 3.5), (side - 3.5, 3.5), (3.5, side - 3.5)],
            [(true_triple.corner.cx, true_triple.corner.cy),
             (true_triple.arm_a.cx, true_triple.arm_a.cy),
             (true_triple.arm_b.cx, true_triple.arm_b.cy)],
        ),
        3,
    )
    gx, gy = grid.map_point(side - 0.5, side - 0.5)
    tx, ty = affine.map_point(side - 0.5, side - 0.5)
    err_modules = ((gx - tx) ** 2 + (gy - ty) ** 2) ** 0.5 / 4.0
    assert err_modules >= 2.0


# ---- decode ----

def test_decode_grid_plain_no_errors(plain_bitmap):
    binary = scanner.binarize(plain_bitmap)
    hyp = scanner.enumerate_triples(scanner.locate_finders(binary), binary)[0]
    grid = scanner.fit_grid(binary, hyp)
    out = scanner.decode_grid(binary, grid, hyp.est_version)
    assert isinstance(out, scanner.Decoded)
    assert out.payload == b"EAT"
    assert out.errors_corrected == 0


def test_decode_grid_occluded_pqr_corrects_errors(pqr_artifact):
    sc = scene.single_symbol_scene(pqr_artifact.matrix)
    sc = scene.occlude_corner(sc, 0, pqr_artifact)
    report = scanner.scan(scene.render(sc))
    assert report.outcome == "decoded"
    assert report.payload == pqr_artifact.payload
    cap_total = sum(
        s.capacity_t * s.count for s in pqr_artifact.spec.block_layout
    )
    assert 1 <= report.errors_corrected <= cap_total


def test_decode_grid_displaced_corner_fails(plain_bitmap):
    matrix = encoder.generate(b"displaced", "M", min_version=2)
    bmp = scene.render(scene.single_symbol_scene(matrix))
    binary = scanner.binarize(bmp)
    hyp = scanner.enumerate_triples(scanner.locate_finders(binary), binary)[0]
    side = matrix.side
    src = [(3.5, 3.5), (side - 3.5, 3.5), (3.5, side - 3.5), (side - 6.5, side - 6.5)]
    affine = scanner.fit_grid(binary, hyp)
    dst = [affine.map_point(*p) for p in src[:3]]
    br = affine.map_point(*src[3])
    displaced = scanner._solve_homography(src, dst + [(br[0] + 8.0, br[1])])  # 2 modules off
    out = scanner.decode_grid(binary, scanner.GridModel(displaced, 4), hyp.est_version)
    assert isinstance(out, scanner.DecodeFailed)


# ---- scan and policies ----

def two_code_scene():
    a = encoder.generate(b"left", "M")
    b = encoder.generate(b"right", "M")
    return scene.grid_scene([a, b])


def test_scan_strict_single_on_two_codes_is_no_unique():
    report = scanner.scan(scene.render(two_code_scene()), "strict_single", 0)
    assert report.outcome == "no_unique_code"
    assert report.census.finders == 6
    assert report.census.decoded == 2


def test_scan_arbitrary_splits_between_two_codes():
    bmp = scene.render(two_code_scene())
    pipe = scanner.scan_pipeline(bmp)
    hits = {b"left": 0, b"right": 0}
    for seed in range(400):
        report = scanner.select_outcome(pipe, "arbitrary", seed)
        assert report.outcome == "decoded"
        hits[report.payload] += 1
    frac = hits[b"left"] / 400
    assert abs(frac - 0.5) <= 0.07


def test_scan_first_found_is_deterministic_raster_order():
    bmp = scene.render(two_code_scene())
    reports = {scanner.scan(bmp, "first_found", s).payload for s in range(5)}
    assert reports == {b"left"}


def test_scan_not_found_on_blank():
    report = scanner.scan(np.full((40, 40), 255, dtype=np.uint8))
    assert report.outcome == "not_found"
    assert report.census.finders == 0


def test_policy_invariance_of_decodability(pqr_artifact):
    uncovered = scene.render(scene.single_symbol_scene(pqr_artifact.matrix))
    for policy in scanner.POLICIES:
        for seed in (0, 1, 99):
            assert scanner.scan(uncovered, policy, seed).outcome != "decoded"
    covered = scene.render(
        scene.occlude_corner(scene.single_symbol_scene(pqr_artifact.matrix), 0, pqr_artifact)
    )
    for policy in scanner.POLICIES:
        for seed in (0, 1, 99):
            report = scanner.scan(covered, policy, seed)
            assert report.outcome == "decoded"
            assert report.payload == pqr_artifact.payload


@pytest.mark.parametrize("rotation", [0, 45, 90, 135, 180, 270])
def test_roundtrip_at_scale_three(rotation):
    payload = b"small scale"
    matrix = encoder.generate(payload, "Q", min_version=2)
    bmp = scene.render(scene.single_symbol_scene(matrix, scale=3, rotation=rotation))
    report = scanner.scan(bmp)
    assert report.outcome == "decoded"
    assert report.payload == payload


@pytest.mark.parametrize("version,level", [(1, "H"), (4, "M"), (10, "L")])
@pytest.mark.parametrize("rotation", [0, 45, 90, 135, 180, 270])
def test_roundtrip_rotations_at_scale_four(version, level, rotation):
    rng = random.Random(version * 1000 + rotation)
    spec = encoder.symbol_spec(version, level)
    payload = bytes(rng.randrange(256) for _ in range(spec.max_payload_bytes // 2))
    matrix = encoder.generate(payload, level, min_version=version)
    bmp = scene.render(scene.single_symbol_scene(matrix, scale=4, rotation=rotation))
    report = scanner.scan(bmp)
    assert report.outcome == "decoded"
    assert report.payload == payload
    assert report.version == version


def test_scan_report_json_shape(plain_bitmap):
    report = scanner.scan(plain_bitmap, "arbitrary", 7)
    data = report.to_json_dict()
    assert set(data) == {
        "outcome", "payload_hex", "version", "ec", "errors_corrected",
        "census", "policy", "seed",
    }
    assert data["outcome"] == "decoded"
    assert data["payload_hex"] == b"EAT".hex()
    assert data["census"] == {"finders": 3, "triples": 1, "decoded": 1}
    assert data["policy"] == "arbitrary"
    assert data["seed"] == 7


def test_tolerances_are_the_documented_constants():
    t = DEFAULT_TOLERANCES
    assert t.run_ratio == 0.5
    assert t.merge_radius_modules == 2.0
    assert t.angle_cos_max == 0.2
    assert t.size_ratio_max == 1.4
    assert t.length_ratio_max == 1.3
    assert t.dimension_tol == 0.35
    assert t.align_window_modules == 4.0
