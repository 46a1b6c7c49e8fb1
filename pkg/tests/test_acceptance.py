"""Acceptance suite: one test per criterion, each printing a PASS line with its
measurements. Run with `pytest tests/test_acceptance.py -v -s`.
"""

import json
import random
import time
from pathlib import Path

import numpy as np
import pytest

from pqr import cli, encoder, gf256, pnm, scanner, scene
from pqr.encoder import EcLevel
from pqr.peacock import (
    build_artifact,
    certify,
    envelope_cells,
    plan_distracter,
    InfeasibleError,
)

CORPUS_SIZE = 200
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="module")
def corpus():
    """>= 200 certified artifacts with random payloads across feasible (version, EC)."""
    rng = random.Random(0xC0FFEE)
    artifacts = []
    combos = []
    for version in range(2, encoder.MAX_VERSION + 1):
        for level in EcLevel:
            try:
                plan_distracter(encoder.symbol_spec(version, level))
            except InfeasibleError:
                continue
            combos.append((version, level))
    i = 0
    while len(artifacts) < CORPUS_SIZE:
        version, level = combos[i % len(combos)]
        i += 1
        spec = encoder.symbol_spec(version, level)
        size = rng.randrange(1, spec.max_payload_bytes + 1)
        payload = bytes(rng.randrange(256) for _ in range(size))
        artifact = build_artifact(payload, spec, requested_ec=level)
        cert = certify(artifact)
        if not cert.passed:
            continue  # plan-feasible but not certifiable under the finger model
        artifact.certification = cert
        artifacts.append(artifact)
    return artifacts


def test_acceptance_1_roundtrip_codec():
    """Versions 1-10 x L/M/Q/H x 50 payloads, scale 4, rotations 0/90, < 120 s."""
    rng = random.Random(101)
    start = time.time()
    count = 0
    for version in range(1, 11):
        for level in "LMQH":
            spec = encoder.symbol_spec(version, level)
            for k in range(50):
                size = rng.randrange(0, spec.max_payload_bytes + 1)
                payload = bytes(rng.randrange(256) for _ in range(size))
                matrix = encoder.generate(payload, level, min_version=version)
                assert matrix.side == spec.side
                rotation = 0 if k % 2 == 0 else 90
                bitmap = scene.render(
                    scene.single_symbol_scene(matrix, scale=4, rotation=rotation)
                )
                report = scanner.scan(bitmap, "strict_single", 0)
                assert report.outcome == "decoded", (version, level, k, report.outcome)
                assert report.payload == payload
                assert report.version == version
                assert report.ec == EcLevel(level)
                count += 1
    elapsed = time.time() - start
    assert elapsed < 120.0, f"round-trip suite took {elapsed:.1f}s"
    print(f"\nACCEPTANCE 1 PASS: {count} round-trips (scale 4, rotations 0/90) "
          f"100% decoded in {elapsed:.1f}s < 120s")


def test_acceptance_2_reed_solomon_tolerance():
    """Every block shape: 1000 corruptions of size t decode exactly; size t+1
    never yields a wrong payload that passes structure validation."""
    shapes = sorted({
        (s.data_len, s.ec_len, s.capacity_t)
        for v in range(1, 11)
        for lv in "LMQH"
        for s in encoder.symbol_spec(v, lv).block_layout
    })
    rng = random.Random(202)
    wrong_payload_passes = 0
    for n, k, t in shapes:
        data = bytes(rng.randrange(256) for _ in range(n))
        block0 = data + gf256.rs_encode(data, k)
        for _ in range(1000):
            block = bytearray(block0)
            for pos in rng.sample(range(len(block)), t):
                block[pos] ^= rng.randrange(1, 256)
            decoded, errors = gf256.rs_decode(block, k, max_errors=t)
            assert decoded == data and errors == t, (n, k, t)
        for _ in range(1000):
            block = bytearray(block0)
            for pos in rng.sample(range(len(block)), t + 1):
                block[pos] ^= rng.randrange(1, 256)
            try:
                decoded, errors = gf256.rs_decode(block, k, max_errors=t)
            except gf256.DecodeFailure:
                continue
            if decoded == data:
                continue  # corrected beyond its sworn capacity; not a lie
            # A wrong block decode must be caught by payload structure checks.
            try:
                encoder.parse_payload(decoded.ljust(n, b"\xec"), 1)
            except encoder.StructureError:
                continue
            wrong_payload_passes += 1
    assert wrong_payload_passes == 0
    print(f"\nACCEPTANCE 2 PASS: {len(shapes)} block shapes x 1000 trials at t "
          f"decode exactly; t+1 never passed off a wrong payload")


def test_acceptance_3_peacock_budget_soundness(corpus):
    """Every report feasible AND confirmed by rs_decode on envelope-corrupted blocks."""
    assert len(corpus) >= 200
    for artifact in corpus:
        assert artifact.report.feasible
        for _, hit, cap in artifact.report.per_block_errors:
            assert hit <= cap
        # Independent confirmation: flip every envelope data cell of the clean
        # symbol and require exact per-block correction.
        spec = artifact.spec
        stream = encoder.interleave(
            encoder.split_blocks(encoder.encode_payload(artifact.payload, spec), spec)
        )
        clean_matrix, choice = encoder.place_and_mask(stream, spec)
        corrupted = clean_matrix.copy()
        for r, c in envelope_cells(spec.side, artifact.envelope.side_modules):
            if not clean_matrix.function_map[r, c]:
                corrupted.modules[r, c] ^= True
        dirty = encoder.extract_codewords(corrupted.modules, spec.version, choice.mask_id)
        for clean_b, dirty_b in zip(
            encoder.deinterleave(stream, spec), encoder.deinterleave(dirty, spec)
        ):
            decoded, errors = gf256.rs_decode(
                dirty_b.data + dirty_b.ec, len(dirty_b.ec), max_errors=dirty_b.capacity_t
            )
            assert decoded == clean_b.data
    versions = sorted({a.spec.version for a in corpus})
    levels = sorted({a.spec.ec.value for a in corpus})
    print(f"\nACCEPTANCE 3 PASS: {len(corpus)} artifacts across versions {versions} "
          f"levels {levels}; all reports feasible and rs-confirmed")


def test_acceptance_4_peacock_defeat(corpus):
    """Uncovered renders: zero decodes across 20 arbitrary seeds plus strict;
    exactly 4 finder candidates each."""
    for artifact in corpus:
        bitmap = scene.render(scene.single_symbol_scene(artifact.matrix))
        pipe = scanner.scan_pipeline(bitmap)
        assert pipe.census.finders == 4, artifact.spec
        assert pipe.census.decoded == 0, artifact.spec
        for seed in range(20):
            assert scanner.select_outcome(pipe, "arbitrary", seed).outcome != "decoded"
        assert scanner.select_outcome(pipe, "strict_single", 0).outcome != "decoded"
    print(f"\nACCEPTANCE 4 PASS: {len(corpus)} uncovered artifacts, 20 arbitrary seeds "
          f"+ strict each: zero decodes; exactly 4 finder candidates everywhere")


def test_acceptance_5_occlusion_repair(corpus):
    """Envelope occluded at luminances 0/80/120, rotations 0/45: 100% decoded."""
    checks = 0
    for artifact in corpus:
        for rotation in (0, 45):
            sc = scene.single_symbol_scene(artifact.matrix, rotation=rotation)
            for luminance in (0, 80, 120):
                occluded = scene.occlude_corner(sc, 0, artifact, luminance=luminance)
                report = scanner.scan(scene.render(occluded), "strict_single", 0)
                assert report.outcome == "decoded", (artifact.spec, rotation, luminance)
                assert report.payload == artifact.payload
                checks += 1
    print(f"\nACCEPTANCE 5 PASS: {checks} occluded scans "
          f"(3 luminances x 2 rotations x {len(corpus)} artifacts) all decoded")


def test_acceptance_6_selection_contrast():
    """n in 2/3/4, 1000 trials: plain within 1/n +- 0.05; pqr exactly 1.0; < 10 min."""
    start = time.time()
    for n in (2, 3, 4):
        plain = scene.run_selection_trials(n, "plain", 0, 1000, 4200 + n)
        accuracy = plain.target_hit / 1000
        assert abs(accuracy - 1.0 / n) <= 0.05, (n, accuracy)
        assert plain.none == 0

        pqr_stats = scene.run_selection_trials(n, "pqr", n - 1, 1000, 5200 + n)
        assert pqr_stats.target_hit == 1000, (n, pqr_stats)
        assert pqr_stats.other_hit == 0
        assert pqr_stats.none == 0
    elapsed = time.time() - start
    assert elapsed < 600.0
    print(f"\nACCEPTANCE 6 PASS: plain accuracy within 1/n +- 0.05 and pqr = 1.0 "
          f"for n in (2,3,4), 1000 trials each, in {elapsed:.1f}s < 600s")


def test_acceptance_7_determinism_and_goldens(tmp_path, capsys):
    """Fixed-seed CLI invocations reproduce byte-identical outputs; goldens hold."""
    a1, a2 = tmp_path / "a1.pgm", tmp_path / "a2.pgm"
    for path in (a1, a2):
        assert cli.main(["generate", "--text", "EAT", "--ec", "L", "--out", str(path)]) == 0
    assert a1.read_bytes() == a2.read_bytes()
    assert a1.read_bytes() == (GOLDEN / "eat.pgm").read_bytes()

    p1, p2 = tmp_path / "p1.pgm", tmp_path / "p2.pgm"
    r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
    for pgm, rep in ((p1, r1), (p2, r2)):
        assert cli.main(["peacock", "--text", "EAT", "--ec", "H",
                         "--out", str(pgm), "--report", str(rep)]) == 0
    assert p1.read_bytes() == p2.read_bytes() == (GOLDEN / "peacock_eat.pgm").read_bytes()
    assert r1.read_bytes() == r2.read_bytes() == (GOLDEN / "peacock_eat.json").read_bytes()

    assert cli.main(["scan", str(GOLDEN / "eat.pgm"), "--json",
                     "--policy", "arbitrary", "--seed", "7"]) == 0
    out1 = capsys.readouterr().out
    assert out1 == (GOLDEN / "scan_eat.json").read_text()

    assert cli.main(["simulate", "--codes", "2", "--mode", "plain", "--trials", "50",
                     "--seed", "3", "--json"]) == 0
    sim = capsys.readouterr().out
    assert sim == (GOLDEN / "simulate_2plain.json").read_text()
    assert json.loads(sim)["trials"] == 50
    print("\nACCEPTANCE 7 PASS: fixed-seed CLI outputs byte-identical and equal "
          "to the committed goldens")


def test_acceptance_8_diamond_orientation(corpus):
    """Diamond renders: occluded always scans, uncovered never."""
    for artifact in corpus:
        sc = scene.single_symbol_scene(artifact.matrix, rotation=scene.DIAMOND_ROTATION)
        uncovered = scanner.scan(scene.render(sc), "strict_single", 0)
        assert uncovered.outcome != "decoded", artifact.spec
        occluded = scanner.scan(
            scene.render(scene.occlude_corner(sc, 0, artifact)), "strict_single", 0
        )
        assert occluded.outcome == "decoded", artifact.spec
        assert occluded.payload == artifact.payload
    print(f"\nACCEPTANCE 8 PASS: {len(corpus)} diamond renders: occluded 100% decoded, "
          f"uncovered 0% decoded")
