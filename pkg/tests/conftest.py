import random

import pytest

from pqr import encoder, scene
from pqr.peacock import build_artifact, certify


@pytest.fixture(scope="session")
def rng():
    return random.Random(20240917)


@pytest.fixture(scope="session")
def pqr_artifact():
    """One certified artifact shared by scanner/scene tests."""
    artifact = build_artifact(b"EAT", encoder.symbol_spec(3, "H"))
    artifact.certification = certify(artifact)
    assert artifact.certification.passed
    return artifact


@pytest.fixture(scope="session")
def plain_bitmap():
    matrix = encoder.generate(b"EAT", "L")
    return scene.render(scene.single_symbol_scene(matrix))
