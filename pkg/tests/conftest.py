"""Shared fixtures: the three bundled curves and the bad-parameter files."""

import json
from pathlib import Path

import pytest

from hlslab.cli import load_curve
from hlslab.curve import CurveParams, curve_from_dict

DATA_DIR = Path(__file__).parent / "data"


def load_bad_fixture(name: str) -> CurveParams:
    return curve_from_dict(json.loads((DATA_DIR / f"{name}.json").read_text()))


@pytest.fixture(scope="session")
def toy() -> CurveParams:
    return load_curve("toy17")


@pytest.fixture(scope="session")
def mid16() -> CurveParams:
    return load_curve("mid16")


@pytest.fixture(scope="session")
def secp256k1() -> CurveParams:
    return load_curve("secp256k1")
