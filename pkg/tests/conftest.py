import random
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(ROOT))

from src.cli.commands.family import make_abelian_like_example, make_ruled_example
from src.core.chern import NSClass, SheafData, SurfaceGeometry, extension_sum, intersect
from src.core.exactcore import Rat
from src.core.futaki import TestConfig

SEED = 20240611
RANDOM_INSTANCES = 100
SURFACES = ROOT / "surfaces"


def random_geometry(rng):
    b = rng.randint(1, 3)
    return SurfaceGeometry(
        ns_rank=2,
        basis_labels=("e1", "e2"),
        intersection=((rng.randint(-2, 2), b), (b, rng.randint(-2, 2))),
        c1B=NSClass((rng.randint(-3, 3), rng.randint(-3, 3))),
        todd2=Rat(rng.randint(-6, 6), rng.randint(1, 4)),
    )


def random_class(rng, low=-3, high=3):
    return NSClass((rng.randint(low, high), rng.randint(low, high)))


def random_rank2(rng, geom):
    """ch2 は c1 と独立な任意の有理数"""
    return SheafData(2, random_class(rng), Rat(rng.randint(-12, 12), rng.randint(1, 6)))


def random_rational(rng, height=20):
    return Rat(rng.randint(-height, height), rng.randint(1, height))


def random_rational_class(rng, height=20):
    return NSClass((random_rational(rng, height), random_rational(rng, height)))


def random_rational_geometry(rng, height=20):
    b = random_rational(rng, height)
    return SurfaceGeometry(
        ns_rank=2,
        basis_labels=("e1", "e2"),
        intersection=((random_rational(rng, height), b), (b, random_rational(rng, height))),
        c1B=random_rational_class(rng, height),
        todd2=random_rational(rng, height),
    )


def random_test_config(rng):
    """有理数の交点行列と ω^2 > 0 の偏極を持つテスト配置"""
    while True:
        geom = random_rational_geometry(rng)
        omega = random_rational_class(rng)
        if intersect(omega, omega, geom) > 0:
            break
    F = SheafData.line(random_rational_class(rng), geom)
    G = SheafData.line(random_rational_class(rng), geom)
    return TestConfig(extension_sum(F, G), F, geom, omega)


@pytest.fixture
def rng():
    return random.Random(SEED)


@pytest.fixture
def ruled_example():
    """(g, m) = (3, 2) の線織面の例"""
    return make_ruled_example(3, 2)


@pytest.fixture
def ruled_geom(ruled_example):
    return ruled_example.geom


@pytest.fixture
def abelian_like():
    return make_abelian_like_example()


@pytest.fixture
def random_test_configs(rng):
    return [random_test_config(rng) for _ in range(RANDOM_INSTANCES)]
