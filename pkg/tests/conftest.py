import numpy as np
import pytest

from minkhull.fuchsian import genus2_octagon_group
from minkhull.hull import fuchsian_hull, sample_domain
from minkhull.intrinsic import CoverSurface, QuotientSurface

DOMAIN_RADIUS = 5.0


@pytest.fixture(scope="session")
def group():
    return genus2_octagon_group()


@pytest.fixture(scope="session")
def single_hull(group):
    return fuchsian_hull(group, np.array([[0.0, 0.0, 1.0]]), DOMAIN_RADIUS)


@pytest.fixture(scope="session")
def dense_hull(group):
    """Hull through 800 points of 2 H^2 spread over the fundamental domain."""
    seeds = 2.0 * sample_domain(group, 800, np.random.default_rng(7))
    return fuchsian_hull(group, seeds, DOMAIN_RADIUS)


@pytest.fixture(scope="session")
def small_hull(group):
    """A cheap hull through 50 points of 2 H^2."""
    seeds = 2.0 * sample_domain(group, 50, np.random.default_rng(3))
    return fuchsian_hull(group, seeds, DOMAIN_RADIUS)


@pytest.fixture(scope="session")
def single_cover(single_hull):
    return CoverSurface(single_hull, 8)


@pytest.fixture(scope="session")
def small_cover(small_hull):
    return CoverSurface(small_hull, 8)


@pytest.fixture(scope="session")
def single_quotient(single_hull):
    return QuotientSurface(single_hull, 8)


@pytest.fixture(scope="session")
def dense_cover(dense_hull):
    return CoverSurface(dense_hull, 8)


@pytest.fixture(scope="session")
def cli_runs(tmp_path_factory):
    """Two identical runs of ``hull`` and ``verify`` on the default config."""
    from minkhull.cli import main
    root = tmp_path_factory.mktemp("cli")
    codes = {}
    for cmd in ("hull", "verify"):
        for run in ("a", "b"):
            codes[cmd, run] = main([cmd, "--out", str(root / cmd / run)])
    return root, codes
