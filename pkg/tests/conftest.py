"""Shared fixture systems for the test suite."""

import numpy as np
import pytest
from scipy.special import zeta

from ifsquant import (AmbientDomain, GeometricTail, InfiniteIFS, MapFamily,
                      PowerLawTail, ProbabilityFamily, StackPlacement,
                      load_builtin, similarity_1d)


def unit_interval():
    return AmbientDomain("interval", np.array([0.5]), np.array([0.5]))


def explicit_1d(ratios, translations, masses):
    """Finite 1D system from explicit affine maps x -> r x + t."""
    prefix = tuple(similarity_1d(r, t) for r, t in zip(ratios, translations))
    maps = MapFamily(prefix=prefix, tail=None)
    probs = ProbabilityFamily(prefix=tuple(masses), tail=None)
    return InfiniteIFS(domain=unit_interval(), maps=maps, probs=probs,
                       system_id="explicit")


@pytest.fixture(scope="session")
def gamma3():
    return load_builtin("gamma3")


@pytest.fixture(scope="session")
def dyadic():
    return load_builtin("dyadic")


@pytest.fixture(scope="session")
def disk_gamma():
    return load_builtin("disk-gamma")


@pytest.fixture(scope="session")
def uniform4():
    return load_builtin("uniform4")


@pytest.fixture(scope="session")
def two_maps():
    """S_1(x) = x/3, S_2(x) = x/9 + 8/9 with equal masses."""
    return explicit_1d([1 / 3, 1 / 9], [0.0, 8 / 9], [0.5, 0.5])


def _stacked(domain, maps_tail, probs_tail, gap_fraction, gap_decay, name):
    maps = MapFamily(prefix=(), tail=maps_tail)
    placement = StackPlacement(domain=domain, ratio_tail=maps_tail, prefix_len=0,
                               gap_fraction=gap_fraction, gap_decay=gap_decay)
    return InfiniteIFS(domain=domain, maps=maps,
                       probs=ProbabilityFamily(prefix=(), tail=probs_tail),
                       placement=placement, system_id=name)


@pytest.fixture(scope="session")
def power_probs():
    """p_j proportional to j^-2 with ratios 3^-j."""
    coeff = 1.0 / float(zeta(2.0, 1))
    return _stacked(unit_interval(),
                    GeometricTail(base=1 / 3), PowerLawTail(exponent=2.0, coeff=coeff),
                    gap_fraction=0.5, gap_decay=1 / 3, name="power-probs")


@pytest.fixture(scope="session")
def power_maps():
    """Geometric masses 2^-j with power-law ratios 0.3 j^-2."""
    return _stacked(unit_interval(),
                    PowerLawTail(exponent=2.0, coeff=0.3), GeometricTail(base=0.5),
                    gap_fraction=0.5, gap_decay=0.5, name="power-maps")
