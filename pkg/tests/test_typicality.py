import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from locorth.core import DensityOperator, PureState
from locorth.errors import InvalidStateError, ResourceCapError
from locorth.orthogonality import StateEnsemble
from locorth.typicality import (TypicalSpec, exact_truncation_distance, is_typical_string,
                                strong_windows, truncation_tail_bound, typical_mass)


def brute_mass(probs, n, eps, mode):
    """Mass of the typical set by enumerating every string (independent oracle)."""
    k = sum(1 for p in probs if p > 0)
    h = -sum(p * math.log2(p) for p in probs if p > 0)
    total = 0.0
    for s in itertools.product(range(len(probs)), repeat=n):
        ps = math.prod(probs[i] for i in s)
        if ps == 0:
            continue
        if mode == "weak":
            rate = -math.log2(ps) / n
            ok = h - eps < rate < h + eps
        else:
            ok = True
            for a, pa in enumerate(probs):
                if pa == 0 or pa == 1:
                    continue
                dev = abs(s.count(a) / n - pa)
                ok &= dev <= eps / (k * abs(math.log2(pa))) + 1e-12
        if ok:
            total += ps
    return total


def diag_ensemble():
    return StateEnsemble([0.5, 0.5], [DensityOperator(np.diag([1, 0]), (2,)),
                                      DensityOperator(np.diag([0, 1]), (2,))])


def test_spec_examples():
    assert typical_mass(TypicalSpec((0.5, 0.5), 4, 0.5)).mass == pytest.approx(0.875, abs=1e-15)
    for n, eps in ((3, 0.01), (9, 0.4)):
        assert typical_mass(TypicalSpec((0.5, 0.5), n, eps, "weak")).mass == pytest.approx(1.0)
    assert strong_windows(TypicalSpec((0.5, 0.5), 4, 0.5)) == {"0": (1, 3), "1": (1, 3)}


def test_growth_in_n():
    masses = [typical_mass(TypicalSpec((0.5, 0.3, 0.2), n, 0.3)).mass for n in (10, 100, 1000)]
    assert masses[0] < masses[1] < masses[2]
    assert masses[2] >= 0.99


@pytest.mark.parametrize("probs", [(0.5, 0.5), (0.7, 0.3), (0.5, 0.3, 0.2), (0.6, 0.4, 0.0),
                                   (0.25, 0.25, 0.5)])
@pytest.mark.parametrize("mode", ["weak", "strong"])
def test_against_string_enumeration(probs, mode):
    for n in (1, 4, 7):
        for eps in (0.05, 0.2, 0.5):
            got = typical_mass(TypicalSpec(probs, n, eps, mode)).mass
            assert got == pytest.approx(brute_mass(probs, n, eps, mode), abs=1e-12)


def test_deterministic_source():
    rep = typical_mass(TypicalSpec((1.0, 0.0), 5, 0.1))
    assert rep.mass == 1.0 and rep.admitted_vectors == 1


def test_string_membership():
    spec = TypicalSpec((0.5, 0.5), 4, 0.5, labels=("a", "b"))
    assert is_typical_string(spec, "abab")
    assert not is_typical_string(spec, "aaaa")
    with pytest.raises(ValueError):
        is_typical_string(spec, "abc")
    with pytest.raises(ValueError):
        is_typical_string(spec, "abx!")
    zero = TypicalSpec((1.0, 0.0), 3, 0.5)
    assert not is_typical_string(zero, "001")


def test_invalid_specs():
    for bad in [((0.5, 0.6), 4, 0.1), ((0.5, 0.5), 0, 0.1), ((0.5, 0.5), 4, 0.0)]:
        with pytest.raises(ValueError):
            TypicalSpec(*bad)
    with pytest.raises(ValueError):
        TypicalSpec((0.5, 0.5), 4, 0.1, mode="medium")


def test_lattice_cap():
    with pytest.raises(ResourceCapError):
        typical_mass(TypicalSpec((0.25,) * 4, 300, 5.0, "weak"), cap=1000)


def test_tail_and_exact_distance():
    spec = TypicalSpec((0.5, 0.5), 4, 0.5)
    ens = diag_ensemble()
    assert truncation_tail_bound(spec, ens) == pytest.approx(0.125, abs=1e-12)
    assert exact_truncation_distance(spec, ens) == pytest.approx(0.125, abs=1e-9)
    plus = PureState(np.array([1, 1]) / np.sqrt(2), (2,)).density()
    nonorth = StateEnsemble([0.5, 0.5], [DensityOperator(np.diag([1, 0]), (2,)), plus])
    d = exact_truncation_distance(spec, nonorth)
    assert d <= truncation_tail_bound(spec, nonorth) + 1e-9


def test_exact_distance_label_mismatch():
    spec = TypicalSpec((0.5, 0.5), 4, 0.5, labels=("x", "y"))
    with pytest.raises(InvalidStateError):
        exact_truncation_distance(spec, diag_ensemble())
    with pytest.raises(InvalidStateError):
        truncation_tail_bound(TypicalSpec((0.6, 0.4), 4, 0.5), diag_ensemble())


def test_monotone_in_eps():
    masses = [typical_mass(TypicalSpec((0.5, 0.3, 0.2), 30, e)).mass for e in (0.05, 0.1, 0.3, 0.6)]
    assert all(a <= b + 1e-15 for a, b in zip(masses, masses[1:]))


@settings(max_examples=60, deadline=None)
@given(raw=st.lists(st.floats(0.05, 1.0), min_size=2, max_size=4),
       n=st.integers(1, 40), eps=st.floats(0.01, 1.0))
def test_strong_within_weak(raw, n, eps):
    probs = tuple(x / sum(raw) for x in raw)
    probs = probs[:-1] + (1.0 - sum(probs[:-1]),)
    strong = typical_mass(TypicalSpec(probs, n, eps, "strong"))
    weak = typical_mass(TypicalSpec(probs, n, eps, "weak"))
    assert strong.inclusion_checked
    assert strong.mass <= weak.mass + 1e-12
