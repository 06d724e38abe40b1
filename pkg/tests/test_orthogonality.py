import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from locorth.core import BipartiteCut, DensityOperator, PureState, ket, random_density_operator
from locorth.errors import InvalidStateError
from locorth.example import ExampleParams, build_example_ensemble
from conftest import random_structured_ensemble, random_structured_state
from locorth.orthogonality import (LOCertificate, StateEnsemble, brute_force_lo,
                                   check_reduction_propagation, find_lo_ordering,
                                   is_k_locally_orthogonal, overlap_table, reduced_overlap,
                                   verify_certificate)


def test_overlap_pure_product():
    rho = PureState(np.kron([0.6, 0.8j], [1, 1j]) / np.sqrt(2), (2, 2)).density()
    for l in range(2):
        assert reduced_overlap(rho, rho, l) == pytest.approx(1.0)


def test_overlap_example_b_factor():
    ens = build_example_ensemble(ExampleParams(s=((0.6, 0.8, 0.0),)))
    assert reduced_overlap(ens["rho_V"], ens["sigma"], 1) == 0.0
    assert reduced_overlap(ens["rho_V"], ens["sigma"], 0) > 1e-3


def test_overlap_bell_pair(tau, psi_plus):
    # both marginals are I/2: Tr[(I/2)^2] = 1/2
    for l in range(2):
        assert reduced_overlap(tau, psi_plus, l) == pytest.approx(0.5)
    assert np.trace(tau.matrix @ psi_plus.matrix).real == pytest.approx(0.0)


def test_overlap_errors(tau):
    with pytest.raises(InvalidStateError):
        reduced_overlap(tau, ket(0, [4]).density(), 0)
    with pytest.raises(InvalidStateError):
        reduced_overlap(tau, tau, 2)


def test_k_local_examples(tau, psi_plus):
    ok, wit = is_k_locally_orthogonal(ket((0, 0), [2, 2]), ket((1, 1), [2, 2]), 2)
    assert ok and wit.subsystems == (0, 1)
    ok, wit = is_k_locally_orthogonal(tau, psi_plus, 1)
    assert not ok and wit.subsystems == ()
    ens = build_example_ensemble()
    ok, wit = is_k_locally_orthogonal(ens["rho_V"], ens["sigma"], 1)
    assert ok and 1 in wit.subsystems
    with pytest.raises(InvalidStateError):
        is_k_locally_orthogonal(tau, tau, 3)


def test_find_ordering_singleton(tau):
    cert = find_lo_ordering(StateEnsemble([1.0], [tau]))
    assert cert.ordering == ("0",) and cert.witness_per_element == (None,)


def test_find_ordering_example():
    ens = build_example_ensemble()
    cert = find_lo_ordering(ens)
    assert cert.ordering == ("rho_V", "sigma")
    assert cert.witness_per_element[0] == 1
    assert cert.uniform_witness == 1
    assert verify_certificate(ens, cert)


def test_find_ordering_bell_pair(tau, psi_plus):
    assert find_lo_ordering(StateEnsemble([0.5, 0.5], [tau, psi_plus])) is None


def test_verify_rejects_forced_a_witness():
    ens = build_example_ensemble(ExampleParams(s=((0.6, 0.0, 0.8),)))
    bad = LOCertificate(("rho_V", "sigma"), (0, None))
    assert not verify_certificate(ens, bad)
    with pytest.raises(InvalidStateError):
        verify_certificate(ens, LOCertificate(("x", "sigma"), (1, None)))


def test_ordering_needs_reordering():
    # c is orthogonal to both a and b on factor 0, but a and b are only
    # orthogonal on factor 1; a must not come before c on factor 0 etc.
    dims = (2, 2)
    a = ket((0, 0), dims).density()
    b = ket((0, 1), dims).density()
    c = ket((1, 0), dims).density()
    ens = StateEnsemble([0.2, 0.3, 0.5], [a, b, c], labels="abc")
    cert = find_lo_ordering(ens)
    assert cert is not None and verify_certificate(ens, cert)
    assert cert.uniform_witness is None


def test_zero_weight_members_kept(tau, psi_plus):
    ens = StateEnsemble([1.0, 0.0], [tau, psi_plus])
    assert find_lo_ordering(ens) is None


def test_propagation_examples(tau, psi_plus):
    cut = BipartiteCut({0}, {1})
    rep = check_reduction_propagation(ket((0, 0), [2, 2]), ket((0, 1), [2, 2]), cut)
    assert rep.overlap_a == pytest.approx(1.0) and rep.overlap_b == pytest.approx(0.0)
    assert rep.hypothesis_met and rep.factor_overlaps == {"B": {1: 0.0}}
    rep = check_reduction_propagation(tau, psi_plus, cut)
    assert rep.overlap_a == pytest.approx(0.5) and rep.overlap_b == pytest.approx(0.5)
    assert not rep.hypothesis_met


def test_propagation_multifactor():
    dims = (2, 2, 3)
    r1 = ket((0, 0, 0), dims)
    r2 = ket((1, 0, 1), dims)
    rep = check_reduction_propagation(r1, r2, BipartiteCut({0}, {1, 2}))
    assert rep.overlap_a == 0.0 and rep.overlap_b == 0.0
    assert rep.factor_overlaps["B"] == {1: 1.0, 2: 0.0}
    with pytest.raises(InvalidStateError):
        check_reduction_propagation(r1, r2, BipartiteCut({0}, {1}))


def test_search_matches_brute_force():
    rng = np.random.default_rng(7)
    seen = {True: 0, False: 0}
    for _ in range(60):
        ens = random_structured_ensemble(rng, max_states=5, max_factors=4 if _ % 3 else 2)
        cert = find_lo_ordering(ens)
        assert (cert is not None) == brute_force_lo(ens)
        if cert is not None:
            assert verify_certificate(ens, cert)
        seen[cert is not None] += 1
    assert seen[True] > 5 and seen[False] > 5


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_overlap_symmetry_and_monotone_witness(seed):
    rng = np.random.default_rng(seed)
    dims = (2, 3, 2)
    a = random_structured_state(dims, rng)
    b = random_structured_state(dims, rng)
    for l in range(3):
        assert reduced_overlap(a, b, l) == reduced_overlap(b, a, l)
    for k in range(1, 4):
        if is_k_locally_orthogonal(a, b, k)[0]:
            assert all(is_k_locally_orthogonal(a, b, j)[0] for j in range(1, k))


def test_overlap_table_shape(tau, psi_plus):
    t = overlap_table(StateEnsemble([0.5, 0.5], [tau, psi_plus]))
    assert t.shape == (2, 2, 2)
    np.testing.assert_allclose(t[0, 1], [0.5, 0.5])
