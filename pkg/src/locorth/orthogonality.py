"""Local orthogonality of multipartite states.

Two states are orthogonal on factor ``l`` when their single-factor
marginals have zero Hilbert-Schmidt overlap. A set is locally orthogonal
when it can be ordered so that each element is orthogonal, on one factor,
to every element after it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

from .core import (BipartiteCut, DensityOperator, PureState, as_density, reduce_matrix)
from .errors import InvalidStateError

OVERLAP_TOL = 1e-9


class StateEnsemble:
    """Weighted collection of density operators on one tensor-product space.

    Zero-weight members are kept; orthogonality is a property of the
    states, not of the weights.
    """

    def __init__(self, probs: Sequence[float], states: Sequence[DensityOperator | PureState],
                 labels: Sequence[Hashable] | None = None):
        probs = np.asarray(probs, dtype=float)
        states = [as_density(s) for s in states]
        if probs.ndim != 1 or probs.size != len(states) or not states:
            raise InvalidStateError("need one probability per state and at least one state")
        if np.any(probs < 0):
            raise InvalidStateError("negative probability in ensemble")
        if abs(probs.sum() - 1.0) > 1e-9:
            raise InvalidStateError(f"ensemble probabilities sum to {probs.sum()!r}")
        dims = states[0].dims
        if any(s.dims != dims for s in states):
            raise InvalidStateError("ensemble states have different factor dimensions")
        labels = tuple(str(i) for i in range(len(states))) if labels is None else tuple(labels)
        if len(labels) != len(states) or len(set(labels)) != len(labels):
            raise InvalidStateError("labels must be unique, one per state")
        probs.setflags(write=False)
        self.probs = probs
        self.states = tuple(states)
        self.labels = labels
        self.dims = dims

    def __len__(self) -> int:
        return len(self.states)

    def __getitem__(self, label) -> DensityOperator:
        return self.states[self.labels.index(label)]

    def prob(self, label) -> float:
        return float(self.probs[self.labels.index(label)])

    def mixture(self) -> DensityOperator:
        m = sum(p * s.matrix for p, s in zip(self.probs, self.states))
        return DensityOperator(m, self.dims)

    def __repr__(self):
        return f"StateEnsemble(labels={self.labels}, probs={self.probs.tolist()}, dims={self.dims})"


@dataclass(frozen=True)
class LOWitness:
    pair: tuple
    subsystems: tuple[int, ...]


@dataclass(frozen=True)
class LOCertificate:
    """Ordering plus witness factors proving local orthogonality.

    ``witness_per_element[q]`` is the factor on which element ``q`` of the
    ordering is orthogonal to every later element (``None`` for the last
    element, which has nothing after it). ``uniform_witness`` is a single
    factor valid for every pair, when one exists.
    """

    ordering: tuple
    witness_per_element: tuple
    uniform_witness: int | None = None
    tolerance: float = OVERLAP_TOL

    def as_dict(self) -> dict:
        return {
            "ordering": list(self.ordering),
            "witness_per_element": list(self.witness_per_element),
            "uniform_witness": self.uniform_witness,
            "tolerance": self.tolerance,
        }


def _marginals(rho: DensityOperator) -> list[np.ndarray]:
    return [reduce_matrix(rho.matrix, rho.dims, [l]) for l in range(rho.n_factors)]


def _hs(a: np.ndarray, b: np.ndarray) -> float:
    # Tr[a b] = sum Re(a_ij conj(b_ij)) for Hermitian a, b; elementwise
    # products commute, so swapping the arguments is bit-for-bit identical.
    return max(0.0, float(np.sum(a.real * b.real + a.imag * b.imag)))


def reduced_overlap(rho, sigma, l: int) -> float:
    """Tr[(rho)_l (sigma)_l], clamped at zero."""
    rho, sigma = as_density(rho), as_density(sigma)
    if rho.dims != sigma.dims:
        raise InvalidStateError(f"factor mismatch: {rho.dims} vs {sigma.dims}")
    if not 0 <= l < rho.n_factors:
        raise InvalidStateError(f"factor index {l} out of range")
    a = reduce_matrix(rho.matrix, rho.dims, [l])
    b = reduce_matrix(sigma.matrix, sigma.dims, [l])
    return _hs(a, b)


def is_k_locally_orthogonal(rho, sigma, k: int, tol: float = OVERLAP_TOL,
                            pair: tuple = ("rho", "sigma")) -> tuple[bool, LOWitness]:
    rho, sigma = as_density(rho), as_density(sigma)
    if rho.dims != sigma.dims:
        raise InvalidStateError(f"factor mismatch: {rho.dims} vs {sigma.dims}")
    if not 1 <= k <= rho.n_factors:
        raise InvalidStateError(f"k={k} out of range 1..{rho.n_factors}")
    hits = tuple(l for l in range(rho.n_factors) if reduced_overlap(rho, sigma, l) <= tol)
    return len(hits) >= k, LOWitness(tuple(pair), hits)


def overlap_table(ensemble: StateEnsemble) -> np.ndarray:
    """``T[i, j, l]`` = reduced overlap of states i and j on factor l."""
    margs = [_marginals(s) for s in ensemble.states]
    n, m = len(ensemble), len(ensemble.dims)
    table = np.zeros((n, n, m))
    for i in range(n):
        for j in range(i, n):
            for l in range(m):
                table[i, j, l] = table[j, i, l] = _hs(margs[i][l], margs[j][l])
    return table


def _orth(table, tol):
    return table <= tol


def find_lo_ordering(ensemble: StateEnsemble, tol: float = OVERLAP_TOL) -> LOCertificate | None:
    """Search for a locally orthogonal ordering; ``None`` if there is none.

    Backtracking over labels in list order; at each step the first label
    that is orthogonal on a single factor to all remaining labels is
    placed next, with the lowest such factor as its witness.
    """
    orth = _orth(overlap_table(ensemble), tol)
    n, m = orth.shape[0], orth.shape[2]

    def witness(i, rest):
        for l in range(m):
            if all(orth[i, j, l] for j in rest):
                return l
        return None

    def search(remaining: list[int]):
        if len(remaining) <= 1:
            return [(i, None) for i in remaining]
        for i in remaining:
            rest = [j for j in remaining if j != i]
            l = witness(i, rest)
            if l is None:
                continue
            tail = search(rest)
            if tail is not None:
                return [(i, l)] + tail
        return None

    found = search(list(range(n)))
    if found is None:
        return None
    uniform = None
    for l in range(m):
        if all(orth[i, j, l] for i in range(n) for j in range(n) if i != j):
            uniform = l
            break
    return LOCertificate(
        ordering=tuple(ensemble.labels[i] for i, _ in found),
        witness_per_element=tuple(l for _, l in found),
        uniform_witness=uniform,
        tolerance=tol,
    )


def verify_certificate(ensemble: StateEnsemble, cert: LOCertificate) -> bool:
    if sorted(map(str, cert.ordering)) != sorted(map(str, ensemble.labels)) \
            or len(cert.ordering) != len(ensemble):
        raise InvalidStateError("certificate labels do not match the ensemble")
    if len(cert.witness_per_element) != len(cert.ordering):
        return False
    states = [ensemble[a] for a in cert.ordering]
    for q, l in enumerate(cert.witness_per_element):
        later = states[q + 1:]
        if not later:
            continue
        if l is None or not 0 <= l < len(ensemble.dims):
            return False
        if any(reduced_overlap(states[q], s, l) > cert.tolerance for s in later):
            return False
    return True


def brute_force_lo(ensemble: StateEnsemble, tol: float = OVERLAP_TOL) -> bool:
    """Exhaustive decision over all orderings and witness assignments."""
    orth = _orth(overlap_table(ensemble), tol)
    n, m = orth.shape[0], orth.shape[2]
    for perm in itertools.permutations(range(n)):
        for wit in itertools.product(range(m), repeat=max(n - 1, 0)):
            if all(orth[perm[q], perm[r], wit[q]]
                   for q in range(n - 1) for r in range(q + 1, n)):
                return True
    return False


@dataclass
class PropagationReport:
    """Overlaps of the composite-side marginals of two states.

    ``overlap_a`` is <Tr_B rho1, Tr_B rho2> (the A-side marginals) and
    ``overlap_b`` is <Tr_A rho1, Tr_A rho2>. For each side whose overlap
    vanishes, ``factor_overlaps`` maps that side's factors to the
    single-factor overlaps of the surviving marginals.
    """

    overlap_a: float
    overlap_b: float
    tolerance: float
    factor_overlaps: dict = field(default_factory=dict)

    @property
    def hypothesis_met(self) -> bool:
        return min(self.overlap_a, self.overlap_b) <= self.tolerance


def check_reduction_propagation(rho1, rho2, cut: BipartiteCut,
                                tol: float = OVERLAP_TOL) -> PropagationReport:
    rho1, rho2 = as_density(rho1), as_density(rho2)
    if rho1.dims != rho2.dims:
        raise InvalidStateError(f"factor mismatch: {rho1.dims} vs {rho2.dims}")
    cut.validate(rho1.n_factors)
    report = PropagationReport(0.0, 0.0, tol)
    for name, side in (("A", sorted(cut.side_a)), ("B", sorted(cut.side_b))):
        m1 = reduce_matrix(rho1.matrix, rho1.dims, side)
        m2 = reduce_matrix(rho2.matrix, rho2.dims, side)
        ov = _hs(m1, m2)
        setattr(report, f"overlap_{name.lower()}", ov)
        if ov <= tol:
            sub_dims = [rho1.dims[i] for i in side]
            report.factor_overlaps[name] = {
                side[k]: _hs(reduce_matrix(m1, sub_dims, [k]), reduce_matrix(m2, sub_dims, [k]))
                for k in range(len(side))
            }
    return report
