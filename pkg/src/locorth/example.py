"""Locally orthogonal pair {rho_V, sigma} on C^3 (x) C^6.

``rho_V`` lives in the span of three fixed vectors |0_V>, |1_V>, |2_V>
(mixtures of |phi_a> = r_a|1_V> + sqrt(1 - r_a^2)|2_V>), and ``sigma`` is a
mixture of product states (s_0|0> + s_1|1> + s_2|2>)_A |3>_B. No state in
span{|1_V>, |2_V>} has weight on |3>_B, so the pair is orthogonal on B.

The third vector as defined has |0>_A in both its first and last terms,
breaking the cyclic pattern of the other two (which would give |2>_A|5>_B).
``variant="standard"`` (default) uses the amplitudes as defined;
``variant="cyclic"`` substitutes |2>_A|5>_B. Both triples are orthonormal.
With the standard amplitudes |2_V> has Schmidt spectrum {3/4, 1/4}, not
{1/2, 1/4, 1/4}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import BipartiteCut, DensityOperator, PureState
from .entanglement import DecompositionReport, RoofConfig, verify_decomposition
from .errors import InvalidStateError
from .orthogonality import StateEnsemble

DIMS = (3, 6)
CUT = BipartiteCut({0}, {1})

# (amplitude, a, b) triples
_V_TERMS = {
    0: [(0.5, 1, 2), (0.5, 2, 1), (math.sqrt(2) / 2, 0, 3)],
    1: [(0.5, 2, 0), (0.5, 0, 2), (math.sqrt(2) / 2, 1, 4)],
    2: [(0.5, 0, 1), (0.5, 1, 0), (math.sqrt(2) / 2, 0, 5)],
}


def _vec(terms) -> np.ndarray:
    v = np.zeros(DIMS, dtype=complex)
    for amp, a, b in terms:
        v[a, b] += amp
    return v.reshape(-1)


def build_subspace_V(variant: str = "standard") -> tuple[PureState, PureState, PureState]:
    if variant not in ("standard", "cyclic"):
        raise ValueError(f"unknown variant {variant!r}")
    terms = dict(_V_TERMS)
    if variant == "cyclic":
        terms[2] = [(0.5, 0, 1), (0.5, 1, 0), (math.sqrt(2) / 2, 2, 5)]
    return tuple(PureState(_vec(terms[k]), DIMS) for k in range(3))


@dataclass
class ExampleParams:
    p: tuple = (0.5, 0.5)
    r: tuple = (1.0, 0.0)
    q: tuple = (1.0,)
    s: tuple = ((1.0, 0.0, 0.0),)
    w: float = 0.5
    variant: str = "standard"

    def __post_init__(self):
        self.p = tuple(float(x) for x in self.p)
        self.r = tuple(float(x) for x in self.r)
        self.q = tuple(float(x) for x in self.q)
        self.s = tuple(tuple(float(y) for y in t) for t in self.s)
        for name, dist in (("p", self.p), ("q", self.q)):
            if not dist or min(dist) < 0 or abs(math.fsum(dist) - 1.0) > 1e-9:
                raise InvalidStateError(f"{name} is not a probability distribution: {dist}")
        if len(self.r) != len(self.p):
            raise InvalidStateError("need one r_a per entry of p")
        if any(abs(x) > 1.0 for x in self.r):
            raise InvalidStateError("every r_a must lie in [-1, 1]")
        if len(self.s) != len(self.q):
            raise InvalidStateError("need one s-triple per entry of q")
        for t in self.s:
            if len(t) != 3 or abs(sum(x * x for x in t) - 1.0) > 1e-9:
                raise InvalidStateError(f"s-triple {t} is not a unit vector in R^3")
        if not 0.0 <= self.w <= 1.0:
            raise InvalidStateError("mixing weight w must lie in [0, 1]")


def rho_V(params: ExampleParams) -> DensityOperator:
    _, v1, v2 = build_subspace_V(params.variant)
    m = np.zeros((18, 18), dtype=complex)
    for pa, ra in zip(params.p, params.r):
        phi = ra * v1.vector + math.sqrt(max(0.0, 1.0 - ra * ra)) * v2.vector
        m += pa * np.outer(phi, phi.conj())
    return DensityOperator(m, DIMS)


def sigma(params: ExampleParams) -> DensityOperator:
    m = np.zeros((18, 18), dtype=complex)
    b3 = np.zeros(6)
    b3[3] = 1.0
    for qb, sb in zip(params.q, params.s):
        psi = np.kron(np.asarray(sb), b3)
        m += qb * np.outer(psi, psi.conj())
    return DensityOperator(m, DIMS)


def build_example_ensemble(params: ExampleParams | None = None) -> StateEnsemble:
    params = params or ExampleParams()
    return StateEnsemble([params.w, 1.0 - params.w], [rho_V(params), sigma(params)],
                         labels=("rho_V", "sigma"))


def run_example_checks(params: ExampleParams | None = None,
                       cfg: RoofConfig | None = None) -> DecompositionReport:
    return verify_decomposition(build_example_ensemble(params), CUT, cfg)
