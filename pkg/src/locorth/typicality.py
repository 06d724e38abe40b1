"""Exact weak/strong typical-set masses by count-vector summation.

Whether a string is typical depends only on its symbol counts, so the mass
of a typical set is a sum of multinomial terms over admitted count vectors;
strings are never enumerated except in the tiny-n materialization helpers.

Strong-typical windows use the half-width ``eps*n / (|S| * |log2 p_a|)``.
The absolute value matters: read literally with ``log_{p_a} 2`` the
half-width is negative for every ``p_a < 1`` and the window is empty.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from . import core
from .core import trace_norm
from .errors import InvalidStateError, ResourceCapError
from .orthogonality import StateEnsemble

LATTICE_CAP = 10_000_000
STRING_CAP = 1 << 16
_WINDOW_SLACK = 1e-9
_CHUNK = 1 << 20


@dataclass(frozen=True)
class TypicalSpec:
    probs: tuple
    n: int
    eps: float
    mode: str = "strong"
    labels: tuple | None = None

    def __post_init__(self):
        p = tuple(float(x) for x in self.probs)
        object.__setattr__(self, "probs", p)
        if not p or any(x < 0 for x in p) or abs(math.fsum(p) - 1.0) > 1e-9:
            raise ValueError(f"invalid probability distribution {p}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("block length n must be a positive integer")
        object.__setattr__(self, "n", int(self.n))
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.mode not in ("weak", "strong"):
            raise ValueError(f"mode must be 'weak' or 'strong', got {self.mode!r}")
        labels = tuple(str(i) for i in range(len(p))) if self.labels is None else tuple(self.labels)
        if len(labels) != len(p):
            raise ValueError("one label per probability required")
        object.__setattr__(self, "labels", labels)

    def with_mode(self, mode: str) -> "TypicalSpec":
        return TypicalSpec(self.probs, self.n, self.eps, mode, self.labels)

    @property
    def active(self) -> list[int]:
        """Indices of symbols with nonzero probability."""
        return [i for i, x in enumerate(self.probs) if x > 0]

    @property
    def entropy(self) -> float:
        return core.shannon_entropy(self.probs)


def strong_windows(spec: TypicalSpec) -> dict:
    """Closed integer count window ``(lo, hi)`` for each active symbol."""
    act = spec.active
    k, n = len(act), spec.n
    out = {}
    for i in act:
        p = spec.probs[i]
        if p >= 1.0:
            out[spec.labels[i]] = (n, n)
            continue
        w = spec.eps * n / (k * abs(math.log2(p)))
        lo = max(0, math.ceil(p * n - w - _WINDOW_SLACK))
        hi = min(n, math.floor(p * n + w + _WINDOW_SLACK))
        out[spec.labels[i]] = (lo, hi)
    return out


def _weak_admits(counts: np.ndarray, logp: np.ndarray, spec: TypicalSpec) -> np.ndarray:
    # strict sandwich in the log domain
    lp = counts @ logp
    n, h, e = spec.n, spec.entropy, spec.eps
    return (lp > -n * (h + e)) & (lp < -n * (h - e))


def _strong_admits(counts: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    return np.all((counts >= lo) & (counts <= hi), axis=1)


def _lattice_ranges(spec: TypicalSpec, lo, hi):
    k = len(spec.active)
    if spec.mode == "strong":
        return [range(int(lo[j]), int(hi[j]) + 1) for j in range(k - 1)]
    return [range(0, spec.n + 1) for _ in range(k - 1)]


def _count_vectors(spec: TypicalSpec, ranges):
    """Yield chunks of count vectors (rows) over the free-coordinate lattice."""
    k, n = len(spec.active), spec.n
    if k == 1:
        yield np.array([[n]])
        return
    lead = ranges[0]
    rest = ranges[1:]
    rest_grid = (np.stack(np.meshgrid(*[np.arange(r.start, r.stop) for r in rest],
                                      indexing="ij"), -1).reshape(-1, len(rest))
                 if rest else np.zeros((1, 0), dtype=int))
    step = max(1, _CHUNK // max(1, len(rest_grid)))
    for start in range(lead.start, lead.stop, step):
        first = np.arange(start, min(start + step, lead.stop))
        free = np.concatenate([np.repeat(first, len(rest_grid))[:, None],
                               np.tile(rest_grid, (len(first), 1))], axis=1)
        last = n - free.sum(axis=1)
        ok = last >= 0
        yield np.concatenate([free[ok], last[ok, None]], axis=1)


def lattice_size(spec: TypicalSpec) -> int:
    w = strong_windows(spec)
    lo = [w[spec.labels[i]][0] for i in spec.active]
    hi = [w[spec.labels[i]][1] for i in spec.active]
    return math.prod(len(r) for r in _lattice_ranges(spec, lo, hi))


@dataclass
class TypicalSetReport:
    mass: float
    tail_mass: float
    mode: str
    windows: dict = field(default_factory=dict)
    inclusion_checked: bool = False
    admitted_vectors: int = 0
    lattice_size: int = 0
    exact_trace_distance: float | None = None

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "mass": self.mass,
            "tail_mass": self.tail_mass,
            "windows": {str(k): list(v) for k, v in self.windows.items()},
            "inclusion_checked": self.inclusion_checked,
            "admitted_vectors": self.admitted_vectors,
            "lattice_size": self.lattice_size,
            "exact_trace_distance": self.exact_trace_distance,
        }


def typical_mass(spec: TypicalSpec, cap: int = LATTICE_CAP) -> TypicalSetReport:
    """Exact probability of the typical set via multinomial count-vector sums.

    ``inclusion_checked`` is set when every strong-admitted count vector in
    the enumerated lattice was confirmed weak-typical as well.
    """
    act = spec.active
    p = np.array([spec.probs[i] for i in act])
    logp = np.log2(p)
    w = strong_windows(spec)
    lo = np.array([w[spec.labels[i]][0] for i in act])
    hi = np.array([w[spec.labels[i]][1] for i in act])
    size = lattice_size(spec)
    if size > cap:
        raise ResourceCapError(f"count-vector lattice has {size} points, cap is {cap}")
    n = spec.n
    terms, admitted, inclusion = [], 0, True
    for counts in _count_vectors(spec, _lattice_ranges(spec, lo, hi)):
        strong = _strong_admits(counts, lo, hi)
        weak = _weak_admits(counts, logp, spec)
        inclusion &= bool(np.all(weak[strong]))
        keep = strong if spec.mode == "strong" else weak
        c = counts[keep]
        admitted += len(c)
        if len(c):
            logm = gammaln(n + 1) - gammaln(c + 1).sum(axis=1) + c @ np.log(p)
            terms.extend(np.exp(logm).tolist())
    mass = min(1.0, math.fsum(terms))
    return TypicalSetReport(
        mass=mass,
        tail_mass=1.0 - mass,
        mode=spec.mode,
        windows=w if spec.mode == "strong" else {},
        inclusion_checked=inclusion,
        admitted_vectors=admitted,
        lattice_size=size,
    )


def _symbol_index(spec: TypicalSpec, t) -> list[int]:
    seq = list(t)
    if len(seq) != spec.n:
        raise ValueError(f"string length {len(seq)} differs from n={spec.n}")
    lookup = {str(lab): i for i, lab in enumerate(spec.labels)}
    try:
        return [lookup[str(s)] for s in seq]
    except KeyError as exc:
        raise ValueError(f"symbol {exc.args[0]!r} not in alphabet {spec.labels}") from None


def is_typical_string(spec: TypicalSpec, t: str | Sequence) -> bool:
    idx = _symbol_index(spec, t)
    if any(spec.probs[i] == 0 for i in idx):
        return False
    act = spec.active
    pos = {i: j for j, i in enumerate(act)}
    counts = np.zeros(len(act), dtype=int)
    for i in idx:
        counts[pos[i]] += 1
    if spec.mode == "weak":
        logp = np.log2([spec.probs[i] for i in act])
        return bool(_weak_admits(counts[None, :], logp, spec)[0])
    w = strong_windows(spec)
    return all(w[spec.labels[i]][0] <= counts[pos[i]] <= w[spec.labels[i]][1] for i in act)


def _check_labels(spec: TypicalSpec, ensemble: StateEnsemble) -> None:
    if tuple(map(str, ensemble.labels)) != tuple(map(str, spec.labels)):
        raise InvalidStateError(
            f"ensemble labels {ensemble.labels} do not match alphabet {spec.labels}")
    if np.max(np.abs(np.asarray(spec.probs) - ensemble.probs)) > 1e-9:
        raise InvalidStateError("ensemble probabilities differ from the typicality distribution")


def truncation_tail_bound(spec: TypicalSpec, ensemble: StateEnsemble) -> float:
    """Probability outside the typical set; bounds the truncation trace distance."""
    _check_labels(spec, ensemble)
    return typical_mass(spec).tail_mass


def exact_truncation_distance(spec: TypicalSpec, ensemble: StateEnsemble) -> float:
    """||rho^(x)n - rho_T||_1 with both operators built explicitly (tiny n only)."""
    _check_labels(spec, ensemble)
    d = ensemble.states[0].dim
    total = d ** spec.n
    if total > core.MAX_DIM:
        raise ResourceCapError(f"dimension {d}^{spec.n} = {total} exceeds cap {core.MAX_DIM}")
    act = spec.active
    if len(act) ** spec.n > STRING_CAP:
        raise ResourceCapError(f"{len(act)}^{spec.n} strings exceed cap {STRING_CAP}")
    mats = [ensemble.states[i].matrix for i in range(len(ensemble))]
    rho = ensemble.mixture().matrix
    full = np.ones((1, 1), dtype=complex)
    for _ in range(spec.n):
        full = np.kron(full, rho)
    truncated = np.zeros((total, total), dtype=complex)
    for s in itertools.product(act, repeat=spec.n):
        if not is_typical_string(spec, [spec.labels[i] for i in s]):
            continue
        term = np.ones((1, 1), dtype=complex)
        for i in s:
            term = np.kron(term, mats[i])
        truncated += math.prod(spec.probs[i] for i in s) * term
    return trace_norm(full - truncated)
