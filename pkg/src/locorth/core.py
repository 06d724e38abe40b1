"""Dense linear algebra for multipartite quantum states.

States carry their tensor-factor dimensions explicitly so that partial
traces and bipartite reshapes never have to guess the structure.
All entropies are in bits.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidStateError, ResourceCapError

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
TRACE_TOL = 1e-9
NORM_TOL = 1e-12
ZERO_EIG = 1e-12

# Dense eigendecomposition budget; change at runtime with set_max_dim().
MAX_DIM = 4096


def set_max_dim(value: int) -> int:
    """Set the total-dimension cap and return the previous one."""
    global MAX_DIM
    if value < 1:
        raise ValueError("max dimension must be positive")
    old, MAX_DIM = MAX_DIM, int(value)
    return old


def _check_cap(total: int) -> None:
    if total > MAX_DIM:
        raise ResourceCapError(f"total dimension {total} exceeds cap {MAX_DIM}")


def _as_dims(dims: Iterable[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims:
        raise InvalidStateError("factor dimension list is empty")
    if any(d < 1 for d in dims):
        raise InvalidStateError(f"factor dimensions must be >= 1, got {dims}")
    return dims


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


def clamp_eigenvalues(evals: np.ndarray, tol: float = PSD_TOL) -> np.ndarray:
    """Zero out small negative eigenvalues; reject genuinely negative ones."""
    evals = np.asarray(evals, dtype=float)
    if evals.size and evals.min() < -tol:
        raise InvalidStateError(f"operator has negative eigenvalue {evals.min():.3e}")
    return np.where(evals < 0.0, 0.0, evals)


@dataclass(frozen=True)
class BipartiteCut:
    """Split of factor indices into an A side and a B side."""

    side_a: frozenset
    side_b: frozenset

    def __init__(self, side_a: Iterable[int], side_b: Iterable[int]):
        object.__setattr__(self, "side_a", frozenset(int(i) for i in side_a))
        object.__setattr__(self, "side_b", frozenset(int(i) for i in side_b))

    @classmethod
    def from_side_a(cls, side_a: Iterable[int], n_factors: int) -> "BipartiteCut":
        side_a = frozenset(side_a)
        return cls(side_a, set(range(n_factors)) - side_a)

    def validate(self, n_factors: int) -> None:
        if not self.side_a or not self.side_b:
            raise InvalidStateError("both sides of a cut must be non-empty")
        if self.side_a & self.side_b:
            raise InvalidStateError("cut sides overlap")
        if self.side_a | self.side_b != set(range(n_factors)):
            raise InvalidStateError(
                f"cut {sorted(self.side_a)}|{sorted(self.side_b)} does not cover "
                f"factors 0..{n_factors - 1}"
            )

    def split_dims(self, dims: Sequence[int]) -> tuple[int, int]:
        self.validate(len(dims))
        da = int(np.prod([dims[i] for i in sorted(self.side_a)]))
        db = int(np.prod([dims[i] for i in sorted(self.side_b)]))
        return da, db

    def axes(self) -> list[int]:
        return sorted(self.side_a) + sorted(self.side_b)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Positive semi-definite, unit-trace operator on a tensor-product space.

    The matrix is Hermitized as ``(M + M^H)/2`` on construction, then the
    Hermiticity, positivity and trace invariants are enforced.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]
    _evals: np.ndarray = field(init=False, repr=False, compare=False)

    def __init__(self, matrix, dims: Iterable[int] | None = None):
        m = np.asarray(matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidStateError(f"density operator must be square, got shape {m.shape}")
        dims = _as_dims(dims if dims is not None else (m.shape[0],))
        total = int(np.prod(dims))
        if total != m.shape[0]:
            raise InvalidStateError(f"dims {dims} do not match matrix side {m.shape[0]}")
        _check_cap(total)
        if not np.all(np.isfinite(m)):
            raise InvalidStateError("matrix has non-finite entries")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise InvalidStateError("matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"trace is {tr!r}, expected 1")
        evals = np.linalg.eigvalsh(m)
        clamp_eigenvalues(evals)
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "_evals", evals)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_factors(self) -> int:
        return len(self.dims)

    def eigenvalues(self) -> np.ndarray:
        """Ascending eigenvalues with PSD drift clamped to zero."""
        return clamp_eigenvalues(self._evals)

    def rank(self, tol: float = ZERO_EIG) -> int:
        return int(np.sum(self.eigenvalues() > tol))

    def is_pure(self, tol: float = 1e-9) -> bool:
        return self.eigenvalues()[-1] >= 1.0 - tol

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector on a tensor-product space."""

    vector: np.ndarray
    dims: tuple[int, ...]

    def __init__(self, vector, dims: Iterable[int] | None = None, normalize: bool = False):
        v = np.asarray(vector, dtype=np.complex128).reshape(-1)
        dims = _as_dims(dims if dims is not None else (v.size,))
        if int(np.prod(dims)) != v.size:
            raise InvalidStateError(f"dims {dims} do not match vector length {v.size}")
        _check_cap(v.size)
        if not np.all(np.isfinite(v)):
            raise InvalidStateError("vector has non-finite entries")
        norm2 = float(np.vdot(v, v).real)
        if normalize:
            if norm2 == 0.0:
                raise InvalidStateError("cannot normalize the zero vector")
            v = v / np.sqrt(norm2)
        elif abs(norm2 - 1.0) > NORM_TOL:
            raise InvalidStateError(f"vector norm^2 is {norm2!r}, expected 1")
        object.__setattr__(self, "vector", _frozen(v))
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.vector.size

    def density(self) -> DensityOperator:
        return DensityOperator(np.outer(self.vector, self.vector.conj()), self.dims)


def ket(index: int | Sequence[int], dims: Sequence[int]) -> PureState:
    """Computational basis vector; ``index`` is flat or one digit per factor."""
    dims = _as_dims(dims)
    v = np.zeros(int(np.prod(dims)), dtype=complex)
    flat = index if np.isscalar(index) else int(np.ravel_multi_index(tuple(index), dims))
    v[flat] = 1.0
    return PureState(v, dims)


def maximally_mixed(dims: Sequence[int]) -> DensityOperator:
    d = int(np.prod(dims))
    return DensityOperator(np.eye(d) / d, dims)


def bell_state() -> PureState:
    """(|00> + |11>)/sqrt(2)."""
    return PureState(np.array([1, 0, 0, 1]) / np.sqrt(2), (2, 2))


def as_density(state: DensityOperator | PureState) -> DensityOperator:
    return state.density() if isinstance(state, PureState) else state


def tensor_product(a: DensityOperator, b: DensityOperator) -> DensityOperator:
    a, b = as_density(a), as_density(b)
    _check_cap(a.dim * b.dim)
    return DensityOperator(np.kron(a.matrix, b.matrix), a.dims + b.dims)


def tensor_pure(a: PureState, b: PureState) -> PureState:
    _check_cap(a.dim * b.dim)
    return PureState(np.kron(a.vector, b.vector), a.dims + b.dims, normalize=True)


def _validate_keep(keep: Iterable[int], n: int) -> list[int]:
    keep = sorted({int(k) for k in keep})
    if not keep:
        raise InvalidStateError("keep set is empty")
    if keep[0] < 0 or keep[-1] >= n:
        raise InvalidStateError(f"keep set {keep} out of range for {n} factors")
    return keep


def reduce_matrix(matrix: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Partial trace on a raw matrix; ``keep`` must be sorted and valid."""
    n = len(dims)
    drop = [i for i in range(n) if i not in keep]
    dk = int(np.prod([dims[i] for i in keep]))
    dt = int(np.prod([dims[i] for i in drop])) if drop else 1
    t = matrix.reshape(tuple(dims) * 2)
    t = t.transpose(list(keep) + drop + [n + i for i in keep] + [n + i for i in drop])
    t = t.reshape(dk, dt, dk, dt)
    return np.einsum("ajbj->ab", t)


def partial_trace(rho: DensityOperator | PureState, keep: Iterable[int]) -> DensityOperator:
    """Reduced state on the factors in ``keep`` (kept in their original order)."""
    rho = as_density(rho)
    keep = _validate_keep(keep, rho.n_factors)
    red = reduce_matrix(rho.matrix, rho.dims, keep)
    return DensityOperator(red, [rho.dims[i] for i in keep])


def _entropy_from_eigs(evals: np.ndarray) -> float:
    evals = clamp_eigenvalues(evals)
    evals = evals[evals > ZERO_EIG]
    return float(max(0.0, -np.sum(evals * np.log2(evals))))


def von_neumann_entropy(rho: DensityOperator | PureState) -> float:
    if isinstance(rho, PureState):
        return 0.0
    return _entropy_from_eigs(rho.eigenvalues())


def shannon_entropy(p: Sequence[float]) -> float:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("distribution must be a non-empty vector")
    if np.any(p < 0):
        raise ValueError("distribution has a negative entry")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"distribution sums to {p.sum()!r}, expected 1")
    nz = p[p > 0]
    return float(max(0.0, -np.sum(nz * np.log2(nz))))


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))


_NOISE_FLOOR = 64 * np.finfo(float).eps


def _denoise(w: np.ndarray) -> np.ndarray:
    # eigenvalues within rounding noise of zero would otherwise leak
    # sqrt(noise) ~ 1e-8 into square roots
    w = np.asarray(w, dtype=float).copy()
    w[w < _NOISE_FLOOR * max(float(w.max(initial=0.0)), 1e-300)] = 0.0
    return w


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    w = np.sqrt(_denoise(clamp_eigenvalues(w)))
    return (v * w) @ v.conj().T


def fidelity(rho: DensityOperator | PureState, sigma: DensityOperator | PureState) -> float:
    """Tr sqrt(sqrt(rho) sigma sqrt(rho)), clipped to [0, 1]."""
    rho, sigma = as_density(rho), as_density(sigma)
    if rho.dim != sigma.dim:
        raise InvalidStateError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    s = psd_sqrt(rho.matrix)
    inner = s @ sigma.matrix @ s
    inner = 0.5 * (inner + inner.conj().T)
    w = _denoise(np.clip(np.linalg.eigvalsh(inner), 0.0, None))
    return float(min(1.0, np.sum(np.sqrt(w))))


def trace_norm(x) -> float:
    x = np.asarray(x)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError(f"trace norm needs a square matrix, got shape {x.shape}")
    return float(np.sum(np.linalg.svd(x, compute_uv=False)))


def bipartite_matrix(psi: PureState, cut: BipartiteCut) -> np.ndarray:
    """Amplitudes of ``psi`` reshaped to a (dim A) x (dim B) matrix."""
    da, db = cut.split_dims(psi.dims)
    t = psi.vector.reshape(psi.dims).transpose(cut.axes())
    return t.reshape(da, db)


def bipartite_density(rho: DensityOperator, cut: BipartiteCut) -> tuple[np.ndarray, int, int]:
    """Matrix of ``rho`` with factors reordered as (A side, B side)."""
    da, db = cut.split_dims(rho.dims)
    n = rho.n_factors
    axes = cut.axes()
    t = rho.matrix.reshape(rho.dims * 2).transpose(axes + [n + i for i in axes])
    return t.reshape(da * db, da * db), da, db


def schmidt_decomposition(psi: PureState, cut: BipartiteCut, tol: float = ZERO_EIG):
    """List of ``(coefficient, vec_a, vec_b)`` with coefficients descending.

    Coefficients below ``tol`` are dropped.
    """
    m = bipartite_matrix(psi, cut)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    return [(float(s[i]), u[:, i], vh[i, :]) for i in range(s.size) if s[i] > tol]


def purify(rho: DensityOperator) -> PureState:
    """Purification on ``rho.dims + (rank,)`` from the eigendecomposition."""
    w, v = np.linalg.eigh(rho.matrix)
    w = clamp_eigenvalues(w)
    idx = np.flatnonzero(w > ZERO_EIG)[::-1]
    r = idx.size
    u = (v[:, idx] * np.sqrt(w[idx])).reshape(-1)
    return PureState(u, rho.dims + (r,), normalize=True)


def haar_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random ``rows x cols`` isometry (``U^H U = I``)."""
    z = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_pure_state(dims: Sequence[int], rng: np.random.Generator) -> PureState:
    d = int(np.prod(dims))
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(v, dims, normalize=True)


def random_density_operator(dims: Sequence[int], rng: np.random.Generator,
                            rank: int | None = None) -> DensityOperator:
    """Random state of the given rank (Ginibre construction)."""
    d = int(np.prod(dims))
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    return DensityOperator(m / np.trace(m).real, dims)


def embed(matrix: np.ndarray, rows_a: Sequence[int], rows_b: Sequence[int],
          dims: tuple[int, int]) -> np.ndarray:
    """Place a (len(rows_a)*len(rows_b)) block operator into a larger A x B space.

    ``rows_a``/``rows_b`` are the basis indices of the block on each side.
    """
    da, db = dims
    iso_a = np.zeros((da, len(rows_a)))
    iso_a[list(rows_a), range(len(rows_a))] = 1.0
    iso_b = np.zeros((db, len(rows_b)))
    iso_b[list(rows_b), range(len(rows_b))] = 1.0
    iso = np.kron(iso_a, iso_b)
    return iso @ np.asarray(matrix) @ iso.T
