"""Entanglement of pure states and convex-roof entanglement of formation.

The convex roof is searched over decompositions generated from the
eigen-ensemble of ``rho``: rows ``U @ (V sqrt(L))^T`` for a K x r isometry
``U`` are always a valid decomposition, so the optimizer never leaves the
feasible set. The two-qubit closed form serves as an independent oracle.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .core import (ZERO_EIG, BipartiteCut, DensityOperator, PureState, as_density,
                   binary_entropy, bipartite_density, bipartite_matrix, haar_isometry,
                   psd_sqrt, reduce_matrix, tensor_pure)
from .errors import InvalidStateError, NotLocallyOrthogonal
from .orthogonality import LOCertificate, StateEnsemble, find_lo_ordering

EC_HYPOTHESIS = "entanglement cost E_c is additive for the quantum product state"
_YY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])


def pure_entanglement(psi: PureState, cut: BipartiteCut) -> float:
    """Entropy (bits) of either marginal of ``psi`` across ``cut``."""
    s = np.linalg.svd(bipartite_matrix(psi, cut), compute_uv=False)
    mu = s[s > 0.0] ** 2
    mu = mu[mu > ZERO_EIG]
    return float(max(0.0, -np.sum(mu * np.log2(mu))))


def _two_qubit(rho) -> DensityOperator:
    rho = as_density(rho)
    if rho.dims != (2, 2):
        raise InvalidStateError(f"two-qubit input required, got factor dims {rho.dims}")
    return rho


def concurrence_2q(rho) -> float:
    """Wootters concurrence max(0, l1 - l2 - l3 - l4).

    The l_i (square roots of the eigenvalues of rho (Y x Y) rho* (Y x Y))
    are taken as singular values of sqrt(rho) sqrt(rho~), which avoids a
    non-Hermitian eigenproblem.
    """
    m = _two_qubit(rho).matrix
    s = psd_sqrt(m)
    s_tilde = _YY @ s.conj() @ _YY
    lam = np.sort(np.linalg.svd(s @ s_tilde, compute_uv=False))[::-1]
    return float(min(1.0, max(0.0, lam[0] - lam[1] - lam[2] - lam[3])))


def ef_from_concurrence(c: float) -> float:
    return binary_entropy((1.0 + math.sqrt(max(0.0, 1.0 - c * c))) / 2.0)


def ef_wootters_2q(rho) -> float:
    return ef_from_concurrence(concurrence_2q(rho))


@dataclass(frozen=True)
class RoofConfig:
    """Optimizer settings; ``K=None`` picks min(r^2, 8r) capped at 24."""

    K: int | None = None
    restarts: int = 20
    seed: int = 0
    max_iters: int = 2000
    tol: float = 1e-6
    step: float = math.pi / 4
    min_step: float = 1e-3
    workers: int = 1
    backend: str | None = None

    def ensemble_size(self, rank: int) -> int:
        if self.K is not None:
            return self.K
        return max(rank, min(rank * rank, 8 * rank, 24))

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("K", "restarts", "seed", "max_iters", "tol", "step", "min_step")}


@dataclass
class ConvexRoofResult:
    value: float
    decomposition: list
    restarts_used: int
    best_restart_seed: int
    converged: bool
    ensemble_size: int = 1
    restart_values: list = field(default_factory=list)
    sweeps: int = 0

    def reconstruction(self) -> np.ndarray:
        return sum(w * np.outer(p.vector, p.vector.conj()) for w, p in self.decomposition)


def _eigen_ensemble(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    idx = np.flatnonzero(w > ZERO_EIG)[::-1]
    return v[:, idx] * np.sqrt(w[idx])


def _restart(args):
    W, K, da, db, cfg, index = args
    rng = np.random.default_rng(cfg.seed + index)
    U = haar_isometry(K, W.shape[1], rng)
    psi = np.ascontiguousarray(U @ W.T)
    impl = kernels.get_backend(cfg.backend)
    value, sweeps, conv = impl.refine(psi, da, db, cfg.step, cfg.min_step, cfg.tol, cfg.max_iters)
    return value, sweeps, conv, psi


def _unpermute(vec: np.ndarray, dims: tuple, cut: BipartiteCut) -> np.ndarray:
    axes = cut.axes()
    t = vec.reshape([dims[i] for i in axes]).transpose(np.argsort(axes))
    return t.reshape(-1)


def ef_convex_roof(rho, cut: BipartiteCut, cfg: RoofConfig | None = None) -> ConvexRoofResult:
    """Upper bound on E_f(rho): best decomposition found over seeded restarts.

    Restart ``i`` draws its isometry from seed ``cfg.seed + i``; the result
    is the minimum value, ties going to the lower restart index, so
    concurrent execution (``cfg.workers > 1``) gives identical output.
    """
    cfg = cfg or RoofConfig()
    rho = as_density(rho)
    if cfg.restarts < 1:
        raise ValueError("restarts must be positive")
    m, da, db = bipartite_density(rho, cut)
    W = _eigen_ensemble(m)
    r = W.shape[1]
    K = cfg.ensemble_size(r)
    if K < r:
        raise ValueError(f"ensemble size K={K} is smaller than rank {r}")
    if r == 1:
        v = W[:, 0] / np.linalg.norm(W[:, 0])
        psi = PureState(_unpermute(v, rho.dims, cut), rho.dims, normalize=True)
        return ConvexRoofResult(pure_entanglement(psi, cut), [(1.0, psi)], 0, cfg.seed,
                                True, 1, [], 0)

    jobs = [(W, K, da, db, cfg, i) for i in range(cfg.restarts)]
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            runs = list(pool.map(_restart, jobs))
    else:
        runs = [_restart(j) for j in jobs]
    best = min(range(len(runs)), key=lambda i: (runs[i][0], i))
    _, sweeps, conv, psi = runs[best]

    weights = np.einsum("kn,kn->k", psi.conj(), psi).real
    decomposition = []
    for k in np.flatnonzero(weights > 1e-15):
        v = _unpermute(psi[k] / math.sqrt(weights[k]), rho.dims, cut)
        decomposition.append((float(weights[k]), PureState(v, rho.dims, normalize=True)))
    value = float(kernels.get_backend(cfg.backend).ensemble_value(psi, da, db))
    return ConvexRoofResult(
        value=max(0.0, value),
        decomposition=decomposition,
        restarts_used=cfg.restarts,
        best_restart_seed=cfg.seed + best,
        converged=bool(conv),
        ensemble_size=K,
        restart_values=[float(run[0]) for run in runs],
        sweeps=int(sweeps),
    )


def two_qubit_block(rho, cut: BipartiteCut, tol: float = 1e-9) -> DensityOperator | None:
    """Compress ``rho`` to a 2x2 bipartite block when its support allows it.

    The block is spanned by the top two eigenvectors of each marginal; a
    local isometry, so E_f is unchanged. Returns ``None`` if either marginal
    has rank above two.
    """
    rho = as_density(rho)
    m, da, db = bipartite_density(rho, cut)
    if da < 2 or db < 2:
        return None
    bases = []
    for keep, d in (([0], da), ([1], db)):
        red = reduce_matrix(m, (da, db), keep)
        w, v = np.linalg.eigh(red)
        if np.sum(w > tol) > 2:
            return None
        bases.append(v[:, ::-1][:, :2])
    iso = np.kron(bases[0], bases[1])
    block = iso.conj().T @ m @ iso
    if abs(np.trace(block).real - 1.0) > tol:
        return None
    return DensityOperator(block / np.trace(block).real, (2, 2))


@dataclass
class ComponentEF:
    label: object
    prob: float
    value: float
    method: str
    pure: bool


def component_ef(rho, cut: BipartiteCut, cfg: RoofConfig | None = None) -> tuple[float, str]:
    """E_f of one state, routed to the cheapest exact method available."""
    cfg = cfg or RoofConfig()
    rho = as_density(rho)
    if rho.rank() == 1:
        psi = ef_convex_roof(rho, cut, cfg).decomposition[0][1]
        return pure_entanglement(psi, cut), "pure"
    block = two_qubit_block(rho, cut)
    if block is not None:
        return ef_wootters_2q(block), "wootters"
    r = rho.rank()
    if cfg.K is not None and cfg.K < r:
        cfg = replace(cfg, K=None)
    return ef_convex_roof(rho, cut, cfg).value, "roof"


def _require_certificate(ensemble: StateEnsemble) -> LOCertificate:
    cert = find_lo_ordering(ensemble)
    if cert is None:
        raise NotLocallyOrthogonal(
            "ensemble admits no locally orthogonal ordering; the decomposition "
            "formula is not claimed")
    return cert


def lo_components(ensemble: StateEnsemble, cut: BipartiteCut,
                  cfg: RoofConfig | None = None) -> list[ComponentEF]:
    _require_certificate(ensemble)
    out = []
    for label, p, rho in zip(ensemble.labels, ensemble.probs, ensemble.states):
        value, method = component_ef(rho, cut, cfg)
        out.append(ComponentEF(label, float(p), value, method, rho.rank() == 1))
    return out


def ef_lo_ensemble(ensemble: StateEnsemble, cut: BipartiteCut,
                   cfg: RoofConfig | None = None) -> float:
    """sum_a p_a E_f(rho_a) for a locally orthogonal ensemble."""
    return math.fsum(c.prob * c.value for c in lo_components(ensemble, cut, cfg))


@dataclass
class EdBound:
    """Certified part of sum_a p_a E_d(rho_a).

    ``value`` is ``None`` (unavailable) unless every component is pure;
    ``partial_sum`` always holds the contribution of the pure components.
    """

    value: float | None
    partial_sum: float
    unavailable: tuple = ()

    @property
    def available(self) -> bool:
        return self.value is not None


def ed_lower_bound(ensemble: StateEnsemble, cut: BipartiteCut) -> EdBound:
    _require_certificate(ensemble)
    parts, missing = [], []
    for label, p, rho in zip(ensemble.labels, ensemble.probs, ensemble.states):
        if rho.rank() == 1:
            w, v = np.linalg.eigh(rho.matrix)
            psi = PureState(v[:, -1], rho.dims, normalize=True)
            parts.append(float(p) * pure_entanglement(psi, cut))
        else:
            missing.append(label)
    partial = math.fsum(parts)
    return EdBound(None if missing else partial, partial, tuple(missing))


def _shift_cut(cut: BipartiteCut, offset: int) -> tuple[set, set]:
    return {i + offset for i in cut.side_a}, {i + offset for i in cut.side_b}


def ed_superadditivity_check(psi: PureState, phi: PureState,
                             cuts: tuple[BipartiteCut, BipartiteCut], tol: float = 1e-8) -> bool:
    """E(psi x phi) == E(psi) + E(phi) across the combined cut."""
    if not isinstance(psi, PureState) or not isinstance(phi, PureState):
        raise InvalidStateError("superadditivity check needs pure inputs")
    cut_psi, cut_phi = cuts
    a2, b2 = _shift_cut(cut_phi, len(psi.dims))
    joint = BipartiteCut(cut_psi.side_a | a2, cut_psi.side_b | b2)
    lhs = pure_entanglement(tensor_pure(psi, phi), joint)
    rhs = pure_entanglement(psi, cut_psi) + pure_entanglement(phi, cut_phi)
    return abs(lhs - rhs) <= tol


@dataclass
class DecompositionReport:
    ef_direct: float
    ef_predicted: float
    ec_predicted: float
    ed_lower: float
    gap: float
    certificate: LOCertificate
    components: list
    ed_available: bool
    ec_hypothesis: str = EC_HYPOTHESIS
    ec_is_upper_bound: bool = False
    direct: ConvexRoofResult | None = None
    config: RoofConfig | None = None

    def as_dict(self) -> dict:
        d = self.direct
        return {
            "ef_direct": self.ef_direct,
            "ef_predicted": self.ef_predicted,
            "ec_predicted": self.ec_predicted,
            "ec_hypothesis": self.ec_hypothesis,
            "ec_is_upper_bound": self.ec_is_upper_bound,
            "ed_lower": self.ed_lower,
            "ed_available": self.ed_available,
            "gap": self.gap,
            "certificate": self.certificate.as_dict(),
            "components": [
                {"label": c.label, "prob": c.prob, "ef": c.value, "method": c.method,
                 "pure": c.pure} for c in self.components
            ],
            "optimizer": None if d is None else {
                "restarts_used": d.restarts_used,
                "best_restart_seed": d.best_restart_seed,
                "converged": d.converged,
                "ensemble_size": d.ensemble_size,
                "sweeps": d.sweeps,
            },
            "config": None if self.config is None else self.config.as_dict(),
        }


def verify_decomposition(ensemble: StateEnsemble, cut: BipartiteCut,
                 cfg: RoofConfig | None = None) -> DecompositionReport:
    """Compare the convex roof of the mixture with the component-wise sum."""
    cfg = cfg or RoofConfig()
    cert = _require_certificate(ensemble)
    comps = lo_components(ensemble, cut, cfg)
    predicted = math.fsum(c.prob * c.value for c in comps)
    direct = ef_convex_roof(ensemble.mixture(), cut, cfg)
    ed = ed_lower_bound(ensemble, cut)
    return DecompositionReport(
        ef_direct=direct.value,
        ef_predicted=predicted,
        ec_predicted=predicted,
        ed_lower=ed.partial_sum,
        gap=direct.value - predicted,
        certificate=cert,
        components=comps,
        ed_available=ed.available,
        ec_is_upper_bound=not all(c.pure for c in comps),
        direct=direct,
        config=cfg,
    )
