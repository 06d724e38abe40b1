"""Pure-numpy fallback for the convex-roof refinement kernel.

Same search as the compiled kernel; the eight trial rotations of a pair
are evaluated as one batch.
"""
from __future__ import annotations

import numpy as np

N_PHASES = 4
ACCEPT_EPS = 1e-14
_PHASES = np.exp(1j * np.pi / 4 * np.arange(N_PHASES))


def _xlog2x(x):
    x = np.asarray(x, dtype=float)
    safe = np.where(x > 0.0, x, 1.0)
    return np.where(x > 0.0, x * np.log2(safe), 0.0)


def _terms(v: np.ndarray, da: int, db: int) -> np.ndarray:
    """p*E(v/|v|) for a batch of unnormalized vectors (last axis)."""
    m = v.reshape(v.shape[:-1] + (da, db))
    if da <= db:
        red = m @ np.swapaxes(m.conj(), -1, -2)
    else:
        red = np.swapaxes(m.conj(), -1, -2) @ m
    p = np.trace(red, axis1=-2, axis2=-1).real
    ev = np.linalg.eigvalsh(red)
    return _xlog2x(p) - _xlog2x(ev).sum(axis=-1)


def vector_term(v, da, db) -> float:
    return float(_terms(np.asarray(v), da, db))


def ensemble_value(psi, da, db) -> float:
    return float(np.sum(_terms(np.asarray(psi), da, db)))


def refine(psi: np.ndarray, da: int, db: int, step: float, min_step: float,
           tol: float, max_sweeps: int):
    """Pairwise-rotation pattern search, in place.

    Returns ``(value, sweeps, converged)``.
    """
    K = psi.shape[0]
    terms = _terms(psi, da, db)
    # trial order matches the compiled kernel: phase-major, then +step, -step
    e = np.repeat(_PHASES, 2)[:, None]
    signs = np.tile([1.0, -1.0], N_PHASES)[:, None]
    sweeps, converged = 0, False
    while sweeps < max_sweeps:
        sweeps += 1
        gain = 0.0
        c, s = np.cos(step * signs), np.sin(step * signs)
        for i in range(K - 1):
            for j in range(i + 1, K):
                a = c * psi[i] + s * e * psi[j]
                b = -s * e.conj() * psi[i] + c * psi[j]
                ti, tj = _terms(a, da, db), _terms(b, da, db)
                dlt = (terms[i] + terms[j]) - (ti + tj)
                k = int(np.argmax(dlt))
                if dlt[k] > ACCEPT_EPS:
                    psi[i], psi[j] = a[k], b[k]
                    terms[i], terms[j] = ti[k], tj[k]
                    gain += dlt[k]
        if gain < tol:
            if step <= min_step:
                converged = True
                break
            step *= 0.5
    return float(np.sum(terms)), sweeps, converged
