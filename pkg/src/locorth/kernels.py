"""Kernel selection: compiled extension if importable, numpy fallback otherwise.

Set ``LOCORTH_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _roof_py

BACKEND = "python"
_impl = _roof_py

if os.environ.get("LOCORTH_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _roof as _compiled
    except ImportError:  # extension not built
        pass
    else:
        _impl = _compiled
        BACKEND = "compiled"


def get_backend(name: str | None = None):
    """Return the kernel module for ``name`` ('compiled', 'python' or None for default)."""
    if name is None:
        return _impl
    if name == "python":
        return _roof_py
    if name == "compiled":
        from . import _roof
        return _roof
    raise ValueError(f"unknown kernel backend {name!r}")


def refine(psi, da, db, step, min_step, tol, max_sweeps):
    return _impl.refine(psi, da, db, step, min_step, tol, max_sweeps)


def ensemble_value(psi, da, db):
    return _impl.ensemble_value(psi, da, db)
