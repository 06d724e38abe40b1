"""JSON ensemble files.

Layout::

    {"dims_A": [2], "dims_B": [2],
     "labels": ["a", "b"],                      # optional
     "states": [{"prob": 0.5, "matrix": [[[re, im], ...], ...]},
                {"prob": 0.5, "pure": true, "vector": [[re, im], ...]}]}

Complex numbers are ``[re, im]`` pairs, matrices row-major. The A/B split
of the factor list is the bipartite cut; ``dims_B`` may be empty for
single-party files.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import BipartiteCut, DensityOperator, PureState
from .errors import InvalidStateError
from .orthogonality import StateEnsemble

PURE_NORM_TOL = 1e-6


class FileFormatError(InvalidStateError):
    """Malformed ensemble file; the message names the offending field."""


@dataclass
class StateEntry:
    prob: float
    kind: str  # "matrix" or "vector"
    data: np.ndarray


@dataclass
class EnsembleFile:
    dims_a: list
    dims_b: list
    entries: list
    labels: list | None = None

    @property
    def dims(self) -> tuple:
        return tuple(self.dims_a) + tuple(self.dims_b)

    @property
    def cut(self) -> BipartiteCut | None:
        if not self.dims_a or not self.dims_b:
            return None
        na = len(self.dims_a)
        return BipartiteCut(range(na), range(na, na + len(self.dims_b)))

    def states(self) -> list[DensityOperator]:
        out = []
        for i, e in enumerate(self.entries):
            try:
                if e.kind == "vector":
                    norm2 = float(np.vdot(e.data, e.data).real)
                    if abs(norm2 - 1.0) > PURE_NORM_TOL:
                        raise InvalidStateError(f"vector norm^2 {norm2!r} is not 1")
                    out.append(PureState(e.data, self.dims, normalize=True).density())
                else:
                    out.append(DensityOperator(e.data, self.dims))
            except InvalidStateError as exc:
                raise FileFormatError(f"states[{i}]: {exc}") from None
        return out

    def ensemble(self) -> StateEnsemble:
        try:
            return StateEnsemble([e.prob for e in self.entries], self.states(), self.labels)
        except FileFormatError:
            raise
        except InvalidStateError as exc:
            raise FileFormatError(f"states: {exc}") from None

    def mixture(self) -> DensityOperator:
        return self.ensemble().mixture()


def _complex(x, where):
    if (not isinstance(x, (list, tuple)) or len(x) != 2
            or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in x)):
        raise FileFormatError(f"{where}: expected [re, im], got {x!r}")
    return complex(x[0], x[1])


def _dims(doc, key, required=True):
    if key not in doc:
        if required:
            raise FileFormatError(f"missing field {key!r}")
        return []
    val = doc[key]
    if not isinstance(val, list) or not all(isinstance(d, int) and d >= 1 for d in val):
        raise FileFormatError(f"{key}: expected a list of positive integers")
    return list(val)


def parse(text: str) -> EnsembleFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise FileFormatError("top level must be an object")
    dims_a = _dims(doc, "dims_A")
    dims_b = _dims(doc, "dims_B", required=False)
    if not dims_a:
        raise FileFormatError("dims_A: must be non-empty")
    total = int(np.prod(dims_a + dims_b))
    states = doc.get("states")
    if not isinstance(states, list) or not states:
        raise FileFormatError("states: expected a non-empty list")
    entries = []
    for i, st in enumerate(states):
        where = f"states[{i}]"
        if not isinstance(st, dict):
            raise FileFormatError(f"{where}: expected an object")
        prob = st.get("prob")
        if not isinstance(prob, (int, float)) or isinstance(prob, bool):
            raise FileFormatError(f"{where}.prob: expected a number")
        if st.get("pure", False):
            vec = st.get("vector")
            if not isinstance(vec, list) or len(vec) != total:
                raise FileFormatError(f"{where}.vector: expected {total} amplitudes")
            data = np.array([_complex(x, f"{where}.vector[{j}]") for j, x in enumerate(vec)])
            entries.append(StateEntry(float(prob), "vector", data))
        else:
            mat = st.get("matrix")
            if not isinstance(mat, list) or len(mat) != total:
                raise FileFormatError(f"{where}.matrix: expected {total} rows")
            rows = []
            for r, row in enumerate(mat):
                if not isinstance(row, list) or len(row) != total:
                    raise FileFormatError(f"{where}.matrix[{r}]: expected {total} entries")
                rows.append([_complex(x, f"{where}.matrix[{r}][{c}]") for c, x in enumerate(row)])
            entries.append(StateEntry(float(prob), "matrix", np.array(rows)))
    labels = doc.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or len(labels) != len(entries):
            raise FileFormatError("labels: expected one label per state")
        labels = [str(x) for x in labels]
    return EnsembleFile(dims_a, dims_b, entries, labels)


def load(path) -> EnsembleFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc.strerror}") from None
    return parse(text)


def _pair(z: complex) -> list:
    return [float(z.real), float(z.imag)]


def to_document(ef: EnsembleFile) -> dict:
    doc = {"dims_A": list(ef.dims_a), "dims_B": list(ef.dims_b)}
    if ef.labels is not None:
        doc["labels"] = list(ef.labels)
    states = []
    for e in ef.entries:
        if e.kind == "vector":
            states.append({"prob": e.prob, "pure": True, "vector": [_pair(z) for z in e.data]})
        else:
            states.append({"prob": e.prob, "matrix": [[_pair(z) for z in row] for row in e.data]})
    doc["states"] = states
    return doc


def serialize(ef: EnsembleFile) -> str:
    return json.dumps(to_document(ef))


def from_states(probs, states, dims_a, dims_b=(), labels=None) -> EnsembleFile:
    """Build a file object from PureState/DensityOperator inputs."""
    entries = []
    for p, s in zip(probs, states):
        if isinstance(s, PureState):
            entries.append(StateEntry(float(p), "vector", np.asarray(s.vector)))
        else:
            entries.append(StateEntry(float(p), "matrix", np.asarray(s.matrix)))
    return EnsembleFile(list(dims_a), list(dims_b), entries,
                        None if labels is None else [str(x) for x in labels])
