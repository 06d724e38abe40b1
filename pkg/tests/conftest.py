import itertools

import numpy as np
import pytest

from locorth.core import BipartiteCut, DensityOperator, PureState, bell_state
from locorth.orthogonality import StateEnsemble


@pytest.fixture
def cut():
    return BipartiteCut({0}, {1})


@pytest.fixture
def tau():
    return bell_state().density()


@pytest.fixture
def psi_plus():
    """(|01> + |10>)/sqrt(2), globally orthogonal to tau."""
    return PureState(np.array([0, 1, 1, 0]) / np.sqrt(2), (2, 2)).density()


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def block_state(dims=(2, 4)):
    """1/2 (tau in B-block {0,1}) + 1/2 |0>_A|2>_B."""
    v = np.zeros(8, dtype=complex)
    v[0 * 4 + 0] = v[1 * 4 + 1] = 1 / np.sqrt(2)
    w = np.zeros(8, dtype=complex)
    w[0 * 4 + 2] = 1.0
    return PureState(v, dims), PureState(w, dims)


def random_structured_state(dims, rng):
    """Random state whose single-factor supports are random coordinate subsets.

    Coordinate supports make exact zero overlaps common, so both LO and
    non-LO ensembles show up.
    """
    d = int(np.prod(dims))
    supports = [rng.choice(k, size=int(rng.integers(1, k + 1)), replace=False) for k in dims]
    idx = [int(np.ravel_multi_index(t, dims)) for t in itertools.product(*supports)]
    r = int(rng.integers(1, 3))
    g = np.zeros((d, r), dtype=complex)
    g[idx] = rng.standard_normal((len(idx), r)) + 1j * rng.standard_normal((len(idx), r))
    m = g @ g.conj().T
    return DensityOperator(m / np.trace(m).real, dims)


def random_structured_ensemble(rng, max_states=4, max_factors=3):
    m = int(rng.integers(1, max_factors + 1))
    dims = tuple(int(x) for x in rng.integers(2, 4, size=m))
    k = int(rng.integers(1, max_states + 1))
    states = [random_structured_state(dims, rng) for _ in range(k)]
    return StateEnsemble(rng.dirichlet(np.ones(k)), states)
