"""Local orthogonality of quantum state ensembles and entanglement decomposition.

Submodules: ``core`` (states, partial traces, entropies), ``orthogonality``
(certificates), ``entanglement`` (convex roof, oracle, decomposition
checks), ``typicality`` (exact typical-set masses), ``example`` (the
C^3 x C^6 locally orthogonal pair), ``io`` and ``cli``.
"""
from .core import (BipartiteCut, DensityOperator, PureState, fidelity, partial_trace, purify,
                   schmidt_decomposition, shannon_entropy, tensor_product, trace_norm,
                   von_neumann_entropy)
from .entanglement import (ConvexRoofResult, DecompositionReport, RoofConfig, concurrence_2q,
                           ed_lower_bound, ed_superadditivity_check, ef_convex_roof,
                           ef_lo_ensemble, ef_wootters_2q, pure_entanglement, verify_decomposition)
from .errors import InvalidStateError, NotLocallyOrthogonal, ResourceCapError
from .kernels import BACKEND
from .orthogonality import (LOCertificate, StateEnsemble, check_reduction_propagation,
                            find_lo_ordering, is_k_locally_orthogonal, reduced_overlap,
                            verify_certificate)
from .typicality import (TypicalSpec, exact_truncation_distance, is_typical_string,
                         truncation_tail_bound, typical_mass)

__version__ = "0.1.0"
