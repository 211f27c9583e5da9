"""Scikit-learn style facade.

``StateClassifier().fit(structure).predict(states)`` labels lattice states.
There is no training data: ``fit`` only validates and stores the structure
and precomputes the global reports.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .classify import UNKNOWN, classify_states_exact, extinction_finite, pq_resolution
from .exceptions import InputError
from .lattice import span_dim
from .network import JumpStructure, ReactionNetwork, check_a2, derive_jumps
from .onedim import classify_line
from .oracle import NEUTRAL, TRAPPING, DEFAULT_BUDGET, Window


def check_structure(structure) -> JumpStructure:
    if isinstance(structure, JumpStructure):
        return structure
    if isinstance(structure, ReactionNetwork):
        return derive_jumps(structure)
    if isinstance(structure, dict):
        return JumpStructure.from_mapping(structure)
    raise InputError(f"expected a JumpStructure, ReactionNetwork or mapping, got {type(structure).__name__}")


def check_states(X, dim: int) -> np.ndarray:
    """Validate a batch of states: integral, non-negative, shape (n, dim)."""
    A = np.asarray(X)
    if A.ndim == 1:
        A = A.reshape(1, -1) if dim > 1 or A.size == 1 else A.reshape(-1, 1)
    if A.ndim != 2 or A.shape[1] != dim:
        raise InputError(f"states must have shape (n, {dim}), got {A.shape}")
    if A.dtype.kind == "f":
        if not np.all(np.isfinite(A)) or not np.all(A == np.round(A)):
            raise InputError("states must be integral")
    elif A.dtype.kind not in "iu":
        raise InputError(f"states must be integers, got dtype {A.dtype}")
    A = A.astype(np.int64)
    if (A < 0).any():
        raise InputError("states must be non-negative")
    return A


class StateClassifier(BaseEstimator):
    """Label states as Neutral / Trapping / Escaping / PIC / QIC / Unknown.

    Parameters
    ----------
    margin : int or None
        Extra layers explored around the query box for the oracle.
        ``None`` picks four times the largest jump coordinate.
    budget : int
        Maximum number of states in any oracle box.
    use_lines : bool
        Use the exact one-dimensional classifier when the jumps span a line.
    certify_escaping : bool
        Run return-path searches to settle states the box leaves undecided.
    """

    def __init__(self, margin: Optional[int] = None, budget: int = DEFAULT_BUDGET,
                 use_lines: bool = True, certify_escaping: bool = True):
        self.margin = margin
        self.budget = budget
        self.use_lines = use_lines
        self.certify_escaping = certify_escaping

    def fit(self, structure, y=None):
        js = check_structure(structure)
        self.structure_ = js
        self.n_features_in_ = js.dim
        self.assumptions_ = check_a2(js)
        self.extinction_ = extinction_finite(js)
        return self

    def _margin(self) -> int:
        if self.margin is not None:
            return self.margin
        return 4 * max(abs(c) for w in self.structure_.omegas for c in w)

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "structure_")
        js = self.structure_
        S = check_states(X, js.dim)
        out = np.empty(len(S), dtype=object)
        codes = classify_states_exact(js, S)
        out[codes == NEUTRAL] = "Neutral"
        out[codes == TRAPPING] = "Trapping"
        active = np.flatnonzero(codes < 0)
        if active.size == 0:
            return out
        if self.use_lines and span_dim(js.omegas) == 1:
            cache = {}
            for i in active:
                x = tuple(int(c) for c in S[i])
                lc = None
                for key, cand in cache.items():
                    if cand.geometry.index(x) is not None:
                        lc = cand
                        break
                if lc is None:
                    lc = classify_line(js, x)
                    cache[lc.geometry.base] = lc
                out[i] = lc.label(x)
            return out
        # anchored at the origin: classes may pass through states below the queries
        hi = S[active].max(axis=0)
        w = Window((0,) * js.dim, tuple(int(v) for v in hi), self._margin())
        res = pq_resolution(js, w, self.budget, certify_escaping=self.certify_escaping)
        for i in active:
            out[i] = res.kinds.get(tuple(int(c) for c in S[i]), UNKNOWN)
        return out

    def fit_predict(self, structure, X):
        return self.fit(structure).predict(X)
