"""scikit-learn style wrappers around the record estimator and the solvers.

``CylinderEstimator`` turns colour records into rows of sliding-window
cylinder frequencies, so records can flow through a ``Pipeline``.
``SceneryReconstructor`` fits a scenery cylinder vector from records (or
from an exact record vector) for a known step measure.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_depth
from .exceptions import ContractError
from .measures import DEFAULT_EPS, is_strongly_asymmetric, is_symmetric
from .reconstruct import build_matrix, residual, solve_asymmetric, solve_symmetric, symmetric_matrix
from .record import CylinderVector, RecordSequence, empirical_cylinders, pooled_cylinders
from .words import ColourAlphabet, canonical_order

__all__ = ["CylinderEstimator", "SceneryReconstructor", "check_records"]


def check_records(X, min_length=1):
    """Coerce ``X`` to a list of record strings, rejecting short or empty input."""
    if isinstance(X, (str, RecordSequence)):
        X = [X]
    records = [x.colours if isinstance(x, RecordSequence) else str(x).strip() for x in X]
    if not records:
        raise ContractError("expected at least one record")
    short = [len(r) for r in records if len(r) < min_length]
    if short:
        raise ContractError(f"records must have length >= {min_length}, got {short[:3]}")
    return records


class CylinderEstimator(TransformerMixin, BaseEstimator):
    """Map each record to its empirical cylinder vector of depth ``depth``."""

    def __init__(self, depth=4, alphabet="01"):
        self.depth = depth
        self.alphabet = alphabet

    def fit(self, X, y=None):
        n = check_depth(self.depth)
        check_records(X, min_length=n)
        self.alphabet_ = ColourAlphabet(tuple(self.alphabet))
        self.order_ = canonical_order(self.alphabet_, n)
        self.n_features_out_ = len(self.order_)
        return self

    def transform(self, X):
        check_is_fitted(self, "order_")
        records = check_records(X, min_length=self.order_.depth)
        return np.vstack(
            [empirical_cylinders(r, self.order_.depth, self.alphabet_).values for r in records]
        )

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "order_")
        return np.asarray(self.order_.entries, dtype=object)


class SceneryReconstructor(BaseEstimator):
    """Recover scenery cylinders from colour records of a known walk.

    ``mode`` is ``"asymmetric"`` (recover the scenery measure), ``"symmetric"``
    (recover its reversal symmetrization) or ``"auto"``, which picks
    asymmetric when the walk is strongly asymmetric to the needed depth and
    symmetric otherwise. Several records are pooled into one window count.

    Attributes set by ``fit``: ``mode_``, ``matrix_``, ``rho_``, ``scenery_``
    and ``residual_`` (sup-norm of ``A x - rho``).
    """

    def __init__(self, step_measure=None, depth=4, mode="auto", eps=DEFAULT_EPS, alphabet="01"):
        self.step_measure = step_measure
        self.depth = depth
        self.mode = mode
        self.eps = eps
        self.alphabet = alphabet

    def _resolve_mode(self, mu, n):
        if self.mode in ("asymmetric", "symmetric"):
            return self.mode
        if self.mode != "auto":
            raise ContractError(f"unknown mode {self.mode!r}")
        N = max(1, n - 1)
        if is_strongly_asymmetric(mu, N, self.eps).ok:
            return "asymmetric"
        if is_symmetric(mu, N, self.eps):
            return "symmetric"
        return "asymmetric"  # the solver raises with the failing N

    def _record_vector(self, X, n, alphabet):
        if isinstance(X, CylinderVector):
            if X.order.depth < n:
                raise ContractError(f"record vector of depth {X.order.depth} is shallower than {n}")
            return X.truncate(n) if X.order.depth > n else X
        return pooled_cylinders(check_records(X, n), n, alphabet)

    def _solve(self, rho):
        if self.mode_ == "asymmetric":
            return solve_asymmetric(self.matrix_, rho, self.eps)
        return solve_symmetric(self.step_measure, rho, self.eps)

    def fit(self, X, y=None):
        if self.step_measure is None:
            raise ContractError("SceneryReconstructor needs a step_measure")
        n = check_depth(self.depth)
        alphabet = ColourAlphabet(tuple(self.alphabet))
        self.mode_ = self._resolve_mode(self.step_measure, n)
        if self.mode_ == "asymmetric":
            self.matrix_ = build_matrix(self.step_measure, n, alphabet)
        else:
            self.matrix_ = symmetric_matrix(self.step_measure, n, alphabet)
        self.rho_ = self._record_vector(X, n, alphabet)
        self.scenery_ = self._solve(self.rho_)
        self.residual_ = residual(self.matrix_, self.scenery_, self.rho_)
        return self

    def transform(self, X):
        """Reconstruct one scenery vector per record (rows follow the word order)."""
        check_is_fitted(self, "matrix_")
        n = self.matrix_.order.depth
        alphabet = self.matrix_.order.alphabet
        rows = [self._solve(empirical_cylinders(r, n, alphabet)).values for r in check_records(X, n)]
        return np.vstack(rows)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "matrix_")
        return np.asarray(self.matrix_.order.entries, dtype=object)
