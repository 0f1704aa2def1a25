"""scikit-learn wrapper: subspaces in, intersection distributions out."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_basis, check_field_params
from .gf_tower import build_field
from .orbit import fraction_set, intersection_distribution


class OrbitProfiler(TransformerMixin, BaseEstimator):
    """Map each basis (a sequence of element logs) to its orbit's lambda vector.

    ``fit`` only builds the field. ``transform`` returns one row per basis:
    ``lambda_0 .. lambda_{width-1}`` zero-padded, where ``width`` is the
    largest k seen at fit time (or in X), followed by ``ds`` and ``f`` when
    ``extra_columns`` is set.
    """

    def __init__(self, q=2, n=6, modulus=None, extra_columns=False):
        self.q = q
        self.n = n
        self.modulus = modulus
        self.extra_columns = extra_columns

    def fit(self, X=None, y=None):
        p, e = check_field_params(self.q, self.n)
        self.field_ = build_field(p, e, self.n, self.modulus)
        subs = [check_basis(self.field_, b) for b in X] if X is not None else []
        self.width_ = max([U.k for U in subs], default=self.n // 2)
        return self

    def transform(self, X):
        check_is_fitted(self, "field_")
        rows = []
        for basis in X:
            U = check_basis(self.field_, basis)
            prof = intersection_distribution(U)
            lam = list(prof.lam)
            if len(lam) > self.width_:
                raise ValueError(f"basis of dimension {U.k} is wider than the fitted width {self.width_}")
            row = lam + [0] * (self.width_ - len(lam))
            if self.extra_columns:
                row += [prof.ds, fraction_set(U).f]
            rows.append(row)
        width = self.width_ + (2 if self.extra_columns else 0)
        return np.array(rows, dtype=np.int64).reshape(len(rows), width)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "field_")
        names = [f"lambda_{i}" for i in range(self.width_)]
        if self.extra_columns:
            names += ["ds", "f"]
        return np.array(names, dtype=object)
