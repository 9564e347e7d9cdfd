"""scikit-learn style front end: rows of (x, y, t) in, u out."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .errors import ValidationError
from .reconstruct import (METHODS, load_constants, pipeline_value, quadrature_value,
                          theorem1_value)
from .scattering import ScatteringData, gaussian_family


class KP2Reconstructor(BaseEstimator):
    """Evaluate u(x, y, t) for fixed scattering data.

    Nothing is learned: ``fit`` only validates the settings and builds the
    scattering data (and loads constants for ``theorem1``).  Pass
    ``scattering`` to use data other than the Gaussian family.
    """

    def __init__(self, method: str = "quadrature", amp: float = 1 / np.sqrt(np.pi),
                 center: complex = 0.3j, scattering: ScatteringData | None = None,
                 constants: str | None = None):
        self.method = method
        self.amp = amp
        self.center = center
        self.scattering = scattering
        self.constants = constants

    def fit(self, X, y=None):
        if self.method not in METHODS:
            raise ValidationError(f"method must be one of {METHODS}")
        X = check_array(X, dtype=float)
        if X.shape[1] != 3:
            raise ValidationError("rows must be (x, y, t)")
        self.F_ = self.scattering if self.scattering is not None else gaussian_family(self.amp, self.center)
        self.constants_ = load_constants(self.constants) if self.method == "theorem1" else None
        self.n_features_in_ = 3
        return self

    def _one(self, x, y, t) -> complex:
        if self.method == "quadrature":
            return quadrature_value(self.F_, x, y, t).u
        if self.method == "theorem1":
            return theorem1_value(self.F_, x, y, t, self.constants_).u
        return pipeline_value(self.F_, x, y, t).u

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "F_")
        X = check_array(X, dtype=float)
        if X.shape[1] != 3:
            raise ValidationError("rows must be (x, y, t)")
        if np.any(X[:, 2] <= 0):
            raise ValidationError("t must be positive")
        return np.array([self._one(*row) for row in X], dtype=complex)
