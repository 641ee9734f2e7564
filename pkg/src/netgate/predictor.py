"""Counterfactual outcome prediction via ridge regression on graph-filter
features.

The feature basis stacks hop-0 columns (intercept, z, covariates, and
covariate-treatment interactions) with neighbor means of z and of each
covariate, optionally repeated at hop 2 (mean of neighbor means). A fitted
predictor can then be evaluated under global treatment or global control.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .graph import Graph

_FALLBACK_LAMBDA = 1e-8
_NORMAL_EQ_RTOL = 1e-8


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    hop: int
    source: str


@dataclass(frozen=True)
class FeatureMatrix:
    values: np.ndarray
    columns: tuple[ColumnSpec, ...]
    covariate_names: tuple[str, ...]
    max_hop: int

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)


def build_features(
    g: Graph,
    z: np.ndarray,
    covariates: dict[str, np.ndarray],
    max_hop: int = 2,
) -> FeatureMatrix:
    """Deterministic feature matrix for predicting outcomes under assignment z.

    Columns: [1, z, u..., u*z..., nbr-mean z, nbr-mean u..., and at max_hop=2
    the 2-hop neighbor means of the same]. Isolated nodes get neighbor means 0.
    """
    if max_hop not in (1, 2):
        raise ValueError("max_hop must be 1 or 2")
    n = g.node_count
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (n,):
        raise ValueError("treatment vector length mismatch")
    for name, vec in covariates.items():
        if np.asarray(vec).shape != (n,):
            raise ValueError(f"covariate {name!r} length mismatch")

    p = g.row_normalized()
    cols: list[np.ndarray] = [np.ones(n), z]
    specs: list[ColumnSpec] = [ColumnSpec("const", 0, "1"), ColumnSpec("z", 0, "z")]
    for name, vec in covariates.items():
        cols.append(np.asarray(vec, dtype=np.float64))
        specs.append(ColumnSpec(name, 0, name))
    for name, vec in covariates.items():
        cols.append(np.asarray(vec, dtype=np.float64) * z)
        specs.append(ColumnSpec(f"{name}*z", 0, name))

    hop1 = {"z": p @ z}
    cols.append(hop1["z"])
    specs.append(ColumnSpec("nbr_z", 1, "z"))
    for name, vec in covariates.items():
        hop1[name] = p @ np.asarray(vec, dtype=np.float64)
        cols.append(hop1[name])
        specs.append(ColumnSpec(f"nbr_{name}", 1, name))

    if max_hop == 2:
        cols.append(p @ hop1["z"])
        specs.append(ColumnSpec("nbr2_z", 2, "z"))
        for name in covariates:
            cols.append(p @ hop1[name])
            specs.append(ColumnSpec(f"nbr2_{name}", 2, name))

    return FeatureMatrix(
        values=np.column_stack(cols),
        columns=tuple(specs),
        covariate_names=tuple(covariates),
        max_hop=max_hop,
    )


def features_at_level(
    g: Graph, covariates: dict[str, np.ndarray], level: int, max_hop: int = 2
) -> FeatureMatrix:
    """Features under the constant assignment z = level."""
    return build_features(g, np.full(g.node_count, float(level)), covariates, max_hop)


@dataclass(frozen=True)
class LinearPredictor:
    coefficients: np.ndarray
    ridge_lambda: float
    columns: tuple[ColumnSpec, ...]
    covariate_names: tuple[str, ...]
    max_hop: int
    training_mask: np.ndarray
    fallback_used: bool = field(default=False)

    def coefficient(self, name: str) -> float:
        for spec, w in zip(self.columns, self.coefficients):
            if spec.name == name:
                return float(w)
        raise KeyError(f"no feature column named {name!r}")


def fit(
    features: FeatureMatrix,
    y: np.ndarray,
    ridge_lambda: float | None = None,
    mask: np.ndarray | None = None,
    penalize_intercept: bool = True,
) -> LinearPredictor:
    """Ridge least squares over the masked rows, solved by a deterministic
    Cholesky factorization of the normal equations.

    ridge_lambda=None resolves to the scale-aware default 1e-6 tr(F'F)/d;
    a rank-deficient solve at lambda=0 falls back to 1e-8 and flags it.
    """
    f = features.values
    y = np.asarray(y, dtype=np.float64)
    if mask is None:
        rows = np.arange(f.shape[0])
    else:
        mask = np.asarray(mask)
        rows = np.flatnonzero(mask) if mask.dtype == bool else np.sort(mask.astype(np.int64))
    if len(rows) == 0:
        raise ValueError("training mask is empty")
    fm = f[rows]
    ym = y[rows]
    d = fm.shape[1]
    gram = fm.T @ fm
    rhs = fm.T @ ym
    if ridge_lambda is None:
        ridge_lambda = 1e-6 * np.trace(gram) / d
    if ridge_lambda < 0:
        raise ValueError("ridge_lambda must be nonnegative")

    reg = np.full(d, float(ridge_lambda))
    if not penalize_intercept:
        reg[0] = 0.0

    def solve(lam_diag: np.ndarray) -> np.ndarray | None:
        lhs = gram + np.diag(lam_diag)
        try:
            w = scipy.linalg.solve(lhs, rhs, assume_a="pos")
        except np.linalg.LinAlgError:
            return None
        resid = np.linalg.norm(lhs @ w - rhs)
        scale = np.linalg.norm(rhs)
        if scale > 0 and resid > _NORMAL_EQ_RTOL * max(scale, 1.0):
            return None
        return w

    fallback = False
    coef = solve(reg)
    if coef is None:
        fallback = True
        ridge_lambda = _FALLBACK_LAMBDA
        coef = solve(np.full(d, _FALLBACK_LAMBDA))
        if coef is None:
            raise np.linalg.LinAlgError("normal equations unsolvable even with fallback ridge")

    return LinearPredictor(
        coefficients=coef,
        ridge_lambda=float(ridge_lambda),
        columns=features.columns,
        covariate_names=features.covariate_names,
        max_hop=features.max_hop,
        training_mask=rows,
        fallback_used=fallback,
    )


def predict(pred: LinearPredictor, features: FeatureMatrix) -> np.ndarray:
    """Apply fitted coefficients to a feature matrix with matching columns."""
    if features.columns != pred.columns:
        raise ValueError("feature columns do not match the fitted predictor")
    return features.values @ pred.coefficients


def predict_counterfactual(
    pred: LinearPredictor, g: Graph, covariates: dict[str, np.ndarray], level: int
) -> np.ndarray:
    """Predicted outcomes under global treatment (level=1) or control (level=0)."""
    if tuple(covariates) != pred.covariate_names:
        raise ValueError(
            f"covariates {tuple(covariates)} do not match predictor {pred.covariate_names}"
        )
    feats = features_at_level(g, covariates, level, pred.max_hop)
    return predict(pred, feats)
