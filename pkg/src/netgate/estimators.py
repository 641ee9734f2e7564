"""Point estimators of the global average treatment effect from one realized
cluster-randomized assignment.

All estimators are pure functions of (graph, partition, assignment, outcomes).
Degenerate arms raise DegenerateArmError; estimate_all converts those into
absent entries with diagnostics instead of silent zeros.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .design import exposure_probability_vector, exposure_vector
from .graph import Graph, Partition

ESTIMATOR_NAMES = ("DIM", "HT", "HAJEK", "CAE", "MII", "GNN", "AMII")


class DegenerateArmError(ValueError):
    """An arm required by the estimator has no usable units this draw."""


def _as_float(z) -> np.ndarray:
    return np.asarray(z, dtype=np.float64)


def dim(z: np.ndarray, y: np.ndarray) -> float:
    """Difference in mean outcomes between treated and control units."""
    z = _as_float(z)
    y = _as_float(y)
    treated = z == 1
    if not treated.any() or treated.all():
        raise DegenerateArmError("difference-in-means needs both arms populated")
    return float(y[treated].mean() - y[~treated].mean())


def ht(g: Graph, p_part: Partition, z: np.ndarray, y: np.ndarray, p: float) -> float:
    """Inverse-probability estimator over cleanly exposed nodes, with analytic
    exposure probabilities p^c and (1-p)^c."""
    z = _as_float(z)
    y = _as_float(y)
    d1 = exposure_vector(g, z, 1).astype(np.float64)
    d0 = exposure_vector(g, z, 0).astype(np.float64)
    q1 = exposure_probability_vector(p_part, p, 1)
    q0 = exposure_probability_vector(p_part, p, 0)
    return float(np.mean((d1 / q1 - d0 / q0) * y))


def hajek(g: Graph, p_part: Partition, z: np.ndarray, y: np.ndarray, p: float) -> float:
    """Self-normalized variant of ht; requires a clean node in each arm."""
    z = _as_float(z)
    y = _as_float(y)
    w1 = exposure_vector(g, z, 1) / exposure_probability_vector(p_part, p, 1)
    w0 = exposure_vector(g, z, 0) / exposure_probability_vector(p_part, p, 0)
    s1, s0 = w1.sum(), w0.sum()
    if s1 == 0 or s0 == 0:
        raise DegenerateArmError("an arm has no cleanly exposed nodes")
    return float((w1 @ y) / s1 - (w0 @ y) / s0)


def _cluster_bits(p_part: Partition, z: np.ndarray) -> np.ndarray:
    """Cluster-level bits recovered from unit bits (first member per cluster)."""
    _, first = np.unique(p_part.cluster_of, return_index=True)
    return np.asarray(z)[first] == 1


def _cae_arm_means(
    g: Graph, p_part: Partition, z: np.ndarray, y: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, int, int]:
    """Per-cluster clean-node means at each cluster's own level, plus skip counts."""
    z = _as_float(z)
    y = _as_float(y)
    t = _cluster_bits(p_part, z)
    d1 = exposure_vector(g, z, 1).astype(np.float64)
    d0 = exposure_vector(g, z, 0).astype(np.float64)
    own = np.where(t[p_part.cluster_of], d1, d0)
    k = p_part.cluster_count
    counts = np.bincount(p_part.cluster_of, weights=own, minlength=k)
    sums = np.bincount(p_part.cluster_of, weights=own * y, minlength=k)
    usable = counts > 0
    means = np.zeros(k)
    means[usable] = sums[usable] / counts[usable]
    skipped_t = int((~usable & t).sum())
    skipped_c = int((~usable & ~t).sum())
    return t, usable, means, skipped_t, skipped_c


def cae(g: Graph, p_part: Partition, z: np.ndarray, y: np.ndarray) -> float:
    """Within-cluster averages of clean nodes, then an unweighted average
    across contributing clusters per arm; clusters with no clean node at
    their level are skipped."""
    t, usable, means, _, _ = _cae_arm_means(g, p_part, z, y)
    arm1 = means[t & usable]
    arm0 = means[~t & usable]
    if len(arm1) == 0 or len(arm0) == 0:
        raise DegenerateArmError("an arm has no cluster with clean nodes")
    return float(arm1.mean() - arm0.mean())


def mii(p_part: Partition, z: np.ndarray, y: np.ndarray) -> float:
    """Difference in mean outcomes between treated and control interior nodes."""
    z = _as_float(z)
    y = _as_float(y)
    interior = p_part.interior_mask
    it = interior & (z == 1)
    ic = interior & (z == 0)
    if not it.any() or not ic.any():
        raise DegenerateArmError("interior set lacks a treated or control node")
    return float(y[it].mean() - y[ic].mean())


def gnn_point(pred1: np.ndarray, pred0: np.ndarray) -> float:
    """Mean difference of the two counterfactual prediction vectors."""
    pred1 = _as_float(pred1)
    pred0 = _as_float(pred0)
    if pred1.shape != pred0.shape:
        raise ValueError("prediction vectors must have equal length")
    return float(pred1.mean() - pred0.mean())


def amii(
    p_part: Partition,
    z: np.ndarray,
    y: np.ndarray,
    pred1: np.ndarray,
    pred0: np.ndarray,
) -> float:
    """Interior difference-in-means plus the predictor correction for the
    covariate shift between interior nodes and the full population."""
    z = _as_float(z)
    pred1 = _as_float(pred1)
    pred0 = _as_float(pred0)
    interior = p_part.interior_mask
    it = interior & (z == 1)
    ic = interior & (z == 0)
    if not it.any() or not ic.any():
        raise DegenerateArmError("interior set lacks a treated or control node")
    base = mii(p_part, z, y)
    adj1 = pred1.mean() - pred1[it].mean()
    adj0 = pred0.mean() - pred0[ic].mean()
    return float(base + adj1 - adj0)


def amii_ppi_form(
    p_part: Partition, z: np.ndarray, y: np.ndarray, pred1: np.ndarray
) -> float:
    """Treated-arm rearrangement: population prediction mean plus the mean
    residual over treated interior nodes. Differencing this against the
    analogous control form reproduces amii exactly."""
    z = _as_float(z)
    y = _as_float(y)
    pred1 = _as_float(pred1)
    it = p_part.interior_mask & (z == 1)
    if not it.any():
        raise DegenerateArmError("no treated interior nodes")
    return float(pred1.mean() + (y[it] - pred1[it]).mean())


@dataclass
class EstimateSet:
    """Estimates keyed by name (None marks a degenerate draw) plus per-
    estimator diagnostics (counts and flags)."""

    estimates: dict[str, float | None] = field(default_factory=dict)
    diagnostics: dict[str, dict] = field(default_factory=dict)


def estimate_all(
    g: Graph,
    p_part: Partition,
    z: np.ndarray,
    y: np.ndarray,
    p: float,
    pred1: np.ndarray | None = None,
    pred0: np.ndarray | None = None,
    names: tuple[str, ...] = ESTIMATOR_NAMES,
) -> EstimateSet:
    """Compute the requested estimators from one realized draw.

    GNN and AMII need the counterfactual prediction vectors.
    """
    z = _as_float(z)
    y = _as_float(y)
    result = EstimateSet()
    interior = p_part.interior_mask
    s1 = int((interior & (z == 1)).sum())
    s0 = int((interior & (z == 0)).sum())
    clean1 = int(exposure_vector(g, z, 1).sum())
    clean0 = int(exposure_vector(g, z, 0).sum())

    for name in names:
        key = name.upper()
        if key not in ESTIMATOR_NAMES:
            raise ValueError(f"unknown estimator {name!r}")
        diag: dict = {"flags": []}
        try:
            if key == "DIM":
                value = dim(z, y)
            elif key == "HT":
                value = ht(g, p_part, z, y, p)
                diag.update(clean_treated=clean1, clean_control=clean0)
                if clean1 == 0:
                    diag["flags"].append("no_clean_treated")
                if clean0 == 0:
                    diag["flags"].append("no_clean_control")
            elif key == "HAJEK":
                value = hajek(g, p_part, z, y, p)
                diag.update(clean_treated=clean1, clean_control=clean0)
            elif key == "CAE":
                t, usable, _, sk_t, sk_c = _cae_arm_means(g, p_part, z, y)
                value = cae(g, p_part, z, y)
                diag.update(
                    clusters_used_treated=int((t & usable).sum()),
                    clusters_used_control=int((~t & usable).sum()),
                    clusters_skipped_treated=sk_t,
                    clusters_skipped_control=sk_c,
                )
            elif key == "MII":
                value = mii(p_part, z, y)
                diag.update(s1=s1, s0=s0)
            elif key == "GNN":
                if pred1 is None or pred0 is None:
                    raise ValueError("GNN estimator needs prediction vectors")
                value = gnn_point(pred1, pred0)
            else:  # AMII
                if pred1 is None or pred0 is None:
                    raise ValueError("AMII estimator needs prediction vectors")
                value = amii(p_part, z, y, pred1, pred0)
                diag.update(s1=s1, s0=s0)
            if not math.isfinite(value):
                raise DegenerateArmError(f"{key} produced a non-finite value")
            result.estimates[key] = value
        except DegenerateArmError as exc:
            result.estimates[key] = None
            diag["flags"].append(f"degenerate: {exc}")
        result.diagnostics[key] = diag
    return result
