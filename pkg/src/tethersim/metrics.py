"""Tracking-error statistics and per-run summary metrics."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import LengthMismatch


def position_error(actual, reference) -> dict:
    """Mean and max Euclidean distance between two equal-length point series."""
    actual = np.asarray(actual, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if actual.shape != reference.shape:
        raise LengthMismatch(f"series shapes differ: {actual.shape} vs {reference.shape}")
    if actual.ndim == 1:
        dist = np.abs(actual - reference)
    else:
        dist = np.linalg.norm(actual - reference, axis=1)
    return {"mean": float(dist.mean()), "max": float(dist.max())}


@dataclass(frozen=True)
class RunMetrics:
    asv_mean_err: float
    asv_max_err: float
    auv_mean_err: float
    auv_max_err: float
    # average of the two per-vehicle means
    combined_err: float
    min_link_dev_pct: float
    max_link_dev_pct: float
    peak_tension: float

    def as_dict(self) -> dict:
        return asdict(self)


def combined_error(asv_mean: float, auv_mean: float) -> float:
    return 0.5 * (asv_mean + auv_mean)


def summarize(asv_pos, asv_ref, auv_pos, auv_ref, link_dev, peak_tension) -> RunMetrics:
    asv = position_error(asv_pos, asv_ref)
    auv = position_error(auv_pos, auv_ref)
    link_dev = np.asarray(link_dev, dtype=float)
    return RunMetrics(
        asv_mean_err=asv["mean"],
        asv_max_err=asv["max"],
        auv_mean_err=auv["mean"],
        auv_max_err=auv["max"],
        combined_err=combined_error(asv["mean"], auv["mean"]),
        min_link_dev_pct=100.0 * float(link_dev.min()),
        max_link_dev_pct=100.0 * float(link_dev.max()),
        peak_tension=float(peak_tension),
    )
