"""Regression evaluation metrics: MSE, MAE, and explained variance score."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _paired(y_true, y_pred) -> tuple[np.ndarray, np.ndarray]:
    yt = np.asarray(y_true, dtype=float)
    yp = np.asarray(y_pred, dtype=float)
    if yt.shape != yp.shape or yt.ndim != 1:
        raise ValueError(f"expected equal-length 1-D inputs, got {yt.shape} and {yp.shape}")
    if yt.size == 0:
        raise ValueError("metrics are undefined on empty inputs")
    return yt, yp


def mse(y_true, y_pred) -> float:
    """Mean squared residual."""
    yt, yp = _paired(y_true, y_pred)
    return float(np.mean((yt - yp) ** 2))


def mae(y_true, y_pred) -> float:
    """Mean absolute residual."""
    yt, yp = _paired(y_true, y_pred)
    return float(np.mean(np.abs(yt - yp)))


def explained_variance(y_true, y_pred) -> float:
    """1 - Var(residuals) / Var(targets), population (1/N) variances.

    1 is a perfect fit, 0 matches predicting the target mean, negative is
    worse than the mean. Undefined (raises) when the targets are constant.
    """
    yt, yp = _paired(y_true, y_pred)
    if yt.size < 2:
        raise ValueError("explained variance needs at least 2 samples")
    var_y = float(np.var(yt))
    if var_y == 0.0:
        raise ValueError("explained variance is undefined for constant targets")
    return 1.0 - float(np.var(yt - yp)) / var_y


@dataclass(frozen=True)
class MetricsReport:
    """All three metrics for one evaluation split."""

    mse: float
    mae: float
    evs: float
    n: int

    @classmethod
    def compute(cls, y_true, y_pred) -> "MetricsReport":
        yt, _ = _paired(y_true, y_pred)
        return cls(
            mse=mse(y_true, y_pred),
            mae=mae(y_true, y_pred),
            evs=explained_variance(y_true, y_pred),
            n=int(yt.size),
        )

    def to_dict(self) -> dict:
        return {"mse": self.mse, "mae": self.mae, "evs": self.evs, "n": self.n}
