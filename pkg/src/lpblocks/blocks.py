"""l^p machinery: p-modulus, disjoint block partition, block-norm order stats."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .models import series_values

INF = math.inf


def lp_modulus_rows(rows, p) -> np.ndarray:
    """Row-wise p-modulus of a 2D array: (sum_t |x_t|^p)^(1/p) per row.

    p = inf gives the row maximum of |x_t|; an all-zero row gives 0.  Any
    p > 0 is valid, including p < 1 (no triangle inequality is relied on
    anywhere).  Entries are scaled by the row maximum before the power, so
    large p or heavy-tailed values cannot overflow double precision.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if not (p == INF or p > 0):
        raise ValueError("p must be > 0 or inf")
    ax = np.abs(rows)
    if ax.shape[1] == 0:
        return np.zeros(ax.shape[0])
    m = ax.max(axis=1)
    if p == INF:
        return m
    out = np.zeros_like(m)
    nz = m > 0
    if np.any(nz):
        scaled = ax[nz] / m[nz, None]
        out[nz] = m[nz] * np.sum(scaled**p, axis=1) ** (1.0 / p)
    return out


def lp_modulus(x, p) -> float:
    """p-modulus of a single vector; see `lp_modulus_rows`."""
    x = np.asarray(x, dtype=float)
    return float(lp_modulus_rows(x.reshape(1, -1), p)[0])


@dataclass(frozen=True, eq=False)
class BlockPartition:
    """The m = floor(n/b) disjoint length-b blocks of a series.

    ``values`` is the (m, b) view of the first m*b observations; the trailing
    n - m*b observations are discarded.
    """

    values: np.ndarray
    b: int
    m: int

    @property
    def index_ranges(self):
        """Start/stop index pairs of each block within the original series."""
        return [(j * self.b, (j + 1) * self.b) for j in range(self.m)]


def partition(series, b: int) -> BlockPartition:
    vals = series_values(series)
    n = len(vals)
    if b < 1:
        raise ValueError("block length must be >= 1")
    if b > n:
        raise ValueError("block longer than sample")
    m = n // b
    return BlockPartition(values=vals[: m * b].reshape(m, b), b=int(b), m=int(m))


@dataclass(frozen=True, eq=False)
class NormOrderStats:
    """Block p-moduli together with their descending order statistics.

    ``order`` holds the original block indices in sorted position; the sort
    is stable, so tied norms keep block order.
    """

    norms: np.ndarray
    sorted_desc: np.ndarray
    order: np.ndarray
    p: float


def order_stats(part: BlockPartition, p) -> NormOrderStats:
    if part.m < 1:
        raise ValueError("partition is empty")
    norms = lp_modulus_rows(part.values, p)
    order = np.argsort(-norms, kind="stable")
    return NormOrderStats(norms=norms, sorted_desc=norms[order], order=order, p=p)
