"""Square-function Carleson integrals and the comparability experiment.

A coefficient matrix is aggregated over a ball of centers and a sub-ladder
of scales into the dyadic Riemann sum

    h^dim * sum_{x in B_R(z)} sum_{r_j <= R} (nu(x, r_j) / r_j^(alpha-1))^2 * ln 2,

the discrete counterpart of the double integral with dr/r giving ln 2 per
octave.  The Carleson constant is the maximum of the R^dim-normalized
integral over a tested family of (z, R); since that family is finite, the
constant is a lower bound for the supremum over all centers and radii, and
reports say so.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bmo import bmo_norm, make_ball_family
from .coeffs import CoefficientMatrix, ScaleLadder, coefficient_matrix, make_ladder, matrix_metadata
from .field import Grid, SampledField, ball_mask
from .spectral import fractional_derivative

__all__ = [
    "CarlesonReport",
    "ComparisonRecord",
    "square_function_integral",
    "carleson_constant",
    "comparability_experiment",
    "full_domain_square_integral",
    "matching_order",
]

_RTOL = 1e-9


@dataclass(frozen=True)
class CarlesonReport:
    alpha: float
    kind: str
    centers: np.ndarray          # (m, dim) integer index tuples
    tops: np.ndarray             # (t,) top radii
    normalized: np.ndarray       # (m, t) normalized integrals
    constant: float              # max over the table
    metadata: dict

    @property
    def per_window(self):
        """Rows (center..., top_radius, normalized_value), center-major."""
        rows = []
        for i, c in enumerate(self.centers):
            for j, R in enumerate(self.tops):
                rows.append((tuple(int(x) for x in c), float(R), float(self.normalized[i, j])))
        return rows


@dataclass(frozen=True)
class ComparisonRecord:
    alpha: float
    kind: str
    carleson_sq: float
    bmo_norm_sq: float
    ratio: float | None          # None when bmo_norm_sq == 0
    metadata: dict


def matching_order(alpha: float) -> int:
    """Coefficient order paired with alpha: 0 below one, 1 at and above."""
    return 0 if alpha < 1.0 else 1


def _ladder_level_of(ladder: ScaleLadder, R: float) -> int:
    radii = ladder.radii
    hits = np.flatnonzero(np.isclose(radii, R, rtol=_RTOL, atol=0.0))
    if hits.size == 0:
        raise ValueError(f"top radius {R} is not a ladder radius {list(radii)}")
    return int(hits[0])


def _weighted_levels(matrix: CoefficientMatrix, alpha: float) -> np.ndarray:
    """Per-center, per-level summand (nu / r^(alpha-1))^2 * ln 2."""
    radii = matrix.ladder.radii
    w = radii ** (2.0 - 2.0 * alpha) * matrix.ladder.log_weight
    return matrix.values ** 2 * w[None, :]


def square_function_integral(matrix: CoefficientMatrix, alpha: float, z, R: float) -> float:
    """Dyadic Riemann sum of the double integral over B_R(z) x (0, R]."""
    if not (0.0 < alpha < 2.0):
        raise ValueError(f"alpha must lie in (0, 2), got {alpha}")
    grid = matrix.grid
    level = _ladder_level_of(matrix.ladder, R)
    summand = _weighted_levels(matrix, alpha)[:, level:].sum(axis=1)
    center = tuple(int(x) for x in (z if isinstance(z, (tuple, list, np.ndarray)) else (z,)))
    mask = ball_mask(grid, R)
    shift = tuple(int(c) for c in center)
    if grid.dim == 1:
        members = np.roll(mask, shift)
    else:
        members = np.roll(mask, shift, axis=(0, 1))
    h = grid.spacing
    return float(h ** grid.dim * summand.reshape(grid.shape)[members].sum())


def _normalized_table(matrix: CoefficientMatrix, alpha: float, tops, center_subset):
    """All (center, R) normalized integrals at once via FFT ball sums."""
    grid = matrix.grid
    h = grid.spacing
    summand_levels = _weighted_levels(matrix, alpha)
    table = np.empty((len(center_subset), len(tops)))
    flat = np.ravel_multi_index(tuple(np.asarray(center_subset).T), grid.shape) \
        if grid.dim == 2 else np.asarray(center_subset).reshape(-1)
    for j, R in enumerate(tops):
        level = _ladder_level_of(matrix.ladder, R)
        s = summand_levels[:, level:].sum(axis=1).reshape(grid.shape)
        mask = ball_mask(grid, R).astype(float)
        total = np.fft.ifftn(np.fft.fftn(s) * np.conj(np.fft.fftn(mask))).real
        table[:, j] = h ** grid.dim * total.reshape(-1)[flat] / R ** grid.dim
    return np.maximum(table, 0.0)


def _all_centers(grid: Grid, stride: int) -> np.ndarray:
    idx = np.arange(0, grid.n_per_axis, stride)
    if grid.dim == 1:
        return idx[:, None]
    a, b = np.meshgrid(idx, idx, indexing="ij")
    return np.stack([a.reshape(-1), b.reshape(-1)], axis=1)


def carleson_constant(
    matrix: CoefficientMatrix,
    alpha: float,
    centers=None,
    tops=None,
    stride: int = 1,
) -> CarlesonReport:
    """Best observed constant over a finite test family of (z, R).

    The reported constant is the maximum of the normalized integrals and is
    a lower bound of the true supremum over all centers and radii.
    """
    if not (0.0 < alpha < 2.0):
        raise ValueError(f"alpha must lie in (0, 2), got {alpha}")
    grid = matrix.grid
    if centers is None:
        centers = _all_centers(grid, stride)
    else:
        centers = np.atleast_2d(np.asarray(centers, dtype=int))
    if centers.size == 0:
        raise ValueError("empty center family")
    if tops is None:
        tops = [float(r) for r in matrix.ladder.radii]
    else:
        tops = [float(R) for R in tops]
        for R in tops:
            _ladder_level_of(matrix.ladder, R)
    if len(tops) == 0:
        raise ValueError("empty top-radius family")

    table = _normalized_table(matrix, alpha, tops, centers)
    order = 0 if matrix.kind in ("nu0", "nu0_bar", "nu0_tilde") else 1
    meta = matrix_metadata(matrix)
    meta.update(
        {
            "alpha": alpha,
            "sup_lower_bound": True,
            "nonstandard_pairing": order != matching_order(alpha),
            "center_stride": stride if centers is None else None,
            "n_centers": int(len(centers)),
            "truncation_floor_radius": float(matrix.ladder.radii[-1]),
        }
    )
    return CarlesonReport(
        alpha=float(alpha),
        kind=matrix.kind,
        centers=centers,
        tops=np.asarray(tops),
        normalized=table,
        constant=float(table.max()),
        metadata=meta,
    )


def full_domain_square_integral(matrix: CoefficientMatrix, alpha: float) -> float:
    """Unrestricted dyadic sum over all centers and every ladder scale."""
    if not (0.0 < alpha < 2.0):
        raise ValueError(f"alpha must lie in (0, 2), got {alpha}")
    h = matrix.grid.spacing
    return float(h ** matrix.grid.dim * _weighted_levels(matrix, alpha).sum())


def comparability_experiment(
    field: SampledField,
    alpha: float,
    ladder: ScaleLadder = None,
    stride: int = 1,
    bmo_stride: int = None,
) -> ComparisonRecord:
    """Carleson constant of the order-matched coefficient vs the squared
    BMO norm of the fractional derivative, plus their ratio."""
    if not (0.0 < alpha < 2.0):
        raise ValueError(f"alpha must lie in (0, 2), got {alpha}")
    grid = field.grid
    if ladder is None:
        ladder = make_ladder(grid)
    kind = "nu0" if matching_order(alpha) == 0 else "nu1"
    matrix = coefficient_matrix(field, ladder, kind)
    report = carleson_constant(matrix, alpha, stride=stride)

    deriv = fractional_derivative(field, alpha)
    windows = make_ball_family(
        grid, radii=ladder.radii, stride=bmo_stride if bmo_stride else stride
    )
    osc = bmo_norm(deriv, windows)
    bmo_sq = osc.norm ** 2
    c_sq = report.constant
    ratio = None if bmo_sq == 0.0 else c_sq / bmo_sq
    meta = dict(report.metadata)
    meta.update({"bmo_window_radii": [float(r) for r in ladder.radii]})
    return ComparisonRecord(
        alpha=float(alpha),
        kind=kind,
        carleson_sq=c_sq,
        bmo_norm_sq=bmo_sq,
        ratio=ratio,
        metadata=meta,
    )
