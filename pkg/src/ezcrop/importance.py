"""Channel-importance scoring for CNN feature maps.

Three metrics over a batch of per-channel feature-map slices:

* ``energy`` — the energy-zone ratio: the batch-averaged fraction of
  spectral magnitude lying OUTSIDE a small square around the DC bin of the
  centered spectrum. A channel whose spectrum is spread across frequencies
  scores high (informative); one whose energy sits at DC scores near zero.
* ``rank`` — the batch-averaged numerical rank of the slices (the baseline
  the energy metric is benchmarked against).
* ``circle`` — a visualization-oriented diagnostic: the radius of the
  smallest centered disc holding a given fraction of the spectral
  magnitude. Loses resolution on small maps; kept for reporting.

Scores are sorted descending into a 1-based channel ranking; ties go to the
lower channel index so results are reproducible.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericError
from .spectral import energy_map

DEFAULT_BETA = 0.25
DEFAULT_CIRCLE_FRACTION = 0.7

METRICS = ("energy", "rank", "circle")


def zone_center(height, width):
    """1-based coordinates of the DC bin after center shifting.

    ``H/2 + 1`` for even H and ``(H+1)/2`` for odd H — both reduce to
    ``H // 2 + 1`` — and likewise for W. Parity of the two dims is handled
    independently.
    """
    if height < 1 or width < 1:
        raise ValueError("dimensions must be positive")
    return height // 2 + 1, width // 2 + 1


def zone_distance(height, width, beta):
    """Chebyshev radius of the energy zone for an H x W slice.

    Zero when the center sits on the first row or column (the zone is the
    DC bin alone); otherwise ``ceil(beta * min(H - x, W - y))`` with (x, y)
    the 1-based center. The resulting square always fits inside the matrix.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    x, y = zone_center(height, width)
    if x == 1 or y == 1:
        return 0
    return math.ceil(beta * min(height - x, width - y))


@dataclass(frozen=True)
class ZoneGeometry:
    """Energy-zone square of one layer: center, extents, and radius."""

    height: int
    width: int
    x: int  # 1-based center row
    y: int  # 1-based center column
    l_h: int
    l_w: int
    d: int
    beta: float

    @classmethod
    def for_shape(cls, height, width, beta):
        x, y = zone_center(height, width)
        return cls(
            height=height,
            width=width,
            x=x,
            y=y,
            l_h=height - x,
            l_w=width - y,
            d=zone_distance(height, width, beta),
            beta=beta,
        )

    def box(self):
        """0-based half-open (row0, row1, col0, col1) slice of the zone square."""
        return (
            self.x - 1 - self.d,
            self.x + self.d,
            self.y - 1 - self.d,
            self.y + self.d,
        )


@dataclass
class LayerImportance:
    """Per-layer score set plus the descending-order channel ranking.

    ``order`` is a permutation of 1..T; ``scores[order[k] - 1]`` is
    non-increasing in k. ``beta`` is None for metrics that do not use it.
    """

    layer: str
    metric: str
    beta: float | None
    batch: int
    scores: list[float]
    order: list[int]


def sort_channels(scores):
    """Descending 1-based ranking of a score list; ties keep the lower index first."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 1 or scores.size == 0:
        raise ValueError("scores must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite")
    order = np.argsort(-scores, kind="stable") + 1
    return [int(i) for i in order]


def _slice_stack(slices, name="slices"):
    arr = np.asarray(slices, dtype=np.float64)
    if arr.ndim == 3 and 0 in arr.shape:
        raise ValueError(f"{name} must be non-empty")
    if arr.ndim != 3:
        raise ValueError(f"{name} must be B x H x W, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contain non-finite entries")
    return arr


def energy_zone_ratio(slices, beta=DEFAULT_BETA):
    """Batch-averaged fraction of spectral magnitude outside the energy zone.

    For each slice, E = abs(fftshift(fft2(slice))) and the per-slice ratio
    is ``1 - (sum of E over the (2d+1)^2 zone square) / (sum of E)``; a
    zero-energy slice contributes 0 (least important). The result is the
    mean over the batch and lies in [0, 1].

    Scale-invariant: scaling a slice by any nonzero constant leaves its
    ratio unchanged.
    """
    arr = _slice_stack(slices)
    _, height, width = arr.shape
    geom = ZoneGeometry.for_shape(height, width, beta)
    r0, r1, c0, c1 = geom.box()
    spec = np.abs(np.fft.fftshift(np.fft.fft2(arr, axes=(1, 2)), axes=(1, 2)))
    total = spec.sum(axis=(1, 2))
    zone = spec[:, r0:r1, c0:c1].sum(axis=(1, 2))
    ratios = np.zeros(arr.shape[0])
    nonzero = total > 0.0
    ratios[nonzero] = 1.0 - zone[nonzero] / total[nonzero]
    return float(ratios.mean())


def _check_feature_maps(feature_maps):
    fm = np.asarray(feature_maps, dtype=np.float64)
    if fm.ndim != 4 or 0 in fm.shape:
        raise ValueError(f"feature maps must be B x T x H x W, got shape {fm.shape}")
    if not np.all(np.isfinite(fm)):
        raise ValueError("feature maps contain non-finite entries")
    return fm


def layer_energy_scores(feature_maps, beta=DEFAULT_BETA, layer=""):
    """Energy-zone ratio of every channel in a B x T x H x W batch, ranked."""
    fm = _check_feature_maps(feature_maps)
    scores = [energy_zone_ratio(fm[:, j], beta) for j in range(fm.shape[1])]
    return LayerImportance(
        layer=layer,
        metric="energy",
        beta=float(beta),
        batch=fm.shape[0],
        scores=scores,
        order=sort_channels(scores),
    )


def numerical_rank(m):
    """Number of singular values above ``max(H, W) * sigma_max * eps``.

    Accepts real or complex matrices so spectra can be ranked directly.
    """
    m = np.asarray(m)
    if np.iscomplexobj(m):
        m = m.astype(np.complex128)
    else:
        m = m.astype(np.float64)
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    sigma = np.linalg.svd(m, compute_uv=False)
    tol = max(m.shape) * sigma[0] * np.finfo(np.float64).eps
    return int(np.count_nonzero(sigma > tol))


def rank_score(feature_maps, layer=""):
    """Batch-averaged numerical rank of every channel, ranked descending.

    SVD non-convergence is surfaced as :class:`NumericError` naming the
    channel; it signals pathological input and is never masked.
    """
    fm = _check_feature_maps(feature_maps)
    batch, channels = fm.shape[:2]
    scores = []
    for j in range(channels):
        try:
            ranks = [numerical_rank(fm[b, j]) for b in range(batch)]
        except np.linalg.LinAlgError as exc:
            raise NumericError(
                f"SVD failed for layer {layer!r} channel {j + 1}: {exc}"
            ) from exc
        scores.append(float(np.mean(ranks)))
    return LayerImportance(
        layer=layer,
        metric="rank",
        beta=None,
        batch=batch,
        scores=scores,
        order=sort_channels(scores),
    )


def circle_radius(slice2d, fraction=DEFAULT_CIRCLE_FRACTION):
    """Smallest radius of a centered disc holding >= fraction of the
    spectral magnitude of one slice.

    Bins are grouped by exact Euclidean distance from the zone center; the
    radius returned is the distance of the outermost bin needed. A
    zero-energy slice yields 0.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    spec = energy_map(slice2d)
    height, width = spec.shape
    x, y = zone_center(height, width)
    rows = np.arange(height) - (x - 1)
    cols = np.arange(width) - (y - 1)
    dist_sq = (rows[:, None] ** 2 + cols[None, :] ** 2).ravel()
    radii_sq, group = np.unique(dist_sq, return_inverse=True)
    mass = np.bincount(group, weights=spec.ravel())
    cumulative = np.cumsum(mass)
    total = cumulative[-1]
    if total == 0.0:
        return 0.0
    idx = int(np.searchsorted(cumulative, fraction * total, side="left"))
    return float(math.sqrt(radii_sq[idx]))


def circle_score(feature_maps, fraction=DEFAULT_CIRCLE_FRACTION, layer=""):
    """Batch-averaged energy-circle radius of every channel, ranked descending."""
    fm = _check_feature_maps(feature_maps)
    batch, channels = fm.shape[:2]
    scores = [
        float(np.mean([circle_radius(fm[b, j], fraction) for b in range(batch)]))
        for j in range(channels)
    ]
    return LayerImportance(
        layer=layer,
        metric="circle",
        beta=None,
        batch=batch,
        scores=scores,
        order=sort_channels(scores),
    )


def score_layer(feature_maps, metric, beta=DEFAULT_BETA,
                fraction=DEFAULT_CIRCLE_FRACTION, layer=""):
    """Dispatch one of the three metrics over a B x T x H x W batch."""
    if metric == "energy":
        return layer_energy_scores(feature_maps, beta, layer=layer)
    if metric == "rank":
        return rank_score(feature_maps, layer=layer)
    if metric == "circle":
        return circle_score(feature_maps, fraction, layer=layer)
    raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
