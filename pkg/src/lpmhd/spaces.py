"""Lebesgue and Triebel-Lizorkin norms, plus the Hardy-Littlewood maximal
function, all with the normalized measure (2pi)^-d dx.

The homogeneous shell sum runs over the grid's dyadic range [j0, j_max]; the
mean mode never contributes because phi_j(0) = 0 for every j.  The s = 0,
p = q = inf homogeneous norm is sup_j ||Delta_j f||_inf, the quantity driving
the blow-up monitor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import fft as sfft

from .spectral import (
    Grid,
    RealField,
    SpectralError,
    apply_multiplier,
    block_magnitudes,
    radius,
)

INF = math.inf


class NormDomainError(SpectralError):
    """Norm parameters outside the supported (p, q, s) ranges."""


@dataclass(frozen=True)
class NormSpec:
    """Identifies a Triebel-Lizorkin norm: smoothness s, integrability p,
    shell summability q, homogeneous flag."""

    s: float
    p: float
    q: float
    homogeneous: bool = True

    def __post_init__(self):
        p, q = self.p, self.q
        ok = (1.0 < p < INF and 1.0 < q <= INF) or (p == INF and q == INF)
        if not ok:
            raise NormDomainError(
                f"(p, q) = ({p}, {q}) outside (1, inf) x (1, inf] with p = q = inf allowed"
            )
        if not self.homogeneous and not self.s > 0:
            raise NormDomainError("inhomogeneous norms require s > 0")

    @property
    def label(self) -> str:
        """Comma-free tag usable as a CSV column suffix."""
        dot = "hom" if self.homogeneous else "inhom"
        return f"F[s={self.s:g}|p={self.p:g}|q={self.q:g}|{dot}]"


def lp_norm(f: RealField, p: float) -> float:
    """(mean |f|^p)^(1/p) with pointwise Euclidean component magnitude;
    p = inf gives the grid maximum."""
    if not 1.0 <= p <= INF:
        raise NormDomainError(f"p = {p} outside [1, inf]")
    mag = f.magnitude()
    if p == INF:
        return float(mag.max())
    return float(np.mean(mag**p) ** (1.0 / p))


def shell_lp_lq(mags: np.ndarray, j_indices, s: float, p: float, q: float) -> float:
    """|| || 2^{js} a_j(x) ||_{l^q(j)} ||_{L^p(x)} for a stack of nonnegative
    shell magnitudes a_j.  Shared by tl_norm and the inequality lab (which
    feeds commutator families through the same reduction)."""
    weights = 2.0 ** (s * np.asarray(list(j_indices), dtype=float))
    arr = mags * weights.reshape((-1,) + (1,) * (mags.ndim - 1))
    if q == INF:
        pooled = arr.max(axis=0)
    else:
        pooled = (arr**q).sum(axis=0) ** (1.0 / q)
    if p == INF:
        return float(pooled.max())
    return float(np.mean(pooled**p) ** (1.0 / p))


def tl_norm(f: RealField, spec: NormSpec) -> float:
    """Triebel-Lizorkin norm of a field.

    Homogeneous: L^p in x of the l^q over shells of 2^{js} |Delta_j f(x)|.
    Inhomogeneous adds the L^p norm of f itself.
    """
    mags = block_magnitudes(f)
    value = shell_lp_lq(mags, f.grid.js, spec.s, spec.p, spec.q)
    if not spec.homogeneous:
        value += lp_norm(f, spec.p)
    return value


def sup_block_norm(f: RealField) -> float:
    """sup_j ||Delta_j f||_inf, i.e. the homogeneous (s=0, p=q=inf) norm."""
    return tl_norm(f, NormSpec(0.0, INF, INF, homogeneous=True))


def norm_record(field_id: str, spec: NormSpec, value: float) -> dict:
    """JSON-ready record of one norm evaluation."""
    return {
        "field-id": field_id,
        "s": spec.s,
        "p": None if spec.p == INF else spec.p,
        "q": None if spec.q == INF else spec.q,
        "homogeneous": spec.homogeneous,
        "value": value,
    }


# ---------------------------------------------------------------------------
# Hardy-Littlewood maximal function
# ---------------------------------------------------------------------------


def maximal_radii(grid: Grid):
    """The dyadic radius ladder: grid spacing times 2^m up to half the period."""
    steps = (grid.points // 2).bit_length() - 1
    return [grid.spacing * 2.0**m for m in range(steps + 1)]


@lru_cache(maxsize=None)
def _ball_kernels(dimension: int, points: int):
    """rfft spectra of the normalized lattice-ball indicator kernels, one per
    ladder radius.  Averages over {y : dist(x, y) <= r} with uniform weights."""
    grid = Grid(dimension, points)
    x = np.arange(points) * grid.spacing
    wrapped = np.minimum(x, 2.0 * math.pi - x)
    axes = np.meshgrid(*([wrapped] * dimension), indexing="ij")
    dist2 = sum(a**2 for a in axes)
    out = []
    for r in maximal_radii(grid):
        ball = dist2 <= r * r * (1.0 + 1e-12)
        kernel = ball / ball.sum()
        spec = sfft.rfftn(kernel)
        spec.flags.writeable = False
        out.append(spec)
    return tuple(out)


def ball_average(f: RealField, radius_index: int) -> np.ndarray:
    """Discrete ball average of |f| at ladder radius `radius_index`."""
    if not f.is_scalar:
        raise SpectralError("ball averages expect a scalar field")
    kernels = _ball_kernels(f.grid.dimension, f.grid.points)
    spec = sfft.rfftn(np.abs(f.values[0])) * kernels[radius_index]
    return sfft.irfftn(spec, s=f.grid.shape)


def maximal_function(f: RealField) -> RealField:
    """Pointwise max of |f| and its ball averages over the dyadic radius
    ladder.  Exact lattice convolutions, no dealiasing involved."""
    if not f.is_scalar:
        raise SpectralError("maximal function expects a scalar field")
    best = np.abs(f.values[0]).copy()
    kernels = _ball_kernels(f.grid.dimension, f.grid.points)
    spec_abs = sfft.rfftn(best)
    for kern in kernels:
        avg = sfft.irfftn(spec_abs * kern, s=f.grid.shape)
        np.maximum(best, avg, out=best)
    return RealField(f.grid, values=best)


def gaussian_convolve(f: RealField, scale: float) -> RealField:
    """Convolution with the periodized normalized Gaussian of width `scale`
    (multiplier exp(-scale^2 |xi|^2 / 2), unit mass)."""
    mult = np.exp(-0.5 * (scale * radius(f.grid)) ** 2)
    return apply_multiplier(f, mult)
