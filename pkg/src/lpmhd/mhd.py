"""Ideal MHD in Elsasser form on the periodic grid: shared-pressure
tendency, RK4 stepping, the linearized Picard approximation scheme, and
particle trajectory maps.

The two Elsasser equations share one pressure, recovered spectrally from
pi = (-Laplace)^-1 d_i d_j (zm_i zp_j); equivalently the pressure gradient is
the Leray complement of the advection term, which is how the linearized
Picard systems define their per-iterate pressures.  There is no explicit
dissipation: products are 2/3-dealiased and runs are meant to stay smooth.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft
from scipy import ndimage

from .spaces import NormSpec, tl_norm
from .spectral import (
    Grid,
    RealField,
    SpectralError,
    _masked_product,
    dealias,
    frequencies,
    from_function,
    leray_project,
    low_pass_saturating,
    radius,
    random_solenoidal,
    solenoidal_residual,
    zero_field,
)

SOLENOIDAL_TOL = 1e-10


class CflWarning(UserWarning):
    """Advective CFL bound dt <= 0.5 h / max|z| violated."""


def _require_solenoidal(v: RealField, name: str):
    if not v.is_vector:
        raise SpectralError(f"{name} must be a vector field")
    if not v.solenoidal and solenoidal_residual(v) > SOLENOIDAL_TOL:
        raise SpectralError(f"{name} is not solenoidal")


@dataclass(frozen=True)
class ElsasserState:
    """The pair (z+, z-) of solenoidal vector fields at time t."""

    z_plus: RealField
    z_minus: RealField
    t: float = 0.0

    def __post_init__(self):
        if self.z_plus.grid != self.z_minus.grid:
            raise SpectralError("Elsasser pair must share a grid")
        _require_solenoidal(self.z_plus, "z_plus")
        _require_solenoidal(self.z_minus, "z_minus")

    @property
    def grid(self) -> Grid:
        return self.z_plus.grid


def to_elsasser(u: RealField, b: RealField, t: float = 0.0) -> ElsasserState:
    """(u, b) -> (z+, z-) = (u + b, u - b)."""
    if u.grid != b.grid:
        raise SpectralError("u and b must share a grid")
    _require_solenoidal(u, "u")
    _require_solenoidal(b, "b")
    return ElsasserState(u + b, u - b, t)


def from_elsasser(state: ElsasserState):
    """(z+, z-) -> (u, b); exact inverse of to_elsasser."""
    u = 0.5 * (state.z_plus + state.z_minus)
    b = 0.5 * (state.z_plus - state.z_minus)
    return u, b


# ---------------------------------------------------------------------------
# tendency
# ---------------------------------------------------------------------------


def advection(w: RealField, z: RealField) -> RealField:
    """(w . grad) z with dealiased products."""
    grid = w.grid
    freqs = frequencies(grid)
    comps = []
    for c in range(z.ncomp):
        acc = np.zeros(grid.spectral_shape, dtype=complex)
        for i in range(grid.dimension):
            dz = sfft.irfftn(1j * freqs[i] * z.coeffs[c], s=grid.shape)
            acc += _masked_product(grid, w.values[i], dz)
        comps.append(acc)
    return RealField(grid, coeffs=np.stack(comps))


def pressure_gradient(state: ElsasserState) -> RealField:
    """grad pi with pi = (-Laplace)^-1 d_i d_j (zm_i zp_j), zero mean;
    exactly the Leray complement of the advection term."""
    grid = state.grid
    d = grid.dimension
    freqs = frequencies(grid)
    r2 = radius(grid) ** 2
    safe = np.where(r2 == 0.0, 1.0, r2)
    zm, zp = state.z_minus.values, state.z_plus.values
    quad = np.zeros(grid.spectral_shape, dtype=complex)
    for i in range(d):
        for j in range(d):
            quad += freqs[i] * freqs[j] * _masked_product(grid, zm[i], zp[j])
    pi_hat = np.where(r2 == 0.0, 0.0, -quad / safe)
    out = np.stack([1j * freqs[a] * pi_hat for a in range(d)])
    return RealField(grid, coeffs=out)


def mhd_tendency(state: ElsasserState):
    """Right sides (dz+/dt, dz-/dt) of the symmetrized system, both
    Leray-projected to scrub round-off divergence."""
    grad_pi = pressure_gradient(state)
    fp = leray_project(-advection(state.z_minus, state.z_plus) - grad_pi)
    fm = leray_project(-advection(state.z_plus, state.z_minus) - grad_pi)
    return fp, fm


def cfl_bound(state: ElsasserState) -> float:
    """Advective bound 0.5 h / max(|z+|, |z-|); inf for the zero state."""
    vmax = max(state.z_plus.magnitude().max(), state.z_minus.magnitude().max())
    if vmax == 0.0:
        return math.inf
    return 0.5 * state.grid.spacing / float(vmax)


def step(state: ElsasserState, dt: float) -> ElsasserState:
    """One classical RK4 step of the nonlinear system."""
    if dt <= 0.0:
        raise SpectralError("dt must be positive")
    bound = cfl_bound(state)
    if dt > bound:
        warnings.warn(
            f"dt = {dt:g} violates the advective CFL bound "
            f"0.5*h/max|z| = {bound:g}",
            CflWarning,
            stacklevel=2,
        )
    y_p, y_m = state.z_plus, state.z_minus

    def rhs(zp, zm):
        return mhd_tendency(ElsasserState(zp, zm, state.t))

    k1p, k1m = rhs(y_p, y_m)
    k2p, k2m = rhs(y_p + (0.5 * dt) * k1p, y_m + (0.5 * dt) * k1m)
    k3p, k3m = rhs(y_p + (0.5 * dt) * k2p, y_m + (0.5 * dt) * k2m)
    k4p, k4m = rhs(y_p + dt * k3p, y_m + dt * k3m)
    new_p = y_p + (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
    new_m = y_m + (dt / 6.0) * (k1m + 2.0 * k2m + 2.0 * k3m + k4m)
    return ElsasserState(new_p, new_m, state.t + dt)


def run(state: ElsasserState, t_final: float, dt: float, callback=None) -> ElsasserState:
    """Step until t_final (an integer number of steps), calling
    callback(state) after the initial state and after every step."""
    n_steps = _step_count(t_final - state.t, dt)
    if callback is not None:
        callback(state)
    for _ in range(n_steps):
        state = step(state, dt)
        if callback is not None:
            callback(state)
    return state


def _step_count(span: float, dt: float) -> int:
    n = round(span / dt)
    if n < 1 or abs(n * dt - span) > 1e-9 * max(1.0, abs(span)):
        raise SpectralError(f"time span {span} is not an integer multiple of dt={dt}")
    return n


# ---------------------------------------------------------------------------
# Picard approximation scheme
# ---------------------------------------------------------------------------


@dataclass
class PicardIterate:
    """Record of one Picard iterate: difference norms against the previous
    iterate over the shared time grid, their sup, and the final state."""

    n: int
    times: np.ndarray
    diff_norms: np.ndarray
    final_state: ElsasserState
    trajectory: list | None = None

    @property
    def sup_diff_norm(self) -> float:
        return float(self.diff_norms.max())


def _pair_norm(zp: RealField, zm: RealField, spec: NormSpec) -> float:
    return tl_norm(zp, spec) + tl_norm(zm, spec)


def _linear_tendency(zp, zm, wp, wm):
    """Linear transport tendency: advect (zp, zm) by the frozen advector pair
    (wp, wm); per-equation pressure = Leray complement of the advection."""
    fp = leray_project(-advection(wm, zp))
    fm = leray_project(-advection(wp, zm))
    return fp, fm


def picard_iterate(
    z0_plus: RealField,
    z0_minus: RealField,
    s: float,
    p: float,
    q: float,
    t_final: float,
    dt: float,
    n_max: int,
    keep_trajectories: bool = False,
) -> list[PicardIterate]:
    """Run the linearized approximation scheme.

    Iterate 0 is the zero pair; iterate n >= 1 solves the linear transport
    system advected by iterate n-1, with initial data S_{n+1} applied to the
    (dealiased) true initial pair.  All iterates advance on the same RK4 time
    grid, each stage advected by the previous iterate's matching stage state,
    so the fixed point of the scheme is exactly the nonlinear RK4 trajectory.
    Low-pass truncation indices saturate at j_max + 1, where S_j is the
    identity on the lattice.

    Difference norms are recorded in the inhomogeneous F^{s-1}_{p,q} norm of
    the pair at every grid time; sup over the grid is the reported per-n
    norm.
    """
    _require_solenoidal(z0_plus, "z0_plus")
    _require_solenoidal(z0_minus, "z0_minus")
    if z0_plus.grid != z0_minus.grid:
        raise SpectralError("initial pair must share a grid")
    if n_max < 1:
        raise SpectralError("n_max must be at least 1")
    grid = z0_plus.grid
    spec = NormSpec(s - 1.0, p, q, homogeneous=False)
    n_steps = _step_count(t_final, dt)

    z0p, z0m = dealias(z0_plus), dealias(z0_minus)
    bound = cfl_bound(ElsasserState(z0p, z0m))
    if dt > bound:
        warnings.warn(
            f"dt = {dt:g} violates the advective CFL bound "
            f"0.5*h/max|z0| = {bound:g}",
            CflWarning,
            stacklevel=2,
        )
    states = [
        (zero_field(grid, grid.dimension), zero_field(grid, grid.dimension))
    ]
    for n in range(1, n_max + 1):
        states.append(
            (low_pass_saturating(z0p, n + 1), low_pass_saturating(z0m, n + 1))
        )

    times = np.arange(n_steps + 1) * dt
    diffs = np.zeros((n_max + 1, n_steps + 1))
    for n in range(1, n_max + 1):
        diffs[n, 0] = _pair_norm(
            states[n][0] - states[n - 1][0], states[n][1] - states[n - 1][1], spec
        )
    trajectories = (
        [[pair] for pair in states] if keep_trajectories else None
    )

    zero_pair = states[0]
    half = 0.5 * dt
    for m in range(n_steps):
        prev_stages = [zero_pair] * 4
        for n in range(1, n_max + 1):
            yp, ym = states[n]
            w1, w2, w3, w4 = prev_stages
            g1p, g1m = _linear_tendency(yp, ym, *w1)
            y2 = (yp + half * g1p, ym + half * g1m)
            g2p, g2m = _linear_tendency(*y2, *w2)
            y3 = (yp + half * g2p, ym + half * g2m)
            g3p, g3m = _linear_tendency(*y3, *w3)
            y4 = (yp + dt * g3p, ym + dt * g3m)
            g4p, g4m = _linear_tendency(*y4, *w4)
            prev_stages = [(yp, ym), y2, y3, y4]
            states[n] = (
                yp + (dt / 6.0) * (g1p + 2.0 * g2p + 2.0 * g3p + g4p),
                ym + (dt / 6.0) * (g1m + 2.0 * g2m + 2.0 * g3m + g4m),
            )
        for n in range(1, n_max + 1):
            diffs[n, m + 1] = _pair_norm(
                states[n][0] - states[n - 1][0],
                states[n][1] - states[n - 1][1],
                spec,
            )
            if keep_trajectories:
                trajectories[n].append(states[n])

    out = []
    t_end = n_steps * dt
    for n in range(1, n_max + 1):
        final = ElsasserState(states[n][0], states[n][1], t_end)
        traj = None
        if keep_trajectories:
            traj = [
                ElsasserState(zp, zm, float(tm))
                for (zp, zm), tm in zip(trajectories[n], times)
            ]
        out.append(
            PicardIterate(
                n=n,
                times=times,
                diff_norms=diffs[n].copy(),
                final_state=final,
                trajectory=traj,
            )
        )
    return out


def picard_contraction_table(iterates: list[PicardIterate]):
    """Rows (n, sup diff norm, ratio to previous); ratio is None for the
    first row."""
    rows = []
    prev = None
    for it in iterates:
        ratio = None if prev is None or prev == 0.0 else it.sup_diff_norm / prev
        rows.append((it.n, it.sup_diff_norm, ratio))
        prev = it.sup_diff_norm
    return rows


# ---------------------------------------------------------------------------
# particle trajectories
# ---------------------------------------------------------------------------

_REFINE = 4
_SPLINE_ORDER = 5


class _VelocitySampler:
    """Evaluates vector fields at off-grid points by spectral zero-padding
    refinement plus quintic spline interpolation on the refined lattice.

    Spline coefficient tables are cached per field object (bounded LRU; the
    cached strong reference keeps the id stable while the entry lives), so
    steady velocities are refined exactly once.
    """

    _MAX_CACHED = 8

    def __init__(self, grid: Grid):
        self.grid = grid
        self.fine = grid.points * _REFINE
        self._cache = {}

    def _tables(self, v: RealField):
        key = id(v)
        if key not in self._cache:
            fine_values = _fourier_refine(v, _REFINE)
            tables = [
                ndimage.spline_filter(
                    comp, order=_SPLINE_ORDER, mode="grid-wrap"
                )
                for comp in fine_values
            ]
            if len(self._cache) >= self._MAX_CACHED:
                self._cache.pop(next(iter(self._cache)))
            self._cache[key] = (v, tables)
        return self._cache[key][1]

    def __call__(self, v: RealField, points: np.ndarray) -> np.ndarray:
        """points shape (d, ...) in [0, 2pi) coordinates (any wrap)."""
        tables = self._tables(v)
        idx = np.mod(points, 2.0 * math.pi) * (self.fine / (2.0 * math.pi))
        flat = idx.reshape(self.grid.dimension, -1)
        out = np.stack(
            [
                ndimage.map_coordinates(
                    tab, flat, order=_SPLINE_ORDER, mode="grid-wrap", prefilter=False
                )
                for tab in tables
            ]
        )
        return out.reshape(points.shape)


def _fourier_refine(v: RealField, factor: int) -> np.ndarray:
    """Zero-padded spectral upsampling to a factor-times finer lattice."""
    grid = v.grid
    n, d = grid.points, grid.dimension
    m = n * factor
    fine_shape = (m,) * (d - 1) + (m // 2 + 1,)
    out = np.zeros((v.ncomp,) + fine_shape, dtype=complex)
    src = v.coeffs
    index = [np.arange(n // 2 + 1)]
    for _ in range(d - 1):
        freq = np.fft.fftfreq(n, 1.0 / n).astype(int)
        index.insert(0, np.mod(freq, m))
    grids = np.ix_(*index)
    for c in range(v.ncomp):
        dest = out[c]
        dest[grids] = src[c]
    values = sfft.irfftn(out, s=(m,) * d, axes=tuple(range(1, d + 1)))
    return values * float(factor) ** d


@dataclass
class TrajectoryMap:
    """Particle positions X(alpha, t) over the Lagrangian label lattice,
    with the Jacobian determinant of the (unwrapped) map."""

    grid: Grid
    t: float
    positions: np.ndarray
    labels: np.ndarray

    @property
    def displacement(self) -> np.ndarray:
        return self.positions - self.labels

    def jacobian_determinant(self) -> np.ndarray:
        """det grad X via spectral differentiation of the displacement."""
        grid = self.grid
        d = grid.dimension
        disp = RealField(grid, values=self.displacement)
        freqs = frequencies(grid)
        jac = np.empty((d, d) + grid.shape)
        for a in range(d):
            for b in range(d):
                deriv = sfft.irfftn(1j * freqs[b] * disp.coeffs[a], s=grid.shape)
                jac[a, b] = deriv + (1.0 if a == b else 0.0)
        if d == 2:
            return jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
        return (
            jac[0, 0] * (jac[1, 1] * jac[2, 2] - jac[1, 2] * jac[2, 1])
            - jac[0, 1] * (jac[1, 0] * jac[2, 2] - jac[1, 2] * jac[2, 0])
            + jac[0, 2] * (jac[1, 0] * jac[2, 1] - jac[1, 1] * jac[2, 0])
        )


def _as_velocity_fn(velocity):
    if isinstance(velocity, RealField):
        return lambda t: velocity
    if callable(velocity):
        return velocity
    snaps = sorted(velocity, key=lambda item: item[0])
    ts = np.array([item[0] for item in snaps])

    def interp(t):
        i = int(np.searchsorted(ts, t))
        if i < len(ts) and abs(ts[i] - t) < 1e-12:
            return snaps[i][1]
        if i == 0:
            return snaps[0][1]
        if i == len(ts):
            return snaps[-1][1]
        t0, f0 = snaps[i - 1]
        t1, f1 = snaps[i]
        w = (t - t0) / (t1 - t0)
        return (1.0 - w) * f0 + w * f1

    return interp


def trajectory_map(
    velocity,
    grid: Grid,
    t_final: float,
    dt: float,
    labels: np.ndarray | None = None,
) -> TrajectoryMap:
    """Integrate dX/dt = v(X, t) with RK4 from X(alpha, 0) = alpha.

    `velocity` may be a steady RealField, a callable t -> RealField, or a
    sequence of (t, RealField) snapshots (linearly interpolated in time at
    RK4 stage instants).  Labels default to the full lattice, which is what
    the spectral Jacobian determinant requires.
    """
    v_of_t = _as_velocity_fn(velocity)
    if labels is None:
        labels = np.stack(grid.coordinates())
    sampler = _VelocitySampler(grid)
    x = labels.astype(float).copy()
    n_steps = _step_count(t_final, dt)
    t = 0.0
    for _ in range(n_steps):
        v1 = sampler(v_of_t(t), x)
        v2 = sampler(v_of_t(t + 0.5 * dt), x + 0.5 * dt * v1)
        v3 = sampler(v_of_t(t + 0.5 * dt), x + 0.5 * dt * v2)
        v4 = sampler(v_of_t(t + dt), x + dt * v3)
        x = x + (dt / 6.0) * (v1 + 2.0 * v2 + 2.0 * v3 + v4)
        t += dt
    return TrajectoryMap(grid=grid, t=t, positions=x, labels=labels)


# ---------------------------------------------------------------------------
# initial-data catalog
# ---------------------------------------------------------------------------


def taylor_green(grid: Grid, amplitude: float = 1.0):
    """2D Taylor-Green vortex velocity with zero magnetic field."""
    if grid.dimension != 2:
        raise SpectralError("taylor-green initial data is 2D")
    u = from_function(
        grid,
        lambda x, y: -amplitude * np.cos(x) * np.sin(y),
        lambda x, y: amplitude * np.sin(x) * np.cos(y),
    )
    u = RealField(grid, values=u.values, solenoidal=True)
    return u, zero_field(grid, 2)


def orszag_tang(grid: Grid, amplitude: float = 1.0):
    """Orszag-Tang-type 2D MHD data."""
    if grid.dimension != 2:
        raise SpectralError("orszag-tang initial data is 2D")
    u = from_function(
        grid,
        lambda x, y: -amplitude * np.sin(y),
        lambda x, y: amplitude * np.sin(x),
    )
    b = from_function(
        grid,
        lambda x, y: -amplitude * np.sin(y),
        lambda x, y: amplitude * np.sin(2.0 * x),
    )
    return (
        RealField(grid, values=u.values, solenoidal=True),
        RealField(grid, values=b.values, solenoidal=True),
    )


def alfven_state(grid: Grid, seed: int = 0, amplitude: float = 1.0, decay: float = 3.0):
    """Steady state u = b built from a random solenoidal field."""
    u = random_solenoidal(grid, seed=seed, decay=decay, amplitude=amplitude)
    return u, u


def random_pair(grid: Grid, seed: int = 0, amplitude: float = 1.0, decay: float = 3.0):
    """Independent random solenoidal (u, b)."""
    u = random_solenoidal(grid, seed=seed, decay=decay, amplitude=amplitude)
    b = random_solenoidal(grid, seed=seed + 1, decay=decay, amplitude=amplitude)
    return u, b


INITIAL_DATA = {
    "taylor-green": taylor_green,
    "orszag-tang": orszag_tang,
    "alfven": alfven_state,
    "random": random_pair,
}
