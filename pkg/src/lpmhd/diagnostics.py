"""Per-timestep scalar diagnostics: conserved quantities, gradient sup
norms, the blow-up integrand sup_j ||Delta_j (curl u, curl b)||_inf with its
running trapezoid integral, per-block curl sup norms, and the Gronwall
envelope fit.

The blow-up monitor only reports; it never terminates a run.  CSV columns
are emitted in the fixed order documented by `csv_columns`, one row per
record, with a JSON mirror.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

from .mhd import ElsasserState, from_elsasser
from .spaces import NormSpec, tl_norm
from .spectral import (
    RealField,
    SpectralError,
    curl,
    jacobian_sup_norm,
    make_filter_bank,
)


def energy(state: ElsasserState) -> float:
    """(1/2)(||z+||_2^2 + ||z-||_2^2) = ||u||_2^2 + ||b||_2^2, normalized
    measure."""
    ep = float(np.mean(np.sum(state.z_plus.values**2, axis=0)))
    em = float(np.mean(np.sum(state.z_minus.values**2, axis=0)))
    return 0.5 * (ep + em)


def cross_helicity(state: ElsasserState) -> float:
    """mean(u . b) = (1/4)(||z+||_2^2 - ||z-||_2^2)."""
    ep = float(np.mean(np.sum(state.z_plus.values**2, axis=0)))
    em = float(np.mean(np.sum(state.z_minus.values**2, axis=0)))
    return 0.25 * (ep - em)


def curl_pair(state: ElsasserState):
    """(curl u, curl b): scalars in 2D, vectors in 3D."""
    u, b = from_elsasser(state)
    return curl(u), curl(b)


def block_sup_norms(f: RealField) -> list:
    """||Delta_j f||_inf over the dyadic range, pointwise component
    magnitude."""
    bank = make_filter_bank(f.grid)
    out = []
    for j in f.grid.js:
        blk = RealField(f.grid, coeffs=f.coeffs * bank.phi[j])
        out.append(float(blk.magnitude().max()))
    return out


def blowup_integrand(state: ElsasserState) -> float:
    """||(curl u, curl b)||  in homogeneous F^0_{inf,inf}: the stacked curls
    are treated as one multi-component field."""
    wu, wb = curl_pair(state)
    stacked = RealField(state.grid, coeffs=np.concatenate([wu.coeffs, wb.coeffs]))
    return tl_norm(stacked, NormSpec(0.0, math.inf, math.inf, homogeneous=True))


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One row of the diagnostics stream."""

    t: float
    energy: float
    cross_helicity: float
    grad_sup_z_plus: float
    grad_sup_z_minus: float
    blowup_integrand: float
    blowup_integral: float
    block_sup_curl_u: tuple
    block_sup_curl_b: tuple
    norms: dict


def record(
    state: ElsasserState, specs=(), blowup_integral: float = 0.0
) -> DiagnosticsRecord:
    """Fill every diagnostic field for one state.  The running integral is
    the caller's (DiagnosticsStream maintains it across records)."""
    wu, wb = curl_pair(state)
    stacked = RealField(state.grid, coeffs=np.concatenate([wu.coeffs, wb.coeffs]))
    b_t = tl_norm(stacked, NormSpec(0.0, math.inf, math.inf, homogeneous=True))
    norms = {
        spec.label: tl_norm(state.z_plus, spec) + tl_norm(state.z_minus, spec)
        for spec in specs
    }
    return DiagnosticsRecord(
        t=state.t,
        energy=energy(state),
        cross_helicity=cross_helicity(state),
        grad_sup_z_plus=jacobian_sup_norm(state.z_plus),
        grad_sup_z_minus=jacobian_sup_norm(state.z_minus),
        blowup_integrand=b_t,
        blowup_integral=blowup_integral,
        block_sup_curl_u=tuple(block_sup_norms(wu)),
        block_sup_curl_b=tuple(block_sup_norms(wb)),
        norms=norms,
    )


class DiagnosticsStream:
    """Accumulates records along a run, maintaining the trapezoid running
    integral of the blow-up integrand."""

    def __init__(self, specs=()):
        self.specs = tuple(specs)
        self.records: list[DiagnosticsRecord] = []

    def append(self, state: ElsasserState) -> DiagnosticsRecord:
        integral = 0.0
        if self.records:
            prev = self.records[-1]
            rec_b = blowup_integrand(state)
            integral = prev.blowup_integral + 0.5 * (state.t - prev.t) * (
                prev.blowup_integrand + rec_b
            )
        rec = record(state, self.specs, blowup_integral=integral)
        self.records.append(rec)
        return rec


def block_kernel_constant(grid) -> float:
    """max_j of the l1 norm of the Delta_j convolution kernel: the L_inf
    operator norm bounding ||Delta_j f||_inf <= C ||f||_inf."""
    bank = make_filter_bank(grid)
    best = 0.0
    for j in grid.js:
        kernel = sfft.irfftn(bank.phi[j].astype(complex), s=grid.shape)
        best = max(best, float(np.sum(np.abs(kernel))))
    return best


# ---------------------------------------------------------------------------
# Gronwall envelope
# ---------------------------------------------------------------------------


def gronwall_check(records, norm_label: str):
    """Fit the smallest C >= 0 such that
    y(t) <= y(0) exp(C int_0^t (||grad z+||_inf + ||grad z-||_inf) dtau)
    over the recorded stream; returns (C, max_violation) where the violation
    is measured against the fitted envelope (zero up to round-off by
    construction)."""
    if not records:
        raise SpectralError("gronwall check needs at least one record")
    y = np.array([r.norms[norm_label] for r in records])
    g = np.array([r.grad_sup_z_plus + r.grad_sup_z_minus for r in records])
    t = np.array([r.t for r in records])
    if len(records) == 1:
        return 0.0, 0.0
    big_g = np.concatenate(
        [[0.0], np.cumsum(0.5 * np.diff(t) * (g[1:] + g[:-1]))]
    )
    y0 = y[0]
    c_best = 0.0
    for yi, gi in zip(y[1:], big_g[1:]):
        if yi > y0 and gi > 0.0:
            c_best = max(c_best, math.log(yi / y0) / gi)
    envelope = y0 * np.exp(c_best * big_g)
    violation = float(np.max(y - envelope))
    return c_best, max(0.0, violation)


# ---------------------------------------------------------------------------
# CSV / JSON emission
# ---------------------------------------------------------------------------


def csv_columns(grid, specs=()) -> list:
    cols = [
        "t",
        "energy",
        "cross_helicity",
        "grad_sup_z_plus",
        "grad_sup_z_minus",
        "blowup_integrand",
        "blowup_integral",
    ]
    cols += [f"norm_{spec.label}" for spec in specs]
    cols += [f"block_sup_curl_u_j{j}" for j in grid.js]
    cols += [f"block_sup_curl_b_j{j}" for j in grid.js]
    return cols


def record_row(rec: DiagnosticsRecord, specs=()) -> list:
    row = [
        rec.t,
        rec.energy,
        rec.cross_helicity,
        rec.grad_sup_z_plus,
        rec.grad_sup_z_minus,
        rec.blowup_integrand,
        rec.blowup_integral,
    ]
    row += [rec.norms[spec.label] for spec in specs]
    row += list(rec.block_sup_curl_u)
    row += list(rec.block_sup_curl_b)
    return row


def write_csv(records, grid, path, specs=(), timestamp: str | None = None) -> None:
    """One row per record in the documented column order.  The leading
    comment line carries the timestamp and is excluded from byte-level
    comparisons."""
    lines = []
    if timestamp is not None:
        lines.append(f"# created: {timestamp}")
    lines.append(",".join(csv_columns(grid, specs)))
    for rec in records:
        lines.append(",".join(repr(float(x)) for x in record_row(rec, specs)))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_json(records, grid, path, specs=()) -> None:
    cols = csv_columns(grid, specs)
    payload = [dict(zip(cols, map(float, record_row(r, specs)))) for r in records]
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")
