"""Randomized, seeded verification harness for the quantitative estimates:
Bernstein, derivative norm equivalence, the product estimate, the vector
maximal inequality, the radial-majorant bound, the pressure bound, the
advective commutator estimates and their four per-term bounds, plus the
sharp Riesz-transform spot check.

Empirical constants are reported, never compared to theoretical values;
acceptance is finiteness plus stability across resolution (stability_sweep
reruns identical seeds at each N, so for band-limited generators the same
continuum fields are measured on finer lattices).  Reports are reproducible
bit-for-bit from (id, params, seed).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np

from . import mhd
from .paracalc import commutator_family, commutator_split_family
from .spaces import (
    NormSpec,
    gaussian_convolve,
    lp_norm,
    maximal_function,
    shell_lp_lq,
    tl_norm,
)
from .spectral import (
    Grid,
    dyadic_block,
    jacobian,
    jacobian_sup_norm,
    low_pass,
    multiply,
    random_band_limited,
    random_solenoidal,
    riesz,
    spectral_derivative,
)

INF = math.inf


class UnknownInequalityError(ValueError):
    """Inequality id not recognized by the harness."""


class HypothesisError(ValueError):
    """Parameters violate the inequality's stated hypothesis."""


@dataclass
class InequalityReport:
    inequality_id: str
    params: dict
    dimension: int
    points: int
    trials: int
    seed: int
    ratios: np.ndarray
    growth_factor: float | None = None

    @property
    def max_ratio(self) -> float:
        return float(self.ratios.max())

    @property
    def finite(self) -> bool:
        return bool(np.all(np.isfinite(self.ratios)) and np.all(self.ratios >= 0))

    def to_dict(self) -> dict:
        return {
            "inequality_id": self.inequality_id,
            "params": self.params,
            "dimension": self.dimension,
            "points": self.points,
            "trials": self.trials,
            "seed": self.seed,
            "max_ratio": self.max_ratio,
            "growth_factor": self.growth_factor,
            "ratios": [float(r) for r in self.ratios],
        }


def _trial_seed(seed: int, trial: int, stream: int = 0):
    return np.random.SeedSequence(entropy=seed, spawn_key=(trial, stream))


def _norm_params(params: dict, defaults: dict, inequality_id: str) -> dict:
    merged = dict(defaults)
    unknown = set(params) - set(defaults)
    if unknown:
        raise HypothesisError(
            f"unknown parameter(s) {sorted(unknown)} for inequality '{inequality_id}'"
        )
    merged.update(params)
    return merged


def _require(cond: bool, inequality_id: str, hypothesis: str):
    if not cond:
        raise HypothesisError(
            f"inequality '{inequality_id}' requires {hypothesis}"
        )


_COMMON = {"d": 2, "n": 64, "decay": 2.0, "kmax": None, "amplitude": 1.0}


def _grid_and_kmax(p: dict):
    grid = Grid(p["d"], p["n"])
    kmax = p["kmax"] if p["kmax"] is not None else grid.dealias_limit
    return grid, kmax


def _multi_indices(d: int, k: int):
    out = []
    for combo in combinations_with_replacement(range(d), k):
        alpha = [0] * d
        for axis in combo:
            alpha[axis] += 1
        out.append(tuple(alpha))
    return out


# ---------------------------------------------------------------------------
# per-id trial runners
# ---------------------------------------------------------------------------


def _bernstein(p, grid, kmax, seed, trial):
    # shell assignment tied to the band limit, not the grid, so sweeps
    # measure identical cases at every resolution
    j_band = max(2, int(math.floor(math.log2(kmax))))
    j = 1 + trial % j_band
    f = random_band_limited(
        grid, _trial_seed(seed, trial), decay=p["decay"], kmax=kmax,
        amplitude=p["amplitude"],
    )
    k = p["k"]
    if p["direction"] == "forward":
        f = low_pass(f, j)
        sup = max(
            lp_norm(spectral_derivative(f, alpha), p["p"])
            for alpha in _multi_indices(grid.dimension, k)
        )
        denom = 2.0 ** (j * k) * lp_norm(f, p["p"])
    else:
        f = dyadic_block(f, j)
        sup = lp_norm(f, p["p"])
        denom = max(
            2.0 ** (-j * k) * lp_norm(spectral_derivative(f, alpha), p["p"])
            for alpha in _multi_indices(grid.dimension, k)
        )
    return sup / denom if denom > 0 else 0.0


def _deriv_equiv(p, grid, kmax, seed, trial):
    f = random_band_limited(
        grid, _trial_seed(seed, trial), decay=p["decay"], kmax=kmax,
        amplitude=p["amplitude"],
    )
    upper = tl_norm(f, NormSpec(p["s"] + 1.0, p["p"], p["q"]))
    lower = tl_norm(jacobian(f), NormSpec(p["s"], p["p"], p["q"]))
    if upper == 0.0 or lower == 0.0:
        return 0.0
    r = upper / lower
    return max(r, 1.0 / r)


def _product(p, grid, kmax, seed, trial):
    f = random_band_limited(
        grid, _trial_seed(seed, trial, 0), decay=p["decay"], kmax=kmax,
        amplitude=p["amplitude"],
    )
    g = random_band_limited(
        grid, _trial_seed(seed, trial, 1), decay=p["decay"], kmax=kmax,
        amplitude=p["amplitude"],
    )
    spec = NormSpec(p["s"], p["p"], p["q"], homogeneous=p["homogeneous"])
    lhs = tl_norm(multiply(f, g), spec)
    rhs = lp_norm(f, INF) * tl_norm(g, spec) + lp_norm(g, INF) * tl_norm(f, spec)
    return lhs / rhs


def _vector_maximal(p, grid, kmax, seed, trial):
    fields = [
        random_band_limited(
            grid, _trial_seed(seed, trial, i), decay=p["decay"], kmax=kmax,
            amplitude=p["amplitude"],
        )
        for i in range(p["family"])
    ]
    raw = np.stack([np.abs(f.values[0]) for f in fields])
    maxed = np.stack([maximal_function(f).values[0] for f in fields])
    idx = range(len(fields))
    lhs = shell_lp_lq(maxed, idx, 0.0, p["p"], p["q"])
    rhs = shell_lp_lq(raw, idx, 0.0, p["p"], p["q"])
    return lhs / rhs


def _majorant(p, grid, kmax, seed, trial):
    f = random_band_limited(
        grid, _trial_seed(seed, trial), decay=p["decay"], kmax=kmax,
        amplitude=p["amplitude"],
    )
    mf = maximal_function(f).values[0]
    best = np.abs(f.values[0]).copy()
    eps = grid.spacing
    while eps <= math.pi / 2.0:
        np.maximum(best, np.abs(gaussian_convolve(f, eps).values[0]), out=best)
        eps *= 2.0
    # A = integral of the Gaussian's radial majorant = 1
    return float(np.max(best / mf))


def _solenoidal_pair(p, grid, kmax, seed, trial):
    f = random_solenoidal(
        grid, _trial_seed(seed, trial, 0), decay=p["decay"], kmax=kmax,
        amplitude=p["amplitude"],
    )
    g = random_band_limited(
        grid, _trial_seed(seed, trial, 1), decay=p["decay"], kmax=kmax,
        amplitude=p["amplitude"],
    )
    return f, g


def _commutator_lhs(fields_by_k, grid, s, pp, qq):
    stack = np.stack([fields_by_k[k].magnitude() for k in grid.js])
    return shell_lp_lq(stack, grid.js, s, pp, qq)


def _commutator_a2(p, grid, kmax, seed, trial):
    f, g = _solenoidal_pair(p, grid, kmax, seed, trial)
    fam = commutator_family(f, g)
    lhs = _commutator_lhs(fam, grid, p["s"], p["p"], p["q"])
    spec = NormSpec(p["s"], p["p"], p["q"])
    rhs = jacobian_sup_norm(f) * tl_norm(g, spec) + jacobian_sup_norm(g) * tl_norm(
        f, spec
    )
    return lhs / rhs


def _commutator_a3(p, grid, kmax, seed, trial):
    f, g = _solenoidal_pair(p, grid, kmax, seed, trial)
    fam = commutator_family(f, g)
    lhs = _commutator_lhs(fam, grid, p["s"], p["p"], p["q"])
    spec = NormSpec(p["s"], p["p"], p["q"])
    rhs = jacobian_sup_norm(f) * tl_norm(g, spec) + lp_norm(g, INF) * tl_norm(
        jacobian(f), spec
    )
    return lhs / rhs


def _term_runner(term_key):
    def run(p, grid, kmax, seed, trial):
        f, g = _solenoidal_pair(p, grid, kmax, seed, trial)
        splits = commutator_split_family(f, g)
        fields = {k: splits[k].terms[term_key] for k in grid.js}
        lhs = _commutator_lhs(fields, grid, p["s"], p["p"], p["q"])
        spec = NormSpec(p["s"], p["p"], p["q"])
        if term_key in ("I", "IV"):
            rhs = jacobian_sup_norm(f) * tl_norm(g, spec)
        else:
            rhs = jacobian_sup_norm(g) * tl_norm(f, spec)
        return lhs / rhs

    return run


def _riesz_bounded(p, grid, kmax, seed, trial):
    f = random_band_limited(
        grid, _trial_seed(seed, trial), decay=p["decay"], kmax=kmax,
        amplitude=p["amplitude"],
    )
    axis = trial % grid.dimension
    spec = NormSpec(p["s"], 2.0, 2.0)
    denom = tl_norm(f, spec)
    return tl_norm(riesz(f, axis), spec) / denom


def _pressure(p, grid, kmax, seed, trial):
    zp = random_solenoidal(
        grid, _trial_seed(seed, trial, 0), decay=p["decay"], kmax=kmax,
        amplitude=p["amplitude"],
    )
    zm = random_solenoidal(
        grid, _trial_seed(seed, trial, 1), decay=p["decay"], kmax=kmax,
        amplitude=p["amplitude"],
    )
    state = mhd.ElsasserState(zp, zm)
    spec = NormSpec(p["s"], p["p"], p["q"])
    lhs = tl_norm(mhd.pressure_gradient(state), spec)
    rhs = jacobian_sup_norm(zm) * tl_norm(zp, spec) + jacobian_sup_norm(
        zp
    ) * tl_norm(zm, spec)
    return lhs / rhs


@dataclass(frozen=True)
class _Runner:
    defaults: dict
    fn: object
    validate: object = None


_RUNNERS = {
    "bernstein": _Runner(
        {**_COMMON, "k": 1, "p": 2.0, "direction": "forward"},
        _bernstein,
        lambda p: _require(
            p["direction"] in ("forward", "reverse"), "bernstein",
            "direction in {forward, reverse}",
        ),
    ),
    "deriv-equiv": _Runner({**_COMMON, "s": 1.5, "p": 2.0, "q": 2.0}, _deriv_equiv),
    "product": _Runner(
        {**_COMMON, "s": 1.5, "p": 2.0, "q": 2.0, "homogeneous": True},
        _product,
        lambda p: _require(p["s"] > 0, "product", "s > 0"),
    ),
    "vector-maximal": _Runner(
        {**_COMMON, "p": 2.0, "q": 2.0, "family": 8}, _vector_maximal
    ),
    "majorant": _Runner(dict(_COMMON), _majorant),
    "commutator-A2": _Runner(
        {**_COMMON, "s": 1.5, "p": 2.0, "q": 2.0},
        _commutator_a2,
        lambda p: _require(p["s"] > 0, "commutator-A2", "s > 0"),
    ),
    "commutator-A3": _Runner(
        {**_COMMON, "s": 1.5, "p": 2.0, "q": 2.0},
        _commutator_a3,
        lambda p: _require(p["s"] > -1, "commutator-A3", "s > -1"),
    ),
    "term-I": _Runner({**_COMMON, "s": 1.5, "p": 2.0, "q": 2.0}, _term_runner("I")),
    "term-II": _Runner(
        {**_COMMON, "s": 1.5, "p": 2.0, "q": 2.0},
        _term_runner("II"),
        lambda p: _require(p["s"] > 0, "term-II", "s > 0"),
    ),
    "term-III": _Runner({**_COMMON, "s": 1.5, "p": 2.0, "q": 2.0}, _term_runner("III")),
    "term-IV": _Runner(
        {**_COMMON, "s": 1.5, "p": 2.0, "q": 2.0},
        _term_runner("IV"),
        lambda p: _require(p["s"] > -1, "term-IV", "s > -1"),
    ),
    "riesz-bounded": _Runner({**_COMMON, "s": 1.5}, _riesz_bounded),
    "pressure-3.11": _Runner(
        {**_COMMON, "s": 1.5, "p": 2.0, "q": 2.0},
        _pressure,
        lambda p: _require(
            p["s"] > 1, "pressure-3.11", "s > 1 (the product estimate is applied at order s - 1)"
        ),
    ),
}

INEQUALITY_IDS = tuple(sorted(_RUNNERS))


def run_inequality(
    inequality_id: str, params: dict | None = None, trials: int = 200, seed: int = 0
) -> InequalityReport:
    """Measure per-trial LHS/RHS ratios for one inequality on seeded random
    fields; the report's max ratio is the empirical constant."""
    if inequality_id not in _RUNNERS:
        raise UnknownInequalityError(
            f"unknown inequality id '{inequality_id}'; known: {', '.join(INEQUALITY_IDS)}"
        )
    runner = _RUNNERS[inequality_id]
    p = _norm_params(params or {}, runner.defaults, inequality_id)
    if runner.validate is not None:
        runner.validate(p)
    grid, kmax = _grid_and_kmax(p)
    ratios = np.array(
        [runner.fn(p, grid, kmax, seed, t) for t in range(trials)]
    )
    return InequalityReport(
        inequality_id=inequality_id,
        params={k: v for k, v in p.items()},
        dimension=grid.dimension,
        points=grid.points,
        trials=trials,
        seed=seed,
        ratios=ratios,
    )


@dataclass
class SweepResult:
    inequality_id: str
    resolutions: list
    reports: list
    growth_factors: list = field(default_factory=list)

    @property
    def max_growth(self) -> float:
        return max(self.growth_factors) if self.growth_factors else 1.0

    def to_dict(self) -> dict:
        return {
            "inequality_id": self.inequality_id,
            "resolutions": list(self.resolutions),
            "max_ratios": [r.max_ratio for r in self.reports],
            "growth_factors": [float(g) for g in self.growth_factors],
            "max_growth": self.max_growth,
        }


def stability_sweep(
    inequality_id: str,
    params: dict | None = None,
    resolutions=(64, 128),
    trials: int = 200,
    seed: int = 0,
) -> SweepResult:
    """Rerun one inequality with identical seeds at each resolution.

    The generator band limit defaults to one sixth of the coarsest
    resolution, so even quadratic products of test fields are fully
    resolved inside every grid's dealias ball: the sweep then measures the
    very same continuum quantities throughout, and the growth factor
    isolates genuine discretization drift.
    """
    resolutions = sorted(int(n) for n in resolutions)
    if len(resolutions) < 2:
        raise HypothesisError("stability sweep requires >= 2 resolutions")
    params = dict(params or {})
    if params.get("kmax") is None:
        params["kmax"] = max(2, min(resolutions) // 6)
    reports = []
    for n in resolutions:
        run_params = dict(params)
        run_params["n"] = n
        reports.append(run_inequality(inequality_id, run_params, trials, seed))
    growth = [
        b.max_ratio / a.max_ratio if a.max_ratio > 0 else math.inf
        for a, b in zip(reports, reports[1:])
    ]
    # the per-report growth factor is the step up from the previous resolution
    for rep, g in zip(reports[1:], growth):
        rep.growth_factor = float(g)
    return SweepResult(
        inequality_id=inequality_id,
        resolutions=resolutions,
        reports=reports,
        growth_factors=growth,
    )


def write_report_json(report: InequalityReport, path) -> None:
    with open(path, "w") as fh:
        json.dump(report.to_dict(), fh, indent=1, sort_keys=True)
        fh.write("\n")


def summary_csv_lines(entries) -> list:
    """(id, params, max ratio, growth factor) rows for a set of reports."""
    lines = ["inequality_id,params,max_ratio,growth_factor"]
    for rep in entries:
        params = json.dumps(rep.params, sort_keys=True).replace(",", ";")
        growth = "" if rep.growth_factor is None else repr(rep.growth_factor)
        lines.append(f"{rep.inequality_id},\"{params}\",{rep.max_ratio!r},{growth}")
    return lines
