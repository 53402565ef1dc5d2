import json
import math

import numpy as np
import pytest

from lpmhd import lab
from lpmhd import spectral as sp
from lpmhd.spaces import NormSpec, lp_norm, tl_norm
from lpmhd.spectral import multiply, spectral_derivative


class TestValidation:
    def test_unknown_id(self):
        with pytest.raises(lab.UnknownInequalityError, match="unknown inequality id"):
            lab.run_inequality("no-such-estimate")

    @pytest.mark.parametrize(
        "iid,params,needle",
        [
            ("product", {"s": -0.5}, "s > 0"),
            ("commutator-A2", {"s": 0.0}, "s > 0"),
            ("commutator-A3", {"s": -1.0}, "s > -1"),
            ("term-II", {"s": 0.0}, "s > 0"),
            ("term-IV", {"s": -1.5}, "s > -1"),
            ("pressure-3.11", {"s": 1.0}, "s > 1"),
        ],
    )
    def test_hypotheses_named(self, iid, params, needle):
        with pytest.raises(lab.HypothesisError) as err:
            lab.run_inequality(iid, params, trials=1)
        assert needle in str(err.value)

    def test_unknown_param_key(self):
        with pytest.raises(lab.HypothesisError, match="unknown parameter"):
            lab.run_inequality("bernstein", {"spam": 1}, trials=1)

    def test_sweep_needs_two_resolutions(self):
        with pytest.raises(lab.HypothesisError, match="2 resolutions"):
            lab.stability_sweep("bernstein", {}, resolutions=(64,), trials=1)


class TestBernstein:
    def test_single_mode_ratio_is_one(self):
        # f = cos(2^j x1): the derivative ratio is exactly 1 at p = 2
        grid = sp.Grid(2, 64)
        for j in range(0, 5):
            f = sp.from_function(grid, lambda x, y, j=j: np.cos(2.0**j * x))
            num = lp_norm(spectral_derivative(f, (1, 0)), 2)
            den = 2.0**j * lp_norm(f, 2)
            assert abs(num / den - 1.0) <= 1e-12

    def test_forward_and_reverse_run(self):
        fwd = lab.run_inequality("bernstein", {"n": 64}, trials=12, seed=3)
        rev = lab.run_inequality(
            "bernstein", {"n": 64, "direction": "reverse"}, trials=12, seed=3
        )
        assert fwd.finite and rev.finite

    def test_higher_order(self):
        rep = lab.run_inequality("bernstein", {"n": 64, "k": 2}, trials=8, seed=4)
        assert rep.finite


class TestReports:
    def test_reproducible_bit_for_bit(self):
        a = lab.run_inequality("product", {"n": 64}, trials=8, seed=11)
        b = lab.run_inequality("product", {"n": 64}, trials=8, seed=11)
        assert np.array_equal(a.ratios, b.ratios)

    def test_scaling_invariance(self):
        for iid in ("product", "commutator-A2", "term-II"):
            a = lab.run_inequality(iid, {"n": 64, "amplitude": 1.0}, trials=4, seed=5)
            b = lab.run_inequality(iid, {"n": 64, "amplitude": 3.7}, trials=4, seed=5)
            assert np.max(np.abs(a.ratios - b.ratios)) <= 1e-10 * np.max(a.ratios)

    def test_json_roundtrip(self, tmp_path):
        rep = lab.run_inequality("riesz-bounded", {"n": 64}, trials=5, seed=6)
        path = tmp_path / "r.json"
        lab.write_report_json(rep, path)
        data = json.loads(path.read_text())
        assert data["inequality_id"] == "riesz-bounded"
        assert data["max_ratio"] == rep.max_ratio
        assert len(data["ratios"]) == 5

    def test_summary_lines(self):
        rep = lab.run_inequality("majorant", {"n": 64}, trials=3, seed=7)
        lines = lab.summary_csv_lines([rep])
        assert lines[0].startswith("inequality_id,")
        assert lines[1].startswith("majorant,")


class TestSharpCases:
    def test_riesz_contraction(self):
        rep = lab.run_inequality("riesz-bounded", {"n": 64}, trials=20, seed=8)
        assert rep.max_ratio <= 1.0 + 1e-10

    def test_majorant_within_slack(self):
        rep = lab.run_inequality("majorant", {"n": 64}, trials=20, seed=9)
        assert rep.max_ratio <= 1.05

    def test_product_with_constant_factor(self):
        # g = 1: fg = f and the right side dominates by the ||g||_inf term
        grid = sp.Grid(2, 64)
        f = sp.random_band_limited(grid, seed=10)
        g = sp.from_function(grid, lambda x, y: np.ones_like(x))
        spec = NormSpec(1.5, 2, 2)
        lhs = tl_norm(multiply(f, g), spec)
        rhs = lp_norm(f, math.inf) * tl_norm(g, spec) + lp_norm(
            g, math.inf
        ) * tl_norm(f, spec)
        assert lhs / rhs <= 1.0 + 1e-12

    def test_commutator_constant_advector_zero_ratio(self):
        grid = sp.Grid(2, 64)
        f = sp.RealField(
            grid, values=np.stack([np.ones(grid.shape), np.zeros(grid.shape)]),
            solenoidal=True,
        )
        g = sp.random_band_limited(grid, seed=12)
        from lpmhd.paracalc import commutator_family
        from lpmhd.spaces import shell_lp_lq

        fam = commutator_family(f, g)
        stack = np.stack([fam[k].magnitude() for k in grid.js])
        lhs = shell_lp_lq(stack, grid.js, 1.5, 2, 2)
        assert lhs <= 1e-10


class TestAllFinite:
    @pytest.mark.parametrize("iid", lab.INEQUALITY_IDS)
    def test_runs_and_finite(self, iid):
        rep = lab.run_inequality(iid, {"n": 64}, trials=3, seed=13)
        assert rep.finite
        assert rep.max_ratio > 0

    def test_both_commutator_hypotheses_on_shared_data(self):
        a2 = lab.run_inequality("commutator-A2", {"n": 64, "s": 1.5}, trials=5, seed=14)
        a3 = lab.run_inequality("commutator-A3", {"n": 64, "s": 1.5}, trials=5, seed=14)
        assert a2.finite and a3.finite


class TestSweep:
    def test_growth_factors(self):
        sw = lab.stability_sweep(
            "deriv-equiv", {}, resolutions=(64, 128), trials=10, seed=15
        )
        assert len(sw.reports) == 2
        assert len(sw.growth_factors) == 1
        assert sw.reports[0].params["kmax"] == 64 // 6
        assert sw.reports[1].growth_factor == sw.growth_factors[0]
        # identical continuum fields: the ratios barely move
        assert abs(sw.growth_factors[0] - 1.0) <= 0.05

    def test_vector_maximal_q_inf(self):
        rep = lab.run_inequality(
            "vector-maximal", {"n": 64, "p": 2.0, "q": math.inf}, trials=4, seed=16
        )
        assert rep.finite
