import pytest

from blowuplab import (
    InitialDataSpec,
    run_comparison_scenario,
    run_fsp_scenario,
    run_threshold_scenario,
)
from blowuplab.scenarios import _verdict


BUMP = InitialDataSpec(kind="compact_bump", amplitude=1.0, radius=1.0)


class TestVerdict:
    def test_all_true(self):
        assert _verdict({"a": True, "b": True}) == "PASS"

    def test_any_false(self):
        assert _verdict({"a": True, "b": False}) == "FAIL"


class TestComparison:
    def test_nested_bumps_pass(self, prob_2151):
        hi = InitialDataSpec(kind="compact_bump", amplitude=2.0, radius=1.5)
        res = run_comparison_scenario(prob_2151, BUMP, hi, t_end=1.0)
        assert res.verdict == "PASS"
        assert res.criteria["ordering_within_tol"]
        # the explicit scheme is monotone, so ordering is preserved exactly
        assert res.metrics["max_violation"] == 0.0
        assert res.criteria["tail_majorant_finite"]


class TestFsp:
    def test_bump_pass(self, prob_2151):
        res = run_fsp_scenario(prob_2151, BUMP)
        assert res.verdict == "PASS"
        for j in range(3):
            assert res.criteria[f"checkpoint_{j}_dominated"]
            assert res.criteria[f"checkpoint_{j}_support_inside_edge"]
            assert res.metrics[f"checkpoint_{j}_max_violation"] == 0.0

    def test_rejects_noncompact_data(self, prob_2151):
        tail = InitialDataSpec(kind="threshold_tail", tail_coeff=1.0)
        with pytest.raises(ValueError):
            run_fsp_scenario(prob_2151, tail)


class TestThreshold:
    def test_zero_tail_degenerate_path(self, prob_2151):
        # c = 0 falls back to a compact bump; the closed-form bound is skipped
        res = run_threshold_scenario(prob_2151, [0.0], u_cap=200.0)
        assert res.metrics["termination_c=0"] == "blowup_detected"
        assert not any(k.startswith("bound_") for k in res.metrics)
        assert res.criteria["t_hat_strictly_decreasing"]

    def test_rejects_p_one(self, prob_2121):
        with pytest.raises(ValueError):
            run_threshold_scenario(prob_2121, [1.0])
