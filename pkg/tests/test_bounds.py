import numpy as np
import pytest

from zakbench.bounds import (
    SupSumSpec,
    lemma_int_b,
    lemma_int_b_sweep,
    lemma_sum_a,
    lemma_sum_a_sweep,
    lemma_sum_c,
    lemma_sum_c_sweep,
    loglog_slope,
    supsum_R1,
    supsum_R2,
    supsum_sweep,
    supsum_wave,
)


class TestLemmaSumA:
    def test_centered_value_against_direct(self):
        # k1 = k2 = 0, beta = 2, gamma = 0: sum over n of <n>^-2
        row = lemma_sum_a(2.0, 0.0, 0, 0, cutoff=10**6)
        exact = 2.0 * np.pi**2 / 6.0 - 1.0  # sum over Z of (1+|n|)^-2
        assert row["value"] == pytest.approx(exact, abs=1e-5)
        assert row["value"] <= 1 + np.pi**2 / 3
        assert np.isfinite(row["ratio"])

    def test_precondition_rejected(self):
        with pytest.raises(ValueError, match="beta"):
            lemma_sum_a(0.4, 0.4, 0, 0, cutoff=100)

    def test_gamma_leq_beta_required(self):
        with pytest.raises(ValueError):
            lemma_sum_a(0.6, 0.9, 0, 0, cutoff=100)

    @pytest.mark.slow
    def test_sweep_no_growth_trend(self):
        # one-sided: a negative slope just means the bound's constant is
        # conservative at small separations; growth is what would falsify
        sweep = lemma_sum_a_sweep(0.6, 0.6)
        assert sweep["ratio_slope"] <= 0.05

    def test_tail_bound_shrinks_with_cutoff(self):
        small = lemma_sum_a(2.0, 0.0, 3, 0, cutoff=1000)
        large = lemma_sum_a(2.0, 0.0, 3, 0, cutoff=100000)
        assert large["tail_bound"] < small["tail_bound"]
        assert abs(large["value"] - small["value"]) <= small["tail_bound"]


class TestLemmaSumC:
    def test_simple_value(self):
        # c1 = c2 = 0, beta = 1: 1 + 2 sum 1/(1+n^2)
        row = lemma_sum_c(1.0, 0.0, 0.0, cutoff=10**6)
        n = np.arange(1, 10**6 + 1, dtype=float)
        direct = 1.0 + 2.0 * float(np.sum(1.0 / (1.0 + n * n)))
        assert row["value"] == pytest.approx(direct, rel=1e-12)

    def test_real_root_worst_case_bounded(self):
        # roots at +-1000: the near-zero plateau is widest here
        probe = lemma_sum_c(0.6, 0.0, -(1000.0**2))
        base = lemma_sum_c(0.6, 0.0, 0.0)
        assert probe["total"] <= 30 * max(1.0, base["total"])

    def test_precondition(self):
        with pytest.raises(ValueError, match="1/2"):
            lemma_sum_c(0.5, 0.0, 0.0)

    @pytest.mark.slow
    def test_sweep_c_independence(self):
        sweep = lemma_sum_c_sweep(0.6, magnitudes=[0.0, 1.0, 100.0, 10.0**4, 10.0**6])
        assert np.isfinite(sweep["sup_total"])
        assert sweep["trend_slope"] <= 0.05


class TestLemmaIntB:
    def test_closed_form(self):
        # rho1 = rho2 = 0, beta = 1: integral of (1+|tau|)^-2 is exactly 2
        row = lemma_int_b(1.0, 0.0, 0.0)
        assert row["value"] + row["tail_bound"] == pytest.approx(2.0, abs=1e-4)

    def test_precondition(self):
        with pytest.raises(ValueError, match="beta"):
            lemma_int_b(1.5, 0.0, 0.0)

    def test_sweep_flat_against_sharp_bound(self):
        sweep = lemma_int_b_sweep(0.75, separations=[2.0**p for p in range(0, 17, 4)])
        assert sweep["ratio_slope"] <= 0.05
        # the epsilon-shifted ratio grows like the hidden logarithm
        assert sweep["eps_ratio_slope"] > 0


class TestSupSums:
    def test_single_evaluation_finite(self):
        assert np.isfinite(supsum_R2(2.0, 1.0, 0.0, 0.55, 0.75, 1))
        assert np.isfinite(supsum_R1(2.0, 1.0, 0.55, 0.75, 1))

    def test_degenerate_k0_column(self):
        assert np.isfinite(supsum_wave(1.0, 1.0, 0.0, 0.55, 0.75, 0))

    def test_symmetry_under_reflection(self):
        # the summand is invariant under (k1, k2, k) -> -(k1, k2, k)
        for k in (3, 17):
            plus = supsum_R1(2.0, 1.0, 0.55, 0.75, k)
            minus = supsum_R1(2.0, 1.0, 0.55, 0.75, -k)
            assert plus == pytest.approx(minus, rel=1e-12)

    def test_monotone_in_s(self):
        vals = [supsum_R2(s, 1.0, 0.0, 0.55, 0.75, 32) for s in (1.5, 2.0, 2.5)]
        assert vals[0] < vals[1] < vals[2]

    def test_wave_variants_both_finite(self):
        for variant in ("R3", "R4"):
            assert np.isfinite(supsum_wave(1.0, 1.0, 0.0, 0.55, 0.75, 16, variant))

    def test_preconditions_flagged_not_fatal(self):
        spec = SupSumSpec("R2", s=2.0, s0=1.0, s1=0.0, b=0.9, alpha=0.75, K=4)
        assert not spec.precondition_ok()
        out = supsum_sweep(spec)
        assert np.isfinite(out["sup"])

    def test_sweep_shapes_and_running_sup(self):
        spec = SupSumSpec("R2", s=2.0, s0=1.0, s1=0.0, b=0.55, alpha=0.75, K=16)
        out = supsum_sweep(spec)
        ks = [r["k"] for r in out["rows"]]
        assert ks == [1, 2, 4, 8, 16]
        sups = [r["sup_so_far"] for r in out["rows"]]
        assert all(b >= a for a, b in zip(sups, sups[1:]))

    @pytest.mark.slow
    def test_truncation_convergence(self):
        spec = SupSumSpec("R2", s=2.0, s0=1.0, s1=0.0, b=0.55, alpha=0.75, K=64)
        out = supsum_sweep(spec, convergence_check=True)
        assert out["converged"]

    @pytest.mark.slow
    def test_admissible_vs_sharpness_at_moderate_K(self):
        ok = supsum_sweep(SupSumSpec("R2", s=2.0, s0=1.0, s1=0.0, b=0.55,
                                     alpha=0.75, K=2**8))
        sharp = supsum_sweep(SupSumSpec("R2", s=3.0, s0=1.0, s1=0.0, b=0.55,
                                        alpha=0.75, K=2**8, admissible=False))
        assert ok["slope"] <= 0.1
        assert sharp["slope"] >= 0.5


class TestLogLogSlope:
    def test_pure_power(self):
        xs = [1, 2, 4, 8, 16]
        ys = [x**1.7 for x in xs]
        assert loglog_slope(xs, ys) == pytest.approx(1.7, abs=1e-12)

    def test_degenerate(self):
        assert np.isnan(loglog_slope([1.0], [2.0]))
