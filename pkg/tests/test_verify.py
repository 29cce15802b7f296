from fractions import Fraction

import numpy as np
import pytest

from conftest import random_psd
from psdmask.errors import CNotOutsideError, NonHermitianOutputError, RegimeMismatchError
from psdmask.functions import (
    Custom,
    Domain,
    HerzSeries,
    Identity,
    ScalarMultiple,
    scaled_identity,
)
from psdmask.linalg import all_ones, eig_extremes, exact_hermitian, identity, is_psd
from psdmask.operators import OperatorSpec, apply
from psdmask.patterns import (
    all_singletons_rule,
    contiguous_partition_rule,
    empty_rule,
    overlapping_chain_rule,
    proper_subpartition_rule,
    single_block_rule,
)
from psdmask.verify import (
    OUTCOME_PRESERVED,
    VerifyConfig,
    canonical_json,
    correlation_bound_check,
    induction_step_check,
    reduce_scalar,
    refute_scalar_outside_interval,
    sample_correlation,
    sample_psd,
    verify_preservation,
)

DISC1 = Domain.disc(1.0)
FAST = VerifyConfig(max_n=6, samples_per_n=40)
BATTERY_ONLY = VerifyConfig(max_n=6, samples_per_n=0)


class TestSampling:
    def test_sample_psd_in_domain(self, rng):
        for dom in (Domain.disc(1.0), Domain.open_sym(2.0),
                    Domain.half_open_nonneg(1.0), Domain.open_pos(1.0), Domain.disc()):
            for _ in range(10):
                n = int(rng.integers(1, 7))
                M = sample_psd(rng, n, dom)
                assert dom.contains_array(M).all()
                assert is_psd(M, 1e-10).is_psd

    def test_rank_control(self, rng):
        M = sample_psd(rng, 5, DISC1, rank=1)
        assert np.linalg.matrix_rank(M, tol=1e-10) == 1

    def test_correlation_sampler(self, rng):
        for _ in range(10):
            C = sample_correlation(rng, 5)
            assert np.all(C.diagonal().real == 1.0)
            assert is_psd(C, 1e-9).is_psd

    def test_streams_are_seeded(self):
        a = sample_psd(np.random.default_rng(7), 4, DISC1)
        b = sample_psd(np.random.default_rng(7), 4, DISC1)
        assert np.array_equal(a, b)


class TestVerifyPreservation:
    def test_series_preserved_on_empty_rule(self):
        f = HerzSeries({(0, 0): 0.4, (1, 0): 0.5, (1, 1): 0.3}, max_degree=6)
        verdict = verify_preservation(f, f, empty_rule(), DISC1, FAST)
        assert verdict.outcome == OUTCOME_PRESERVED
        assert verdict.counterexample is None

    def test_negative_scalar_refuted_on_singletons(self):
        verdict = verify_preservation(
            Identity(), scaled_identity(-0.6), all_singletons_rule(), DISC1, BATTERY_ONLY
        )
        ce = verdict.counterexample
        assert verdict.refuted and ce.family == "all_ones" and ce.n == 3
        # smallest eigenvalue is (1 + 2c) x at the first refuting grid point
        assert ce.min_eig == pytest.approx(-0.2 * ce.params["x"], abs=1e-10)

    def test_custom_bump_refuted_under_chain(self):
        bump = Custom(lambda z: 0.5 * z + 0.1 * z * z, name="bump", conjugate_equivariant=True)
        verdict = verify_preservation(Identity(), bump, overlapping_chain_rule(), DISC1, BATTERY_ONLY)
        assert verdict.refuted
        assert verdict.counterexample.family != "random_gram"

    def test_identity_preserved_everywhere(self):
        for rule in (all_singletons_rule(), contiguous_partition_rule(2),
                     proper_subpartition_rule(2), overlapping_chain_rule()):
            verdict = verify_preservation(Identity(), Identity(), rule, DISC1, FAST)
            assert verdict.outcome == OUTCOME_PRESERVED

    def test_non_equivariant_function_fails_fast(self):
        f = Custom(lambda z: complex(z.real, abs(z.imag)), name="fold")
        with pytest.raises(NonHermitianOutputError):
            verify_preservation(Identity(), f, empty_rule(), DISC1, FAST)

    def test_verdict_deterministic(self):
        f = scaled_identity(-0.75)
        a = verify_preservation(Identity(), f, contiguous_partition_rule(3), DISC1, FAST)
        b = verify_preservation(Identity(), f, contiguous_partition_rule(3), DISC1, FAST)
        assert canonical_json(a.to_json()) == canonical_json(b.to_json())

    def test_refutation_is_sound(self):
        verdict = verify_preservation(
            Identity(), scaled_identity(-0.75), contiguous_partition_rule(3), DISC1, FAST
        )
        ce = verdict.counterexample
        assert is_psd(ce.matrix, 1e-10).is_psd
        assert DISC1.contains_array(ce.matrix).all()
        rule = contiguous_partition_rule(3)
        image = apply(
            OperatorSpec(f=scaled_identity(-0.75), pattern=rule.pattern(ce.n), domain=DISC1),
            ce.matrix,
        )
        report = is_psd(image, FAST.tol)
        assert not report.is_psd
        assert report.min_eig == pytest.approx(ce.min_eig, abs=1e-12)

    def test_stats_count_battery_families(self):
        verdict = verify_preservation(
            Identity(), Identity(), overlapping_chain_rule(), DISC1, BATTERY_ONLY
        )
        fams = verdict.stats["families"]
        for family in ("all_ones", "duplicated_pair_gram", "tail_gram", "overlap_probe",
                       "tensor_blowup"):
            assert family in fams

    def test_real_domain_round(self):
        verdict = verify_preservation(
            Identity(), scaled_identity(0.5), contiguous_partition_rule(2),
            Domain.open_sym(1.0), FAST,
        )
        assert verdict.outcome == OUTCOME_PRESERVED

    def test_positive_domain_battery_runs(self):
        dom = Domain.open_pos(1.0)
        verdict = verify_preservation(
            Identity(), scaled_identity(-0.2), proper_subpartition_rule(2), dom, BATTERY_ONLY
        )
        # a negative scalar hits the free diagonal entry f(x) < 0 immediately
        assert verdict.refuted and verdict.counterexample.family == "all_ones"

    def test_scaled_monomial_pair_preserved(self):
        # f = c g for a monomial g stays admissible down to the interval floor
        from psdmask.functions import HerzMonomial

        g = HerzMonomial(1.2, 1, 1)
        f = ScalarMultiple(-0.5, g)
        verdict = verify_preservation(g, f, contiguous_partition_rule(3), DISC1, FAST)
        assert verdict.outcome == OUTCOME_PRESERVED

    def test_half_open_domain_dominance_refuted(self):
        shifted = HerzSeries({(0, 0): 0.1, (1, 0): 1.0})
        verdict = verify_preservation(
            Identity(), shifted, all_singletons_rule(), Domain.half_open_nonneg(1.0),
            BATTERY_ONLY,
        )
        assert verdict.refuted


class TestPerturbedFamilies:
    """Admissible members pass; members nudged outside are caught by the battery alone."""

    def test_in_family_members_pass_each_regime(self):
        cases = [
            (empty_rule(), HerzSeries({(0, 0): 0.2, (1, 0): 0.5, (2, 1): 0.1})),
            (all_singletons_rule(), scaled_identity(0.5)),
            (single_block_rule({0, 1}), scaled_identity(0.3)),
            (contiguous_partition_rule(2), scaled_identity(-1.0)),
            (proper_subpartition_rule(2), scaled_identity(1.0)),
            (overlapping_chain_rule(), Identity()),
        ]
        for rule, f in cases:
            verdict = verify_preservation(Identity(), f, rule, DISC1, FAST)
            assert verdict.outcome == OUTCOME_PRESERVED, (rule.name, verdict.counterexample)

    def test_partition_boundary_passes_and_outside_fails(self):
        rule = contiguous_partition_rule(3)
        at_boundary = scaled_identity(float(Fraction(-1, 2)))
        assert verify_preservation(Identity(), at_boundary, rule, DISC1, FAST).outcome \
            == OUTCOME_PRESERVED
        nudged = scaled_identity(float(Fraction(-1, 2)) - 0.05)
        verdict = verify_preservation(Identity(), nudged, rule, DISC1, BATTERY_ONLY)
        assert verdict.refuted

    def test_dominance_violation_caught(self):
        shifted = HerzSeries({(0, 0): 0.1, (1, 0): 1.0})  # f(x) = x + 0.1
        verdict = verify_preservation(
            Identity(), shifted, all_singletons_rule(), DISC1, BATTERY_ONLY
        )
        assert verdict.refuted and verdict.counterexample.family == "all_ones"

    def test_scalar_under_overlap_caught(self):
        verdict = verify_preservation(
            Identity(), scaled_identity(0.5), overlapping_chain_rule(), DISC1, BATTERY_ONLY
        )
        assert verdict.refuted

    def test_proper_subpartition_negative_scalar_caught(self):
        verdict = verify_preservation(
            Identity(), scaled_identity(-0.05), proper_subpartition_rule(2), DISC1, BATTERY_ONLY
        )
        assert verdict.refuted


class TestRefuteScalar:
    def test_three_blocks(self):
        verdict = refute_scalar_outside_interval(
            contiguous_partition_rule(3), 3, -0.55, Domain.disc(), x=1.0
        )
        assert verdict.refuted
        assert verdict.counterexample.min_eig == pytest.approx(1 + 2 * (-0.55), abs=1e-10)

    def test_two_blocks_above_one(self):
        verdict = refute_scalar_outside_interval(
            contiguous_partition_rule(2), 2, 1.1, Domain.disc(), x=1.0
        )
        assert verdict.counterexample.min_eig == pytest.approx(1 - 1.1, abs=1e-10)

    def test_boundary_is_admissible(self):
        with pytest.raises(CNotOutsideError):
            refute_scalar_outside_interval(
                contiguous_partition_rule(3), 3, Fraction(-1, 2), DISC1
            )

    def test_regime_mismatch(self):
        with pytest.raises(RegimeMismatchError):
            refute_scalar_outside_interval(proper_subpartition_rule(2), 2, -0.6, DISC1)

    def test_wrong_k(self):
        with pytest.raises(RegimeMismatchError):
            refute_scalar_outside_interval(contiguous_partition_rule(3), 4, -0.6, DISC1)


class TestCorrelationBound:
    def test_identity_margin(self):
        assert correlation_bound_check(4, [identity(4)])

    def test_all_ones_boundary(self):
        lo, _ = eig_extremes(4 * identity(4) - all_ones(4))
        assert lo == pytest.approx(0.0, abs=1e-12)
        assert correlation_bound_check(4, [all_ones(4)])

    def test_random_samples(self, rng):
        samples = [sample_correlation(rng, 6) for _ in range(200)]
        assert correlation_bound_check(6, samples)

    def test_non_correlation_fails(self):
        bad = 1.5 * identity(3)  # diagonal is not 1
        assert not correlation_bound_check(3, [bad])


class TestInductionStep:
    def test_reduce_scalar_rationals(self):
        assert reduce_scalar(Fraction(-1, 3)) == Fraction(-1, 2)
        assert reduce_scalar(Fraction(-1, 4)) == Fraction(-1, 3)
        assert reduce_scalar(-0.25) == pytest.approx(-1.0 / 3.0)

    def test_block_sample(self, rng):
        for k, sizes in ((2, [2, 2, 2]), (3, [1, 2, 1, 2])):
            A = exact_hermitian(random_psd(rng, sum(sizes)) + 0.5 * np.eye(sum(sizes)))
            assert induction_step_check(Fraction(-1, k), k, A, sizes)
            assert induction_step_check(Fraction(-1, 2 * k), k, A, sizes)

    def test_requires_positive_definite(self):
        with pytest.raises(ValueError):
            induction_step_check(Fraction(-1, 2), 2, np.zeros((3, 3)), [1, 1, 1])

    def test_rejects_scalar_outside_bracket(self, rng):
        A = exact_hermitian(random_psd(rng, 3) + np.eye(3))
        with pytest.raises(ValueError):
            induction_step_check(Fraction(1, 4), 2, A, [1, 1, 1])


class TestConfig:
    def test_invalid_values(self):
        with pytest.raises(ValueError):
            VerifyConfig(max_n=0)
        with pytest.raises(ValueError):
            VerifyConfig(seed=-1)
        with pytest.raises(ValueError):
            VerifyConfig(tol=-1e-9)
        with pytest.raises(ValueError):
            VerifyConfig(probe_N=2)

    def test_rank_one_only_mode(self):
        cfg = VerifyConfig(max_n=4, samples_per_n=30, rank_one_only=True)
        verdict = verify_preservation(
            Identity(), scaled_identity(0.5), contiguous_partition_rule(2), DISC1, cfg
        )
        assert verdict.outcome == OUTCOME_PRESERVED
