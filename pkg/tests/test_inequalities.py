import itertools
from fractions import Fraction

import pytest

from jointfeas import (
    eval_bell_original,
    eval_chsh,
    eval_spin1_strengthened,
    eval_triple_lower_bound_with_means,
    eval_triple_moment_bounds,
    sqrt_fraction,
)
from jointfeas.errors import ValidationError

F = Fraction
GRID = [F(n, 2) for n in range(-2, 3)]  # -1 .. 1 step 1/2


class TestTripleMomentBounds:
    def test_all_minus_half_violated(self):
        report = eval_triple_moment_bounds("-1/2", "-1/2", "-1/2")
        assert report.verdict == "violated"
        assert report.slack == F(-1, 2)  # sum -3/2 misses -1 by 1/2

    def test_mixed_case_satisfied(self):
        report = eval_triple_moment_bounds("1/2", "-1/2", "-1/2")
        assert report.verdict == "satisfied"
        assert report.detail["lower_slack"] == F(1, 2)
        assert report.detail["upper_slack"] == F(1, 2)

    def test_zero_moments(self):
        report = eval_triple_moment_bounds(0, 0, 0)
        assert report.satisfied and report.slack == 1

    def test_symmetric_under_permutation(self):
        values = (F(1, 4), F(-3, 4), F(1, 2))
        reports = [
            eval_triple_moment_bounds(*perm) for perm in itertools.permutations(values)
        ]
        assert len({(r.verdict, r.slack) for r in reports}) == 1

    def test_out_of_range(self):
        with pytest.raises(ValidationError):
            eval_triple_moment_bounds("3/2", 0, 0)


class TestTripleLowerBoundWithMeans:
    def test_zero_mean_reduction(self):
        for moments in itertools.product(GRID, repeat=3):
            with_means = eval_triple_lower_bound_with_means(*moments, 0, 0, 0)
            plain = eval_triple_moment_bounds(*moments)
            assert with_means.slack == plain.detail["lower_slack"]
            assert with_means.satisfied == (plain.detail["lower_slack"] >= 0)

    def test_quarter_case(self):
        report = eval_triple_lower_bound_with_means(
            "1/4", "1/4", "1/4", "1/4", "1/4", "1/4"
        )
        assert report.satisfied and report.slack == F(1, 4)

    def test_violation_with_nonzero_means(self):
        report = eval_triple_lower_bound_with_means(
            "-1/2", "-1/2", "-1/2", "1/4", "1/4", "1/4"
        )
        assert report.verdict == "violated" and report.slack == F(-2)

    def test_means_strictly_inside(self):
        with pytest.raises(ValidationError):
            eval_triple_lower_bound_with_means(0, 0, 0, 1, 0, 0)

    def test_boundary_instance_is_feasible(self):
        # grid-search a slack-0 instance and confirm with the LP engine
        from jointfeas import FiniteRandomVariable, MomentConstraint, MomentProblem, decide

        found = None
        for e1 in GRID:
            slack = (e1 + 0 + 0) - 2 * (F(1, 4) * 3) + 1
            if slack == 0:
                found = (e1, F(0), F(0))
                break
        assert found is not None  # e1 = 1/2
        report = eval_triple_lower_bound_with_means(*found, "1/4", "1/4", "1/4")
        assert report.satisfied and report.slack == 0
        vs = tuple(FiniteRandomVariable(n, (F(-1), F(1))) for n in "XYZ")
        cons = [MomentConstraint.of({n: 1}, F(1, 4)) for n in "XYZ"]
        cons += [
            MomentConstraint.of({a: 1, b: 1}, m)
            for (a, b), m in zip((("X", "Y"), ("Y", "Z"), ("X", "Z")), found)
        ]
        assert decide(MomentProblem(vs, tuple(cons))).feasible


class TestBellOriginal:
    def test_not_sufficient_direction(self):
        report = eval_bell_original("-1/2", "-1/2", "-1/2")
        assert report.satisfied and report.slack == F(1, 2)

    def test_not_necessary_direction(self):
        report = eval_bell_original("1/2", "-1/2", "-1/2")
        assert report.verdict == "violated" and report.slack == F(-1, 2)

    def test_quantum_violation_with_exact_surds(self):
        m30 = -(sqrt_fraction(3)) / 2
        report = eval_bell_original(m30, m30, F(-1, 2))
        assert report.verdict == "violated"
        lo, hi = report.slack.enclosure(F(1, 10**12))
        assert hi - lo <= F(1, 10**12)
        assert hi < 0  # the enclosure certifies the sign
        # slack = 3/2 - sqrt(3)
        assert report.slack.a == F(3, 2) and report.slack.b == -1 and report.slack.d == 3


class TestCHSH:
    def test_boundary_combination(self):
        report = eval_chsh("1/2", "1/2", "1/2", "-1/2")
        assert report.satisfied and report.slack == 0

    def test_quantum_violation(self):
        h = sqrt_fraction(2) / 2
        report = eval_chsh(h, h, h, -h)
        assert report.verdict == "violated"
        # slack = 2 - 2 sqrt(2)
        assert report.slack.a == 2 and report.slack.b == -2 and report.slack.d == 2

    def test_all_zero(self):
        report = eval_chsh(0, 0, 0, 0)
        assert report.satisfied and report.slack == 2

    def test_all_four_sign_patterns_checked(self):
        # violating only the pattern with the minus on the first moment
        report = eval_chsh("-1/2", 1, 1, 1)
        assert report.verdict == "violated"
        assert report.detail["combination_0"] == F(7, 2)

    def test_relabeling_symmetry(self):
        # swapping the two settings on either side permutes the moments
        # but leaves the four-inequality verdict and slack unchanged
        moments = (F(3, 4), F(-1, 4), F(1, 2), F(1, 4))
        eab, eabp, eapb, eapbp = moments
        base = eval_chsh(*moments)
        swap_b = eval_chsh(eabp, eab, eapbp, eapb)
        swap_a = eval_chsh(eapb, eapbp, eab, eabp)
        assert base.slack == swap_b.slack == swap_a.slack
        assert base.verdict == swap_b.verdict == swap_a.verdict

    def test_higher_spin_bound(self):
        report = eval_chsh(1, 1, 1, 1, j=F(1))
        assert report.satisfied and report.slack == 0  # |0| + |2| = 2 = 2j
        report = eval_chsh("9/4", 0, 0, 0, j=F(3, 2))
        assert report.satisfied and report.slack == F(3, 4)
        with pytest.raises(ValidationError):
            eval_chsh(2, 0, 0, 0, j=F(1))  # outside [-1, 1] for spin 1

    def test_normalized_mode(self):
        # |1 - 1| + |1 + (-1)| = 0 against the normalized bound 2
        report = eval_chsh(1, 1, 1, -1, j=F(1), normalized=True)
        assert report.satisfied and report.slack == 2
        with pytest.raises(ValidationError):
            eval_chsh(0, 0, 0, 0, j=F(1, 3))


class TestSpin1Strengthened:
    def test_extreme_moments_kill_extra_term(self):
        report = eval_spin1_strengthened(1, 1, 1, 1)
        assert report.satisfied and report.slack == 0

    def test_zero_moments_boundary(self):
        report = eval_spin1_strengthened(0, 0, 0, 0)
        assert report.satisfied and report.slack == 0
        assert report.detail["extra_term"] == 2

    def test_half_moments(self):
        report = eval_spin1_strengthened("1/2", "1/2", "1/2", "1/2")
        assert report.satisfied and report.slack == F(1, 2)

    def test_sharper_than_plain_chsh(self):
        for moments in itertools.product(GRID, repeat=4):
            plain = eval_chsh(*moments, j=F(1))
            sharp = eval_spin1_strengthened(*moments)
            # extra term is nonnegative, so the sharpened slack never exceeds
            assert sharp.slack <= plain.slack
