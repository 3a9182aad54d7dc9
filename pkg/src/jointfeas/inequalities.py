"""Closed-form moment inequalities with exact slacks.

Each evaluator returns an :class:`InequalityReport` whose verdict is
tied to the sign of an exactly computed slack (distance to the binding
bound): negative slack means violated, zero sits on the boundary and
counts as satisfied, matching the non-strict inequalities throughout.
Inputs may be rationals or quadratic surds (e.g. -sqrt(3)/2), and all
comparisons are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .algebraic import ExactNumber, exact_abs, exact_min, exact_sign, make_exact
from .errors import ValidationError

__all__ = [
    "InequalityReport",
    "eval_bell_original",
    "eval_chsh",
    "eval_spin1_strengthened",
    "eval_triple_lower_bound_with_means",
    "eval_triple_moment_bounds",
]


@dataclass(frozen=True)
class InequalityReport:
    inequality_id: str
    inputs: Mapping[str, ExactNumber]
    verdict: str  # "satisfied" | "violated"
    slack: ExactNumber
    notes: str = ""
    detail: dict = field(default_factory=dict)

    @property
    def satisfied(self) -> bool:
        return self.verdict == "satisfied"


def _report(inequality_id: str, inputs: Mapping[str, ExactNumber], slack: ExactNumber,
            notes: str = "", **detail) -> InequalityReport:
    verdict = "violated" if exact_sign(slack) < 0 else "satisfied"
    return InequalityReport(inequality_id, dict(inputs), verdict, slack, notes, dict(detail))


def _within_unit(name: str, value: ExactNumber) -> ExactNumber:
    if exact_sign(value - 1) > 0 or exact_sign(value + 1) < 0:
        raise ValidationError(f"{name} = {value} is outside [-1, 1]")
    return value


def eval_triple_moment_bounds(exy, eyz, exz) -> InequalityReport:
    """Joint-distribution bounds for three zero-mean +-1 observables.

    -1 <= E(XY) + E(YZ) + E(XZ) <= 1 + 2*min(E(XY), E(YZ), E(XZ))

    For this symmetric two-valued case the pair of bounds is necessary
    and sufficient for a joint distribution, which the test suite
    checks against the LP engine over a full moment grid.
    """
    e = {k: _within_unit(k, make_exact(v)) for k, v in (("exy", exy), ("eyz", eyz), ("exz", exz))}
    total = e["exy"] + e["eyz"] + e["exz"]
    lower_slack = total + 1
    upper_slack = 1 + 2 * exact_min(e["exy"], e["eyz"], e["exz"]) - total
    slack = exact_min(lower_slack, upper_slack)
    return _report(
        "triple_moment_bounds", e, slack,
        lower_slack=lower_slack, upper_slack=upper_slack, sum=total,
    )


def eval_triple_lower_bound_with_means(exy, eyz, exz, x0, y0, z0) -> InequalityReport:
    """Lower bound for +-1 observables with arbitrary means:

    E(XY) + E(YZ) + E(XZ) - 2(x0 + y0 + z0) >= -1

    Necessary for a joint distribution; at zero means it reduces to the
    lower half of :func:`eval_triple_moment_bounds`.
    """
    e = {k: _within_unit(k, make_exact(v)) for k, v in (("exy", exy), ("eyz", eyz), ("exz", exz))}
    means = {k: make_exact(v) for k, v in (("x0", x0), ("y0", y0), ("z0", z0))}
    for k, v in means.items():
        if exact_sign(v - 1) >= 0 or exact_sign(v + 1) <= 0:
            raise ValidationError(f"{k} = {v} must lie strictly inside (-1, 1)")
    slack = (
        e["exy"] + e["eyz"] + e["exz"]
        - 2 * (means["x0"] + means["y0"] + means["z0"])
        + 1
    )
    return _report("triple_lower_bound_with_means", {**e, **means}, slack)


def eval_bell_original(exy, eyz, exz) -> InequalityReport:
    """Bell's original three-observable inequality:

    1 + E(YZ) >= | E(XY) - E(XZ) |

    Neither necessary nor sufficient for a joint distribution of
    zero-mean +-1 observables; the corpus reproduces both failure
    directions.
    """
    e = {k: _within_unit(k, make_exact(v)) for k, v in (("exy", exy), ("eyz", eyz), ("exz", exz))}
    slack = 1 + e["eyz"] - exact_abs(e["exy"] - e["exz"])
    return _report("bell_original", e, slack)


def eval_chsh(
    eab, eabp, eapb, eapbp, j: Fraction = Fraction(1, 2), normalized: bool = False
) -> InequalityReport:
    """CHSH-form inequalities for two settings per side.

    Default convention (j = 1/2): observables valued +-1, inputs in
    [-1, 1], all four sign patterns

        -2 <= +-E(AB) +- E(AB') +- E(A'B) +- E(A'B') <= 2

    with an odd number of minus signs; necessary and sufficient for a
    joint distribution at zero means.  For higher spin j the observables
    take values in {-j, ..., j}, inputs lie in [-j^2, j^2], and the
    single bound

        |E(AB) - E(AB')| + |E(A'B) + E(A'B')| <= 2j

    is evaluated; with ``normalized=True`` the inputs are divided by
    j^2 (observables scaled to +-1) and the bound 2 applies.
    """
    j = Fraction(j)
    if j <= 0 or (2 * j).denominator != 1:
        raise ValidationError(f"spin must be a positive half-integer, got {j}")
    e = {k: make_exact(v) for k, v in (("eab", eab), ("eabp", eabp), ("eapb", eapb), ("eapbp", eapbp))}

    if j == Fraction(1, 2):
        for k, v in e.items():
            _within_unit(k, v)
        sums = {}
        slacks = []
        for flip in range(4):
            signs = [1, 1, 1, 1]
            signs[flip] = -1
            s = (
                signs[0] * e["eab"] + signs[1] * e["eabp"]
                + signs[2] * e["eapb"] + signs[3] * e["eapbp"]
            )
            sums[f"combination_{flip}"] = s
            slacks.append(2 - s)
            slacks.append(s + 2)
        slack = exact_min(*slacks)
        return _report("chsh", e, slack, notes="two-valued convention, four inequalities", **sums)

    bound = j * j
    for k, v in e.items():
        if exact_sign(v - bound) > 0 or exact_sign(v + bound) < 0:
            raise ValidationError(f"{k} = {v} is outside [-{bound}, {bound}] for spin {j}")
    if normalized:
        e = {k: v / bound for k, v in e.items()}
        limit: ExactNumber = Fraction(2)
        note = f"spin {j}, observables normalized to +-1, bound 2"
    else:
        limit = 2 * j
        note = f"spin {j}, single absolute bound 2j = {limit}"
    lhs = exact_abs(e["eab"] - e["eabp"]) + exact_abs(e["eapb"] + e["eapbp"])
    return _report("chsh", e, limit - lhs, notes=note, lhs=lhs)


def eval_spin1_strengthened(eab, eabp, eapb, eapbp) -> InequalityReport:
    """Sharpened three-valued (spin-1) variant of the CHSH bound:

    |E(AB)-E(AB')| + |E(A'B)+E(A'B')| + 2(|E(AB)|-1)(|E(AB')|-1) <= 2
    """
    e = {k: _within_unit(k, make_exact(v)) for k, v in (("eab", eab), ("eabp", eabp), ("eapb", eapb), ("eapbp", eapbp))}
    extra = 2 * (exact_abs(e["eab"]) - 1) * (exact_abs(e["eabp"]) - 1)
    lhs = exact_abs(e["eab"] - e["eabp"]) + exact_abs(e["eapb"] + e["eapbp"]) + extra
    return _report("spin1_strengthened", e, 2 - lhs, lhs=lhs, extra_term=extra)
