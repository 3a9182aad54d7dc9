"""Problem and report files: schema validation and canonical JSON.

Problem files (schema ``jointfeas/problem/v1``) come in three kinds:

* ``finite-moment`` - variables with rational supports plus either
  moment ``constraints`` or an explicit ``distribution``.
* ``ghz``           - phase quadruples in half-pi units (defaulted).
* ``gaussian``      - dense correlation matrix with ``null`` marking
  missing entries, optional names/means/variances.

Exact values are written as ``"p/q"`` strings (integers allowed);
quadratic irrationals as ``{"poly": [c0, c1, c2], "interval": [lo, hi]}``
with the monic minimal polynomial c0 + c1 x + x^2 and a rational
enclosure selecting the root; angle shorthand
``{"minus_cos_degrees": n}`` is accepted for n a multiple of 30 or 45.

Validation is strict: unknown fields are rejected, and errors carry the
field path (e.g. ``constraints[2].target``).  Reports are serialized
canonically (sorted keys, fixed separators, trailing newline) so a
fixed engine build produces byte-identical reports for identical
inputs.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Mapping, Sequence

from . import __version__
from .algebraic import ExactNumber, Surd, as_fraction, make_surd, sqrt_fraction
from .errors import ValidationError
from .feasibility import MomentConstraint, MomentProblem
from .gaussian import PartialCorrelationMatrix
from .ghz import GHZConfig, build_ghz_problem
from .probability import FiniteRandomVariable, JointDistribution, distribution_from_values

__all__ = [
    "PROBLEM_SCHEMA",
    "REPORT_SCHEMA",
    "canonical_dumps",
    "encode_exact",
    "load_problem_file",
    "parse_exact",
    "parse_problem",
    "render_report",
]

PROBLEM_SCHEMA = "jointfeas/problem/v1"
REPORT_SCHEMA = "jointfeas/report/v1"

# cos(n degrees) for the supported exact angles, as (rational, radicand) pairs
# encoding r * sqrt(d); d == 1 for rational cosines.
_COS_TABLE: dict[int, tuple[Fraction, int]] = {
    0: (Fraction(1), 1),
    30: (Fraction(1, 2), 3),
    45: (Fraction(1, 2), 2),
    60: (Fraction(1, 2), 1),
    90: (Fraction(0), 1),
    120: (Fraction(-1, 2), 1),
    135: (Fraction(-1, 2), 2),
    150: (Fraction(-1, 2), 3),
    180: (Fraction(-1), 1),
}


def _fail(path: str, message: str) -> ValidationError:
    return ValidationError(message, path=path)


def _expect_keys(obj: Mapping[str, Any], path: str, required: set[str], optional: set[str]) -> None:
    if not isinstance(obj, Mapping):
        raise _fail(path, f"expected an object, got {type(obj).__name__}")
    unknown = set(obj) - required - optional
    if unknown:
        raise _fail(path, f"unknown fields {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise _fail(path, f"missing required fields {sorted(missing)}")


# ---------------------------------------------------------------------------
# Exact numbers
# ---------------------------------------------------------------------------


def parse_exact(value: Any, path: str = "value") -> ExactNumber:
    """Parse an exact number in any of the supported spellings."""
    if isinstance(value, bool):
        raise _fail(path, "booleans are not numbers")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise _fail(path, "floats are not exact; write the value as a 'p/q' string")
    if isinstance(value, str):
        try:
            return as_fraction(value)
        except ValidationError as exc:
            raise _fail(path, str(exc)) from None
    if isinstance(value, Mapping):
        if "minus_cos_degrees" in value:
            _expect_keys(value, path, {"minus_cos_degrees"}, set())
            deg = value["minus_cos_degrees"]
            if not isinstance(deg, int):
                raise _fail(path, "minus_cos_degrees must be an integer")
            reduced = deg % 360
            if reduced > 180:
                reduced = 360 - reduced
            if reduced not in _COS_TABLE:
                raise _fail(
                    path,
                    f"angle {deg} degrees is not supported; use multiples of 30 or 45",
                )
            r, d = _COS_TABLE[reduced]
            return make_surd(Fraction(0), -r, d)
        if "poly" in value:
            _expect_keys(value, path, {"poly", "interval"}, set())
            return _parse_poly_root(value["poly"], value["interval"], path)
        raise _fail(path, "unrecognized exact-number object")
    raise _fail(path, f"cannot read an exact number from {type(value).__name__}")


def _parse_poly_root(poly: Any, interval: Any, path: str) -> ExactNumber:
    if not isinstance(poly, Sequence) or isinstance(poly, str):
        raise _fail(f"{path}.poly", "expected a coefficient list")
    coeffs = [parse_exact(c, f"{path}.poly[{i}]") for i, c in enumerate(poly)]
    if any(isinstance(c, Surd) for c in coeffs):
        raise _fail(f"{path}.poly", "polynomial coefficients must be rational")
    if not isinstance(interval, Sequence) or len(interval) != 2:
        raise _fail(f"{path}.interval", "expected [lo, hi]")
    lo = parse_exact(interval[0], f"{path}.interval[0]")
    hi = parse_exact(interval[1], f"{path}.interval[1]")
    if isinstance(lo, Surd) or isinstance(hi, Surd):
        raise _fail(f"{path}.interval", "interval endpoints must be rational")
    if len(coeffs) == 2:
        # c0 + c1 x = 0
        if coeffs[1] == 0:
            raise _fail(f"{path}.poly", "degree-1 polynomial with zero leading coefficient")
        return -coeffs[0] / coeffs[1]
    if len(coeffs) != 3:
        raise _fail(f"{path}.poly", "only degree 1 or 2 polynomials are supported")
    c0, c1, c2 = coeffs
    if c2 == 0:
        raise _fail(f"{path}.poly", "degree-2 polynomial with zero leading coefficient")
    # roots: (-c1 +- sqrt(c1^2 - 4 c2 c0)) / (2 c2)
    disc = c1 * c1 - 4 * c2 * c0
    if disc < 0:
        raise _fail(f"{path}.poly", "polynomial has no real roots")
    half = sqrt_fraction(disc)
    for sign in (1, -1):
        root = (-c1 + sign * half) / (2 * c2)
        root_lo, root_hi = (root, root) if isinstance(root, Fraction) else root.enclosure()
        if lo <= root_lo and root_hi <= hi:
            return root
    raise _fail(f"{path}.interval", "interval does not isolate a root of the polynomial")


def encode_exact(value: ExactNumber) -> Any:
    """Canonical JSON form: 'p/q' strings, or poly+interval for surds."""
    if isinstance(value, Fraction):
        return str(value)
    # monic minimal polynomial of a + b sqrt(d): x^2 - 2a x + (a^2 - b^2 d)
    c1 = -2 * value.a
    c0 = value.a * value.a - value.b * value.b * value.d
    lo, hi = value.enclosure()
    return {
        "poly": [str(c0), str(c1), "1"],
        "interval": [str(lo), str(hi)],
    }


# ---------------------------------------------------------------------------
# Problem files
# ---------------------------------------------------------------------------


def _parse_variables(spec: Any, path: str) -> tuple[FiniteRandomVariable, ...]:
    if not isinstance(spec, Sequence) or isinstance(spec, str) or not spec:
        raise _fail(path, "expected a non-empty list of variables")
    out = []
    for i, item in enumerate(spec):
        vpath = f"{path}[{i}]"
        _expect_keys(item, vpath, {"name", "support"}, set())
        name = item["name"]
        if not isinstance(name, str):
            raise _fail(f"{vpath}.name", "expected a string")
        support = item["support"]
        if not isinstance(support, Sequence) or isinstance(support, str):
            raise _fail(f"{vpath}.support", "expected a list of rationals")
        values = []
        for j, v in enumerate(support):
            parsed = parse_exact(v, f"{vpath}.support[{j}]")
            if isinstance(parsed, Surd):
                raise _fail(f"{vpath}.support[{j}]", "supports must be rational")
            values.append(parsed)
        try:
            out.append(FiniteRandomVariable(name, tuple(values)))
        except ValidationError as exc:
            raise _fail(vpath, str(exc)) from None
    return tuple(out)


def _parse_finite_moment(obj: Mapping[str, Any]) -> dict[str, Any]:
    _expect_keys(
        obj,
        "$",
        {"schema", "kind", "variables"},
        {"label", "constraints", "distribution", "options"},
    )
    variables = _parse_variables(obj["variables"], "variables")
    options = obj.get("options", {})
    _expect_keys(options, "options", set(), {"atom_cap", "allow_higher_order"})
    atom_cap = options.get("atom_cap")
    if atom_cap is not None and (not isinstance(atom_cap, int) or atom_cap <= 0):
        raise _fail("options.atom_cap", "expected a positive integer")
    allow_higher = bool(options.get("allow_higher_order", False))

    has_constraints = "constraints" in obj
    has_distribution = "distribution" in obj
    if has_constraints == has_distribution:
        raise _fail("$", "exactly one of 'constraints' or 'distribution' is required")

    result: dict[str, Any] = {
        "kind": "finite-moment",
        "label": obj.get("label", ""),
        "variables": variables,
        "atom_cap": atom_cap,
    }

    if has_constraints:
        spec = obj["constraints"]
        if not isinstance(spec, Sequence) or isinstance(spec, str):
            raise _fail("constraints", "expected a list")
        constraints = []
        exact_targets = True
        for i, item in enumerate(spec):
            cpath = f"constraints[{i}]"
            _expect_keys(item, cpath, {"exponents", "target"}, {"relation"})
            exps = item["exponents"]
            if not isinstance(exps, Mapping) or not exps:
                raise _fail(f"{cpath}.exponents", "expected a non-empty object")
            for n, k in exps.items():
                if not isinstance(k, int) or k <= 0:
                    raise _fail(f"{cpath}.exponents.{n}", "exponents are positive integers")
            relation = item.get("relation", "==")
            if relation not in ("==", "<=", ">="):
                raise _fail(f"{cpath}.relation", "expected one of '==', '<=', '>='")
            target = parse_exact(item["target"], f"{cpath}.target")
            if isinstance(target, Surd):
                exact_targets = False
            constraints.append((dict(exps), target, relation))
        result["constraints"] = constraints
        result["rational_targets"] = exact_targets
        if exact_targets:
            try:
                result["problem"] = MomentProblem(
                    variables,
                    tuple(MomentConstraint.of(e, t, r) for e, t, r in constraints),
                    label=result["label"],
                    allow_higher_order=allow_higher,
                )
            except ValidationError as exc:
                raise _fail("constraints", str(exc)) from None
    else:
        spec = obj["distribution"]
        _expect_keys(spec, "distribution", {"mass"}, set())
        mass_obj = spec["mass"]
        if not isinstance(mass_obj, Mapping) or not mass_obj:
            raise _fail("distribution.mass", "expected a non-empty object")
        value_mass = {}
        for key, p in mass_obj.items():
            parts = [s.strip() for s in str(key).split(",")]
            if len(parts) != len(variables):
                raise _fail(f"distribution.mass[{key!r}]", "outcome arity mismatch")
            outcome = tuple(parse_exact(s, f"distribution.mass[{key!r}]") for s in parts)
            value_mass[outcome] = parse_exact(p, f"distribution.mass[{key!r}]")
        try:
            result["distribution"] = distribution_from_values(variables, value_mass)
        except ValidationError as exc:
            raise _fail("distribution", str(exc)) from None
    return result


def _parse_ghz(obj: Mapping[str, Any]) -> dict[str, Any]:
    _expect_keys(obj, "$", {"schema", "kind"}, {"label", "quadruples", "options"})
    _expect_keys(obj.get("options", {}), "options", set(), {"atom_cap"})
    quadruples = obj.get("quadruples")
    if quadruples is None:
        config = GHZConfig()
    else:
        if not isinstance(quadruples, Sequence) or isinstance(quadruples, str):
            raise _fail("quadruples", "expected a list of four-phase lists")
        parsed = []
        for i, quad in enumerate(quadruples):
            if (
                not isinstance(quad, Sequence)
                or isinstance(quad, str)
                or len(quad) != 4
                or not all(isinstance(p, int) for p in quad)
            ):
                raise _fail(f"quadruples[{i}]", "expected four integer half-pi phases")
            parsed.append(tuple(quad))
        try:
            config = GHZConfig(tuple(parsed))
        except ValidationError as exc:
            raise _fail("quadruples", str(exc)) from None
    return {
        "kind": "ghz",
        "label": obj.get("label", ""),
        "config": config,
        "problem": build_ghz_problem(config),
        "atom_cap": obj.get("options", {}).get("atom_cap"),
    }


def _parse_gaussian(obj: Mapping[str, Any]) -> dict[str, Any]:
    _expect_keys(
        obj, "$", {"schema", "kind", "matrix"}, {"label", "names", "means", "variances", "options"}
    )
    _expect_keys(obj.get("options", {}), "options", set(), {"tol"})
    matrix = obj["matrix"]
    if not isinstance(matrix, Sequence) or isinstance(matrix, str):
        raise _fail("matrix", "expected a list of rows")
    try:
        corr = PartialCorrelationMatrix.from_rows(matrix)
    except ValidationError as exc:
        raise _fail("matrix", str(exc)) from None
    n = corr.dimension
    names = obj.get("names", [f"X{i+1}" for i in range(n)])
    if len(names) != n or len(set(names)) != n:
        raise _fail("names", f"expected {n} distinct names")
    tol = obj.get("options", {}).get("tol", None)
    if tol is not None and (isinstance(tol, bool) or not isinstance(tol, (int, float)) or tol < 0):
        raise _fail("options.tol", "expected a nonnegative number")
    exact_entries: list[list[Fraction | None]] = []
    for i, row in enumerate(matrix):
        exact_row: list[Fraction | None] = []
        for j, v in enumerate(row):
            if v is None:
                exact_row.append(None)
            else:
                parsed = parse_exact(v, f"matrix[{i}][{j}]")
                if isinstance(parsed, Surd):
                    raise _fail(f"matrix[{i}][{j}]", "correlations must be rational")
                exact_row.append(parsed)
        exact_entries.append(exact_row)
    return {
        "kind": "gaussian",
        "label": obj.get("label", ""),
        "names": list(names),
        "correlations": corr,
        "exact_entries": exact_entries,
        "means": obj.get("means"),
        "variances": obj.get("variances"),
        "tol": tol,
    }


def parse_problem(obj: Any) -> dict[str, Any]:
    """Validate a problem object and return its parsed contents."""
    if not isinstance(obj, Mapping):
        raise _fail("$", "problem file must be a JSON object")
    schema = obj.get("schema")
    if schema != PROBLEM_SCHEMA:
        raise _fail("schema", f"expected {PROBLEM_SCHEMA!r}, got {schema!r}")
    kind = obj.get("kind")
    if kind == "finite-moment":
        parsed = _parse_finite_moment(obj)
    elif kind == "ghz":
        parsed = _parse_ghz(obj)
    elif kind == "gaussian":
        parsed = _parse_gaussian(obj)
    else:
        raise _fail("kind", f"unknown kind {kind!r}")
    parsed["echo"] = _jsonify(obj)
    return parsed


def load_problem_file(path: str) -> dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            path=path,
        ) from None
    return parse_problem(obj)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def _jsonify(value: Any) -> Any:
    """Recursively normalize to JSON-safe structures with exact rendering."""
    if isinstance(value, (Fraction, Surd)):
        return encode_exact(value)
    if isinstance(value, Mapping):
        return {str(k): _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if hasattr(value, "tolist"):  # numpy arrays
        return _jsonify(value.tolist())
    raise TypeError(f"cannot serialize {type(value).__name__}")


def serialize_distribution(dist: JointDistribution) -> dict[str, Any]:
    return {
        "variables": [
            {"name": v.name, "support": [str(x) for x in v.support]} for v in dist.variables
        ],
        "mass": {
            ",".join(str(x) for x in dist.values_at(atom)): str(p)
            for atom, p in dist.mass.items()
        },
    }


def render_report(command: str, problem_echo: Any, results: Mapping[str, Any]) -> str:
    """Canonical report text: identical inputs give identical bytes."""
    report = {
        "schema": REPORT_SCHEMA,
        "engine": {"name": "jointfeas", "version": __version__},
        "command": command,
        "input": _jsonify(problem_echo),
        "results": _jsonify(results),
    }
    return canonical_dumps(report)


def canonical_dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"
