"""JSON schemas, validation and canonical serialization.

Every number in a file is a rational string (``"p/q"`` or ``"p"``).  Output
is byte stable: keys are sorted and rationals are canonical.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .cohomology import Cochain, TableCochain, _slots
from .exact import PoleReport, RegulatedScalar, exact_limit, format_rational, parse_rational
from .reduced import (
    Constraint,
    ConstraintSystem,
    QuadraticForm,
    ReducedSpace,
    SpaceError,
    StructureConstants,
)
from .transform import TransformMatrix


class InputError(ValueError):
    """Malformed or inconsistent input; the CLI maps it to exit status 2."""


EPS_POLICIES = ("generic", "limit", "laurent")


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _load(text, what: str):
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: invalid JSON ({exc})") from None


def _rational(x, path: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise InputError(f"{path}: expected a rational string, got {x!r}")
    try:
        return parse_rational(str(x))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _expect(cond: bool, path: str, msg: str):
    if not cond:
        raise InputError(f"{path}: {msg}")


# ---------------------------------------------------------------------------
# scalars


def scalar_json(x, eps: str = "generic"):
    """Rational string, or for regulated values a policy-dependent object."""
    if not isinstance(x, RegulatedScalar):
        return format_rational(x)
    if x.is_constant():
        return format_rational(x.finite_limit())
    if eps == "generic":
        return x.to_json()
    if eps == "limit":
        lim = exact_limit(x)
        if isinstance(lim, PoleReport):
            return {"pole": lim.order, "leading": format_rational(lim.leading)}
        return format_rational(lim)
    if eps == "laurent":
        return {"laurent": {str(k): format_rational(v) for k, v in sorted(x.laurent(0).items())}}
    raise InputError(f"unknown eps policy {eps!r}")


def matrix_json(mat: TransformMatrix, eps: str = "generic") -> dict:
    return {
        "rows": [list(r) for r in mat.rows],
        "cols": [list(c) for c in mat.cols],
        "entries": [[scalar_json(x, eps) for x in row] for row in mat.entries],
    }


# ---------------------------------------------------------------------------
# reduced space and structure constants


def parse_space(text) -> ReducedSpace:
    data = _load(text, "space")
    _expect(isinstance(data, dict) and isinstance(data.get("grades"), list), "space", 'expected {"grades": [...]}')
    grades: dict[int, list] = {}
    for i, g in enumerate(data["grades"]):
        path = f"space.grades[{i}]"
        _expect(isinstance(g, dict), path, "expected an object")
        dim = g.get("dim")
        _expect(isinstance(dim, int) and not isinstance(dim, bool), f"{path}.dim", "expected an integer")
        fields = g.get("fields")
        _expect(isinstance(fields, list) and all(isinstance(f, str) for f in fields), f"{path}.fields", "expected a list of labels")
        if dim < 1:
            raise InputError(
                f"{path}.dim: grade {dim} violates the unitarity bound; the identity field is excluded from the reduced space"
            )
        grades.setdefault(dim, []).extend(fields)
    try:
        return ReducedSpace(grades)
    except SpaceError as exc:
        raise InputError(f"space: {exc}") from None


def space_json(space: ReducedSpace) -> dict:
    return {"grades": [{"dim": a, "fields": list(fs)} for a, fs in space.grades.items()]}


def parse_structure_constants(text, space: ReducedSpace) -> StructureConstants:
    data = _load(text, "structure constants")
    _expect(isinstance(data, list), "F", "expected a list of entries")
    entries = []
    for i, e in enumerate(data):
        path = f"F[{i}]"
        _expect(isinstance(e, dict), path, "expected an object")
        for key in ("A", "B", "C"):
            lab = e.get(key)
            _expect(isinstance(lab, str), f"{path}.{key}", "expected a label")
            try:
                space.grade(lab)
            except SpaceError as exc:
                raise InputError(f"{path}.{key}: {exc}") from None
        entries.append((e["A"], e["B"], e["C"], _rational(e.get("value"), f"{path}.value")))
    try:
        return StructureConstants.from_entries(space, entries)
    except SpaceError as exc:
        raise InputError(str(exc)) from None


def structure_constants_json(F: StructureConstants) -> list:
    return [
        {"A": a, "B": b, "C": c, "value": format_rational(v)} for (a, b, c), v in sorted(F.table.items()) if v != 0
    ]


# ---------------------------------------------------------------------------
# Gram matrices


def parse_gram(text, space: ReducedSpace | None = None) -> QuadraticForm:
    data = _load(text, "gram")
    _expect(isinstance(data, dict), "gram", "expected {grade: matrix}")
    blocks = {}
    for key, mat in data.items():
        path = f"gram[{key!r}]"
        try:
            a = int(key)
        except ValueError:
            raise InputError(f"{path}: grade keys must be integers") from None
        _expect(isinstance(mat, list) and all(isinstance(r, list) for r in mat), path, "expected a matrix")
        n = len(mat)
        _expect(all(len(r) == n for r in mat), path, "matrix must be square")
        if space is not None:
            _expect(space.populated(a), path, f"grade {a} has no fields")
            _expect(n == len(space.fields(a)), path, f"expected a {len(space.fields(a))}x{len(space.fields(a))} matrix")
        blocks[a] = [[_rational(x, f"{path}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(mat)]
    if space is not None:
        for a in space.grades:
            _expect(a in blocks, "gram", f"missing block for grade {a}")
    return QuadraticForm(blocks)


def gram_json(G: QuadraticForm) -> dict:
    return {str(a): [[format_rational(x) for x in row] for row in m] for a, m in sorted(G.blocks.items())}


# ---------------------------------------------------------------------------
# constraint systems


def constraint_json(c: Constraint) -> dict:
    monos = [
        {"coeff": format_rational(v), "vars": [list(v1), list(v2)]} for (v1, v2), v in sorted(c.monomials.items())
    ]
    return {"context": dict(c.context), "monomials": monos, "epsOrder": c.eps_order}


def constraints_json(system: ConstraintSystem) -> dict:
    return {"meta": dict(system.meta), "constraints": [constraint_json(c) for c in system.constraints]}


def parse_constraints(text) -> ConstraintSystem:
    data = _load(text, "constraints")
    items = data["constraints"] if isinstance(data, dict) else data
    _expect(isinstance(items, list), "constraints", "expected a list")
    out = []
    for i, c in enumerate(items):
        path = f"constraints[{i}]"
        monos = {}
        for j, mono in enumerate(c.get("monomials", [])):
            v1, v2 = (tuple(v) for v in mono["vars"])
            monos[(v1, v2)] = _rational(mono["coeff"], f"{path}.monomials[{j}].coeff")
        out.append(Constraint(dict(c.get("context", {})), monos, int(c.get("epsOrder", 0))))
    meta = data.get("meta", {}) if isinstance(data, dict) else {}
    return ConstraintSystem(out, meta)


def violations_json(report: dict) -> dict:
    return {
        "checked": report["checked"],
        "violations": [
            {"context": v["context"], "epsOrder": v["epsOrder"], "residual": format_rational(v["residual"])}
            for v in report["violations"]
        ],
    }


# ---------------------------------------------------------------------------
# cochains


def cochain_json(omega: Cochain, sector=None) -> dict:
    """Nonzero components of a cochain; non-table cochains are read off a sector."""
    if isinstance(omega, TableCochain):
        items = sorted(omega.items())
    else:
        if sector is None:
            raise ValueError("need a sector to serialize a computed cochain")
        data: dict = {}
        for xs, m, lab in _slots(omega.space, omega.degree, sector):
            x = omega.value(xs, m).get(lab, 0)
            x = x.finite_limit() if isinstance(x, RegulatedScalar) else x
            if x != 0:
                data.setdefault((xs, m), {})[lab] = x
        items = sorted(data.items())
    comps = []
    for (xs, m), vec in items:
        vec = {k: v for k, v in vec.items() if v != 0}
        if vec:
            comps.append({"args": list(xs), "m": list(m), "value": {k: scalar_json(v) for k, v in sorted(vec.items())}})
    return {"degree": omega.degree, "components": comps}


def _parse_cochain_obj(data, space: ReducedSpace, path: str, degree: int | None = None) -> TableCochain:
    _expect(isinstance(data, dict), path, 'expected {"degree": n, "components": [...]}')
    deg = data.get("degree", degree)
    _expect(isinstance(deg, int) and deg >= 1, f"{path}.degree", "expected a positive integer")
    if degree is not None:
        _expect(deg == degree, f"{path}.degree", f"expected degree {degree}")
    table = {}
    for i, comp in enumerate(data.get("components", [])):
        cp = f"{path}.components[{i}]"
        args = comp.get("args")
        _expect(isinstance(args, list) and len(args) == deg, f"{cp}.args", f"expected {deg} labels")
        m = comp.get("m", [])
        want = deg - 1 if deg >= 2 else 0
        _expect(isinstance(m, list) and len(m) == want and all(isinstance(k, int) and k >= 0 for k in m), f"{cp}.m", f"expected {want} nonnegative integers")
        try:
            grades = [space.grade(x) for x in args]
            vec = {}
            for lab, v in comp.get("value", {}).items():
                space.grade(lab)
                vec[lab] = _rational(v, f"{cp}.value.{lab}")
        except SpaceError as exc:
            raise InputError(f"{cp}: {exc}") from None
        target = sum(grades) - sum(m) - deg + 1
        for lab in vec:
            _expect(space.grade(lab) == target, f"{cp}.value.{lab}", f"component must have grade {target}")
        key = (tuple(args), tuple(m))
        _expect(key not in table, cp, "duplicate component")
        table[key] = vec
    return TableCochain(space, deg, table)


def parse_cochain(text, space: ReducedSpace, degree: int | None = None) -> TableCochain:
    return _parse_cochain_obj(_load(text, "cochain"), space, "cochain", degree)


def parse_series(text, space: ReducedSpace) -> list[TableCochain]:
    data = _load(text, "series")
    _expect(isinstance(data, list), "series", "expected a list of degree-2 cochains")
    return [_parse_cochain_obj(c, space, f"series[{i}]", 2) for i, c in enumerate(data)]


def parse_linear_map(text, space: ReducedSpace) -> dict:
    """``{label: {label: rational}}`` for degree-1 cochains."""
    data = _load(text, "linear map")
    _expect(isinstance(data, dict), "q", "expected {label: {label: value}}")
    out = {}
    for lab, vec in data.items():
        try:
            space.grade(lab)
            out[lab] = {k: _rational(v, f"q.{lab}.{k}") for k, v in vec.items() if space.grade(k) is not None}
        except SpaceError as exc:
            raise InputError(f"q.{lab}: {exc}") from None
    return out
