"""JSON encodings for groups and analysis reports.

Group file::

    {"dimension": 2,
     "generators": [{"linear": [[0, -1], [1, -1]], "translation": ["0", "1/2"]}, ...]}

Rationals are always strings.  Serialisation reduces translations into
[0, 1) and emits keys in the order shown, so a canonical file round-trips
byte for byte.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .crystal import AnalysisReport, CrystGroup, make_cryst
from .errors import CrystError
from .exact import IntMatrix, RatVector

FORMAT = "crystnorm-report/1"


class GroupFileError(CrystError, ValueError):
    pass


def _parse_rational(s, where):
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise GroupFileError(f"{where}: expected a rational string such as \"1/2\", got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise GroupFileError(f"{where}: cannot parse {s!r} as a rational") from None


def group_from_dict(data) -> CrystGroup:
    if not isinstance(data, dict):
        raise GroupFileError("top level: expected an object")
    n = data.get("dimension")
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise GroupFileError(f"dimension: expected a nonnegative integer, got {n!r}")
    gens = data.get("generators")
    if not isinstance(gens, list):
        raise GroupFileError("generators: expected a list")
    parsed = []
    for k, rec in enumerate(gens):
        where = f"generators[{k}]"
        if not isinstance(rec, dict):
            raise GroupFileError(f"{where}: expected an object")
        lin = rec.get("linear")
        if (not isinstance(lin, list) or len(lin) != n
                or any(not isinstance(r, list) or len(r) != n for r in lin)
                or any(isinstance(x, bool) or not isinstance(x, int) for r in lin for x in r)):
            raise GroupFileError(f"{where}.linear: expected a {n}x{n} integer matrix")
        X = IntMatrix(lin)
        det = X.det()
        if det not in (1, -1):
            raise GroupFileError(f"{where}.linear: determinant {det} is not +1 or -1")
        tr = rec.get("translation", ["0"] * n)
        if not isinstance(tr, list) or len(tr) != n:
            raise GroupFileError(f"{where}.translation: expected {n} rational strings")
        t = RatVector(_parse_rational(x, f"{where}.translation[{i}]") for i, x in enumerate(tr))
        parsed.append((X, t))
    return make_cryst(n, parsed)


def parse_group_file(text: str) -> CrystGroup:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise GroupFileError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    return group_from_dict(data)


def group_to_dict(gamma: CrystGroup) -> dict:
    return {
        "dimension": gamma.dim,
        "generators": [
            {"linear": g.tolist(), "translation": [str(x) for x in t.mod1()]}
            for g, t in gamma.affine_generators()
        ],
    }


def dump_group(gamma: CrystGroup) -> str:
    return json.dumps(group_to_dict(gamma), indent=2) + "\n"


def report_to_dict(rep: AnalysisReport) -> dict:
    def s(x):
        return None if x is None else str(x)

    return {
        "dim": rep.dim,
        "point_group_order": s(rep.point_group_order),
        "center_trivial": rep.center_trivial,
        "h1_invariants": None if rep.h1_invariants is None else list(rep.h1_invariants),
        "normalizer_order": s(rep.normalizer_order),
        "normalizer_status": rep.normalizer_status,
        "normalizer_backend": rep.normalizer_backend,
        "n_alpha_order": s(rep.n_alpha_order),
        "out_order": s(rep.out_order),
        "out_trivial": rep.out_trivial,
        "fixpoint": rep.fixpoint,
        "exact_sequence_holds": rep.exact_sequence_holds() if rep.out_order is not None else None,
    }
