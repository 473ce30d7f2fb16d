"""Built-in groups: the dihedral plane group and the cubic group in dimension 3."""

from __future__ import annotations

import re

from .crystal import CrystGroup, direct_product, make_cryst, power, trivial_group
from .exact import IntMatrix, RatVector

D12_GENERATORS = (
    IntMatrix([[0, -1], [1, -1]]),
    IntMatrix([[-1, 0], [0, -1]]),
    IntMatrix([[0, 1], [1, 0]]),
)

# S4 x Z2, order 48
G2_GENERATORS = (
    IntMatrix([[0, 1, 0], [0, -1, -1], [1, 1, 0]]),
    IntMatrix([[0, 0, 1], [0, -1, -1], [-1, 0, 1]]),
)


def gamma1() -> CrystGroup:
    return make_cryst(2, [(g, RatVector.zero(2)) for g in D12_GENERATORS])


def gamma2() -> CrystGroup:
    return make_cryst(3, [(g, RatVector.zero(3)) for g in G2_GENERATORS])


BUILTINS = {"gamma1": gamma1, "gamma2": gamma2}

_FACTOR = re.compile(r"^\s*([A-Za-z_]\w*)\s*(?:\^\s*(\d+))?\s*$")


def is_builtin_expression(text: str) -> bool:
    try:
        parse_group_expression(text)
    except ValueError:
        return False
    return True


def parse_group_expression(text: str) -> CrystGroup:
    """Parse products such as ``gamma1^2*gamma2`` into a group."""
    result = trivial_group(0)
    parts = text.split("*")
    for part in parts:
        m = _FACTOR.match(part)
        if not m or m.group(1) not in BUILTINS:
            raise ValueError(f"unknown group expression {text!r}")
        k = int(m.group(2)) if m.group(2) is not None else 1
        result = direct_product(result, power(BUILTINS[m.group(1)](), k))
    if result.dim == 0:
        raise ValueError(f"group expression {text!r} has dimension 0")
    return result
