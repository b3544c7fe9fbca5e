"""DE-9IM matrices, pattern matching and the named topological predicates."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .geometry import Geometry
from .topology import B, E, I, Arrangement, prepare

_ROWS = (I, B, E)
_DIM_CHAR = {None: "F", 0: "0", 1: "1", 2: "2"}


@dataclass(frozen=True)
class DE9IM:
    """Nine intersection dimensions, row-major II, IB, IE, BI, BB, BE, EI, EB, EE."""

    code: str

    def __post_init__(self):
        if len(self.code) != 9 or any(c not in "F012" for c in self.code):
            raise ValueError(f"bad DE-9IM code {self.code!r}")

    def __str__(self) -> str:
        return self.code

    def __getitem__(self, idx: int) -> str:
        return self.code[idx]

    def transpose(self) -> "DE9IM":
        c = self.code
        return DE9IM(c[0] + c[3] + c[6] + c[1] + c[4] + c[7] + c[2] + c[5] + c[8])

    def matches(self, pattern: str) -> bool:
        return matches(self, pattern)


def matches(m: DE9IM | str, pattern: str) -> bool:
    """Entrywise match: T = any of 0/1/2, * = anything, digits and F exact."""
    code = str(m)
    if len(pattern) != 9:
        raise ValueError(f"bad DE-9IM pattern {pattern!r}")
    for c, p in zip(code, pattern.upper()):
        if p == "*":
            continue
        if p == "T":
            if c == "F":
                return False
        elif p != c:
            return False
    return True


def _relate_with_dims(g1: Geometry, g2: Geometry):
    arr = Arrangement([prepare(g1), prepare(g2)])
    best = {}
    dims = [None, None]
    for dim, (la, lb) in arr.cells():
        k = (la, lb)
        if best.get(k, -1) < dim:
            best[k] = dim
        if la != E and (dims[0] is None or dims[0] < dim):
            dims[0] = dim
        if lb != E and (dims[1] is None or dims[1] < dim):
            dims[1] = dim
    code = "".join(_DIM_CHAR[best.get((ra, cb))] for ra in _ROWS for cb in _ROWS)
    return DE9IM(code), dims[0], dims[1]


def relate(g1: Geometry, g2: Geometry) -> DE9IM:
    """Exact DE-9IM matrix of ``g1`` (rows) against ``g2`` (columns)."""
    return _relate_with_dims(g1, g2)[0]


class Predicate(str, Enum):
    INTERSECTS = "Intersects"
    DISJOINT = "Disjoint"
    CONTAINS = "Contains"
    WITHIN = "Within"
    COVERS = "Covers"
    COVEREDBY = "CoveredBy"
    CROSSES = "Crosses"
    OVERLAPS = "Overlaps"
    TOUCHES = "Touches"
    EQUALS = "Equals"

    @classmethod
    def parse(cls, name: str) -> "Predicate":
        key = name.strip().lower()
        if key.startswith("st_"):
            key = key[3:]
        for p in cls:
            if p.value.lower() == key:
                return p
        raise ValueError(f"unknown predicate {name!r}")


EQUALS_PATTERN = "T*F**FFF*"
DISJOINT_PATTERN = "FF*FF****"
_ANY = {
    Predicate.EQUALS: (EQUALS_PATTERN,),
    Predicate.DISJOINT: (DISJOINT_PATTERN,),
    Predicate.CONTAINS: ("T*****FF*",),
    Predicate.WITHIN: ("T*F**F***",),
    Predicate.COVERS: ("T*****FF*", "*T****FF*", "***T**FF*", "****T*FF*"),
    Predicate.COVEREDBY: ("T*F**F***", "*TF**F***", "**FT*F***", "**F*TF***"),
    Predicate.TOUCHES: ("FT*******", "F**T*****", "F***T****"),
}


def evaluate(pred: Predicate, m: DE9IM, dim1: int | None, dim2: int | None) -> bool:
    """Named predicate from a matrix plus the operands' dimensions."""
    if pred is Predicate.INTERSECTS:
        return not matches(m, DISJOINT_PATTERN)
    if pred is Predicate.CROSSES:
        if dim1 is None or dim2 is None:
            return False
        if dim1 < dim2:
            return matches(m, "T*T******")
        if dim1 > dim2:
            return matches(m, "T*****T**")
        if dim1 == dim2 == 1:
            return matches(m, "0********")
        return False
    if pred is Predicate.OVERLAPS:
        if dim1 is None or dim1 != dim2:
            return False
        if dim1 == 1:
            return matches(m, "1*T***T**")
        return matches(m, "T*T***T**")
    return any(matches(m, p) for p in _ANY[pred])


def named_predicate(name: str | Predicate, g1: Geometry, g2: Geometry) -> bool:
    pred = name if isinstance(name, Predicate) else Predicate.parse(name)
    m, d1, d2 = _relate_with_dims(g1, g2)
    return evaluate(pred, m, d1, d2)


def relate_full(g1: Geometry, g2: Geometry):
    """Matrix and both point-set dimensions in one pass (used by the reference engine)."""
    return _relate_with_dims(g1, g2)
