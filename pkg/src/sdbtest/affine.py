"""Invertible integer affine maps applied to geometries in homogeneous coordinates."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .geometry import Geometry, Point2, for_each_point

MAX_REJECTIONS = 1000


class SingularMatrixError(ValueError):
    pass


def _det(a) -> Fraction:
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    return sum((-1) ** j * a[0][j] * _det([row[:j] + row[j + 1:] for row in a[1:]])
               for j in range(n))


@dataclass(frozen=True)
class MappingMatrix:
    """The augmented matrix ``[[A, b], [0, 1]]`` of the map ``p -> A p + b``."""

    A: tuple[tuple[Fraction, ...], ...]
    b: tuple[Fraction, ...]

    def __post_init__(self):
        n = len(self.A)
        if any(len(row) != n for row in self.A) or len(self.b) != n:
            raise ValueError("A must be n x n and b of length n")
        object.__setattr__(self, "A", tuple(tuple(Fraction(v) for v in row) for row in self.A))
        object.__setattr__(self, "b", tuple(Fraction(v) for v in self.b))
        if self.det == 0:
            raise SingularMatrixError("linear part is singular")

    @property
    def n(self) -> int:
        return len(self.A)

    @property
    def det(self) -> Fraction:
        return _det([list(r) for r in self.A])

    @property
    def augmented(self) -> tuple[tuple[Fraction, ...], ...]:
        rows = [tuple(row) + (bi,) for row, bi in zip(self.A, self.b)]
        rows.append((Fraction(0),) * self.n + (Fraction(1),))
        return tuple(rows)

    @classmethod
    def identity(cls, n: int = 2) -> "MappingMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), (0,) * n)

    @classmethod
    def from_augmented(cls, rows) -> "MappingMatrix":
        rows = [tuple(Fraction(v) for v in r) for r in rows]
        n = len(rows) - 1
        if any(len(r) != n + 1 for r in rows) or rows[n] != (0,) * n + (1,):
            raise ValueError("not an augmented affine matrix")
        return cls(tuple(r[:n] for r in rows[:n]), tuple(r[n] for r in rows[:n]))

    def map_coords(self, coords) -> tuple[Fraction, ...]:
        """Multiply the homogeneous vector (coords, 1) by the augmented matrix."""
        alpha = tuple(coords) + (1,)
        out = tuple(sum(m * a for m, a in zip(row, alpha)) for row in self.augmented)
        return out[:-1]

    def to_text(self) -> str:
        from .wkt import format_rational
        return "\n".join(" ".join(_fmt(v, format_rational) for v in row) for row in self.augmented) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "MappingMatrix":
        rows = [line.split() for line in text.strip().splitlines() if line.strip()]
        return cls.from_augmented([[Fraction(v) for v in r] for r in rows])


def _fmt(v: Fraction, fmt) -> str:
    try:
        return fmt(v)
    except ValueError:
        return f"{v.numerator}/{v.denominator}"


def generate_mapping_matrix(n: int = 2, rng: random.Random | None = None,
                            entry_range: tuple[int, int] = (-5, 5)) -> MappingMatrix:
    """Random integer ``A`` (rejection-sampled until non-singular) and integer ``b``."""
    if n not in (2, 3):
        raise ValueError("only 2D and 3D maps are supported")
    rng = rng or random.Random()
    lo, hi = entry_range
    for _ in range(MAX_REJECTIONS):
        a = [[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)]
        if _det(a) != 0:
            b = [rng.randint(lo, hi) for _ in range(n)]
            return MappingMatrix(tuple(map(tuple, a)), tuple(b))
    raise RuntimeError(f"no non-singular matrix after {MAX_REJECTIONS} draws from {entry_range}")


def apply(m: MappingMatrix, g: Geometry) -> Geometry:
    if m.n != 2:
        raise ValueError("geometries are 2D; use map_coords for 3D points")

    def f(p: Point2) -> Point2:
        x, y = m.map_coords(p)
        return Point2(x, y)

    return for_each_point(g, f)


def invert(m: MappingMatrix) -> MappingMatrix:
    """Exact inverse by Gauss-Jordan elimination on the augmented matrix."""
    n = m.n + 1
    rows = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m.augmented)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if rows[r][col] != 0)
        rows[col], rows[pivot] = rows[pivot], rows[col]
        pv = rows[col][col]
        rows[col] = [v / pv for v in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * c for a, c in zip(rows[r], rows[col])]
    return MappingMatrix.from_augmented([r[n:] for r in rows])
