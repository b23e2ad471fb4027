"""Surface types, curve slopes and intersection numbers.

Curves on the one-holed torus S(1,1) and the four-holed sphere S(0,4) are
recorded as rational slopes p/q.  Two slopes meet |p*q' - p'*q| times on the
torus; on the four-holed sphere the count doubles, because S(0,4) is the
quotient of the torus by the hyperelliptic involution.

    >>> Slope.parse("1/2").determinant(Slope.parse("inf"))
    -1
"""

import re
from dataclasses import dataclass
from math import gcd


class PantsError(Exception):
    """Base class for every error raised by this package."""


class NotDecomposable(PantsError):
    pass


class UnsupportedSurface(PantsError):
    pass


@dataclass(frozen=True, order=True)
class SurfaceType:
    genus: int
    boundaries: int

    def __post_init__(self):
        if self.genus < 0 or self.boundaries < 0:
            raise ValueError("genus and boundary count must be nonnegative")

    def __str__(self):
        return f"({self.genus},{self.boundaries})"

    @classmethod
    def parse(cls, text):
        m = re.fullmatch(r"\s*\(?\s*(\d+)\s*,\s*(\d+)\s*\)?\s*", text)
        if not m:
            raise ValueError(f"bad surface type {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))


S11 = SurfaceType(1, 1)
S04 = SurfaceType(0, 4)
S05 = SurfaceType(0, 5)
S12 = SurfaceType(1, 2)
SUPPORT_KINDS = (S11, S04, S05, S12)


def euler_characteristic(s):
    return 2 - 2 * s.genus - s.boundaries


def admits_pants_decomposition(s):
    return euler_characteristic(s) <= -1


def decomposition_census(s):
    """Return (curve_count, pants_count) for a pants decomposition of s.

    Each pair of pants has Euler characteristic -1, so there are -chi of
    them; they have 3 cuffs each, every interior curve uses two cuffs and
    every boundary component one.
    """
    if not admits_pants_decomposition(s):
        raise NotDecomposable(f"{s} has Euler characteristic {euler_characteristic(s)}")
    pants = -euler_characteristic(s)
    curves, rem = divmod(3 * pants - s.boundaries, 2)
    assert rem == 0
    return curves, pants


@dataclass(frozen=True, order=True)
class Slope:
    """An essential curve on S(1,1) or S(0,4), stored as a reduced fraction.

    The constructor normalizes: the gcd is divided out, q is made
    nonnegative and the vertical slope is always (1, 0).
    """
    p: int
    q: int

    def __post_init__(self):
        p, q = self.p, self.q
        if p == 0 and q == 0:
            raise ValueError("0/0 is not a slope")
        g = gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if text in ("inf", "1/0", "oo"):
            return cls(1, 0)
        m = re.fullmatch(r"(-?\d+)(?:/(-?\d+))?", text)
        if not m:
            raise ValueError(f"bad slope {text!r}")
        return cls(int(m.group(1)), int(m.group(2) or 1))

    def __str__(self):
        if self.q == 0:
            return "inf"
        return f"{self.p}/{self.q}"

    def determinant(self, other):
        return self.p * other.q - other.p * self.q

    def parity(self):
        """Class of (p, q) mod 2; one of (0, 1), (1, 0), (1, 1)."""
        return (self.p % 2, self.q % 2)


def _check_slope_surface(s):
    if s not in (S11, S04):
        raise UnsupportedSurface(f"slopes only model S(1,1) and S(0,4), not {s}")


def slope_intersection(s, x, y):
    _check_slope_surface(s)
    d = abs(x.determinant(y))
    return d if s == S11 else 2 * d


def is_elementary_move(s, x, y):
    """S-moves meet once on S(1,1); A-moves meet twice on S(0,4)."""
    return slope_intersection(s, x, y) == (1 if s == S11 else 2)


def farey_neighbors_between(x, z):
    """The two slopes forming a Farey triangle with the Farey edge x, z."""
    if abs(x.determinant(z)) != 1:
        raise ValueError(f"{x} and {z} are not Farey neighbors")
    return sorted({Slope(x.p + z.p, x.q + z.q), Slope(x.p - z.p, x.q - z.q)})


def farey_slopes(bound):
    """Every slope with |p| <= bound and |q| <= bound."""
    out = set()
    for p in range(-bound, bound + 1):
        for q in range(0, bound + 1):
            if (p, q) != (0, 0) and gcd(p, q) == 1:
                out.add(Slope(p, q))
    return sorted(out)


def farey_neighbors(x, bound):
    return [y for y in farey_slopes(bound) if abs(x.determinant(y)) == 1]


@dataclass(frozen=True, order=True)
class SupportId:
    """A named subsurface on which a move is supported."""
    id: str
    kind: SurfaceType

    def __post_init__(self):
        if self.kind not in SUPPORT_KINDS:
            raise ValueError(f"support kind must be one of S(1,1), S(0,4), S(0,5), S(1,2); got {self.kind}")
        if not self.id or any(c in self.id for c in " @':"):
            raise ValueError(f"bad support id {self.id!r}")

    def __str__(self):
        return f"{self.id}:{self.kind.genus},{self.kind.boundaries}"

    @classmethod
    def parse(cls, text):
        """Parse a declaration such as ``h1:1,2`` or ``h1:(1,2)``."""
        name, sep, kind = text.partition(":")
        if not sep:
            raise ValueError(f"support declaration needs id:kind, got {text!r}")
        return cls(name.strip(), SurfaceType.parse(kind))
