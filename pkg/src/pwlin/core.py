"""The two-slope piecewise-linear plane map and its matrix cocycle.

The map acts on column vectors: ``(x, y) -> (a*x - y, x)`` when ``x >= 0``
and ``(b*x - y, x)`` when ``x < 0``.  It is an area-preserving
homeomorphism that sends rays from the origin to rays from the origin.
All functions here are pure and duck-typed over the numeric type of
their inputs, so an extended-precision backend (e.g. ``mpmath.mpf``)
can be substituted for ``float`` without any API change.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import OrbitOverflowError

# Components beyond this magnitude count as escaped; orbits that reach it
# abort with an indexed error instead of propagating infinities.
OVERFLOW_LIMIT = 1e300

#: Points of the plane, column-vector semantics.
Point = tuple[float, float]

#: Sign-word symbols.  A step taken from a point with x >= 0 records PLUS
#: (the x = 0 tie goes to the a-branch everywhere in this package).
PLUS = "+"
MINUS = "-"


@dataclass(frozen=True)
class Params:
    """Slope pair: ``a`` applies where x >= 0, ``b`` where x < 0.

    ``mu`` and ``nu`` are the half-difference/half-sum coordinates in
    which the orbit recursion reads ``x_{n+2} = mu*|x_{n+1}| +
    nu*x_{n+1} - x_n``.  They are always derived from (a, b), never
    stored, so ``a == nu + mu`` and ``b == nu - mu`` hold by
    construction.
    """

    a: float
    b: float

    @property
    def mu(self):
        return 0.5 * (self.a - self.b)

    @property
    def nu(self):
        return 0.5 * (self.a + self.b)


def step(params: Params, p: Point) -> Point:
    """One forward application of the map."""
    x, y = p
    slope = params.a if x >= 0 else params.b
    nx = slope * x - y
    if abs(nx) > OVERFLOW_LIMIT or abs(x) > OVERFLOW_LIMIT:
        raise OrbitOverflowError(f"orbit component exceeded {OVERFLOW_LIMIT:g}")
    return (nx, x)


def inverse_step(params: Params, p: Point) -> Point:
    """One backward application; exact inverse of :func:`step`."""
    x, y = p
    slope = params.a if y >= 0 else params.b
    ny = slope * y - x
    if abs(ny) > OVERFLOW_LIMIT or abs(y) > OVERFLOW_LIMIT:
        raise OrbitOverflowError(f"orbit component exceeded {OVERFLOW_LIMIT:g}")
    return (y, ny)


def iterate(params: Params, p0: Point, n: int) -> tuple[list[Point], str]:
    """Iterate ``|n|`` steps from ``p0`` (backward when ``n < 0``).

    Returns the orbit (``|n| + 1`` points including ``p0``) together with
    its sign word.  For forward runs, symbol ``k`` is the sign of the
    x-coordinate before step ``k``.  For backward runs the word is the
    itinerary of the traversed segment read in forward order, so
    ``word_matrix(word)`` always maps the last orbit point to the first.

    Raises :class:`OrbitOverflowError` carrying the step index at which
    a component escaped.
    """
    a, b = params.a, params.b
    x, y = p0
    limit = OVERFLOW_LIMIT
    orbit = [(x, y)]
    signs: list[str] = []
    if n >= 0:
        for k in range(n):
            slope = a if x >= 0 else b
            signs.append(PLUS if x >= 0 else MINUS)
            x, y = slope * x - y, x
            if abs(x) > limit:
                raise OrbitOverflowError(
                    f"orbit escaped at step {k + 1}", index=k + 1)
            orbit.append((x, y))
        return orbit, "".join(signs)
    for k in range(-n):
        slope = a if y >= 0 else b
        x, y = y, slope * y - x
        if abs(y) > limit:
            raise OrbitOverflowError(
                f"orbit escaped at step {k + 1}", index=k + 1)
        orbit.append((x, y))
        signs.append(PLUS if x >= 0 else MINUS)
    return orbit, "".join(reversed(signs))


@dataclass(frozen=True)
class Mat2:
    """A 2x2 real matrix, row-major entries."""

    m11: float
    m12: float
    m21: float
    m22: float

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1.0, 0.0, 0.0, 1.0)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    def apply(self, p: Point) -> Point:
        x, y = p
        return (self.m11 * x + self.m12 * y, self.m21 * x + self.m22 * y)

    def trace(self):
        return self.m11 + self.m22

    def det(self):
        return self.m11 * self.m22 - self.m12 * self.m21

    def inverse(self) -> "Mat2":
        d = self.det()
        return Mat2(self.m22 / d, -self.m12 / d, -self.m21 / d, self.m11 / d)

    def max_abs(self):
        return max(abs(self.m11), abs(self.m12), abs(self.m21), abs(self.m22))

    def dist(self, other: "Mat2"):
        return max(
            abs(self.m11 - other.m11), abs(self.m12 - other.m12),
            abs(self.m21 - other.m21), abs(self.m22 - other.m22))


def step_factor(params: Params, sign: str) -> Mat2:
    """The per-step cocycle factor [[a or b, -1], [1, 0]] for one symbol."""
    slope = params.a if sign == PLUS else params.b
    return Mat2(slope, -1.0, 1.0, 0.0)


def word_matrix(params: Params, word: str) -> Mat2:
    """Cocycle product for a sign word, rightmost factor first.

    Applied to a point whose itinerary matches ``word``, the product
    reproduces the corresponding orbit iterate; its determinant is 1.
    Double inputs are accumulated in extended precision: the slopes blow
    up near the parameter poles of the relation families, and the
    resulting cancellations would otherwise eat the 1e-12 identity
    margin.  The result is rounded back to doubles.
    """
    a, b = params.a, params.b
    if isinstance(a, float) and isinstance(b, float):
        import numpy as np

        one = np.longdouble(1.0)
        m11, m12, m21, m22 = one, one * 0, one * 0, one
        al, bl = np.longdouble(a), np.longdouble(b)
        for ch in word:
            slope = al if ch == PLUS else bl
            m11, m12, m21, m22 = (slope * m11 - m21, slope * m12 - m22,
                                  m11, m12)
        # saturating conversion: entries beyond the double range become inf
        return Mat2(float(np.float64(m11)), float(np.float64(m12)),
                    float(np.float64(m21)), float(np.float64(m22)))
    m11, m12, m21, m22 = 1.0, 0.0, 0.0, 1.0
    for ch in word:
        slope = a if ch == PLUS else b
        # left-multiply by [[slope, -1], [1, 0]]
        m11, m12, m21, m22 = (slope * m11 - m21, slope * m12 - m22, m11, m12)
    return Mat2(m11, m12, m21, m22)


def swap_conjugate(params: Params) -> Params:
    """Swapped slope pair (b, a).

    Negating the plane conjugates the two: the orbit of ``(-x, -y)``
    under the swapped parameters is the pointwise negation of the orbit
    of ``(x, y)`` under the original ones.
    """
    return Params(params.b, params.a)


def difference_step(params: Params, x_prev, x_cur):
    """Second-order recursion form: ``mu*|x_cur| + nu*x_cur - x_prev``.

    Agrees with the x-component of ``step(params, (x_cur, x_prev))`` up
    to rounding in the derived (mu, nu) pair.
    """
    return params.mu * abs(x_cur) + params.nu * x_cur - x_prev
