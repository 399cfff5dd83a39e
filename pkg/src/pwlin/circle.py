"""The induced circle map, its lift, and rotation-number estimation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import Params, Point, step
from .errors import DegenerateError


def _backend(*values):
    """Pick the math module matching the numeric type of the inputs.

    Plain ints/floats use :mod:`math`; anything else (mpmath floats) is
    routed through :mod:`mpmath`, which shares the needed names.
    """
    if all(isinstance(v, (int, float)) for v in values):
        return math
    import mpmath

    return mpmath


def normalize(p: Point) -> Point:
    """Scale a nonzero point to the unit circle."""
    x, y = p
    r = _backend(x, y).hypot(x, y)
    if r == 0:
        raise DegenerateError("cannot normalize the zero vector")
    return (x / r, y / r)


def angle_of(p: Point):
    """Counterclockwise angle of a nonzero point, in [0, 2*pi)."""
    x, y = p
    mm = _backend(x, y)
    t = mm.atan2(y, x)
    if t < 0:
        t = t + 2 * mm.pi
    if t >= 2 * mm.pi:  # guard: tiny negative atan2 can round up to 2*pi
        t = t * 0
    return t


def s_step(params: Params, u: Point) -> Point:
    """One application of the induced circle map: step, then renormalize.

    The map is positively homogeneous, so this is an exact
    projectivization; renormalizing keeps long orbits overflow-free.
    """
    v = step(params, u)
    if v[0] == 0 and v[1] == 0:
        raise DegenerateError("circle map hit the origin")  # impossible for u != 0
    return normalize(v)


def lift_displacement(params: Params, u: Point):
    """Angular advance of one circle-map step, in radians.

    Returns the representative of angle(Tu) - angle(u) mod 2*pi lying in
    [-pi/2, 3*pi/2).  That window is the honest lift increment: points
    with x > 0 map into the closed upper half-plane and points with
    x < 0 into the closed lower half-plane, while the boundary
    directions (0, +-1) advance by exactly +pi/2 -- so the true advance
    never attains -pi/2 or 3*pi/2.
    """
    x, y = u
    mm = _backend(x, y)
    v = step(params, u)
    d = mm.atan2(v[1], v[0]) - mm.atan2(y, x)
    half_pi = mm.pi / 2
    if d < -half_pi:
        d += 2 * mm.pi
    elif d >= 3 * half_pi:
        d -= 2 * mm.pi
    return d


@dataclass(frozen=True)
class RotationEstimate:
    """Birkhoff-average rotation estimate, in turns.

    ``error_bound`` is the classical 1/N bound for a degree-one monotone
    circle map; the ``value`` is reported raw, never clamped to [0, 1/2].
    """

    value: float
    steps: int
    error_bound: float
    snap: Fraction | None = None

    def with_snap(self, snap: Fraction | None) -> "RotationEstimate":
        return RotationEstimate(self.value, self.steps, self.error_bound, snap)


def rotation_number(params: Params, u0: Point, steps: int) -> RotationEstimate:
    """Average angular advance of the circle map over ``steps`` iterates.

    The orbit direction is tracked without per-step normalization;
    exact power-of-two rescaling keeps the components in range, which
    leaves every angle (and every branch decision) bit-identical.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    x, y = u0
    mm = _backend(x, y, params.a, params.b)
    if mm is math:
        return _rotation_float(params, float(x), float(y), steps)
    a, b = params.a, params.b
    two_pi = 2 * mm.pi
    half_pi = mm.pi / 2
    three_half_pi = 3 * half_pi
    prev = mm.atan2(y, x)
    total = prev * 0
    for _ in range(steps):
        x, y = (a * x - y, x) if x >= 0 else (b * x - y, x)
        t = mm.atan2(y, x)
        d = t - prev
        if d < -half_pi:
            d += two_pi
        elif d >= three_half_pi:
            d -= two_pi
        total += d / two_pi
        prev = t
    value = total / steps
    return RotationEstimate(value, steps, 1.0 / steps)


_RESCALE_UP = 2.0 ** 512
_RESCALE_DOWN = 2.0 ** -512


def _rotation_float(params: Params, x: float, y: float, steps: int) -> RotationEstimate:
    # Hot loop: locals only, no function calls besides atan2.
    a, b = params.a, params.b
    atan2 = math.atan2
    two_pi = 2.0 * math.pi
    half_pi = 0.5 * math.pi
    three_half_pi = 1.5 * math.pi
    prev = atan2(y, x)
    total = 0.0
    for _ in range(steps):
        x, y = (a * x - y, x) if x >= 0.0 else (b * x - y, x)
        ax = x if x >= 0.0 else -x
        ay = y if y >= 0.0 else -y
        m = ax if ax > ay else ay
        if m > 1e150:
            x *= _RESCALE_DOWN
            y *= _RESCALE_DOWN
        elif m < 1e-150:
            x *= _RESCALE_UP
            y *= _RESCALE_UP
        t = atan2(y, x)
        d = t - prev
        if d < -half_pi:
            d += two_pi
        elif d >= three_half_pi:
            d -= two_pi
        total += d / two_pi
        prev = t
    return RotationEstimate(total / steps, steps, 1.0 / steps)


def convergents(x: float, q_max: int):
    """Continued-fraction convergents p/q of x with q <= q_max."""
    out: list[Fraction] = []
    h_prev, h, k_prev, k = 0, 1, 1, 0  # seeds of the standard recurrence
    y = float(x)
    for _ in range(64):
        a0 = math.floor(y)
        h_prev, h = h, int(a0) * h + h_prev
        k_prev, k = k, int(a0) * k + k_prev
        if k > q_max:
            break
        out.append(Fraction(h, k))
        frac = y - a0
        if frac < 1e-14:
            break
        y = 1.0 / frac
    return out


def snap_rational(est: RotationEstimate, q_max: int) -> Fraction | None:
    """Rational candidate for the rotation number, or None.

    Scans the continued-fraction convergents p/q of the estimate with
    q <= q_max and returns the first one that is consistent with the
    estimation error (within twice the bound) and is a legitimate
    approximation of its quality class (within 1/(2 q^2)), provided the
    run was long enough to resolve denominator q (q^2 <= steps / 4).
    A snap is only a candidate; periodicity needs the matrix test.
    """
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    value = float(est.value)
    tol = 2.0 * est.error_bound
    for frac in convergents(value, q_max):
        q = frac.denominator
        if q * q > est.steps / 4:
            continue
        err = abs(value - frac.numerator / q)
        if err <= tol and err <= 1.0 / (2.0 * q * q):
            return frac
    return None
