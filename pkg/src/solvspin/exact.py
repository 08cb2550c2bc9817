"""Exact scalars shared by all solvers: rationals, the Q(i)(sqrt m) tower, floats.

A TowerScalar represents a + b*i + c*w + d*i*w with rational coefficients,
where i**2 = -1 and w**2 = m for a radicand m that is a squarefree integer > 1.
A single radicand is allowed per computation: combining scalars bound to
different radicands raises IncompatibleExtensionError instead of silently
widening the field.

FloatScalar is a tolerance-carrying float fallback for stress tests with
non-rational metric data; equality means agreement up to a relative tolerance.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

RationalLike = Union[int, Fraction]

_ZERO = Fraction(0)
_ONE = Fraction(1)


class IncompatibleExtensionError(ValueError):
    """Two scalars live in towers with different radicands."""


def parse_rational(text: str) -> Fraction:
    """Parse 'p/q' or 'p' into a Fraction."""
    return Fraction(text.strip())


def format_rational(x: Fraction) -> str:
    return str(Fraction(x))


def _square_part(n: int) -> tuple[int, int]:
    """Return (s, f) with n = s*s*f, f squarefree, for n > 0 (trial division)."""
    s, f = 1, 1
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            s *= p ** (e // 2)
            if e % 2:
                f *= p
        p += 1 if p == 2 else 2
    return s, f * m


def split_square(m: Fraction) -> tuple[Fraction, int]:
    """Write m > 0 as s**2 * f with rational s > 0 and squarefree integer f."""
    if m <= 0:
        raise ValueError("split_square needs a positive rational")
    s_int, f = _square_part(m.numerator * m.denominator)
    return Fraction(s_int, m.denominator), f


class TowerScalar:
    """Element of Q(i)(w), w**2 = radicand; immutable value semantics."""

    __slots__ = ("a", "b", "c", "d", "radicand")

    def __init__(self, a=0, b=0, c=0, d=0, radicand=None):
        a = a if type(a) is Fraction else Fraction(a)
        b = b if type(b) is Fraction else Fraction(b)
        c = c if type(c) is Fraction else Fraction(c)
        d = d if type(d) is Fraction else Fraction(d)
        if not c and not d:
            radicand = None
        elif radicand is None:
            raise ValueError("w-component present but no radicand given")
        else:
            radicand = int(radicand)
            if radicand <= 1:
                raise ValueError("radicand must be a squarefree integer > 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "radicand", radicand)

    def __setattr__(self, name, value):
        raise AttributeError("TowerScalar is immutable")

    @classmethod
    def _raw(cls, a, b, c, d, radicand):
        obj = object.__new__(cls)
        object.__setattr__(obj, "a", a)
        object.__setattr__(obj, "b", b)
        object.__setattr__(obj, "c", c)
        object.__setattr__(obj, "d", d)
        object.__setattr__(obj, "radicand", radicand if (c or d) else None)
        return obj

    @classmethod
    def rational(cls, x: RationalLike) -> "TowerScalar":
        return cls._raw(Fraction(x), _ZERO, _ZERO, _ZERO, None)

    @classmethod
    def imaginary(cls, x: RationalLike = 1) -> "TowerScalar":
        return cls._raw(_ZERO, Fraction(x), _ZERO, _ZERO, None)

    # ---- predicates ----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not (self.a or self.b or self.c or self.d)

    @property
    def is_rational(self) -> bool:
        return not (self.b or self.c or self.d)

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError("scalar %r is not rational" % (self,))
        return self.a

    # ---- coercion helpers ----------------------------------------------

    @staticmethod
    def _coerce(x):
        if type(x) is TowerScalar:
            return x
        if isinstance(x, (int, Fraction)):
            return TowerScalar._raw(Fraction(x), _ZERO, _ZERO, _ZERO, None)
        if isinstance(x, TowerScalar):
            return x
        return None

    def _merge_radicand(self, other: "TowerScalar"):
        if self.radicand is None:
            return other.radicand
        if other.radicand is None or other.radicand == self.radicand:
            return self.radicand
        raise IncompatibleExtensionError(
            "incompatible extension: radicands %d and %d"
            % (self.radicand, other.radicand)
        )

    # ---- arithmetic -----------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        m = self._merge_radicand(o)
        return TowerScalar._raw(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d, m)

    __radd__ = __add__

    def __neg__(self):
        return TowerScalar._raw(-self.a, -self.b, -self.c, -self.d, self.radicand)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        m = self._merge_radicand(o)
        return TowerScalar._raw(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d, m)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o.__sub__(self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a1, b1, c1, d1 = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = o.a, o.b, o.c, o.d
        if not (c1 or d1 or c2 or d2):
            # pure Q(i) fast path
            if not (b1 or b2):
                return TowerScalar._raw(a1 * a2, _ZERO, _ZERO, _ZERO, None)
            return TowerScalar._raw(a1 * a2 - b1 * b2, a1 * b2 + b1 * a2, _ZERO, _ZERO, None)
        m = self._merge_radicand(o)
        mf = Fraction(m)
        # (u1 + v1 w)(u2 + v2 w) = (u1 u2 + m v1 v2) + (u1 v2 + v1 u2) w over Q(i)
        ra = a1 * a2 - b1 * b2 + mf * (c1 * c2 - d1 * d2)
        rb = a1 * b2 + b1 * a2 + mf * (c1 * d2 + d1 * c2)
        rc = a1 * c2 - b1 * d2 + c1 * a2 - d1 * b2
        rd = a1 * d2 + b1 * c2 + c1 * b2 + d1 * a2
        return TowerScalar._raw(ra, rb, rc, rd, m)

    __rmul__ = __mul__

    def inverse(self) -> "TowerScalar":
        if self.is_zero:
            raise ZeroDivisionError("division by zero")
        a, b, c, d = self.a, self.b, self.c, self.d
        if not (c or d):
            n = a * a + b * b
            return TowerScalar._raw(a / n, -b / n, _ZERO, _ZERO, None)
        m = Fraction(self.radicand)
        # conjugate over w: (u - v w); norm = u^2 - m v^2 in Q(i)
        na = a * a - b * b - m * (c * c - d * d)
        nb = 2 * a * b - m * 2 * c * d
        nn = na * na + nb * nb
        if not nn:
            raise ZeroDivisionError("norm form is zero; element not invertible")
        # 1/z = conj_w(z) * conj_i(norm) / |norm|^2
        ia, ib = na / nn, -nb / nn
        return TowerScalar._raw(
            a * ia - b * ib,
            a * ib + b * ia,
            -(c * ia - d * ib),
            -(c * ib + d * ia),
            self.radicand,
        )

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.__mul__(o.inverse())

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o.__mul__(self.inverse())

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = TowerScalar.rational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # ---- comparison -----------------------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.radicand is not None and o.radicand is not None and self.radicand != o.radicand:
            return False
        return (self.a, self.b, self.c, self.d) == (o.a, o.b, o.c, o.d)

    def __hash__(self):
        if self.is_rational:
            return hash(self.a)
        return hash((self.a, self.b, self.c, self.d, self.radicand))

    def __bool__(self):
        return not self.is_zero

    # ---- formatting -----------------------------------------------------

    def __repr__(self):
        return "TowerScalar(%s, %s, %s, %s, radicand=%r)" % (
            self.a, self.b, self.c, self.d, self.radicand)

    def __str__(self):
        if self.is_zero:
            return "0"
        parts = []
        for coeff, unit in ((self.a, ""), (self.b, "i"), (self.c, "w"), (self.d, "i*w")):
            if coeff:
                txt = format_rational(coeff)
                parts.append(txt + ("*" + unit if unit else "") if unit else txt)
        return " + ".join(parts).replace("+ -", "- ")

    def to_dict(self) -> dict:
        return {
            "a": format_rational(self.a),
            "b": format_rational(self.b),
            "c": format_rational(self.c),
            "d": format_rational(self.d),
            "radicand": self.radicand,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TowerScalar":
        return cls(
            parse_rational(data["a"]),
            parse_rational(data["b"]),
            parse_rational(data["c"]),
            parse_rational(data["d"]),
            data.get("radicand"),
        )


TS_ZERO = TowerScalar.rational(0)
TS_ONE = TowerScalar.rational(1)
TS_I = TowerScalar.imaginary(1)


def sqrt_to_tower(m: RationalLike) -> TowerScalar:
    """Exact square root of a rational, realized in the tower.

    m > 0 gives s*w (or a plain rational when m is a perfect square);
    m < 0 gives i times the root of -m; m = 0 gives 0.  Radicands are
    canonicalized to squarefree integers, so equal values compare equal.
    """
    m = Fraction(m)
    if m == 0:
        return TS_ZERO
    s, f = split_square(abs(m))
    if m > 0:
        if f == 1:
            return TowerScalar.rational(s)
        return TowerScalar(0, 0, s, 0, f)
    if f == 1:
        return TowerScalar.imaginary(s)
    return TowerScalar(0, 0, 0, s, f)


def tower_arithmetic(a: TowerScalar, b: TowerScalar, op: str) -> TowerScalar:
    """Dispatch form of the tower field operations: add, mul, inv."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inverse()
    raise ValueError("unknown op %r" % op)


class FloatScalar:
    """Float with a relative tolerance; equality is approximate."""

    __slots__ = ("value", "tol")

    def __init__(self, value: float, tol: float = 1e-9):
        if tol <= 0:
            raise ValueError("tolerance must be positive")
        object.__setattr__(self, "value", float(value))
        object.__setattr__(self, "tol", float(tol))

    def __setattr__(self, name, value):
        raise AttributeError("FloatScalar is immutable")

    @staticmethod
    def _val(x):
        if isinstance(x, FloatScalar):
            return x.value
        if isinstance(x, (int, float)):
            return float(x)
        if isinstance(x, Fraction):
            return float(x)
        return None

    def _tol_with(self, x):
        return max(self.tol, x.tol) if isinstance(x, FloatScalar) else self.tol

    def __add__(self, other):
        v = self._val(other)
        if v is None:
            return NotImplemented
        return FloatScalar(self.value + v, self._tol_with(other))

    __radd__ = __add__

    def __neg__(self):
        return FloatScalar(-self.value, self.tol)

    def __sub__(self, other):
        v = self._val(other)
        if v is None:
            return NotImplemented
        return FloatScalar(self.value - v, self._tol_with(other))

    def __rsub__(self, other):
        v = self._val(other)
        if v is None:
            return NotImplemented
        return FloatScalar(v - self.value, self._tol_with(other))

    def __mul__(self, other):
        v = self._val(other)
        if v is None:
            return NotImplemented
        return FloatScalar(self.value * v, self._tol_with(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._val(other)
        if v is None:
            return NotImplemented
        return FloatScalar(self.value / v, self._tol_with(other))

    def __rtruediv__(self, other):
        v = self._val(other)
        if v is None:
            return NotImplemented
        return FloatScalar(v / self.value, self._tol_with(other))

    def inverse(self):
        return FloatScalar(1.0 / self.value, self.tol)

    def __eq__(self, other):
        v = self._val(other)
        if v is None:
            return NotImplemented
        t = self._tol_with(other)
        return abs(self.value - v) <= t * max(1.0, abs(self.value), abs(v))

    __hash__ = None

    def __bool__(self):
        return not self.__eq__(0)

    def __repr__(self):
        return "FloatScalar(%r, tol=%g)" % (self.value, self.tol)

    def __str__(self):
        return repr(self.value)


def sqrt_scalar(x):
    """Square root across backends: Fraction/int via the tower, floats numerically."""
    if isinstance(x, FloatScalar):
        return FloatScalar(math.sqrt(x.value), x.tol)
    if isinstance(x, TowerScalar):
        return sqrt_to_tower(x.as_fraction())
    return sqrt_to_tower(Fraction(x))
