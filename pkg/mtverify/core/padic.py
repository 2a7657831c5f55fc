"""
p-adic numbers for mtverify

Capped absolute precision: a value is known modulo p^N for a certified N,
stored as p^v * u with u a unit modulo p^(N - v). Every operation carries the
worst-case precision loss forward, so digits reported are digits proven.
"""

from fractions import Fraction
from typing import Union

from .arith import mod_rational, valuation


# Precision standing in for an exactly known zero
_EXACT = 10 ** 9
# Anything at or above this precision came from an exact zero
_EXACT_THRESHOLD = 10 ** 8


class Padic:
    """
    Element of Q_p known modulo p^prec

    A value indistinguishable from zero has unit 0 and val = prec.
    """

    __slots__ = ('p', 'val', 'unit', 'prec')

    def __init__(self, p: int, val: int, unit: int, prec: int):
        self.p = p
        self.prec = prec
        if unit % p == 0 or val >= prec:
            self.val = prec
            self.unit = 0
        else:
            self.val = val
            self.unit = unit % p ** (prec - val)

    @classmethod
    def zero(cls, p: int, prec: int) -> "Padic":
        return cls(p, prec, 0, prec)

    @classmethod
    def exact_zero(cls, p: int) -> "Padic":
        return cls(p, _EXACT, 0, _EXACT)

    @classmethod
    def from_rational(cls, p: int, x: Union[int, Fraction], prec: int) -> "Padic":
        """x known exactly, truncated to absolute precision prec"""
        x = Fraction(x)
        if x == 0:
            return cls.zero(p, prec)
        v = valuation(x, p)
        if v >= prec:
            return cls.zero(p, prec)
        unit = mod_rational(x / Fraction(p) ** v, p ** (prec - v), p)
        return cls(p, v, unit, prec)

    def is_zero(self) -> bool:
        """True if the value is zero to the known precision"""
        return self.unit == 0

    @property
    def relative_precision(self) -> int:
        return self.prec - self.val

    def valuation(self) -> int:
        """Exact valuation, or the precision as a lower bound for zero"""
        return self.val

    def _check(self, other: "Padic") -> None:
        if self.p != other.p:
            raise ValueError(f"p-adic numbers for different primes: {self.p} and {other.p}")

    def is_exact(self) -> bool:
        return self.prec >= _EXACT_THRESHOLD

    def _coerce(self, other) -> "Padic":
        if isinstance(other, Padic):
            self._check(other)
            return other
        x = Fraction(other)
        if x == 0:
            return Padic.exact_zero(self.p)
        if self.is_exact():
            raise ValueError(f"exact zero in Q_{self.p} cannot absorb {x} without a precision")
        # zeros carry val = prec, which must not widen the slack
        own = 0 if self.is_zero() else abs(self.val)
        slack = own + abs(valuation(x, self.p)) + 1
        return Padic.from_rational(self.p, x, self.prec + slack)

    def __add__(self, other) -> "Padic":
        if not isinstance(other, Padic) and Fraction(other) == 0:
            return self
        other = self._coerce(other)
        prec = min(self.prec, other.prec)
        if other.is_zero():
            return Padic(self.p, self.val, self.unit, prec)
        if self.is_zero():
            return Padic(self.p, other.val, other.unit, prec)
        low = min(self.val, other.val)
        total = self.unit * self.p ** (self.val - low) + other.unit * self.p ** (other.val - low)
        return _normalize(self.p, low, total, prec)

    __radd__ = __add__

    def __neg__(self) -> "Padic":
        return Padic(self.p, self.val, -self.unit, self.prec)

    def __sub__(self, other) -> "Padic":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Padic":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Padic":
        if not isinstance(other, Padic):
            x = Fraction(other)
            if x == 0:
                return Padic.exact_zero(self.p)
            if self.is_zero():
                prec = self.prec if self.is_exact() else self.prec + valuation(x, self.p)
                return Padic.zero(self.p, prec)
        other = self._coerce(other)
        prec = min(self.prec + other.val, other.prec + self.val)
        if self.is_zero() or other.is_zero():
            return Padic.zero(self.p, prec)
        return Padic(self.p, self.val + other.val, self.unit * other.unit, prec)

    __rmul__ = __mul__

    def inverse(self) -> "Padic":
        """
        Raises:
            ZeroDivisionError: If the value is zero to the known precision
        """
        if self.is_zero():
            raise ZeroDivisionError(f"p-adic value is zero modulo {self.p}^{self.prec}")
        relative = self.relative_precision
        return Padic(self.p, -self.val, pow(self.unit, -1, self.p ** relative), relative - self.val)

    def __truediv__(self, other) -> "Padic":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> "Padic":
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "Padic":
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return Padic.from_rational(self.p, 1, self.prec if self.is_zero() else self.prec + abs(self.val))
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def lift(self) -> Fraction:
        """Representative p^v * u with 0 <= u < p^(prec - v)"""
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.p) ** self.val * self.unit

    def residue(self, k: int) -> int:
        """Image in Z/p^k (requires integrality and precision at least k)"""
        if self.prec < k:
            raise ValueError(f"value known modulo {self.p}^{self.prec}, {k} digits requested")
        if not self.is_zero() and self.val < 0:
            raise ValueError("value is not integral")
        return mod_rational(self.lift(), self.p ** k, self.p)

    def agrees(self, other: "Padic", digits: int = None) -> bool:
        """Equality on the digits both values certify (or on the first `digits`)"""
        other = self._coerce(other)
        prec = min(self.prec, other.prec)
        if digits is not None:
            prec = min(prec, digits)
        difference = self - other
        return difference.is_zero() or difference.val >= prec

    def __eq__(self, other) -> bool:
        if not isinstance(other, Padic):
            return NotImplemented
        return (self.p, self.val, self.unit, self.prec) == (other.p, other.val, other.unit, other.prec)

    def __hash__(self):
        return hash((self.p, self.val, self.unit, self.prec))

    def __repr__(self) -> str:
        if self.is_zero():
            return f"O({self.p}^{self.prec})"
        return f"{self.p}^{self.val}*{self.unit} + O({self.p}^{self.prec})"


def _normalize(p: int, low: int, total: int, prec: int) -> Padic:
    if prec <= low:
        return Padic.zero(p, prec)
    total %= p ** (prec - low)
    if total == 0:
        return Padic.zero(p, prec)
    v = 0
    while total % p == 0:
        total //= p
        v += 1
    return Padic(p, low + v, total, prec)


def teichmuller(j: int, p: int, k: int) -> Padic:
    """
    Teichmuller lift tau(j) modulo p^k by iterated p-th powers

    Raises:
        ValueError: If p divides j
    """
    if j % p == 0:
        raise ValueError(f"Teichmuller lift needs a unit, got {j} modulo {p}")
    modulus = p ** k
    x = j % modulus
    for _ in range(k):
        x = pow(x, p, modulus)
    return Padic(p, 0, x, k)
