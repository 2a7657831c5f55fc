"""
Cyclotomic arithmetic for mtverify

Elements of Q(zeta_M) are carried on the larger ring Q[X]/(X^M - 1), where
operators such as X -> X^ell are invertible linear maps. Identities are only
asserted after reduction modulo the cyclotomic polynomial.
"""

import math
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Union

import mpmath as mp
from sympy import Poly, QQ, Symbol, cyclotomic_poly

from ..errors import NotASubfield
from .characters import unit_group
from .groupring import AbelianFieldSpec, GroupRingElement
from .linalg import qq_to_fraction


_X = Symbol('X')


class CyclotomicNumber:
    """
    Element of Q[X]/(X^level - 1); coeffs[i] is the coefficient of zeta^i
    """

    __slots__ = ('level', 'coeffs')

    def __init__(self, level: int, coeffs: Union[Sequence, Dict[int, object]] = None):
        if level < 1:
            raise ValueError(f"level must be positive, got {level}")
        values = [Fraction(0)] * level
        if isinstance(coeffs, dict):
            for i, c in coeffs.items():
                values[i % level] += Fraction(c)
        elif coeffs is not None:
            for i, c in enumerate(coeffs):
                values[i % level] += Fraction(c)
        self.level = level
        self.coeffs = tuple(values)

    def __add__(self, other: "CyclotomicNumber") -> "CyclotomicNumber":
        self._check(other)
        return CyclotomicNumber(self.level, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "CyclotomicNumber") -> "CyclotomicNumber":
        self._check(other)
        return CyclotomicNumber(self.level, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "CyclotomicNumber":
        return CyclotomicNumber(self.level, [-a for a in self.coeffs])

    def __mul__(self, other) -> "CyclotomicNumber":
        if not isinstance(other, CyclotomicNumber):
            scalar = Fraction(other)
            return CyclotomicNumber(self.level, [a * scalar for a in self.coeffs])
        self._check(other)
        result: Dict[int, Fraction] = {}
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    key = (i + j) % self.level
                    result[key] = result.get(key, Fraction(0)) + a * b
        return CyclotomicNumber(self.level, result)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        return self.level == other.level and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.level, self.coeffs))

    def __repr__(self) -> str:
        terms = " + ".join(f"({c})z^{i}" for i, c in enumerate(self.coeffs) if c) or "0"
        return f"CyclotomicNumber[{self.level}]({terms})"

    def _check(self, other: "CyclotomicNumber") -> None:
        if self.level != other.level:
            raise ValueError(f"levels differ: {self.level} and {other.level}")

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def galois(self, a: int) -> "CyclotomicNumber":
        """The map X -> X^a (an automorphism when gcd(a, level) = 1)"""
        result: Dict[int, Fraction] = {}
        for i, c in enumerate(self.coeffs):
            if c:
                key = a * i % self.level
                result[key] = result.get(key, Fraction(0)) + c
        return CyclotomicNumber(self.level, result)

    def embed(self, level: int) -> "CyclotomicNumber":
        """Same element viewed at a multiple of the current level"""
        if level % self.level:
            raise ValueError(f"cannot embed level {self.level} into level {level}")
        step = level // self.level
        return CyclotomicNumber(level, {i * step: c for i, c in enumerate(self.coeffs) if c})

    def specialize(self, k: int, level: int = None) -> "CyclotomicNumber":
        """
        Image under X -> zeta_k for k dividing the level, returned at `level`
        (a multiple of k, default k)
        """
        if self.level % k:
            raise ValueError(f"{k} does not divide the level {self.level}")
        level = level or k
        if level % k:
            raise ValueError(f"{k} does not divide the target level {level}")
        step = level // k
        result: Dict[int, Fraction] = {}
        for i, c in enumerate(self.coeffs):
            if c:
                key = (i % k) * step
                result[key] = result.get(key, Fraction(0)) + c
        return CyclotomicNumber(level, result)

    def reduce_primitive(self) -> List[Fraction]:
        """Coefficients (low degree first) of the remainder modulo Phi_level"""
        if self.is_zero():
            return []
        poly = Poly(list(reversed([QQ(c.numerator, c.denominator) for c in self.coeffs])), _X, domain=QQ)
        remainder = poly.rem(_cyclotomic(self.level))
        coeffs = [qq_to_fraction(c) for c in reversed(remainder.all_coeffs())]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        return coeffs

    def numeric(self):
        """Complex value under zeta -> exp(2 pi i / level)"""
        total = mp.mpc(0)
        for i, c in enumerate(self.coeffs):
            if c:
                total += mp.mpf(c.numerator) / c.denominator * mp.expjpi(mp.mpf(2 * i) / self.level)
        return total

    def coefficient_sum(self) -> Fraction:
        return sum(self.coeffs, Fraction(0))


@lru_cache(maxsize=256)
def _cyclotomic(level: int) -> Poly:
    return Poly(cyclotomic_poly(level, _X), _X, domain=QQ)


def zeta(level: int, power: int = 1) -> CyclotomicNumber:
    return CyclotomicNumber(level, {power % level: 1})


def equals_in_field(x: CyclotomicNumber, y: CyclotomicNumber) -> bool:
    """Equality of the images in Q(zeta_L), L the least common level"""
    level = math.lcm(x.level, y.level)
    return (x.embed(level) - y.embed(level)).reduce_primitive() == []


def apply_group_ring(g: GroupRingElement, x: CyclotomicNumber) -> CyclotomicNumber:
    """
    Act with g in Q[G] on x through the permutation action of sigma_a

    Requires H trivial; the result lives at lcm(m, level).
    """
    spec = g.spec
    if not spec.is_full:
        raise ValueError(f"group ring of {spec} does not act on Q[X]/(X^M - 1); H must be trivial")
    level = math.lcm(spec.m, x.level)
    lifted = x.embed(level)
    result = CyclotomicNumber(level)
    for a, c in g.items():
        lift = a
        while math.gcd(lift, level) != 1:
            lift += spec.m
        result = result + lifted.galois(lift) * Fraction(c)
    return result


def trace(x: CyclotomicNumber, target: Union[int, AbelianFieldSpec]) -> CyclotomicNumber:
    """
    Trace from Q(zeta_level) down to a subfield

    Args:
        x: Element at level M
        target: Level d dividing M (the field Q(zeta_d)) or a field spec

    Raises:
        NotASubfield: If the target is not contained in Q(zeta_M)
    """
    source = AbelianFieldSpec(x.level)
    sub = AbelianFieldSpec(target) if isinstance(target, int) else target
    if not source.contains(sub):
        raise NotASubfield(f"{sub} is not a subfield of Q(zeta_{x.level})")
    one = sub.representative(1)
    result = CyclotomicNumber(x.level)
    for c in unit_group(x.level).elements():
        if source.restrict(c, sub) == one:
            result = result + x.galois(c)
    return result


def operator_matrix(poly: Sequence, ell: int, level: int) -> List[List[Fraction]]:
    """
    Matrix of sum_i poly[i] * sigma_hat_ell^i on Q[X]/(X^level - 1)

    Column j is the image of X^j.
    """
    rows = [[Fraction(0)] * level for _ in range(level)]
    for i, c in enumerate(poly):
        c = Fraction(c)
        if not c:
            continue
        power = pow(ell, i, level) if level > 1 else 0
        for j in range(level):
            rows[j * power % level][j] += c
    return rows


def eval_operator(poly: Sequence, ell: int, x: CyclotomicNumber) -> CyclotomicNumber:
    """Apply sum_i poly[i] * sigma_hat_ell^i to x"""
    result = CyclotomicNumber(x.level)
    for i, c in enumerate(poly):
        if Fraction(c):
            result = result + x.galois(ell ** i) * Fraction(c)
    return result


def apply_matrix(matrix: Sequence[Sequence], x: CyclotomicNumber) -> CyclotomicNumber:
    """Apply a level x level matrix (column convention of operator_matrix) to x"""
    if len(matrix) != x.level:
        raise ValueError(f"matrix of size {len(matrix)} does not act at level {x.level}")
    values = []
    for row in matrix:
        values.append(sum((Fraction(a) * b for a, b in zip(row, x.coeffs) if a and b), Fraction(0)))
    return CyclotomicNumber(x.level, values)
