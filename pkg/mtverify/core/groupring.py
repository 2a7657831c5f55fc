"""
Group ring arithmetic for mtverify

Exact arithmetic in R[G] for G = (Z/m)^x / H and R one of Z, Q or Z/p^k.
Group elements are the least positive residues of their cosets, which fixes
every matrix layout built on top of them.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from sympy import primefactors

from ..errors import NotASubfield
from .arith import canonical_residue, crt_lift, prime_power_part, valuation
from .characters import (
    DirichletCharacter,
    character_values_mod_p,
    characters,
    field_with_roots,
    unit_group,
)
from .linalg import det_zz, solve_qq


logger = logging.getLogger("mtverify")


def _closure(generators: Iterable[int], m: int) -> FrozenSet[int]:
    """Subgroup of (Z/m)^x generated by the given residues"""
    group = {canonical_residue(1, m)}
    frontier = list(group)
    generators = [canonical_residue(g, m) for g in generators]
    while frontier:
        x = frontier.pop()
        for g in generators:
            y = canonical_residue(x * g, m)
            if y not in group:
                group.add(y)
                frontier.append(y)
    return frozenset(group)


@dataclass(frozen=True)
class AbelianFieldSpec:
    """
    The fixed field K of H inside Q(zeta_m), with G = Gal(K/Q) = (Z/m)^x / H

    Two specs are equal when they describe the same subgroup at the same level.
    """
    m: int
    generators: Tuple[int, ...] = field(default=(), compare=False)
    subgroup: FrozenSet[int] = field(init=False, repr=False)
    elements: Tuple[int, ...] = field(init=False, repr=False, compare=False)
    _representative: Dict[int, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"Field level must be positive, got m={self.m}")
        for h in self.generators:
            if math.gcd(h, self.m) != 1:
                raise ValueError(f"Subgroup generator {h} is not a unit modulo {self.m}")
        subgroup = _closure(self.generators, self.m)
        representative: Dict[int, int] = {}
        for a in unit_group(self.m).elements():
            if a in representative:
                continue
            coset = [canonical_residue(a * h, self.m) for h in subgroup]
            rep = min(coset)
            for c in coset:
                representative[c] = rep
        object.__setattr__(self, 'subgroup', subgroup)
        object.__setattr__(self, '_representative', representative)
        object.__setattr__(self, 'elements', tuple(sorted(set(representative.values()))))

    @classmethod
    def parse(cls, text: str) -> "AbelianFieldSpec":
        """
        Parse the text form "m=<int>;H=<comma-separated residues>"

        Raises:
            ValueError: If the text is malformed
        """
        parts = {}
        for chunk in text.replace(' ', '').split(';'):
            if not chunk:
                continue
            key, sep, value = chunk.partition('=')
            if not sep:
                raise ValueError(f"Invalid field spec: {text}. Expected 'm=<int>;H=<residues>'")
            parts[key.lower()] = value
        if 'm' not in parts:
            raise ValueError(f"Invalid field spec: {text}. Missing 'm='")
        try:
            m = int(parts['m'])
            generators = tuple(int(x) for x in parts.get('h', '').split(',') if x)
        except ValueError:
            raise ValueError(f"Invalid field spec: {text}. Values must be integers")
        return cls(m, generators)

    def __str__(self) -> str:
        generators = ",".join(str(h) for h in self.minimal_generators())
        return f"m={self.m};H={generators}"

    def minimal_generators(self) -> List[int]:
        return greedy_generators(sorted(self.subgroup), self.m)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def is_full(self) -> bool:
        """True when H is trivial, i.e. K = Q(zeta_m)"""
        return len(self.subgroup) == 1

    def representative(self, a: int) -> int:
        key = canonical_residue(a, self.m)
        if key not in self._representative:
            raise ValueError(f"{a} is not a unit modulo {self.m}")
        return self._representative[key]

    def multiply(self, a: int, b: int) -> int:
        return self._representative[canonical_residue(a * b, self.m)]

    def inverse(self, a: int) -> int:
        return self.representative(pow(a, -1, self.m) if self.m > 1 else 1)

    def power(self, a: int, n: int) -> int:
        if self.m == 1:
            return 1
        if n < 0:
            a, n = pow(a, -1, self.m), -n
        return self.representative(pow(a, n, self.m))

    def element_order(self, a: int) -> int:
        n, x = 1, self.representative(a)
        one = self.representative(1)
        while x != one:
            x = self.multiply(x, a)
            n += 1
        return n

    def _preimage(self, level: int) -> FrozenSet[int]:
        """Units c modulo level whose reduction modulo m lies in H"""
        return frozenset(
            c for c in range(1, level + 1)
            if math.gcd(c, level) == 1 and canonical_residue(c, self.m) in self.subgroup
        )

    def contains(self, sub: "AbelianFieldSpec") -> bool:
        """True if the field of sub is a subfield of this field"""
        level = math.lcm(self.m, sub.m)
        return self._preimage(level) <= sub._preimage(level)

    def restrict(self, a: int, sub: "AbelianFieldSpec") -> int:
        """Image of sigma_a under Gal(K/Q) -> Gal(K'/Q) for a subfield K'"""
        level = math.lcm(self.m, sub.m)
        c = canonical_residue(a, self.m)
        while math.gcd(c, level) != 1:
            c += self.m
        return sub.representative(c)

    def conductor(self) -> int:
        """Smallest d with K inside Q(zeta_d)"""
        for d in range(1, self.m + 1):
            if self.m % d == 0 and AbelianFieldSpec(d).contains(self):
                return d
        return self.m

    def is_primitive(self) -> bool:
        return self.conductor() == self.m

    def subgroup_generated(self, residues: Iterable[int]) -> FrozenSet[int]:
        """Subgroup of G generated by the images of the given units"""
        result = {self.representative(1)}
        frontier = list(result)
        gens = [self.representative(r) for r in residues]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.multiply(x, g)
                if y not in result:
                    result.add(y)
                    frontier.append(y)
        return frozenset(result)

    def tilde_sigma_residue(self, a: int) -> int:
        """
        Representative of the twisted Frobenius element tilde-sigma_a

        Writes m = m1 * m2 with m2 the a-part of m and returns the element acting
        as sigma_a on the m1-part and trivially on the m2-part.
        """
        if a < 1:
            raise ValueError(f"tilde_sigma needs a positive integer, got {a}")
        m2 = prime_power_part(self.m, primefactors(a))
        m1 = self.m // m2
        c = crt_lift(a, m1, 1, m2)
        return self.representative(c if self.m > 1 else 1)

    def inertia_group(self, ell: int) -> FrozenSet[int]:
        """Image in G of the inertia group at ell of Q(zeta_m)/Q"""
        prime_to_ell = self.m // prime_power_part(self.m, [ell])
        return frozenset(
            self.representative(c) for c in unit_group(self.m).elements()
            if (c - 1) % prime_to_ell == 0
        )

    def decomposition_group(self, ell: int) -> FrozenSet[int]:
        """Decomposition group at ell: inertia together with the Frobenius lift"""
        frobenius = self.tilde_sigma_residue(ell)
        return self.subgroup_generated(list(self.inertia_group(ell)) + [frobenius])

    def characters(self) -> List[DirichletCharacter]:
        """Characters of G, i.e. characters modulo m trivial on H"""
        return characters(self.m, tuple(sorted(self.subgroup)))


def greedy_generators(elements: Sequence[int], m: int) -> List[int]:
    """A generating set of the subgroup formed by the given residues"""
    generated = _closure([], m)
    result = []
    for x in sorted(elements):
        if x not in generated:
            result.append(x)
            generated = _closure(result, m)
    return result


@dataclass(frozen=True)
class CoefficientRing:
    """Coefficient ring tag: ZZ, QQ or Z/p^k"""
    kind: str
    p: Optional[int] = None
    k: Optional[int] = None

    @property
    def modulus(self) -> Optional[int]:
        return self.p ** self.k if self.kind == 'ZP' else None

    def __str__(self) -> str:
        return f"Z/{self.p}^{self.k}" if self.kind == 'ZP' else self.kind

    def coerce(self, value):
        if self.kind == 'QQ':
            return Fraction(value)
        if self.kind == 'ZZ':
            value = Fraction(value)
            if value.denominator != 1:
                raise ValueError(f"{value} is not an integer")
            return value.numerator
        value = Fraction(value)
        if value.denominator % self.p == 0:
            raise ValueError(f"{value} is not {self.p}-integral")
        modulus = self.modulus
        return value.numerator * pow(value.denominator, -1, modulus) % modulus


QQ_RING = CoefficientRing('QQ')
ZZ_RING = CoefficientRing('ZZ')


def padic_ring(p: int, k: int) -> CoefficientRing:
    return CoefficientRing('ZP', p, k)


class GroupRingElement:
    """
    Element of R[G] stored as a mapping from coset representatives to coefficients
    """

    __slots__ = ('spec', 'ring', '_coeffs')

    def __init__(self, spec: AbelianFieldSpec, coeffs: Mapping[int, object] = None, ring: CoefficientRing = QQ_RING):
        self.spec = spec
        self.ring = ring
        normalized: Dict[int, object] = {}
        for a, c in (coeffs or {}).items():
            rep = spec.representative(a)
            value = ring.coerce(c)
            if rep in normalized:
                value = ring.coerce(normalized[rep] + value)
            normalized[rep] = value
        self._coeffs = {a: c for a, c in normalized.items() if c != 0}

    # construction

    @classmethod
    def zero(cls, spec: AbelianFieldSpec, ring: CoefficientRing = QQ_RING) -> "GroupRingElement":
        return cls(spec, {}, ring)

    @classmethod
    def one(cls, spec: AbelianFieldSpec, ring: CoefficientRing = QQ_RING) -> "GroupRingElement":
        return cls(spec, {1: 1}, ring)

    @classmethod
    def sigma(cls, spec: AbelianFieldSpec, a: int, ring: CoefficientRing = QQ_RING) -> "GroupRingElement":
        """The group element sigma_a (a a unit modulo m)"""
        return cls(spec, {a: 1}, ring)

    # accessors

    def coefficient(self, a: int):
        return self._coeffs.get(self.spec.representative(a), self.ring.coerce(0))

    def items(self) -> List[Tuple[int, object]]:
        return sorted(self._coeffs.items())

    def vector(self) -> List:
        """Coefficients in the order of spec.elements"""
        zero = self.ring.coerce(0)
        return [self._coeffs.get(a, zero) for a in self.spec.elements]

    def is_zero(self) -> bool:
        return not self._coeffs

    def augmentation(self):
        return self.ring.coerce(sum(self._coeffs.values()))

    def denominator(self) -> int:
        if self.ring.kind != 'QQ':
            return 1
        return math.lcm(*(Fraction(c).denominator for c in self._coeffs.values())) if self._coeffs else 1

    # arithmetic

    def _check(self, other: "GroupRingElement") -> None:
        if self.spec != other.spec:
            raise ValueError(f"group ring elements live in different groups: {self.spec} and {other.spec}")
        if self.ring != other.ring:
            raise ValueError(f"group ring elements have different coefficient rings: {self.ring} and {other.ring}")

    def _coerce_other(self, other) -> "GroupRingElement":
        if isinstance(other, GroupRingElement):
            self._check(other)
            return other
        return GroupRingElement(self.spec, {1: other}, self.ring)

    def __add__(self, other) -> "GroupRingElement":
        other = self._coerce_other(other)
        coeffs = dict(self._coeffs)
        for a, c in other._coeffs.items():
            coeffs[a] = coeffs.get(a, 0) + c
        return GroupRingElement(self.spec, coeffs, self.ring)

    __radd__ = __add__

    def __neg__(self) -> "GroupRingElement":
        return GroupRingElement(self.spec, {a: -c for a, c in self._coeffs.items()}, self.ring)

    def __sub__(self, other) -> "GroupRingElement":
        return self + (-self._coerce_other(other))

    def __rsub__(self, other) -> "GroupRingElement":
        return self._coerce_other(other) - self

    def __mul__(self, other) -> "GroupRingElement":
        if not isinstance(other, GroupRingElement):
            return GroupRingElement(self.spec, {a: c * other for a, c in self._coeffs.items()}, self.ring)
        self._check(other)
        coeffs: Dict[int, object] = {}
        for a, x in self._coeffs.items():
            for b, y in other._coeffs.items():
                ab = self.spec.multiply(a, b)
                coeffs[ab] = coeffs.get(ab, 0) + x * y
        return GroupRingElement(self.spec, coeffs, self.ring)

    def __rmul__(self, other) -> "GroupRingElement":
        return self * other

    def __pow__(self, n: int) -> "GroupRingElement":
        if n < 0:
            return self.inverse() ** (-n)
        result = GroupRingElement.one(self.spec, self.ring)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.spec == other.spec and self.ring == other.ring and self._coeffs == other._coeffs

    def __hash__(self):
        return hash((self.spec, self.ring, tuple(self.items())))

    def __repr__(self) -> str:
        terms = " + ".join(f"({c})*s{a}" for a, c in self.items()) or "0"
        return f"GroupRingElement[{self.spec}, {self.ring}]({terms})"

    # structure

    def sharp(self) -> "GroupRingElement":
        """The involution # : sigma_a -> sigma_a^{-1}"""
        return GroupRingElement(self.spec, {self.spec.inverse(a): c for a, c in self._coeffs.items()}, self.ring)

    def project(self, sub_spec: AbelianFieldSpec) -> "GroupRingElement":
        return project(self, sub_spec)

    def reduce(self, p: int, k: int) -> "GroupRingElement":
        """Image in Z/p^k[G]"""
        ring = padic_ring(p, k)
        if self.ring.kind == 'ZP':
            if self.ring.p != p or self.ring.k < k:
                raise ValueError(f"cannot reduce {self.ring} to {ring}")
        return GroupRingElement(self.spec, dict(self._coeffs), ring)

    def to_rational(self) -> "GroupRingElement":
        """Lift to Q[G] (coefficients of Z/p^k taken as least non-negative residues)"""
        return GroupRingElement(self.spec, dict(self._coeffs), QQ_RING)

    def p_integral(self, p: int) -> bool:
        return all(Fraction(c).denominator % p for c in self._coeffs.values())

    def min_valuation(self, p: int) -> Optional[int]:
        values = [valuation(c, p) for c in self._coeffs.values()]
        return min(values) if values else None

    def multiplication_matrix(self) -> List[List]:
        """Matrix of y -> x*y in the basis spec.elements (column j is x*sigma_j)"""
        elements = self.spec.elements
        position = {a: i for i, a in enumerate(elements)}
        zero = self.ring.coerce(0)
        rows = [[zero] * len(elements) for _ in elements]
        for j, b in enumerate(elements):
            for a, c in self._coeffs.items():
                rows[position[self.spec.multiply(a, b)]][j] += c
        return rows

    def inverse(self) -> "GroupRingElement":
        """
        Inverse in Q[G] (or Z/p^k[G] through its rational lift)

        Raises:
            SingularOperator: If the element is not invertible
        """
        rows = [[Fraction(x) for x in row] for row in self.to_rational().multiplication_matrix()]
        target = [Fraction(int(a == 1)) for a in self.spec.elements]
        solution = solve_qq(rows, target)
        inverse = GroupRingElement(self.spec, dict(zip(self.spec.elements, solution)), QQ_RING)
        if self.ring.kind == 'ZP':
            return inverse.reduce(self.ring.p, self.ring.k)
        return inverse

    def evaluate(self, chi: DirichletCharacter):
        """chi(x) = sum c_a chi(a) as an mpmath complex number"""
        return sum((chi.value(a) * Fraction(c).numerator / Fraction(c).denominator
                    for a, c in self._coeffs.items()), 0)


def tilde_sigma(a: int, spec: AbelianFieldSpec, ring: CoefficientRing = QQ_RING) -> GroupRingElement:
    """The twisted Frobenius element tilde-sigma_a of G"""
    return GroupRingElement.sigma(spec, spec.tilde_sigma_residue(a), ring)


def norm_element(spec: AbelianFieldSpec, subgroup: Iterable[int],
                 ring: CoefficientRing = QQ_RING) -> GroupRingElement:
    """N_U = sum of the elements of a subgroup U of G"""
    return GroupRingElement(spec, {a: 1 for a in set(subgroup)}, ring)


def project(x: GroupRingElement, sub_spec: AbelianFieldSpec) -> GroupRingElement:
    """
    Restriction pi_{K/K'} extended linearly

    Raises:
        NotASubfield: If sub_spec does not describe a subfield of x's field
    """
    if not x.spec.contains(sub_spec):
        raise NotASubfield(f"{sub_spec} is not a subfield of {x.spec}")
    coeffs: Dict[int, object] = {}
    for a, c in x.items():
        b = x.spec.restrict(a, sub_spec)
        coeffs[b] = coeffs.get(b, 0) + c
    return GroupRingElement(sub_spec, coeffs, x.ring)


def norm_lift(x: GroupRingElement, big_spec: AbelianFieldSpec) -> GroupRingElement:
    """
    Corestriction Q[G_{K'}] -> Q[G_K]: each sigma maps to the sum of its preimages

    Raises:
        NotASubfield: If x's field is not contained in big_spec's field
    """
    if not big_spec.contains(x.spec):
        raise NotASubfield(f"{x.spec} is not a subfield of {big_spec}")
    coeffs: Dict[int, object] = {}
    for a in big_spec.elements:
        c = x.coefficient(big_spec.restrict(a, x.spec))
        if c:
            coeffs[a] = c
    return GroupRingElement(big_spec, coeffs, x.ring)


def _prime_to_p_characters(spec: AbelianFieldSpec, p: int) -> List[DirichletCharacter]:
    return [chi for chi in spec.characters() if chi.order % p]


@lru_cache(maxsize=128)
def _character_table(spec: AbelianFieldSpec, p: int):
    chars = _prime_to_p_characters(spec, p)
    order = math.lcm(*(chi.order for chi in chars)) if chars else 1
    field_ = field_with_roots(p, order)
    root = field_.root_of_unity(order)
    table = []
    for chi in chars:
        evaluate = character_values_mod_p(chi, field_, root, order)
        table.append({a: evaluate(a) for a in spec.elements})
    return field_, table


def is_unit(x: GroupRingElement, p: Optional[int] = None) -> bool:
    """
    Unit test in Z_p[G] through characters of the prime-to-p quotient

    x is a unit iff chi(x) is nonzero in F_{p^r} for every character chi of G of
    order prime to p.
    """
    if p is None:
        if x.ring.kind != 'ZP':
            raise ValueError("is_unit needs a prime p for elements over ZZ or QQ")
        p = x.ring.p
    if x.ring.kind != 'ZP' and not x.p_integral(p):
        return False
    field_, table = _character_table(x.spec, p)
    residues = {a: x.ring.coerce(c) if x.ring.kind == 'ZP' else padic_ring(p, 1).coerce(c)
                for a, c in x.items()}
    for values in table:
        total = field_.zero
        for a, c in residues.items():
            total = field_.add(total, field_.scale(values[a], int(c)))
        if total == field_.zero:
            return False
    return True


def brute_force_is_unit(x: GroupRingElement, p: Optional[int] = None) -> bool:
    """Unit test through the determinant of the multiplication matrix modulo p"""
    if p is None:
        p = x.ring.p
    reduced = x.reduce(p, 1) if x.ring.kind != 'ZP' else x
    rows = [[int(c) for c in row] for row in reduced.multiplication_matrix()]
    return det_zz(rows) % p != 0
