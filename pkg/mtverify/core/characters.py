"""
Dirichlet characters and finite fields for mtverify

Characters of (Z/m)^x are described by exponent vectors over a fixed set of
cyclic generators, so the same character can be evaluated numerically (mpmath)
or in an explicitly constructed F_{p^r} (sympy galoistools).
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import mpmath as mp
from sympy import factorint, n_order, primefactors, primitive_root
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_add, gf_irreducible_p, gf_mul, gf_pow_mod, gf_rem, gf_strip

from .arith import canonical_residue, crt_lift


class UnitGroup:
    """(Z/m)^x as a product of cyclic groups with an explicit discrete logarithm"""

    def __init__(self, m: int):
        if m < 1:
            raise ValueError(f"modulus must be positive, got {m}")
        self.m = m
        self.generators: List[int] = []
        self.orders: List[int] = []
        for q, e in sorted(factorint(m).items()):
            part = q ** e
            rest = m // part
            if q == 2:
                if e >= 2:
                    self._add_generator(crt_lift(-1, part, 1, rest), 2)
                if e >= 3:
                    self._add_generator(crt_lift(5, part, 1, rest), 2 ** (e - 2))
            else:
                root = primitive_root(part)
                self._add_generator(crt_lift(root, part, 1, rest), part - part // q)

        self._log: Dict[int, Tuple[int, ...]] = {}
        for exponents in product(*(range(n) for n in self.orders)):
            value = 1
            for g, e in zip(self.generators, exponents):
                value = value * pow(g, e, m) % m
            self._log[canonical_residue(value, m)] = exponents
        self.exponent = math.lcm(*self.orders) if self.orders else 1

    def _add_generator(self, g: int, order: int) -> None:
        self.generators.append(canonical_residue(g, self.m))
        self.orders.append(order)

    @property
    def order(self) -> int:
        return len(self._log)

    def elements(self) -> List[int]:
        return sorted(self._log)

    def log(self, a: int) -> Tuple[int, ...]:
        """Exponent vector of a with respect to the generators"""
        key = canonical_residue(a, self.m)
        if key not in self._log:
            raise ValueError(f"{a} is not a unit modulo {self.m}")
        return self._log[key]


@lru_cache(maxsize=256)
def unit_group(m: int) -> UnitGroup:
    return UnitGroup(m)


@dataclass(frozen=True)
class DirichletCharacter:
    """
    Character of (Z/modulus)^x with chi(g_i) = exp(2 pi i exponents[i] / order_i)
    """
    modulus: int
    exponents: Tuple[int, ...]

    @property
    def group(self) -> UnitGroup:
        return unit_group(self.modulus)

    @property
    def order(self) -> int:
        group = self.group
        result = 1
        for e, n in zip(self.exponents, group.orders):
            result = math.lcm(result, n // math.gcd(n, e))
        return result

    def index(self, a: int) -> Optional[int]:
        """
        chi(a) = zeta_E^index with E the exponent of the unit group

        Returns:
            The index modulo E, or None when gcd(a, modulus) > 1
        """
        if math.gcd(a, self.modulus) != 1:
            return None
        group = self.group
        total = 0
        for e, n, x in zip(self.exponents, group.orders, group.log(a)):
            total += e * x * (group.exponent // n)
        return total % group.exponent

    def value(self, a: int):
        """Complex value of chi(a) at the current mpmath precision"""
        k = self.index(a)
        if k is None:
            return mp.mpc(0)
        return mp.expjpi(mp.mpf(2 * k) / self.group.exponent)

    def is_trivial(self) -> bool:
        return all(e == 0 for e in self.exponents)

    def is_trivial_on(self, residues: Iterable[int]) -> bool:
        return all(self.index(h) == 0 for h in residues)

    @property
    def parity(self) -> int:
        """+1 for even characters, -1 for odd ones"""
        if self.modulus <= 2:
            return 1
        return 1 if self.index(self.modulus - 1) == 0 else -1

    def conductor(self) -> int:
        for d in sorted(_divisors(self.modulus)):
            kernel = [c for c in range(1, self.modulus + 1)
                      if math.gcd(c, self.modulus) == 1 and c % d == 1 % d]
            if self.is_trivial_on(kernel):
                return d
        return self.modulus

    def is_primitive(self) -> bool:
        return self.conductor() == self.modulus

    def conjugate(self) -> "DirichletCharacter":
        orders = self.group.orders
        return DirichletCharacter(self.modulus, tuple((-e) % n for e, n in zip(self.exponents, orders)))

    def gauss_sum(self):
        """G(chi) = sum_a chi(a) exp(2 pi i a / m)"""
        total = mp.mpc(0)
        for a in self.group.elements():
            total += self.value(a) * mp.expjpi(mp.mpf(2 * a) / self.modulus)
        return total

    def label(self) -> str:
        return f"{self.modulus}:{','.join(str(e) for e in self.exponents)}"


def characters(m: int, kernel: Sequence[int] = ()) -> List[DirichletCharacter]:
    """All characters modulo m trivial on the given residues, in a fixed order"""
    group = unit_group(m)
    result = []
    for exponents in product(*(range(n) for n in group.orders)):
        chi = DirichletCharacter(m, tuple(exponents))
        if chi.is_trivial_on(kernel):
            result.append(chi)
    return result


def primitive_characters(m: int) -> List[DirichletCharacter]:
    return [chi for chi in characters(m) if chi.is_primitive()]


def parse_character(text: str) -> DirichletCharacter:
    """Parse 'm:e1,e2,...' as produced by DirichletCharacter.label()"""
    try:
        modulus, _, rest = text.partition(':')
        exponents = tuple(int(x) for x in rest.split(',') if x.strip())
        chi = DirichletCharacter(int(modulus), exponents)
    except ValueError:
        raise ValueError(f"Invalid character: {text}. Expected 'm:e1,e2,...'")
    if len(exponents) != len(chi.group.orders):
        raise ValueError(
            f"Character modulo {chi.modulus} needs {len(chi.group.orders)} exponents, got {len(exponents)}"
        )
    return chi


def _divisors(n: int) -> List[int]:
    divisors = [1]
    for q, e in factorint(n).items():
        divisors = [d * q ** k for d in divisors for k in range(e + 1)]
    return divisors


def divisors(n: int) -> List[int]:
    return sorted(_divisors(n))


# Finite fields


FieldElement = Tuple[int, ...]


class FiniteField:
    """
    F_{p^r} as F_p[x]/(f) with f the first monic irreducible of degree r

    Elements are coefficient tuples, highest degree first, in the dense
    layout used by sympy.polys.galoistools.
    """

    def __init__(self, p: int, r: int):
        self.p = p
        self.r = r
        self.size = p ** r
        self.modulus = self._first_irreducible()
        self.zero: FieldElement = ()
        self.one: FieldElement = (1,)
        self.generator = self._primitive_element()

    def _first_irreducible(self) -> List[int]:
        for tail in product(range(self.p), repeat=self.r):
            candidate = [1] + list(tail)
            if gf_irreducible_p(candidate, self.p, ZZ):
                return candidate
        raise RuntimeError(f"no irreducible polynomial of degree {self.r} over F_{self.p}")

    def element(self, value: int) -> FieldElement:
        return tuple(gf_strip([value % self.p]))

    def from_digits(self, n: int) -> FieldElement:
        digits = []
        for _ in range(self.r):
            n, digit = divmod(n, self.p)
            digits.append(digit)
        return tuple(gf_strip(list(reversed(digits))))

    def add(self, a: FieldElement, b: FieldElement) -> FieldElement:
        return tuple(gf_add(list(a), list(b), self.p, ZZ))

    def mul(self, a: FieldElement, b: FieldElement) -> FieldElement:
        return tuple(gf_rem(gf_mul(list(a), list(b), self.p, ZZ), self.modulus, self.p, ZZ))

    def power(self, a: FieldElement, n: int) -> FieldElement:
        if n == 0:
            return self.one
        return tuple(gf_pow_mod(list(a), n, self.modulus, self.p, ZZ))

    def scale(self, a: FieldElement, c: int) -> FieldElement:
        return self.mul(a, self.element(c))

    def _primitive_element(self) -> FieldElement:
        order = self.size - 1
        primes = primefactors(order) if order > 1 else []
        for n in range(1, self.size):
            candidate = self.from_digits(n)
            if all(self.power(candidate, order // q) != self.one for q in primes):
                return candidate
        raise RuntimeError(f"no primitive element found in F_{self.size}")

    def root_of_unity(self, order: int) -> FieldElement:
        """An element of exact multiplicative order 'order'"""
        if (self.size - 1) % order:
            raise ValueError(f"F_{self.size} contains no primitive {order}-th root of unity")
        return self.power(self.generator, (self.size - 1) // order)


@lru_cache(maxsize=64)
def finite_field(p: int, r: int) -> FiniteField:
    return FiniteField(p, r)


def field_with_roots(p: int, order: int) -> FiniteField:
    """Smallest F_{p^r} containing the order-th roots of unity (p not dividing order)"""
    if order % p == 0:
        raise ValueError(f"{p} divides {order}: no such roots of unity in characteristic {p}")
    r = n_order(p, order) if order > 1 else 1
    return finite_field(p, r)


def character_values_mod_p(chi: DirichletCharacter, field: FiniteField, root: FieldElement, root_order: int):
    """
    Evaluate chi in a finite field

    Args:
        chi: Character whose order divides root_order
        field: Finite field of characteristic prime to chi.order
        root: Element of exact order root_order

    Returns:
        Function a -> field element (zero on non-units)
    """
    exponent = chi.group.exponent
    if root_order % chi.order:
        raise ValueError(f"character of order {chi.order} needs roots of unity of that order")

    def evaluate(a: int) -> FieldElement:
        k = chi.index(a)
        if k is None:
            return field.zero
        # chi(a) = zeta_E^k has order dividing chi.order, so k is a multiple of E / order
        step = exponent // chi.order
        return field.power(root, (k // step) * (root_order // chi.order) % root_order)

    return evaluate
