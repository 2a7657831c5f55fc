"""
Augmentation ideals for mtverify

Membership of group ring elements in products of relative augmentation ideals
I(D_1)^{e_1} ... I(D_r)^{e_r} of Z_p[G], decided from Smith invariants of the
generator lattice reduced modulo p^k, with precision escalation.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .arith import mod_rational
from .groupring import AbelianFieldSpec, GroupRingElement, ZZ_RING
from .linalg import rank_qq


logger = logging.getLogger("mtverify")


Factor = Tuple[FrozenSet[int], int]


@dataclass(frozen=True)
class Undecided:
    """Membership could not be certified at p-adic precision `precision`"""
    precision: int
    lower_bound: int = 0

    def __bool__(self):
        raise TypeError("Undecided has no truth value; test with isinstance")


def _valuation_mod(x: int, p: int, k: int) -> int:
    """Valuation of a residue modulo p^k (k for zero)"""
    if x == 0:
        return k
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def local_invariants(rows: Sequence[Sequence[int]], p: int, k: int) -> List[int]:
    """
    Valuations of the Smith invariants of a Z_p-lattice reduced modulo p^k

    Only invariants p^v with v < k are visible; larger ones vanish modulo p^k.
    """
    modulus = p ** k
    matrix = [[x % modulus for x in row] for row in rows]
    matrix = [row for row in matrix if any(row)]
    invariants = []
    while matrix:
        best = None
        for i, row in enumerate(matrix):
            for j, x in enumerate(row):
                if x:
                    v = _valuation_mod(x, p, k)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        scale = p ** v
        unit_inverse = pow(matrix[i][j] // scale, -1, modulus)
        pivot = [x * unit_inverse % modulus for x in matrix[i]]
        reduced = []
        for r, row in enumerate(matrix):
            if r == i:
                continue
            if row[j]:
                factor = row[j] // scale
                row = [(a - factor * b) % modulus for a, b in zip(row, pivot)]
            row = row[:j] + row[j + 1:]
            if any(row):
                reduced.append(row)
        invariants.append(v)
        matrix = reduced
    return invariants


def module_length(rows: Sequence[Sequence[int]], p: int, k: int) -> int:
    """Length of the Z/p^k-module spanned by the rows"""
    return sum(k - v for v in local_invariants(rows, p, k))


def normalize_factors(spec: AbelianFieldSpec, factors: Iterable[Tuple[Iterable[int], int]]) -> List[Factor]:
    """Replace each subgroup by the subgroup of G it generates and drop zero exponents"""
    result = []
    for subgroup, exponent in factors:
        if exponent < 0:
            raise ValueError(f"ideal exponents must be non-negative, got {exponent}")
        if exponent:
            result.append((spec.subgroup_generated(subgroup), exponent))
    return result


def subgroup_generators(spec: AbelianFieldSpec, subgroup: FrozenSet[int]) -> List[int]:
    """A small generating set of a subgroup of G"""
    generated = spec.subgroup_generated([])
    result = []
    for d in sorted(subgroup):
        if d not in generated:
            result.append(d)
            generated = spec.subgroup_generated(result)
    return result


def ideal_generators(spec: AbelianFieldSpec, factors: Sequence[Factor]) -> List[GroupRingElement]:
    """
    Ideal generators of prod I(D_i)^{e_i}: products of (d - 1) over multisets of
    generators of each D_i
    """
    per_factor = []
    for subgroup, exponent in factors:
        basics = [GroupRingElement.sigma(spec, d, ZZ_RING) - 1 for d in subgroup_generators(spec, subgroup)]
        products = []
        for choice in combinations_with_replacement(basics, exponent):
            element = GroupRingElement.one(spec, ZZ_RING)
            for y in choice:
                element = element * y
            products.append(element)
        per_factor.append(products)
    generators = []
    for choice in product(*per_factor):
        element = GroupRingElement.one(spec, ZZ_RING)
        for y in choice:
            element = element * y
        if not element.is_zero():
            generators.append(element)
    return generators


def lattice_rows(spec: AbelianFieldSpec, factors: Sequence[Factor]) -> List[List[int]]:
    """Z_p-module generators of the ideal: all G-translates of the ideal generators"""
    rows = set()
    for g in ideal_generators(spec, factors):
        for h in spec.elements:
            rows.add(tuple(int(c) for c in (g * GroupRingElement.sigma(spec, h, ZZ_RING)).vector()))
    return [list(row) for row in sorted(rows)]


def ideal_rank(spec: AbelianFieldSpec, factors: Sequence[Factor]) -> int:
    """
    Rank of prod I(D_i)^{e_i} over Z_p

    Equal to the number of characters of G nontrivial on every D_i, counted by
    inclusion-exclusion over the subgroups generated by unions of the D_i.
    """
    subgroups = [subgroup for subgroup, _ in factors]
    total = 0
    for size in range(len(subgroups) + 1):
        for chosen in combinations(subgroups, size):
            joined = spec.subgroup_generated([d for subgroup in chosen for d in subgroup])
            total += (-1) ** size * (spec.order // len(joined))
    return total


def in_rational_span(x: GroupRingElement, factors: Sequence[Factor]) -> bool:
    """x lies in Q_p * prod I(D_i) iff its image in Q[G/D_i] vanishes for every i"""
    spec = x.spec
    for subgroup, _ in factors:
        seen = set()
        for a in spec.elements:
            if a in seen:
                continue
            coset = {spec.multiply(a, d) for d in subgroup}
            seen |= coset
            if sum((Fraction(x.coefficient(c)) for c in coset), Fraction(0)) != 0:
                return False
    return True


def _exact(x: GroupRingElement) -> GroupRingElement:
    return x if x.ring.kind != 'ZP' else x.to_rational()


def _lattice_membership(
    rows: Sequence[Sequence],
    target: Sequence,
    rank: int,
    p: int,
    k: int,
    max_k: int,
) -> Union[bool, Undecided]:
    """
    Decide target in the Z_p-span of p-integral rows, given that target lies in
    their Q_p-span and the span has the stated rank

    Once all `rank` Smith invariants are visible modulo p^k, membership
    modulo p^k is equivalent to membership in the lattice.
    """
    precision = max(k, 1)
    while True:
        modulus = p ** precision
        reduced = [[mod_rational(c, modulus, p) for c in row] for row in rows]
        invariants = local_invariants(reduced, p, precision)
        if len(invariants) >= rank:
            image = [mod_rational(c, modulus, p) for c in target]
            before = sum(precision - v for v in invariants)
            after = module_length(reduced + [image], p, precision)
            logger.debug(f"membership at p^{precision}: rank {rank}, length {before} -> {after}")
            return before == after
        if precision >= max_k:
            logger.info(f"membership undecided at precision p^{precision}")
            return Undecided(precision)
        precision = min(2 * precision, max_k)
        logger.debug(f"escalating membership precision to p^{precision}")


def is_member(
    x: GroupRingElement,
    factors: Iterable[Tuple[Iterable[int], int]],
    p: int,
    k: int,
    max_k: int = 64,
) -> Union[bool, Undecided]:
    """
    Decide x in prod I(D_i)^{e_i} as an ideal of Z_p[G]

    Elements over Z/p^k are tested through their least non-negative lift.

    Args:
        x: Group ring element
        factors: (subgroup, exponent) pairs; subgroups as iterables of residues
        p: Prime
        k: Starting precision
        max_k: Largest precision tried before giving up

    Returns:
        True or False when certified, otherwise Undecided
    """
    x = _exact(x)
    spec = x.spec
    factors = normalize_factors(spec, factors)
    if not x.p_integral(p):
        return False
    if not in_rational_span(x, factors):
        return False
    if x.is_zero():
        return True
    return _lattice_membership(lattice_rows(spec, factors), x.vector(), ideal_rank(spec, factors), p, k, max_k)


def in_ideal(
    x: GroupRingElement,
    generators: Sequence[GroupRingElement],
    p: int,
    k: int,
    max_k: int = 64,
) -> Union[bool, Undecided]:
    """
    Decide x in the ideal of Z_p[G] generated by p-integral elements

    Raises:
        ValueError: If a generator is not p-integral
    """
    x = _exact(x)
    spec = x.spec
    for g in generators:
        if not _exact(g).p_integral(p):
            raise ValueError(f"ideal generator {g} is not {p}-integral")
    if not x.p_integral(p):
        return False
    if x.is_zero():
        return True
    rows = set()
    for g in generators:
        g = _exact(g)
        for h in spec.elements:
            rows.add(tuple((g * GroupRingElement.sigma(spec, h)).vector()))
    rows = [list(row) for row in sorted(rows)]
    rank = rank_qq(rows)
    if rank_qq(rows + [x.vector()]) != rank:
        return False
    return _lattice_membership(rows, x.vector(), rank, p, k, max_k)


def aug_order(
    x: GroupRingElement,
    p: int,
    k: int,
    cap: int,
    subgroups: Optional[Iterable[Tuple[Iterable[int], int]]] = None,
    max_k: int = 64,
) -> Union[int, Undecided]:
    """
    Largest n <= cap with x in J^n, J = prod I(D_i)^{e_i} (J = I(G) by default)

    Returns:
        The order, or Undecided carrying the last certified lower bound
    """
    spec = x.spec
    base = [(spec.elements, 1)] if subgroups is None else list(subgroups)
    order = 0
    for n in range(1, cap + 1):
        verdict = is_member(x, [(subgroup, e * n) for subgroup, e in base], p, k, max_k)
        if isinstance(verdict, Undecided):
            return Undecided(verdict.precision, order)
        if not verdict:
            return order
        order = n
    return order
