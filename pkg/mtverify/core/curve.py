"""
Elliptic curve data for mtverify

Ingests an integral Weierstrass model and derives the local invariants used
by every other module: Frobenius traces, reduction types, Tamagawa numbers,
rational torsion and the Tate period at split multiplicative primes.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import yaml
from sympy import Poly, Symbol, factorint, legendre_symbol, primefactors, primerange

from ..errors import ConfigInvalid, InconsistentInvariant, NotMinimal, PrecisionUnsupported
from .arith import valuation


logger = logging.getLogger("mtverify")


class ReductionKind(str, Enum):
    """Reduction types of an elliptic curve at a prime"""
    good = "good"
    split_multiplicative = "split_multiplicative"
    nonsplit_multiplicative = "nonsplit_multiplicative"
    additive = "additive"


_KIND_AP = {
    ReductionKind.split_multiplicative: 1,
    ReductionKind.nonsplit_multiplicative: -1,
    ReductionKind.additive: 0,
}


@dataclass(frozen=True)
class ReductionOverride:
    """User-supplied local data for primes the classifier does not handle"""
    ell: int
    kind: ReductionKind
    tamagawa: Optional[int] = None


@dataclass(frozen=True)
class ReductionInfo:
    prime: int
    kind: ReductionKind
    a_ell: int
    tamagawa: Optional[int]

    @property
    def is_multiplicative(self) -> bool:
        return self.kind in (ReductionKind.split_multiplicative, ReductionKind.nonsplit_multiplicative)


@dataclass(frozen=True)
class CurveData:
    """
    Integral Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6

    The model is assumed to be globally minimal. The conductor is supplied by
    the caller and checked against the support of the discriminant.
    """
    label: str
    a_invariants: Tuple[int, int, int, int, int]
    conductor: int
    overrides: Tuple[ReductionOverride, ...] = field(default=())

    def __post_init__(self):
        if len(self.a_invariants) != 5:
            raise ConfigInvalid(f"Curve {self.label}: expected five a-invariants")
        if self.conductor <= 0:
            raise ConfigInvalid(f"Curve {self.label}: conductor must be positive")
        if self.discriminant == 0:
            raise ConfigInvalid(f"Curve {self.label}: singular model (discriminant 0)")
        bad = set(primefactors(abs(self.discriminant)))
        for q in primefactors(self.conductor):
            if q not in bad:
                raise ConfigInvalid(
                    f"Curve {self.label}: conductor prime {q} does not divide the discriminant"
                )
        for q in bad:
            if self.conductor % q:
                raise ConfigInvalid(
                    f"Curve {self.label}: prime {q} divides the discriminant but not the conductor "
                    f"(model not minimal or conductor wrong)"
                )

    @property
    def a1(self) -> int:
        return self.a_invariants[0]

    @property
    def a2(self) -> int:
        return self.a_invariants[1]

    @property
    def a3(self) -> int:
        return self.a_invariants[2]

    @property
    def a4(self) -> int:
        return self.a_invariants[3]

    @property
    def a6(self) -> int:
        return self.a_invariants[4]

    @property
    def b2(self) -> int:
        return self.a1 ** 2 + 4 * self.a2

    @property
    def b4(self) -> int:
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self) -> int:
        return self.a3 ** 2 + 4 * self.a6

    @property
    def b8(self) -> int:
        a1, a2, a3, a4, a6 = self.a_invariants
        return a1 ** 2 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 ** 2 - a4 ** 2

    @property
    def c4(self) -> int:
        return self.b2 ** 2 - 24 * self.b4

    @property
    def c6(self) -> int:
        return -self.b2 ** 3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 ** 2 * b8 - 8 * b4 ** 3 - 27 * b6 ** 2 + 9 * b2 * b4 * b6

    @property
    def j_invariant(self) -> Fraction:
        return Fraction(self.c4 ** 3, self.discriminant)

    @property
    def is_semistable(self) -> bool:
        return all(e == 1 for e in factorint(self.conductor).values())

    def one_n(self, ell: int) -> int:
        """The indicator 1_N(ell): 1 if ell does not divide N, else 0"""
        return 0 if self.conductor % ell == 0 else 1

    def override(self, ell: int) -> Optional[ReductionOverride]:
        for item in self.overrides:
            if item.ell == ell:
                return item
        return None

    def with_overrides(self, overrides: Sequence[ReductionOverride]) -> "CurveData":
        return CurveData(self.label, self.a_invariants, self.conductor, tuple(overrides))


def load_curve(path) -> CurveData:
    """
    Load a curve input file

    Format: {"label": str, "a": [a1,a2,a3,a4,a6], "N": int,
             "overrides": [{"ell": int, "kind": str, "tamagawa": int}]}

    Args:
        path: Path to the JSON/YAML curve file

    Returns:
        CurveData instance

    Raises:
        FileNotFoundError: If the file does not exist
        ConfigInvalid: If required fields are missing or malformed
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Curve file not found: {path}")
    try:
        with open(path, 'r') as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigInvalid(f"Error parsing curve file {path}: {e}")
    return curve_from_dict(data or {}, source=str(path))


def curve_from_dict(data: Dict, source: str = "<dict>") -> CurveData:
    """Build CurveData from the parsed curve file contents"""
    for key in ('label', 'a', 'N'):
        if key not in data:
            raise ConfigInvalid(f"Curve file {source} is missing '{key}'")
    try:
        a_invariants = tuple(int(x) for x in data['a'])
        conductor = int(data['N'])
    except (TypeError, ValueError) as e:
        raise ConfigInvalid(f"Curve file {source}: non-integral data ({e})")
    overrides = []
    for entry in data.get('overrides') or []:
        try:
            kind = ReductionKind(entry['kind'])
            tamagawa = entry.get('tamagawa')
            overrides.append(ReductionOverride(
                ell=int(entry['ell']),
                kind=kind,
                tamagawa=int(tamagawa) if tamagawa is not None else None,
            ))
        except (KeyError, ValueError) as e:
            raise ConfigInvalid(f"Curve file {source}: malformed override {entry!r} ({e})")
    return CurveData(str(data['label']), a_invariants, conductor, tuple(overrides))


def count_points(curve: CurveData, ell: int) -> int:
    """
    Number of points of the reduced cubic over F_ell, singular point included

    For odd ell the equation is completed to s^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    and the square roots of each value are read from a table; ell = 2 is
    counted by brute force.
    """
    if ell == 2:
        a1, a2, a3, a4, a6 = (a % 2 for a in curve.a_invariants)
        affine = sum(
            1
            for x in range(2)
            for y in range(2)
            if (y * y + a1 * x * y + a3 * y - x ** 3 - a2 * x * x - a4 * x - a6) % 2 == 0
        )
        return affine + 1
    roots = [0] * ell
    for s in range(ell):
        roots[s * s % ell] += 1
    b2, b4, b6 = curve.b2 % ell, (2 * curve.b4) % ell, curve.b6 % ell
    total = 1
    for x in range(ell):
        total += roots[(((4 * x + b2) * x + b4) * x + b6) % ell]
    return total


def count_points_character_sum(curve: CurveData, ell: int) -> int:
    """Independent count through the quadratic character sum (odd ell)"""
    if ell == 2:
        return count_points(curve, 2)
    b2, b4, b6 = curve.b2, 2 * curve.b4, curve.b6
    character_sum = 0
    for x in range(ell):
        value = (((4 * x + b2) * x + b4) * x + b6) % ell
        if value:
            character_sum += legendre_symbol(value, ell)
    return ell + 1 + character_sum


def compute_ap(curve: CurveData, ell: int) -> int:
    """
    Trace of Frobenius a_ell = ell + 1 - #E(F_ell)

    Args:
        curve: Curve data
        ell: Prime

    Returns:
        a_ell (for bad primes the value of the multiplicative or additive type)

    Raises:
        PrecisionUnsupported: For bad ell in {2, 3} without an override
    """
    override = curve.override(ell)
    if override is not None:
        if override.kind == ReductionKind.good:
            return ell + 1 - count_points(curve, ell)
        return _KIND_AP[override.kind]
    if ell <= 3 and curve.discriminant % ell == 0:
        raise PrecisionUnsupported(
            f"Curve {curve.label}: bad prime {ell} needs an explicit reduction override"
        )
    return ell + 1 - count_points(curve, ell)


def classify_reduction(curve: CurveData, ell: int) -> ReductionInfo:
    """
    Classify the reduction of the curve at ell

    Args:
        curve: Curve data (minimal at ell)
        ell: Prime, at least 5 unless an override is supplied

    Returns:
        ReductionInfo with kind, a_ell and Tamagawa number

    Raises:
        NotMinimal: If ord(c4) >= 4 and ord(Delta) >= 12
        PrecisionUnsupported: For bad ell in {2, 3} without an override
    """
    override = curve.override(ell)
    if override is not None:
        a_ell = compute_ap(curve, ell)
        tamagawa = override.tamagawa
        if override.kind == ReductionKind.good:
            tamagawa = 1
        elif override.kind == ReductionKind.split_multiplicative and tamagawa is None:
            tamagawa = valuation(curve.discriminant, ell)
        return ReductionInfo(ell, override.kind, a_ell, tamagawa)

    delta = curve.discriminant
    if delta % ell:
        a_ell = compute_ap(curve, ell)
        if a_ell * a_ell > 4 * ell:
            raise RuntimeError(f"Hasse bound violated at {ell}: a = {a_ell}")
        return ReductionInfo(ell, ReductionKind.good, a_ell, 1)

    if ell <= 3:
        raise PrecisionUnsupported(
            f"Curve {curve.label}: bad prime {ell} needs an explicit reduction override"
        )

    ord_delta = valuation(delta, ell)
    c4 = curve.c4
    ord_c4 = valuation(c4, ell) if c4 else math.inf
    if ord_c4 >= 4 and ord_delta >= 12:
        raise NotMinimal(
            f"Curve {curve.label} is not minimal at {ell}: ord(c4)={ord_c4}, ord(Delta)={ord_delta}"
        )

    if ord_c4 == 0:
        residue = (-curve.c6) % ell
        if residue and legendre_symbol(residue, ell) == 1:
            return ReductionInfo(ell, ReductionKind.split_multiplicative, 1, ord_delta)
        tamagawa = 2 if ord_delta % 2 == 0 else 1
        return ReductionInfo(ell, ReductionKind.nonsplit_multiplicative, -1, tamagawa)

    return ReductionInfo(ell, ReductionKind.additive, 0, None)


def local_data(curve: CurveData) -> List[ReductionInfo]:
    """Reduction data at every prime dividing the conductor"""
    return [classify_reduction(curve, q) for q in primefactors(curve.conductor)]


def nonsingular_point_count(curve: CurveData, ell: int) -> int:
    """Number of nonsingular points of the reduction at a bad prime"""
    return count_points(curve, ell) - 1


@lru_cache(maxsize=32)
def an_list(curve: CurveData, bound: int) -> Tuple[int, ...]:
    """
    Coefficients a_0, ..., a_bound of the attached newform

    Multiplicative in n; at prime powers a_{l^(k+1)} = a_l a_{l^k} - l a_{l^(k-1)}
    for good l and a_{l^k} = a_l^k for bad l.
    """
    coefficients = [0] * (bound + 1)
    if bound >= 1:
        coefficients[1] = 1
    smallest = list(range(bound + 1))
    for q in primerange(2, int(math.isqrt(bound)) + 1):
        for n in range(q * q, bound + 1, q):
            if smallest[n] == n:
                smallest[n] = q

    for q in primerange(2, bound + 1):
        a_q = compute_ap(curve, q)
        good = curve.one_n(q)
        previous, current = 1, a_q
        power = q
        while power <= bound:
            coefficients[power] = current
            previous, current = current, a_q * current - good * q * previous
            power *= q

    for n in range(2, bound + 1):
        q = smallest[n]
        rest, power = n, 1
        while rest % q == 0:
            rest //= q
            power *= q
        if rest > 1:
            coefficients[n] = coefficients[power] * coefficients[rest]
    return tuple(coefficients)


def root_number(curve: CurveData) -> Optional[int]:
    """
    Global root number for semistable curves, w = -prod_{l | N} (-a_l)

    Returns:
        +1 or -1, or None when N is not squarefree
    """
    if not curve.is_semistable:
        return None
    local = 1
    for q in primefactors(curve.conductor):
        local *= -compute_ap(curve, q)
    return -local


def _short_model(curve: CurveData) -> Tuple[int, int]:
    return -27 * curve.c4, -54 * curve.c6


def _add_points(P, Q, A: int):
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2 and y1 == -y2:
        return None
    if P == Q:
        slope = (3 * x1 * x1 + A) / (2 * y1)
    else:
        slope = (y2 - y1) / (x2 - x1)
    x3 = slope * slope - x1 - x2
    y3 = slope * (x1 - x3) - y1
    return (x3, y3)


def _point_order(P, A: int, bound: int = 12) -> Optional[int]:
    # Multiples of a torsion point are integral, so a fractional multiple ends the search
    current = P
    for n in range(1, bound + 1):
        if current is None:
            return n
        if current[0].denominator != 1 or current[1].denominator != 1:
            return None
        current = _add_points(current, P, A)
    return None


def torsion_order(curve: CurveData) -> int:
    """
    Order of E(Q)_tors by a Lutz-Nagell search

    Works on the integral short model y^2 = x^3 - 27 c4 x - 54 c6. Candidate
    y-coordinates are 0 and the divisors d with d^2 | 4A^3 + 27B^2; the order
    of each candidate point is bounded by Mazur's theorem.

    Returns:
        The number of rational torsion points (identity included)

    Raises:
        InconsistentInvariant: If the count does not divide #E(F_l) for the
            first good primes l >= 5
    """
    A, B = _short_model(curve)
    disc = 4 * A ** 3 + 27 * B ** 2
    factors = factorint(abs(disc))
    y_values = [1]
    for q, exponent in factors.items():
        y_values = [y * q ** e for y in y_values for e in range(exponent // 2 + 1)]
    y_values = [0] + sorted(y_values)

    X = Symbol('x')
    torsion = 1
    for y in y_values:
        cubic = Poly(X ** 3 + A * X + B - y * y, X)
        for root in cubic.ground_roots():
            P = (Fraction(int(root)), Fraction(y))
            if _point_order(P, A) is None:
                continue
            torsion += 1 if y == 0 else 2

    _check_torsion_against_reductions(curve, torsion)
    return torsion


def _check_torsion_against_reductions(curve: CurveData, torsion: int, primes: int = 8) -> None:
    gcd = 0
    checked = 0
    for q in primerange(5, 200):
        if curve.discriminant % q == 0:
            continue
        gcd = math.gcd(gcd, count_points(curve, q))
        checked += 1
        if checked >= primes:
            break
    if gcd and gcd % torsion:
        raise InconsistentInvariant(
            f"torsion order {torsion} of {curve.label} does not divide gcd #E(F_l) = {gcd}"
        )


# q-expansions for the Tate parametrisation


def _sigma3(n: int) -> int:
    return sum(d ** 3 for d in range(1, n + 1) if n % d == 0)


def _series_mul(a: Sequence[int], b: Sequence[int], terms: int) -> List[int]:
    result = [0] * terms
    for i, x in enumerate(a[:terms]):
        if x:
            for j in range(terms - i):
                result[i + j] += x * b[j]
    return result


@lru_cache(maxsize=8)
def inverse_j_series(terms: int) -> Tuple[int, ...]:
    """
    Coefficients t_1, ..., t_terms of 1/j(q) = Delta(q)/E4(q)^3 (index 0 is 0)

    Delta = q prod (1 - q^n)^24 and E4 = 1 + 240 sum sigma_3(n) q^n are integral,
    and E4^3 has constant term 1, so the quotient is integral.
    """
    size = terms + 1
    eta24 = [1] + [0] * (size - 1)
    for n in range(1, size):
        for _ in range(24):
            for i in range(size - 1, n - 1, -1):
                eta24[i] -= eta24[i - n]
    delta = [0] + eta24[:size - 1]
    e4 = [1] + [240 * _sigma3(n) for n in range(1, size)]
    e4_cubed = _series_mul(_series_mul(e4, e4, size), e4, size)
    quotient = [0] * size
    for n in range(size):
        quotient[n] = delta[n] - sum(quotient[i] * e4_cubed[n - i] for i in range(n))
    return tuple(quotient)


def inverse_j_from_j_series(j_coefficients: Sequence[int], terms: int) -> Tuple[int, ...]:
    """
    1/j as a q-series from the coefficients c_{-1}, c_0, c_1, ... of j(q)

    j = q^-1 (c_{-1} + c_0 q + c_1 q^2 + ...), so 1/j = q / (that power series).
    """
    if len(j_coefficients) < terms or j_coefficients[0] != 1:
        raise ValueError("j-series must start with the coefficient 1 of q^-1 and cover the requested terms")
    unit = list(j_coefficients[:terms])
    inverse = [0] * terms
    inverse[0] = 1
    for n in range(1, terms):
        inverse[n] = -sum(unit[i] * inverse[n - i] for i in range(1, n + 1))
    return tuple([0] + inverse)


def j_series(terms: int) -> Tuple[int, ...]:
    """Coefficients of q^-1, q^0, q^1, ... of j(q), 'terms' of them"""
    t = inverse_j_series(terms)
    # t = q * (1 + t_2 q + ...), so j = q^-1 / (1 + t_2 q + ...)
    unit = [t[i + 1] for i in range(terms)]
    inverse = [0] * terms
    inverse[0] = 1
    for n in range(1, terms):
        inverse[n] = -sum(unit[i] * inverse[n - i] for i in range(1, n + 1))
    return tuple(inverse)


def _revert(series: Sequence[int], terms: int) -> List[int]:
    """Compositional inverse of t = q + ... with integer coefficients"""
    result = [0] * (terms + 1)
    result[1] = 1
    for n in range(2, terms + 1):
        composed = _compose(series, result, n + 1)
        result[n] = -composed[n]
    return result


def _compose(outer: Sequence[int], inner: Sequence[int], size: int) -> List[int]:
    value = [0] * size
    power = [1] + [0] * (size - 1)
    for k in range(1, size):
        power = _series_mul(power, inner, size)
        coefficient = outer[k] if k < len(outer) else 0
        if coefficient:
            for i in range(size):
                value[i] += coefficient * power[i]
    return value


@dataclass(frozen=True)
class TatePeriod:
    """q = ell^valuation * unit with unit known modulo ell^precision"""
    prime: int
    valuation: int
    unit: int
    precision: int

    def unit_mod(self, k: int) -> int:
        if k > self.precision:
            raise PrecisionUnsupported(
                f"Tate period unit known to {self.precision} digits, {k} requested"
            )
        return self.unit % self.prime ** k

    def perturbed(self, factor: int) -> "TatePeriod":
        """The period with its unit multiplied by an integer unit (negative controls)"""
        modulus = self.prime ** self.precision
        return TatePeriod(self.prime, self.valuation, self.unit * factor % modulus, self.precision)


def tate_period(
    curve: CurveData,
    ell: int,
    k: int,
    max_terms: int = 64,
    j_coefficients: Optional[Sequence[int]] = None
) -> TatePeriod:
    """
    Tate period q_{E,ell} at a split multiplicative prime

    Inverts t(q) = 1/j(q) = q - 744 q^2 + ... and evaluates the reversed
    series at t = Delta / c4^3 modulo ell^(Tam + k).

    Args:
        curve: Curve data
        ell: Split multiplicative prime
        k: Number of ell-adic digits wanted for the unit part
        max_terms: Truncation budget for the q-series
        j_coefficients: Optional cached j(q) coefficients (q^-1 first)

    Returns:
        TatePeriod with valuation Tam_ell

    Raises:
        ValueError: If ell is not split multiplicative
        PrecisionUnsupported: If more than max_terms series terms are needed
    """
    info = classify_reduction(curve, ell)
    if info.kind != ReductionKind.split_multiplicative:
        raise ValueError(f"Tate period needs split multiplicative reduction at {ell}, found {info.kind.value}")
    if k < 1:
        raise ValueError("precision k must be positive")

    tam = valuation(curve.discriminant, ell)
    terms = -(-k // tam) + 1
    if terms > max_terms:
        raise PrecisionUnsupported(
            f"Tate period to {k} digits needs {terms} series terms, budget is {max_terms}"
        )
    modulus = ell ** (tam + k)
    t_value = curve.discriminant * pow(curve.c4 ** 3, -1, modulus) % modulus

    if j_coefficients is not None:
        t_series = inverse_j_from_j_series(j_coefficients, terms + 1)
    else:
        t_series = inverse_j_series(terms + 1)
    q_series = _revert(t_series, terms)

    q_value = 0
    power = 1
    for i in range(1, terms + 1):
        power = power * t_value % modulus
        q_value = (q_value + q_series[i] * power) % modulus

    # Round trip t(q) = t certifies the reversion at this precision
    check = 0
    power = 1
    for i in range(1, terms + 1):
        power = power * q_value % modulus
        check = (check + t_series[i] * power) % modulus
    if check != t_value:
        raise RuntimeError(f"Tate period round trip failed at {ell}")
    if q_value % ell ** tam or (q_value // ell ** tam) % ell == 0:
        raise RuntimeError(f"Tate period at {ell} does not have valuation {tam}")

    unit = (q_value // ell ** tam) % ell ** k
    logger.debug(f"Tate period at {ell}: ord {tam}, unit {unit} mod {ell}^{k}")
    return TatePeriod(ell, tam, unit, k)
