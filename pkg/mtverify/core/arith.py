"""
Elementary arithmetic helpers for mtverify

Valuations, residues, CRT splittings and rational reconstruction shared by
the exact and the numerical code paths.
"""

import threading
from contextlib import contextmanager
from fractions import Fraction
from typing import Iterable, Optional, Tuple, Union

import mpmath as mp
from sympy import multiplicity, primefactors
from sympy.ntheory.modular import crt


Rational = Union[int, Fraction]

# mpmath precision is process-global, so numeric sections are serialized
_NUMERIC_LOCK = threading.RLock()


@contextmanager
def working_precision(digits: int, guard: int = 10):
    """Run a numeric section at `digits` decimal digits plus guard digits"""
    with _NUMERIC_LOCK:
        with mp.workdps(digits + guard):
            yield


def valuation(x: Rational, p: int) -> int:
    """
    p-adic valuation of a nonzero rational

    Raises:
        ValueError: If x is zero
    """
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of zero is undefined")
    return multiplicity(p, abs(x.numerator)) - multiplicity(p, x.denominator)


def canonical_residue(a: int, m: int) -> int:
    """Least positive residue of a modulo m (so 1..m, and 1 when m = 1)"""
    return (a - 1) % m + 1


def prime_power_part(m: int, primes: Iterable[int]) -> int:
    """Largest divisor of m supported on the given primes"""
    part = 1
    for q in set(primes):
        if q > 1:
            part *= q ** multiplicity(q, m)
    return part


def radical(m: int) -> int:
    result = 1
    for q in primefactors(m):
        result *= q
    return result


def crt_lift(residue: int, modulus: int, other: int, other_modulus: int) -> int:
    """Solve x = residue mod modulus, x = other mod other_modulus (coprime moduli)"""
    if modulus == 1:
        return other % other_modulus if other_modulus > 1 else 0
    if other_modulus == 1:
        return residue % modulus
    solution = crt([modulus, other_modulus], [residue % modulus, other % other_modulus])
    if solution is None:
        raise ValueError(f"moduli {modulus} and {other_modulus} are not compatible")
    return int(solution[0])


def mod_rational(x: Rational, modulus: int, p: int) -> int:
    """
    Reduce a p-integral rational into Z/modulus where modulus is a power of p

    Raises:
        ValueError: If p divides the denominator
    """
    x = Fraction(x)
    if x.denominator % p == 0:
        raise ValueError(f"{x} is not {p}-integral")
    return x.numerator * pow(x.denominator, -1, modulus) % modulus


def to_fraction(x) -> Fraction:
    """Exact conversion of an mpf (or int) to a Fraction"""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    value = mp.mpf(x)
    if not mp.isfinite(value):
        raise ValueError(f"cannot convert {value} to a rational")
    sign, man, exp, _ = value._mpf_
    result = Fraction(int(man)) * (Fraction(2) ** exp)
    return -result if sign else result


def reconstruct_rational(
    x,
    max_denominator: int,
    tolerance
) -> Optional[Fraction]:
    """
    Recover a rational with bounded denominator from a real approximation

    Uses the continued-fraction convergents of x and accepts the best
    approximation only if it lies within tolerance.

    Args:
        x: Real approximation (mpf or float)
        max_denominator: Largest admissible denominator
        tolerance: Acceptance radius

    Returns:
        The rational, or None if no candidate is close enough
    """
    candidate = to_fraction(x).limit_denominator(max_denominator)
    if abs(mp.mpf(candidate.numerator) / candidate.denominator - mp.mpf(x)) <= tolerance:
        return candidate
    return None


def continued_fraction_denominators(a: int, m: int) -> Tuple[list, list]:
    """
    Numerators and denominators of the convergents of a/m

    Returns:
        (numerators, denominators) starting with the integer part
    """
    numerators, denominators = [], []
    p_prev, p_cur = 1, None
    q_prev, q_cur = 0, None
    x, y = a, m
    first = True
    while True:
        quotient, remainder = divmod(x, y)
        if first:
            p_cur, q_cur = quotient, 1
            first = False
        else:
            p_cur, p_prev = quotient * p_cur + p_prev, p_cur
            q_cur, q_prev = quotient * q_cur + q_prev, q_cur
        numerators.append(p_cur)
        denominators.append(q_cur)
        if remainder == 0:
            break
        x, y = y, remainder
    return numerators, denominators


def format_rational(x: Rational) -> str:
    """Render a rational as 'num/den' (integers as 'num/1')"""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())
