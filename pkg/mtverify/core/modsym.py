"""
Modular symbols for mtverify

Two independent routes to the rational numbers [a/m]^+ and [a/m]^-:

- numerically, from the q-expansion of the newform integrated along a
  contour moved by a partial Atkin-Lehner involution W_Q (exponentially
  convergent whenever gcd(m, N) and N / gcd(m, N) are coprime), followed
  by rational reconstruction;
- exactly, from Manin symbols on Gamma_0(N) with the plus and minus
  eigen-duals cut out by Hecke operators and pinned once by the numerics.

Periods are normalized so that lambda(a/m) = [a/m]^+ Omega^+ + [a/m]^- Omega^-
with Omega^+ > 0 and Omega^- in i R_{>0}.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath as mp
from mpmath.libmp import NoConvergence
from sympy import multiplicity, primefactors, primerange

from ..errors import (
    ConvergenceFailure,
    HypothesisViolated,
    NormalizationAmbiguous,
    PrecisionUnsupported,
)
from .arith import continued_fraction_denominators, reconstruct_rational, working_precision
from .characters import DirichletCharacter
from .curve import CurveData, an_list, compute_ap, root_number, torsion_order
from .linalg import nullspace_qq


logger = logging.getLogger("mtverify")


# Periods


@dataclass(frozen=True)
class PeriodPair:
    """
    Neron periods of a minimal model

    omega_plus is real and positive; omega_minus is the positive real number
    with Omega^- = i * omega_minus. omega1, omega2 form an oriented basis of the
    period lattice of the Neron differential.
    """
    omega_plus: object
    omega_minus: object
    c_infty: int
    omega1: object = field(compare=False)
    omega2: object = field(compare=False)

    @property
    def tau(self):
        return self.omega2 / self.omega1


def _real_roots_sorted(roots) -> List:
    return sorted((mp.re(r) for r in roots), reverse=True)


def _agm(a, b):
    try:
        return mp.agm(a, b)
    except (NoConvergence, ZeroDivisionError) as e:
        raise ConvergenceFailure(f"AGM did not converge for ({a}, {b}): {e}")


def period_lattice(curve: CurveData, digits: int = 30) -> PeriodPair:
    """
    Periods of the Neron differential by the arithmetic-geometric mean

    Args:
        curve: Curve data (minimal model)
        digits: Decimal digits of the result

    Returns:
        PeriodPair with c_infty = 2 iff the discriminant is positive

    Raises:
        ConvergenceFailure: If root finding or the AGM stagnates
    """
    if digits < 15:
        raise ValueError(f"period computation needs at least 15 digits, got {digits}")
    with working_precision(digits):
        try:
            roots = mp.polyroots([4, curve.b2, 2 * curve.b4, curve.b6], maxsteps=200, extraprec=2 * digits)
        except NoConvergence as e:
            raise ConvergenceFailure(f"root finding failed for {curve.label}: {e}")

        if curve.discriminant > 0:
            e1, e2, e3 = _real_roots_sorted(roots)
            omega_r = mp.pi / _agm(mp.sqrt(e1 - e3), mp.sqrt(e1 - e2))
            omega_i = mp.pi / _agm(mp.sqrt(e1 - e3), mp.sqrt(e2 - e3))
            periods = PeriodPair(
                omega_plus=2 * omega_r,
                omega_minus=omega_i,
                c_infty=2,
                omega1=mp.mpc(omega_r),
                omega2=mp.mpc(0, omega_i),
            )
        else:
            e1 = min(roots, key=lambda r: abs(mp.im(r)))
            e1 = mp.re(e1)
            e2 = max(roots, key=lambda r: mp.im(r))
            z = mp.sqrt(e1 - e2)
            omega_r = mp.pi / _agm(mp.re(z), abs(z))
            # Real period of the quadratic twist by -1 gives the imaginary part
            z_twist = mp.sqrt(e2 - e1)
            twist = mp.pi / _agm(mp.re(z_twist), abs(z_twist))
            periods = PeriodPair(
                omega_plus=omega_r,
                omega_minus=twist,
                c_infty=1,
                omega1=mp.mpc(omega_r),
                omega2=mp.mpc(omega_r, twist) / 2,
            )
    logger.debug(f"periods of {curve.label}: Omega+ = {mp.nstr(periods.omega_plus, 15)}, "
                 f"Omega-/i = {mp.nstr(periods.omega_minus, 15)}, c_infty = {periods.c_infty}")
    return periods


def lattice_invariants(periods: PeriodPair, digits: int = 30) -> Tuple[object, object]:
    """
    c4 and c6 recomputed from the lattice through Eisenstein series

    c4 = (2 pi / omega1)^4 E4(tau), c6 = (2 pi / omega1)^6 E6(tau).
    """
    with working_precision(digits):
        tau = periods.tau
        q = mp.expjpi(2 * tau)
        e4, e6 = mp.mpc(1), mp.mpc(1)
        n = 1
        qn = q
        while abs(qn) * n ** 6 > mp.mpf(10) ** (-digits - 5):
            divisor_sums = [0, 0]
            for d in range(1, n + 1):
                if n % d == 0:
                    divisor_sums[0] += d ** 3
                    divisor_sums[1] += d ** 5
            e4 += 240 * divisor_sums[0] * qn
            e6 -= 504 * divisor_sums[1] * qn
            n += 1
            qn *= q
        scale = 2 * mp.pi / periods.omega1
        return scale ** 4 * e4, scale ** 6 * e6


# Numeric lambda values


def _terms_needed(decay, digits: int, max_terms: int) -> int:
    """
    Number of terms M with 4 x^(M+1) / (1 - x) below 10^-digits, x = exp(-decay)

    Uses |a_n| / n <= 2 for the tail.
    """
    x = mp.exp(-decay)
    target = digits * mp.log(10) + mp.log(8 / (1 - x))
    terms = int(mp.ceil(target / decay))
    if terms > max_terms:
        raise PrecisionUnsupported(
            f"{terms} series terms needed for {digits} digits, budget is {max_terms}"
        )
    return max(terms, 1)


def coefficients(curve: CurveData, bound: int, cache=None) -> Sequence[int]:
    """a_0, ..., a_bound, read through the coefficient cache when one is given"""
    if cache is not None:
        return cache.an_list(curve, bound)
    return an_list(curve, bound)


def atkin_lehner_sign(curve: CurveData, digits: int = 30, max_terms: int = 20000, cache=None) -> int:
    """
    Eigenvalue eps_N of the Fricke involution on the newform

    For squarefree N this is minus the root number. Otherwise it is read off
    from g(1/t) = -eps t^2 g(t), g(t) = sum a_n exp(-2 pi n t / sqrt(N)).
    """
    w = root_number(curve)
    if w is not None:
        return -w
    with working_precision(digits):
        sqrt_n = mp.sqrt(curve.conductor)
        for t in (mp.mpf('1.1'), mp.mpf('1.23'), mp.mpf('1.37')):
            terms = _terms_needed(2 * mp.pi / (t * sqrt_n), digits, max_terms)
            a = coefficients(curve, terms, cache)

            def g(s):
                return mp.fsum(a[n] * mp.exp(-2 * mp.pi * n * s / sqrt_n) for n in range(1, terms + 1))

            at_t, at_inverse = g(t), g(1 / t)
            if abs(at_t) < mp.mpf(10) ** (-digits // 2):
                continue
            ratio = -at_inverse / (t * t * at_t)
            if abs(abs(ratio) - 1) < mp.mpf(10) ** (-digits // 2):
                sign = 1 if ratio > 0 else -1
                logger.debug(f"Atkin-Lehner sign of {curve.label} detected numerically: {sign}")
                return sign
    raise ConvergenceFailure(f"could not detect the Atkin-Lehner sign of {curve.label}")


def atkin_lehner_eigenvalue(curve: CurveData, Q: int, digits: int = 30, max_terms: int = 20000,
                            cache=None) -> int:
    """
    Eigenvalue w_Q of the partial Atkin-Lehner involution W_Q, Q || N

    w_q = -a_q for q exactly dividing N, and w_N w_{N/Q} = w_Q eps_N otherwise.

    Raises:
        HypothesisViolated: If Q is not an exact divisor of N, or neither Q
            nor N / Q is squarefree-exact
    """
    N = curve.conductor
    if N % Q or math.gcd(Q, N // Q) != 1:
        raise HypothesisViolated(f"W_Q needs Q || N, got Q = {Q}, N = {N}", clauses=["Q exactly divides N"])
    if Q == 1:
        return 1
    if Q == N:
        return atkin_lehner_sign(curve, digits, max_terms, cache)

    def local(part: int) -> Optional[int]:
        value = 1
        for q in primefactors(part):
            if multiplicity(q, N) != 1:
                return None
            value *= -compute_ap(curve, q)
        return value

    direct = local(Q)
    if direct is not None:
        return direct
    complement = local(N // Q)
    if complement is not None:
        return atkin_lehner_sign(curve, digits, max_terms, cache) * complement
    raise HypothesisViolated(
        f"W_{Q} eigenvalue of {curve.label} is not determined by the a_q",
        clauses=["Q or N/Q squarefree-exact"],
    )


def lambda_value(curve: CurveData, a: int, m: int, digits: int = 30, max_terms: int = 20000, cache=None):
    """
    lambda(a/m) = 2 pi int_0^oo f(a/m + i t) dt with absolute error below 10^-digits

    With d = gcd(m, N), Q = N / d and W = [[Q a, y], [N m/d, Q w]] in W_Q
    sending oo to a/m (Q a w - m y = 1), the path is moved through W:
    lambda(a/m) = F(a/m + i s) - w_Q F(-w/m + i s), F(z) = sum (a_n / n) e(n z),
    s = sqrt(Q) / (N m/d).

    Raises:
        HypothesisViolated: If delta(m) = gcd(d, Q) > 1
        PrecisionUnsupported: If the series needs more than max_terms terms
    """
    if m < 1 or math.gcd(a, m) != 1:
        raise ValueError(f"lambda needs gcd(a, m) = 1 and m >= 1, got a={a}, m={m}")
    N = curve.conductor
    d = math.gcd(m, N)
    Q = N // d
    if math.gcd(d, Q) != 1:
        raise HypothesisViolated(
            f"numeric lambda({a}/{m}) needs delta(m) = 1 (N = {N}, gcd(m, N) = {d})",
            clauses=["delta(m) = 1"],
        )
    w_Q = atkin_lehner_eigenvalue(curve, Q, digits, max_terms, cache)
    w = pow(Q * a, -1, m) if m > 1 else 0
    with working_precision(digits):
        height = mp.sqrt(Q) / (N * (m // d))
        decay = 2 * mp.pi * height
        terms = _terms_needed(decay, digits, max_terms)
        a_n = coefficients(curve, terms, cache)
        roots = [mp.expjpi(mp.mpf(2 * k) / m) for k in range(m)]
        x = mp.exp(-decay)
        total = mp.mpc(0)
        power = mp.mpf(1)
        for n in range(1, terms + 1):
            power *= x
            if a_n[n]:
                weight = mp.mpf(a_n[n]) / n * power
                total += weight * (roots[n * a % m] - w_Q * roots[-n * w % m])
        return total


def numeric_symbol_pair(curve: CurveData, a: int, m: int, digits: int = 30,
                        max_terms: int = 20000, max_denominator: int = 10000, cache=None) -> "ModSymValue":
    """
    [a/m]^+ and [a/m]^- by rational reconstruction of Re(lambda)/Omega^+ and
    Im(lambda)/(Omega^-/i), denominators bounded by 2 c_infty |E(Q)_tors|

    Raises:
        PrecisionUnsupported: If either value is not close to an admissible rational
    """
    periods = period_lattice(curve, digits)
    bound = denominator_bound(curve, periods, max_denominator)
    value = lambda_value(curve, a, m, digits, max_terms, cache)
    with working_precision(digits):
        tolerance = mp.mpf(10) ** (-(digits // 2))
        plus = reconstruct_rational(mp.re(value) / periods.omega_plus, bound, tolerance)
        minus = reconstruct_rational(mp.im(value) / periods.omega_minus, bound, tolerance)
    if plus is None or minus is None:
        raise PrecisionUnsupported(
            f"lambda({a}/{m}) of {curve.label} is not within 10^-{digits // 2} of a rational "
            f"with denominator at most {bound}"
        )
    return ModSymValue(plus, minus)


def denominator_bound(curve: CurveData, periods: PeriodPair, max_denominator: int = 10000) -> int:
    """Admissible denominator of a single symbol: 2 c_infty |E(Q)_tors| (Manin constant 1)"""
    return min(2 * periods.c_infty * torsion_order(curve), max_denominator)


# Manin symbols


@dataclass(frozen=True)
class ModSymValue:
    """Exact pair ([a/m]^+, [a/m]^-)"""
    plus: Fraction
    minus: Fraction

    @property
    def total(self) -> Fraction:
        return self.plus + self.minus


def sturm_bound(N: int) -> int:
    index = N
    for q in primefactors(N):
        index = index * (q + 1) // q
    return -(-index // 6)


def heilbronn_merel(ell: int) -> List[Tuple[int, int, int, int]]:
    """Matrices (a, b, c, d) with ad - bc = ell, a > b >= 0, d > c >= 0"""
    matrices = []
    for a in range(1, ell + 1):
        for d in range(1, ell + 2 - a):
            excess = a * d - ell
            if excess < 0:
                continue
            if excess == 0:
                matrices.extend((a, 0, c, d) for c in range(d))
                matrices.extend((a, b, 0, d) for b in range(1, a))
                continue
            for b in range(1, a):
                if excess % b == 0 and excess // b < d:
                    matrices.append((a, b, excess // b, d))
    return matrices


class ManinSymbolSpace:
    """
    Weight-two Manin symbols (c:d) in P^1(Z/N) for Gamma_0(N)

    The symbol (c:d) stands for g{0, oo} with g in SL_2(Z) of bottom row (c, d).
    """

    def __init__(self, N: int):
        self.N = N
        units = [u for u in range(1, N + 1) if math.gcd(u, N) == 1]
        self._index: Dict[Tuple[int, int], int] = {}
        self.symbols: List[Tuple[int, int]] = []
        canonical: Dict[Tuple[int, int], Tuple[int, int]] = {}
        for c in range(N):
            for d in range(N):
                if math.gcd(math.gcd(c, d), N) != 1:
                    continue
                key = min(((u * c) % N, (u * d) % N) for u in units)
                canonical[(c, d)] = key
        for key in sorted(set(canonical.values())):
            self._index[key] = len(self.symbols)
            self.symbols.append(key)
        self._lookup = {pair: self._index[key] for pair, key in canonical.items()}

    @property
    def dimension(self) -> int:
        return len(self.symbols)

    def index(self, c: int, d: int) -> int:
        return self._lookup[(c % self.N, d % self.N)]

    def relation_rows(self) -> List[List[int]]:
        """Two-term (x + xS) and three-term (x + x tau + x tau^2) relations"""
        rows = set()
        n = self.dimension
        for c, d in self.symbols:
            row = [0] * n
            row[self.index(c, d)] += 1
            row[self.index(d, -c)] += 1
            rows.add(tuple(row))
            row = [0] * n
            row[self.index(c, d)] += 1
            row[self.index(d, -c - d)] += 1
            row[self.index(-c - d, c)] += 1
            rows.add(tuple(row))
        return [list(row) for row in sorted(rows)]

    def star_matrix(self) -> List[List[int]]:
        """Rows of the involution (c:d) -> (-c:d) induced by z -> -conj(z)"""
        n = self.dimension
        rows = []
        for c, d in self.symbols:
            row = [0] * n
            row[self.index(-c, d)] += 1
            rows.append(row)
        return rows

    def hecke_matrix(self, ell: int) -> List[List[int]]:
        """Rows of T_ell acting on symbols through the Heilbronn-Merel matrices"""
        n = self.dimension
        matrices = heilbronn_merel(ell)
        rows = []
        for c, d in self.symbols:
            row = [0] * n
            for a, b, c2, d2 in matrices:
                row[self.index(c * a + d * c2, c * b + d * d2)] += 1
            rows.append(row)
        return rows

    def path(self, a: int, m: int) -> List[int]:
        """Coefficient vector of the modular symbol {oo, a/m} in Manin symbols"""
        _, denominators = continued_fraction_denominators(a, m)
        vector = [0] * self.dimension
        previous = 0
        for k, q in enumerate(denominators):
            sign = -1 if k % 2 == 0 else 1
            vector[self.index(sign * q, previous)] += 1
            previous = q
        return vector


def _pairing(functional: Sequence[Fraction], vector: Sequence[int]) -> Fraction:
    return sum((f * v for f, v in zip(functional, vector) if v), Fraction(0))


def eigen_dual(space: ManinSymbolSpace, curve: CurveData, sign: int) -> List[Fraction]:
    """
    The functional on Manin symbols killing all relations, with T_ell = a_ell for
    good ell up to the Sturm bound and star = sign

    Raises:
        NormalizationAmbiguous: If the conditions do not cut out a line
    """
    n = space.dimension
    rows: List[List[int]] = [list(row) for row in space.relation_rows()]
    for ell in primerange(2, sturm_bound(space.N) + 1):
        if space.N % ell == 0:
            continue
        a_ell = compute_ap(curve, ell)
        for i, row in enumerate(space.hecke_matrix(ell)):
            # v(T x) - a_ell v(x) = 0 for every symbol x
            condition = list(row)
            condition[i] -= a_ell
            rows.append(condition)
    for i, row in enumerate(space.star_matrix()):
        condition = list(row)
        condition[i] -= sign
        rows.append(condition)
    kernel = nullspace_qq(rows)
    if len(kernel) != 1:
        raise NormalizationAmbiguous(
            f"Hecke conditions for {curve.label} leave a {len(kernel)}-dimensional "
            f"{'+' if sign > 0 else '-'} eigenspace (expected 1)"
        )
    vector = kernel[0]
    scale = next(x for x in vector if x)
    return [x / scale for x in vector]


class ModularSymbols:
    """
    Exact [a/m]^+ and [a/m]^- for one curve

    The eigen-duals fix each sign up to a scalar, which is pinned by a single
    numeric lambda value at the first point where the dual does not vanish.
    """

    def __init__(self, curve: CurveData, digits: int = 30, pin_search_limit: int = 60,
                 max_terms: int = 20000, max_denominator: int = 10000, cache=None):
        self.curve = curve
        self.cache = cache
        self.digits = digits
        self.max_terms = max_terms
        self.space = ManinSymbolSpace(curve.conductor)
        self.duals = {1: eigen_dual(self.space, curve, 1), -1: eigen_dual(self.space, curve, -1)}
        self.periods = period_lattice(curve, digits)
        self.denominator_bound = denominator_bound(curve, self.periods, max_denominator)
        self.scales: Dict[int, Fraction] = {}
        self.pins: Dict[int, Tuple[int, int]] = {}
        for sign in (1, -1):
            self._pin(sign, pin_search_limit)

    def _candidates(self, sign: int, limit: int):
        start = 1 if sign > 0 else 3
        for m in range(start, limit + 1):
            if math.gcd(m, self.curve.conductor) != 1:
                continue
            for a in range(0 if m == 1 else 1, m):
                if math.gcd(a, m) == 1:
                    yield a, m

    def _pin(self, sign: int, limit: int) -> None:
        dual = self.duals[sign]
        for a, m in self._candidates(sign, limit):
            exact = _pairing(dual, self.space.path(a, m))
            if exact == 0:
                continue
            value = lambda_value(self.curve, a, m, self.digits, self.max_terms, self.cache)
            with working_precision(self.digits):
                if sign > 0:
                    numeric = mp.re(value) / self.periods.omega_plus
                else:
                    numeric = mp.im(value) / self.periods.omega_minus
                tolerance = mp.mpf(10) ** (-(self.digits // 2))
                target = reconstruct_rational(numeric, self.denominator_bound, tolerance)
            if target is None or target == 0:
                raise NormalizationAmbiguous(
                    f"pinning value at {a}/{m} for {self.curve.label} is not a nonzero rational "
                    f"with denominator at most {self.denominator_bound} (got {mp.nstr(numeric, 12)})"
                )
            self.scales[sign] = target / exact
            self.pins[sign] = (a, m)
            logger.debug(f"{self.curve.label}: {'+' if sign > 0 else '-'} symbols pinned at {a}/{m} = {target}")
            return
        raise NormalizationAmbiguous(
            f"no pinning point for the {'+' if sign > 0 else '-'} symbols of {self.curve.label} "
            f"with denominator up to {limit}; raise pin_search_limit"
        )

    def value(self, a: int, m: int) -> ModSymValue:
        if m < 1 or math.gcd(a, m) != 1:
            raise ValueError(f"modular symbol needs gcd(a, m) = 1 and m >= 1, got a={a}, m={m}")
        vector = self.space.path(a, m)
        return ModSymValue(
            self.scales[1] * _pairing(self.duals[1], vector),
            self.scales[-1] * _pairing(self.duals[-1], vector),
        )

    def hecke_defects(self) -> Dict[int, int]:
        """Number of symbols where v(T_ell x) != a_ell v(x), per good ell and sign"""
        defects = {}
        for ell in primerange(2, sturm_bound(self.space.N) + 1):
            if self.space.N % ell == 0:
                continue
            a_ell = compute_ap(self.curve, ell)
            matrix = self.space.hecke_matrix(ell)
            count = 0
            for dual in self.duals.values():
                for i, row in enumerate(matrix):
                    if _pairing(dual, row) != a_ell * dual[i]:
                        count += 1
            defects[ell] = count
        return defects

    def provenance(self) -> Dict[str, object]:
        return {
            "method": "manin_symbols",
            "pins": {("+" if s > 0 else "-"): f"{a}/{m}" for s, (a, m) in self.pins.items()},
            "denominator_bound": self.denominator_bound,
            "c_infty": self.periods.c_infty,
            "manin_constant": 1,
        }


@dataclass(frozen=True)
class SymbolOptions:
    """How modular symbols are obtained, and where coefficients are read from"""
    exact: bool = True
    numeric_crosscheck: bool = False
    digits: int = 30
    pin_search_limit: int = 60
    max_terms: int = 20000
    max_denominator: int = 10000
    cache: object = field(default=None, compare=False, hash=False, repr=False)

    @classmethod
    def from_settings(cls, settings: Dict[str, object], cache=None) -> "SymbolOptions":
        return cls(
            exact=bool(settings.get('exact', True)),
            numeric_crosscheck=bool(settings.get('numeric_crosscheck', False)),
            digits=int(settings.get('decimal_digits', 30)),
            pin_search_limit=int(settings.get('pin_search_limit', 60)),
            max_terms=int(settings.get('max_terms', 20000)),
            max_denominator=int(settings.get('max_denominator', 10000)),
            cache=cache,
        )


@lru_cache(maxsize=16)
def modular_symbols(curve: CurveData, digits: int = 30, pin_search_limit: int = 60,
                    max_terms: int = 20000, max_denominator: int = 10000, cache=None) -> ModularSymbols:
    logger.info(f"Building modular symbols for {curve.label} (level {curve.conductor})")
    return ModularSymbols(curve, digits, pin_search_limit, max_terms, max_denominator, cache)


def delta(m: int, N: int) -> int:
    """gcd(d, N / d) for d = gcd(m, N); the numeric route needs 1"""
    d = math.gcd(m, N)
    return math.gcd(d, N // d)


def modular_symbol_pair(curve: CurveData, a: int, m: int, options: SymbolOptions = SymbolOptions()) -> ModSymValue:
    """
    Exact ([a/m]^+, [a/m]^-)

    With options.exact the Manin symbol route is used, otherwise rational
    reconstruction only. With options.numeric_crosscheck both routes run
    wherever the numeric one applies and must agree.

    Raises:
        NormalizationAmbiguous: If pinning fails or the two routes disagree
    """
    if not options.exact:
        return numeric_symbol_pair(curve, a, m, options.digits, options.max_terms,
                                   options.max_denominator, options.cache)
    symbols = modular_symbols(curve, options.digits, options.pin_search_limit,
                              options.max_terms, options.max_denominator, options.cache)
    value = symbols.value(a, m)
    if options.numeric_crosscheck and delta(m, curve.conductor) == 1:
        numeric = numeric_symbol_pair(curve, a, m, options.digits, options.max_terms,
                                      options.max_denominator, options.cache)
        if numeric != value:
            raise NormalizationAmbiguous(
                f"exact and numeric modular symbols of {curve.label} disagree at {a}/{m}: "
                f"{value} vs {numeric}"
            )
    return value


def symbol_provenance(curve: CurveData, options: SymbolOptions = SymbolOptions()) -> Dict[str, object]:
    if not options.exact:
        return {"method": "rational_reconstruction", "digits": options.digits, "manin_constant": 1}
    symbols = modular_symbols(curve, options.digits, options.pin_search_limit,
                              options.max_terms, options.max_denominator, options.cache)
    provenance = symbols.provenance()
    provenance["numeric_crosscheck"] = options.numeric_crosscheck
    return provenance


# Twisted L-values and analytic rank


def twisted_l_value(curve: CurveData, chi: DirichletCharacter, digits: int = 30, max_terms: int = 20000,
                    cache=None):
    """
    L(E, conj(chi), 1) for chi primitive modulo m with gcd(m, N) = 1

    L(E, conj chi, 1) = sum (a_n / n) x^n [conj chi(n) - eps chi(-1) conj chi(N) (G(conj chi) / G(chi)) chi(n)]
    with x = exp(-2 pi / (m sqrt N)).
    """
    m, N = chi.modulus, curve.conductor
    if not chi.is_primitive():
        raise HypothesisViolated(f"character {chi.label()} is not primitive", clauses=["chi primitive"])
    if math.gcd(m, N) != 1:
        raise HypothesisViolated(f"twisted L-value needs gcd(m, N) = 1 (m = {m}, N = {N})",
                                 clauses=["gcd(m, N) = 1"])
    eps = atkin_lehner_sign(curve, digits, max_terms, cache)
    conjugate = chi.conjugate()
    with working_precision(digits):
        decay = 2 * mp.pi / (m * mp.sqrt(N))
        terms = _terms_needed(decay, digits, max_terms)
        a_n = coefficients(curve, terms, cache)
        factor = eps * chi.value(m - 1 if m > 1 else 1) * conjugate.value(N) \
            * conjugate.gauss_sum() / chi.gauss_sum()
        values = [chi.value(r) for r in range(m)]
        conjugate_values = [conjugate.value(r) for r in range(m)]
        x = mp.exp(-decay)
        total = mp.mpc(0)
        power = mp.mpf(1)
        for n in range(1, terms + 1):
            power *= x
            if a_n[n]:
                r = n % m
                total += mp.mpf(a_n[n]) / n * power * (conjugate_values[r] - factor * values[r])
        return total


@dataclass(frozen=True)
class AnalyticRank:
    """Numerically detected analytic rank (a lower bound once it reaches 2)"""
    rank: int
    sign: int
    value: object
    exact_lower_bound: bool = False


def analytic_rank(curve: CurveData, digits: int = 30, max_terms: int = 20000, cache=None) -> AnalyticRank:
    """
    Analytic rank from L(E, 1) and L'(E, 1)

    L(E, 1) = (1 - eps) sum (a_n / n) exp(-2 pi n / sqrt N) and, when eps = +1,
    L'(E, 1) = 2 sum (a_n / n) E_1(2 pi n / sqrt N).
    """
    eps = atkin_lehner_sign(curve, digits, max_terms, cache)
    with working_precision(digits):
        sqrt_n = mp.sqrt(curve.conductor)
        terms = _terms_needed(2 * mp.pi / sqrt_n, digits, max_terms)
        a = coefficients(curve, terms, cache)
        tolerance = mp.mpf(10) ** (-(digits // 2))
        if eps == -1:
            value = 2 * mp.fsum(mp.mpf(a[n]) / n * mp.exp(-2 * mp.pi * n / sqrt_n) for n in range(1, terms + 1))
            if abs(value) > tolerance:
                return AnalyticRank(0, 1, value)
            return AnalyticRank(2, 1, value, exact_lower_bound=True)
        derivative = 2 * mp.fsum(mp.mpf(a[n]) / n * mp.e1(2 * mp.pi * n / sqrt_n) for n in range(1, terms + 1))
        if abs(derivative) > tolerance:
            return AnalyticRank(1, -1, derivative)
        return AnalyticRank(3, -1, derivative, exact_lower_bound=True)
