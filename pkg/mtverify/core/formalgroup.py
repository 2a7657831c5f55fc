"""
Formal groups for mtverify

Truncated p-adic power series, the formal logarithm and exponential of the
minimal model, the Frobenius operator on series and the Honda-type checks,
including the twisted series g_chi and h_chi = exp o g_chi for d = 1.
"""

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

from ..errors import HypothesisViolated, PrecisionUnsupported
from .arith import valuation
from .curve import CurveData, ReductionKind, classify_reduction, compute_ap
from .otsuki import c_coefficients
from .padic import Padic, teichmuller
from .report import CheckReport, timed


logger = logging.getLogger("mtverify")

DIFFERENTIAL_METHODS = ('dx', 'dy')

Scalar = Union[int, Fraction, Padic]


class PadicSeries:
    """
    Power series sum c_i X^i truncated after degree D, with p-adic coefficients

    Every coefficient carries its own certified absolute precision; the
    guaranteed precision of the series is the smallest of them.
    """

    def __init__(self, p: int, coefficients: Sequence[Padic]):
        if not coefficients:
            raise ValueError("a series needs at least the constant coefficient")
        self.p = p
        self.coefficients: Tuple[Padic, ...] = tuple(coefficients)

    @classmethod
    def from_rationals(cls, p: int, values: Sequence, prec: int) -> "PadicSeries":
        return cls(p, [Padic.from_rational(p, Fraction(v), prec) for v in values])

    @classmethod
    def monomial(cls, p: int, n: int, degree: int) -> "PadicSeries":
        """X^n known exactly, truncated after `degree`"""
        one = Padic.from_rational(p, 1, degree + 1)
        return cls(p, [one if i == n else Padic.exact_zero(p) for i in range(degree + 1)])

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def precision(self) -> int:
        return min(c.prec for c in self.coefficients)

    def __getitem__(self, i: int) -> Padic:
        return self.coefficients[i]

    def __len__(self) -> int:
        return len(self.coefficients)

    def __repr__(self) -> str:
        return f"PadicSeries(p={self.p}, degree={self.degree}, precision={self.precision})"

    def _check(self, other: "PadicSeries") -> None:
        if self.p != other.p:
            raise ValueError(f"series over Q_{self.p} and Q_{other.p} cannot be combined")

    def truncate(self, degree: int) -> "PadicSeries":
        return PadicSeries(self.p, self.coefficients[:degree + 1])

    def __add__(self, other: "PadicSeries") -> "PadicSeries":
        self._check(other)
        size = min(len(self), len(other))
        return PadicSeries(self.p, [self[i] + other[i] for i in range(size)])

    def __neg__(self) -> "PadicSeries":
        return PadicSeries(self.p, [-c for c in self.coefficients])

    def __sub__(self, other: "PadicSeries") -> "PadicSeries":
        return self + (-other)

    def scale(self, factor: Scalar) -> "PadicSeries":
        return PadicSeries(self.p, [c * factor for c in self.coefficients])

    def __mul__(self, other) -> "PadicSeries":
        if not isinstance(other, PadicSeries):
            return self.scale(other)
        self._check(other)
        size = min(len(self), len(other))
        product = [Padic.exact_zero(self.p) for _ in range(size)]
        for i in range(size):
            a = self[i]
            if a.is_zero() and a.is_exact():
                continue
            for j in range(size - i):
                product[i + j] = product[i + j] + a * other[j]
        return PadicSeries(self.p, product)

    __rmul__ = scale

    def compose(self, inner: "PadicSeries") -> "PadicSeries":
        """
        self(inner(X)) by Horner's rule

        Raises:
            ValueError: If inner has a nonzero constant term
        """
        self._check(inner)
        if not inner[0].is_zero():
            raise ValueError("composition needs an inner series without constant term")
        degree = min(self.degree, inner.degree)
        inner = inner.truncate(degree)
        result = PadicSeries(self.p, [self[degree]] + [Padic.exact_zero(self.p)] * degree)
        for i in range(degree - 1, -1, -1):
            result = result * inner
            result = PadicSeries(self.p, [result[0] + self[i]] + list(result.coefficients[1:]))
        return result

    def frobenius(self) -> "PadicSeries":
        """phi-hat: sum b_i X^i -> sum b_i X^(ip) (phi trivial on Q_p)"""
        result = [Padic.exact_zero(self.p) for _ in range(len(self))]
        for i in range(0, self.degree // self.p + 1):
            result[i * self.p] = self[i]
        return PadicSeries(self.p, result)

    def derivative(self) -> "PadicSeries":
        return PadicSeries(self.p, [self[i] * i for i in range(1, len(self))] or [Padic.exact_zero(self.p)])

    def min_valuation(self, start: int = 0) -> Optional[int]:
        """Least valuation among the coefficients from `start` on that are nonzero"""
        values = [c.val for c in self.coefficients[start:] if not c.is_zero()]
        return min(values) if values else None

    def is_integral(self) -> bool:
        """
        Raises:
            PrecisionUnsupported: If a coefficient is not known to integral precision
        """
        for i, c in enumerate(self.coefficients):
            if c.is_zero():
                if c.prec < 0:
                    raise PrecisionUnsupported(f"coefficient {i} only known modulo {self.p}^{c.prec}")
            elif c.val < 0:
                return False
        return True

    def lift(self) -> List[Fraction]:
        return [c.lift() for c in self.coefficients]

    def agrees(self, other: "PadicSeries") -> bool:
        """Equality of all coefficients on the digits both sides certify"""
        self._check(other)
        size = min(len(self), len(other))
        return all(self[i].agrees(other[i]) for i in range(size))


# exact rational series


def _mul_exact(a: Sequence[Fraction], b: Sequence[Fraction], size: int) -> List[Fraction]:
    result = [Fraction(0)] * size
    for i, x in enumerate(a[:size]):
        if x:
            for j, y in enumerate(b[:size - i]):
                if y:
                    result[i + j] += x * y
    return result


def _inverse_exact(a: Sequence[Fraction], size: int) -> List[Fraction]:
    if a[0] == 0:
        raise ZeroDivisionError("series with zero constant term is not invertible")
    result = [Fraction(1) / a[0]]
    for n in range(1, size):
        total = sum((a[i] * result[n - i] for i in range(1, min(n, len(a) - 1) + 1)), Fraction(0))
        result.append(-total / a[0])
    return result


def _divide_exact(a: Sequence[Fraction], b: Sequence[Fraction], size: int) -> List[Fraction]:
    return _mul_exact(a, _inverse_exact(b, size), size)


@lru_cache(maxsize=32)
def _w_series(curve: CurveData, terms: int) -> Tuple[int, ...]:
    """
    w(t) = -1/y as a series in t = -x/y, up to t^(terms - 1)

    w = t^3 + a1 t w + a2 t^2 w + a3 w^2 + a4 t w^2 + a6 w^3, solved
    coefficient by coefficient.
    """
    a1, a2, a3, a4, a6 = curve.a_invariants
    w = [0] * terms
    if terms > 3:
        w[3] = 1

    def square(n: int) -> int:
        return sum(w[i] * w[n - i] for i in range(3, n - 2))

    def cube(n: int) -> int:
        return sum(w[i] * square(n - i) for i in range(3, n - 5))

    for n in range(4, terms):
        w[n] = a1 * w[n - 1] + a2 * w[n - 2] + a3 * square(n) + a4 * square(n - 1) + a6 * cube(n)
    return tuple(w)


@lru_cache(maxsize=32)
def invariant_differential(curve: CurveData, D: int, method: str = 'dx') -> Tuple[int, ...]:
    """
    Coefficients w_0, ..., w_D of the invariant differential omega = (sum w_i t^i) dt

    With S = t^3 / w(t), x = S / t^2 and y = -S / t^3, the two methods use
    omega = dx / (2y + a1 x + a3) and omega = dy / (3x^2 + 2 a2 x + a4 - a1 y).

    Raises:
        ValueError: For an unknown method
        RuntimeError: If a coefficient comes out non-integral
    """
    if method not in DIFFERENTIAL_METHODS:
        raise ValueError(
            f"Unsupported differential method: {method}. Supported methods: {list(DIFFERENTIAL_METHODS)}"
        )
    size = D + 1
    a1, a2, a3, a4, _ = curve.a_invariants
    w = _w_series(curve, size + 3)
    S = _inverse_exact([Fraction(c) for c in w[3:]], size)
    if method == 'dx':
        numerator = [(i - 2) * S[i] for i in range(size)]
        denominator = [
            -2 * S[i] + (a1 * S[i - 1] if i >= 1 else 0) + (a3 if i == 3 else 0)
            for i in range(size)
        ]
    else:
        S2 = _mul_exact(S, S, size)
        numerator = [(3 - i) * S[i] for i in range(size)]
        denominator = [
            3 * S2[i]
            + (a1 * S[i - 1] if i >= 1 else 0)
            + (2 * a2 * S[i - 2] if i >= 2 else 0)
            + (a4 if i == 4 else 0)
            for i in range(size)
        ]
    omega = _divide_exact(numerator, denominator, size)
    for i, c in enumerate(omega):
        if c.denominator != 1:
            raise RuntimeError(f"invariant differential of {curve.label} not integral at degree {i}: {c}")
    return tuple(int(c) for c in omega)


@lru_cache(maxsize=32)
def log_coefficients(curve: CurveData, D: int) -> Tuple[Fraction, ...]:
    """b_0 = 0, b_1 = 1, ..., b_D with b_i = w_(i-1) / i"""
    omega = invariant_differential(curve, D - 1 if D > 1 else 1)
    return (Fraction(0),) + tuple(Fraction(omega[i - 1], i) for i in range(1, D + 1))


@lru_cache(maxsize=32)
def exp_coefficients(curve: CurveData, D: int) -> Tuple[Fraction, ...]:
    """
    Compositional inverse of the logarithm by Lagrange inversion:
    e_n = (1/n) [X^(n-1)] (X / log(X))^n
    """
    log = log_coefficients(curve, D)
    # X / log(X) = 1 / (1 + b_2 X + b_3 X^2 + ...)
    quotient = _inverse_exact(list(log[1:]), D)
    coefficients = [Fraction(0)]
    power = [Fraction(1)] + [Fraction(0)] * (D - 1)
    for n in range(1, D + 1):
        power = _mul_exact(power, quotient, D)
        coefficients.append(power[n - 1] / n)
    return tuple(coefficients)


def _check_degree(D: int, k: int) -> None:
    if D < 2:
        raise ValueError(f"series degree must be at least 2, got {D}")
    if k < 1:
        raise ValueError(f"p-adic precision must be positive, got {k}")


def formal_log(curve: CurveData, p: int, D: int, k: int) -> PadicSeries:
    """
    log of the formal group of the minimal model, to degree D modulo p^k

    The coefficients i * b_i are the integers w_(i-1), so each b_i has
    valuation at least -ord_p(i).
    """
    _check_degree(D, k)
    return PadicSeries.from_rationals(p, log_coefficients(curve, D), k)


def formal_exp(curve: CurveData, p: int, D: int, k: int, budget: int = 64) -> PadicSeries:
    """
    exp of the formal group, to degree D modulo p^k

    Raises:
        PrecisionUnsupported: If a denominator exceeds p^budget
    """
    _check_degree(D, k)
    coefficients = exp_coefficients(curve, D)
    worst = min((valuation(c, p) for c in coefficients if c), default=0)
    if -worst > budget:
        raise PrecisionUnsupported(
            f"exp to degree {D} has denominators {p}^{-worst}, budget is {p}^{budget}"
        )
    return PadicSeries.from_rationals(p, coefficients, k)


def honda_polynomial(curve: CurveData, p: int) -> List[int]:
    """u(X) = p - a_p X + 1_N(p) X^2, low degree first"""
    return [p, -compute_ap(curve, p), curve.one_n(p)]


def _require_honda_prime(curve: CurveData, p: int) -> None:
    clauses = []
    if p <= 3:
        clauses.append("p > 3")
    elif classify_reduction(curve, p).kind == ReductionKind.additive:
        clauses.append("reduction at p is not additive")
    if clauses:
        raise HypothesisViolated(f"Honda type at p={p} needs: {', '.join(clauses)}", clauses=clauses)


def apply_honda_exact(u: Sequence[int], coefficients: Sequence[Fraction], p: int) -> List[Fraction]:
    """Coefficients of u(phi-hat) applied to a series with rational coefficients"""
    result = []
    for n in range(len(coefficients)):
        value = Fraction(0)
        for r, a in enumerate(u):
            if a and n % p ** r == 0:
                value += a * coefficients[n // p ** r]
        result.append(value)
    return result


def apply_honda(u: Sequence[int], series: PadicSeries) -> PadicSeries:
    """u(phi-hat) applied to a p-adic series"""
    result = None
    power = series
    for a in u:
        if a:
            term = power.scale(a)
            result = term if result is None else result + term
        power = power.frobenius()
    return result


def _honda_failures(values: Sequence, p: int) -> List[int]:
    failures = []
    for n, c in enumerate(values):
        if isinstance(c, Padic):
            if c.prec < 1:
                raise PrecisionUnsupported(f"degree {n} of the Honda image known only modulo {p}^{c.prec}")
            ok = c.is_zero() or c.val >= 1
        else:
            ok = c == 0 or valuation(c, p) >= 1
        if not ok:
            failures.append(n)
    return failures


def honda_type_check(curve: CurveData, p: int, D: int, k: int) -> CheckReport:
    """
    Every coefficient of (p - a_p phi-hat + 1_N(p) phi-hat^2)(log) up to degree D
    lies in p Z_p

    The scan runs on the exact rational logarithm; the p-adic series at
    precision k must reach the same verdict.

    Raises:
        HypothesisViolated: If p <= 3 or the reduction at p is additive
    """
    _require_honda_prime(curve, p)
    _check_degree(D, k)
    report = CheckReport("honda", {"curve": curve.label, "p": p, "D": D, "k": k})
    with timed(report):
        u = honda_polynomial(curve, p)
        exact = _honda_failures(apply_honda_exact(u, log_coefficients(curve, D), p), p)
        series = _honda_failures(apply_honda(u, formal_log(curve, p, D, k)).coefficients, p)
        report.witnesses = {
            "type_polynomial": u,
            "failing_degrees": exact[:10],
            "series_failing_degrees": series[:10],
            "log_min_valuation": min(valuation(b, p) for b in log_coefficients(curve, D) if b),
        }
        if exact != series:
            report.set_verdict(False, "exact and p-adic scans disagree")
        else:
            report.set_verdict(not exact)
    logger.debug(f"Honda scan for {curve.label} at p={p} to degree {D}: {report.verdict.value}")
    return report


def padic_binomials(delta: Padic, degree: int) -> List[Padic]:
    """
    binom(delta, l) for l = 0..degree by the falling factorial
    binom(delta, l) = binom(delta, l - 1) (delta - l + 1) / l

    Division by l costs ord_p(l) digits, so binom(delta, l) is certified to
    the precision of delta minus ord_p(l!).
    """
    values = [Padic.from_rational(delta.p, 1, delta.prec)]
    for l in range(1, degree + 1):
        values.append(values[-1] * (delta - (l - 1)) / l)
    return values


def padic_binomial(delta: Padic, l: int) -> Padic:
    return padic_binomials(delta, l)[l]


def twisted_working_precision(D: int, k: int) -> int:
    """Digits carried while building g_chi to degree D for a k-digit answer"""
    return k + 2 * (D + k) + 10


def g_series(curve: CurveData, p: int, s: int, D: int, k: int) -> PadicSeries:
    """
    g_chi(X) = log(X) + (p - 1)^-1 sum_i c_(i+1) sum_j chi^-1(j) ((1 + X)^(tau(j) p^i) - 1)

    for chi = tau^s and d = 1. Terms with i > D + k have valuation above k
    in every degree up to D and are dropped.

    Raises:
        HypothesisViolated: If chi = tau, i.e. s = 1 mod p - 1
    """
    if p <= 3:
        raise HypothesisViolated(f"g_chi needs p > 3, got {p}", clauses=["p > 3"])
    if (s - 1) % (p - 1) == 0:
        raise HypothesisViolated(
            f"g_chi needs chi != tau, got s = {s} = 1 mod {p - 1}",
            clauses=["chi != tau"],
        )
    _check_degree(D, k)
    precision = twisted_working_precision(D, k)
    i_max = D + k
    c = c_coefficients(curve, p, i_max + 1)
    lifts = [teichmuller(j, p, precision) for j in range(1, p)]
    weights = [tau ** (-s) for tau in lifts]
    beta = [Padic.exact_zero(p) for _ in range(D + 1)]
    for i in range(i_max + 1):
        if c[i + 1] == 0:
            continue
        inner = [Padic.exact_zero(p) for _ in range(D + 1)]
        for tau, weight in zip(lifts, weights):
            binomials = padic_binomials(tau * p ** i, D)
            for l in range(1, D + 1):
                inner[l] = inner[l] + weight * binomials[l]
        for l in range(1, D + 1):
            beta[l] = beta[l] + inner[l] * c[i + 1]
    log = PadicSeries.from_rationals(p, log_coefficients(curve, D), precision)
    twist = PadicSeries(p, beta).scale(Fraction(1, p - 1))
    logger.debug(f"g_chi for {curve.label}, p={p}, s={s}: {i_max + 1} terms at {precision} digits")
    return log + twist


def _exp_of(curve: CurveData, g: PadicSeries, D: int, k: int) -> PadicSeries:
    exp = PadicSeries.from_rationals(g.p, exp_coefficients(curve, D), twisted_working_precision(D, k))
    return exp.compose(g)


def h_series(curve: CurveData, p: int, s: int, D: int, k: int) -> PadicSeries:
    """h_chi = exp o g_chi"""
    return _exp_of(curve, g_series(curve, p, s, D, k), D, k)


def g_and_h_check(curve: CurveData, p: int, s: int, D: int, k: int) -> CheckReport:
    """
    g_chi has constant term 0, linear term 1 and the Honda type of the curve,
    and h_chi = exp o g_chi has integral coefficients to degree D

    Raises:
        HypothesisViolated: If chi = tau or p <= 3 or the reduction at p is additive
        PrecisionUnsupported: If fewer than k digits survive the composition
    """
    _require_honda_prime(curve, p)
    report = CheckReport("g-h", {"curve": curve.label, "p": p, "s": s, "D": D, "k": k})
    with timed(report):
        g = g_series(curve, p, s, D, k)
        h = _exp_of(curve, g, D, k)
        if h.precision < k:
            raise PrecisionUnsupported(
                f"h_chi certified to {h.precision} digits, {k} requested"
            )
        linear = g[1] - 1
        normalized = g[0].is_zero() and linear.is_zero()
        honda = _honda_failures(apply_honda(honda_polynomial(curve, p), g).coefficients, p)
        integral = h.is_integral()
        report.witnesses = {
            "g_constant_digits": g[0].val,
            "g_linear_digits": linear.val,
            "honda_failing_degrees": honda[:10],
            "h_min_valuation": h.min_valuation(),
            "h_precision": h.precision,
            "teichmuller_1": teichmuller(1, p, k).residue(k),
        }
        report.set_verdict(normalized and not honda and integral)
    return report


def multiplicative_comparison(curve: CurveData, p: int, D: int) -> CheckReport:
    """
    exp_Gm(log(X)) - 1 = exp(log(X)) - 1 has p-integral coefficients to degree D
    at a split multiplicative prime p

    Raises:
        HypothesisViolated: If the reduction at p is not split multiplicative
    """
    if classify_reduction(curve, p).kind != ReductionKind.split_multiplicative:
        raise HypothesisViolated(
            f"{curve.label} is not split multiplicative at {p}",
            clauses=["split multiplicative reduction at p"],
        )
    report = CheckReport("multiplicative", {"curve": curve.label, "p": p, "D": D})
    with timed(report):
        size = D + 1
        log = list(log_coefficients(curve, D))
        total = [Fraction(0)] * size
        power = [Fraction(1)] + [Fraction(0)] * D
        for n in range(1, size):
            power = _mul_exact(power, log, size)
            for i in range(size):
                total[i] += power[i] / math.factorial(n)
        bad = [i for i, c in enumerate(total) if c and valuation(c, p) < 0]
        report.witnesses = {
            "coefficients": total[:8],
            "non_integral_degrees": bad[:10],
        }
        report.set_verdict(not bad)
    return report


def frobenius_congruence(beta: Sequence, p: int, D: int) -> bool:
    """
    phi-hat(f) = sum b_i X^(ip) against f((1 + X)^p - 1) modulo p, compared
    up to degree D, for a polynomial f = sum b_i X^i without constant term
    and with every i b_i p-integral

    Raises:
        ValueError: If f has a constant term or some i b_i is not p-integral
    """
    beta = [Fraction(b) for b in beta]
    if beta and beta[0]:
        raise ValueError("f must not have a constant term")
    for i, b in enumerate(beta):
        if b and valuation(i * b, p) < 0:
            raise ValueError(f"coefficient {i} * b_{i} is not {p}-integral")
    size = D + 1
    left = [Fraction(0)] * size
    right = [Fraction(0)] * size
    # (1 + X)^p - 1
    shifted = [Fraction(math.comb(p, r)) if 0 < r <= p else Fraction(0) for r in range(size)]
    power = [Fraction(1)] + [Fraction(0)] * D
    for i, b in enumerate(beta):
        if i:
            power = _mul_exact(power, shifted, size)
        if not b:
            continue
        if i * p < size:
            left[i * p] += b
        for r in range(size):
            right[r] += b * power[r]
    return all(x == y or valuation(x - y, p) >= 1 for x, y in zip(left, right))

