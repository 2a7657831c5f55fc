"""
Conjecture checks for mtverify

Prime-set classification, the predicted order of vanishing of theta_K in the
augmentation filtration, the standing hypothesis on (K, p), the local
reciprocity image of the Tate period and the leading-term congruence.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Optional, Sequence, Tuple

from sympy import multiplicity, primefactors

from ..errors import HypothesisViolated, NotASubfield
from .arith import crt_lift, prime_power_part
from .characters import field_with_roots
from .curve import (
    CurveData,
    ReductionKind,
    TatePeriod,
    classify_reduction,
    compute_ap,
    tate_period,
)
from .groupring import AbelianFieldSpec, GroupRingElement, brute_force_is_unit, is_unit, tilde_sigma
from .ideals import Undecided, is_member
from .mazurtate import theta, theta_at_level
from .modsym import SymbolOptions, analytic_rank
from .report import CheckReport, Verdict, timed


logger = logging.getLogger("mtverify")

RECIPROCITY_CONVENTIONS = ('inverse', 'direct')


@dataclass(frozen=True)
class PrimeRecord:
    """Classification of one prime ell for a field K and a prime p"""
    ell: int
    a_ell: int
    one_n: int
    residue_degree: int
    in_c_times: bool
    euler_unit: bool
    in_c_2: bool
    in_c_0: bool
    split_multiplicative: bool


@dataclass(frozen=True)
class PrimeClassification:
    p: int
    spec: AbelianFieldSpec
    conductor: int
    records: Tuple[PrimeRecord, ...]

    def record(self, ell: int) -> PrimeRecord:
        for r in self.records:
            if r.ell == ell:
                return r
        raise KeyError(f"prime {ell} was not classified")

    @property
    def c_times(self) -> FrozenSet[int]:
        return frozenset(r.ell for r in self.records if r.in_c_times)

    @property
    def c_2(self) -> FrozenSet[int]:
        return frozenset(r.ell for r in self.records if r.in_c_2)

    @property
    def c_0(self) -> FrozenSet[int]:
        return frozenset(r.ell for r in self.records if r.in_c_0)

    @property
    def split_primes(self) -> FrozenSet[int]:
        """Sp(m): split multiplicative primes dividing the conductor of K"""
        return frozenset(r.ell for r in self.records if r.split_multiplicative and self.conductor % r.ell == 0)

    @property
    def sp(self) -> int:
        return len(self.split_primes)

    @property
    def c(self) -> int:
        return len(self.c_2) + len(self.c_0)

    def criterion_agrees(self) -> bool:
        """Root-of-unity criterion against the unit test of ell * Eul_ell(tilde-sigma_ell)"""
        return all(r.in_c_times == r.euler_unit for r in self.records)


def residue_degree_prime_to_p(spec: AbelianFieldSpec, ell: int, p: int) -> int:
    """Prime-to-p part of the order of tilde-sigma_ell in G"""
    order = spec.element_order(spec.tilde_sigma_residue(ell))
    return order // p ** multiplicity(p, order)


def in_c_times(ell: int, a_ell: int, one_n: int, f: int, p: int) -> bool:
    """ell != zeta (a_ell - 1_N(ell) zeta) mod p for every f-th root of unity zeta"""
    field_ = field_with_roots(p, f)
    root = field_.root_of_unity(f)
    target = field_.element(ell)
    for i in range(f):
        zeta = field_.power(root, i)
        bracket = field_.add(field_.element(a_ell), field_.scale(zeta, -one_n))
        if field_.mul(zeta, bracket) == target:
            return False
    return True


def euler_element(curve: CurveData, spec: AbelianFieldSpec, ell: int) -> GroupRingElement:
    """ell * Eul_ell(tilde-sigma_ell) = ell - a_ell tilde-sigma + 1_N(ell) tilde-sigma^2"""
    frobenius = tilde_sigma(ell, spec)
    return frobenius * frobenius * curve.one_n(ell) - frobenius * compute_ap(curve, ell) + ell


def classify_primes(
    curve: CurveData,
    spec: AbelianFieldSpec,
    p: int,
    c2_ap: int = 2,
    extra_primes: Iterable[int] = (),
) -> PrimeClassification:
    """
    Classify the primes dividing m * N (and any extra primes) for K and p

    Args:
        curve: Curve data
        spec: The field K
        p: Prime, at least 5
        c2_ap: Value of a_ell that puts a good prime exactly dividing m into C_2
        extra_primes: Further primes to classify

    Returns:
        PrimeClassification with one record per prime
    """
    if p <= 3:
        raise HypothesisViolated(f"classification needs p > 3, got {p}", clauses=["p > 3"])
    m = spec.conductor()
    primes = sorted(set(primefactors(m)) | set(primefactors(curve.conductor)) | set(extra_primes))
    records = []
    for ell in primes:
        a_ell = compute_ap(curve, ell)
        one_n = curve.one_n(ell)
        f = residue_degree_prime_to_p(spec, ell, p)
        criterion = in_c_times(ell, a_ell, one_n, f, p)
        euler = euler_element(curve, spec, ell)
        unit = is_unit(euler, p)
        if unit != brute_force_is_unit(euler, p):
            raise RuntimeError(f"unit tests disagree on ell * Eul_{ell} for p = {p}")
        order_in_m = multiplicity(ell, m)
        kind = classify_reduction(curve, ell).kind
        records.append(PrimeRecord(
            ell=ell,
            a_ell=a_ell,
            one_n=one_n,
            residue_degree=f,
            in_c_times=criterion,
            euler_unit=unit,
            in_c_2=bool(one_n and ell != p and criterion and a_ell == c2_ap and order_in_m == 1),
            in_c_0=bool(not one_n and ell != p and a_ell == 0 and order_in_m >= 2),
            split_multiplicative=kind == ReductionKind.split_multiplicative,
        ))
    classification = PrimeClassification(p, spec, m, tuple(records))
    logger.debug(
        f"classified {len(records)} primes for {spec} at p={p}: "
        f"C_2={sorted(classification.c_2)}, C_0={sorted(classification.c_0)}, Sp={sorted(classification.split_primes)}"
    )
    return classification


def predicted_vanishing_order(curve: CurveData, spec: AbelianFieldSpec, p: int, r_p: int,
                              c2_ap: int = 2) -> int:
    """r_p + sp(m) + 2 c(K)"""
    if r_p < 0:
        raise ValueError(f"r_p must be non-negative, got {r_p}")
    classification = classify_primes(curve, spec, p, c2_ap)
    return r_p + classification.sp + 2 * classification.c


def hypothesis_report(curve: CurveData, spec: AbelianFieldSpec, p: int) -> CheckReport:
    """
    Evaluate the checkable clauses of the standing hypothesis on (K, p)

    The big-image clause is recorded as an assumption; only its sufficient
    condition (semistable curve, p >= 11) is evaluated.
    """
    report = CheckReport("hypothesis", {"curve": curve.label, "field": str(spec), "p": p})
    with timed(report):
        kind = classify_reduction(curve, p).kind if p > 3 else None
        no_pth_roots = not spec.contains(AbelianFieldSpec(p))
        non_anomalous = kind == ReductionKind.good and (p + 1 - compute_ap(curve, p)) % p != 0
        unramified = spec.conductor() % p != 0
        clauses = {
            "p > 3": p > 3,
            "K has no primitive p-th root of unity, or good non-anomalous reduction at p": no_pth_roots or non_anomalous,
            "p unramified in K if the reduction at p is additive": kind != ReductionKind.additive or unramified,
        }
        big_image = curve.is_semistable and p >= 11
        report.assumptions = [
            "image of the p-adic Galois representation contains SL_2(Z_p)"
            + (" (implied: semistable and p >= 11)" if big_image else " (unchecked)")
        ]
        report.witnesses = {
            "clauses": clauses,
            "big_image_sufficient_condition": big_image,
            "reduction_at_p": kind,
        }
        failing = [name for name, ok in clauses.items() if not ok]
        if failing:
            report.verdict = Verdict.hypothesis_violated
            report.message = "; ".join(failing)
        else:
            report.verdict = Verdict.passed
    return report


def _require_hypothesis(curve: CurveData, spec: AbelianFieldSpec, p: int) -> CheckReport:
    report = hypothesis_report(curve, spec, p)
    if not report.passed:
        failing = [name for name, ok in report.witnesses["clauses"].items() if not ok]
        raise HypothesisViolated(
            f"(K, p) = ({spec}, {p}) violates: {'; '.join(failing)}",
            clauses=failing,
        )
    return report


def _default_rank(curve: CurveData, r_p: Optional[int], digits: int, cache=None) -> Tuple[int, Optional[str]]:
    if r_p is not None:
        return r_p, None
    detected = analytic_rank(curve, digits, cache=cache)
    note = f"r_p = {detected.rank} taken from the numerically detected analytic rank"
    logger.warning(f"{curve.label}: {note}; supply --rank to override")
    return detected.rank, note


def _membership_verdict(*verdicts) -> Verdict:
    if any(isinstance(v, Undecided) for v in verdicts):
        return Verdict.undecided
    return Verdict.passed if all(verdicts) else Verdict.failed


def vanishing_order_check(
    curve: CurveData,
    spec: AbelianFieldSpec,
    p: int,
    k: int,
    target: Optional[int] = None,
    also_product_ideal: bool = False,
    r_p: Optional[int] = None,
    c2_ap: int = 2,
    max_k: int = 64,
    options: SymbolOptions = SymbolOptions(),
) -> CheckReport:
    """
    theta_K in I^target (target defaults to r_p + sp(m) + 2 c(K)), and optionally
    in prod_{Sp(m)} I(D_ell) * (prod_{C_0 u C_2} I(D_ell))^2

    Raises:
        HypothesisViolated: If K is not given at its conductor or a checkable
            clause of the standing hypothesis fails
    """
    if not spec.is_primitive():
        raise HypothesisViolated(
            f"{spec} is not given at its conductor {spec.conductor()}",
            clauses=["K given at its conductor"],
        )
    hypothesis = _require_hypothesis(curve, spec, p)
    rank, rank_note = _default_rank(curve, r_p, options.digits, options.cache)
    classification = classify_primes(curve, spec, p, c2_ap)
    predicted = rank + classification.sp + 2 * classification.c
    target = predicted if target is None else target
    report = CheckReport("order", {
        "curve": curve.label, "field": str(spec), "p": p, "k": k,
        "target": target, "r_p": rank, "product_ideal": also_product_ideal,
    })
    report.assumptions = list(hypothesis.assumptions)
    if rank_note:
        report.assumptions.append(rank_note)
    with timed(report):
        element = theta(curve, spec, options).element
        membership = is_member(element, [(spec.elements, target)], p, k, max_k)
        verdicts = [membership]
        witnesses: Dict[str, object] = {
            "theta": element,
            "predicted": predicted,
            "sp": classification.sp,
            "c_2": sorted(classification.c_2),
            "c_0": sorted(classification.c_0),
            "split_primes": sorted(classification.split_primes),
            "in_power": membership if not isinstance(membership, Undecided) else "undecided",
        }
        if also_product_ideal:
            factors = [(spec.decomposition_group(ell), 1) for ell in classification.split_primes]
            factors += [(spec.decomposition_group(ell), 2) for ell in classification.c_0 | classification.c_2]
            refined = is_member(element, factors, p, k, max_k)
            verdicts.append(refined)
            witnesses["in_product_ideal"] = refined if not isinstance(refined, Undecided) else "undecided"
        if membership is True:
            beyond = is_member(element, [(spec.elements, target + 1)], p, k, max_k)
            if beyond is False:
                witnesses["exact_order"] = target
                witnesses["order_parity_matches_rank"] = target % 2 == rank % 2
        report.witnesses = witnesses
        report.verdict = _membership_verdict(*verdicts)
        if report.verdict == Verdict.undecided:
            report.message = f"membership not certified up to precision {p}^{max_k}"
    return report


def rec_tate_period(
    curve: CurveData,
    ell: int,
    spec: AbelianFieldSpec,
    k: int,
    convention: str = 'direct',
    period: Optional[TatePeriod] = None,
    max_terms: int = 64,
) -> GroupRingElement:
    """
    rec_ell(q_{E,ell}) in G_L for a split multiplicative prime ell

    With q = ell^Tam * u, the uniformizer part acts as sigma_ell^Tam on the
    prime-to-ell level and trivially on ell-power roots of unity; the unit u
    acts on zeta_{ell^t} by u^-1 ('inverse') or u ('direct').

    Raises:
        ValueError: If ell is not split multiplicative or the convention is unknown
        PrecisionUnsupported: If u mod ell^t is not determined at precision k
    """
    if convention not in RECIPROCITY_CONVENTIONS:
        raise ValueError(
            f"Unsupported reciprocity convention: {convention}. "
            f"Supported conventions: {list(RECIPROCITY_CONVENTIONS)}"
        )
    if period is None:
        period = tate_period(curve, ell, k, max_terms)
    ell_part = prime_power_part(spec.m, [ell])
    rest = spec.m // ell_part
    unit = 1
    if ell_part > 1:
        t = multiplicity(ell, ell_part)
        unit = period.unit_mod(t)
        if convention == 'inverse':
            unit = pow(unit, -1, ell_part)
    residue = crt_lift(pow(ell, period.valuation, rest) if rest > 1 else 0, rest, unit, ell_part)
    return GroupRingElement.sigma(spec, spec.representative(residue if spec.m > 1 else 1))


def _section(x: GroupRingElement, big: AbelianFieldSpec) -> GroupRingElement:
    """A lift of x from Q[G_K] to Q[G_L] sending each sigma to one preimage"""
    preimage: Dict[int, int] = {}
    for b in big.elements:
        preimage.setdefault(big.restrict(b, x.spec), b)
    return GroupRingElement(big, {preimage[a]: c for a, c in x.items()})


def leading_term_sides(
    curve: CurveData,
    L_spec: AbelianFieldSpec,
    K_spec: AbelianFieldSpec,
    convention: str,
    k: int,
    periods: Dict[int, TatePeriod],
    split_primes: Iterable[int],
    options: SymbolOptions = SymbolOptions(),
) -> Tuple[GroupRingElement, GroupRingElement, int]:
    """theta_L and pi(theta_{F_M'}) * prod (Tam^-1 (rec(q) - 1)), together with M'"""
    M_prime = L_spec.m
    for ell in split_primes:
        M_prime //= ell ** multiplicity(ell, M_prime)
    left = theta(curve, L_spec, options).element
    base = theta_at_level(curve, M_prime, options).project(K_spec)
    right = _section(base, L_spec)
    for ell in split_primes:
        period = periods[ell]
        rec = rec_tate_period(curve, ell, L_spec, k, convention, period)
        right = right * ((rec - 1) * Fraction(1, period.valuation))
    return left, right, M_prime


def leading_term_check(
    curve: CurveData,
    L_spec: AbelianFieldSpec,
    K_spec: AbelianFieldSpec,
    p: int,
    k: int,
    convention: str = 'direct',
    perturbation: int = 1,
    max_k: int = 64,
    max_terms: int = 64,
    rank: Optional[int] = None,
    options: SymbolOptions = SymbolOptions(),
    j_coefficients: Optional[Sequence[int]] = None,
) -> CheckReport:
    """
    theta_L in A = prod_{S'} I(D_ell) Z_p[G_L] and
    theta_L = pi_{F_M'/K}(theta_{F_M'}) * prod_{S'} Tam_ell^-1 (rec_ell(q) - 1) mod I_H A

    S' holds the split multiplicative primes of the conductor of L that
    split completely in K, M' is that conductor with S' removed and H = Gal(L/K).
    A perturbation factor other than 1 multiplies every Tate period unit
    (negative control).

    Raises:
        NotASubfield: If K is not contained in L
        HypothesisViolated: Listing each failing clause
    """
    if not L_spec.contains(K_spec):
        raise NotASubfield(f"{K_spec} is not a subfield of {L_spec}")
    clauses = []
    if not L_spec.is_primitive():
        clauses.append("L given at its conductor")
    try:
        _require_hypothesis(curve, L_spec, p)
    except HypothesisViolated as e:
        clauses.extend(e.clauses)
    trivial = K_spec.representative(1)
    split_primes = [
        ell for ell in primefactors(L_spec.m)
        if classify_reduction(curve, ell).kind == ReductionKind.split_multiplicative
        and K_spec.decomposition_group(ell) == frozenset({trivial})
    ]
    M_prime = L_spec.m
    for ell in split_primes:
        M_prime //= ell ** multiplicity(ell, M_prime)
    # primes are classified over the conductor of L only
    classification = classify_primes(curve, L_spec, p) if p > 3 and L_spec.is_primitive() else None
    if classification is not None:
        for ell in primefactors(M_prime):
            if not classification.record(ell).in_c_times:
                clauses.append(f"{ell} in C_x(L)")
    periods = {}
    for ell in split_primes:
        period = tate_period(curve, ell, k, max_terms, j_coefficients)
        if period.valuation % p == 0:
            clauses.append(f"p does not divide Tam_{ell}")
        periods[ell] = period.perturbed(perturbation) if perturbation != 1 else period
    if clauses:
        raise HypothesisViolated(f"leading-term check needs: {', '.join(clauses)}", clauses=clauses)

    report = CheckReport("leading-term", {
        "curve": curve.label, "L": str(L_spec), "K": str(K_spec), "p": p, "k": k,
        "convention": convention, "perturbation": perturbation,
    })
    if rank:
        report.assumptions.append("positive rank: the congruence already follows from the vanishing order")
    with timed(report):
        H = frozenset(b for b in L_spec.elements if L_spec.restrict(b, K_spec) == trivial)
        ideal = [(L_spec.decomposition_group(ell), 1) for ell in split_primes]

        def verdicts(chosen: str):
            left, right, _ = leading_term_sides(curve, L_spec, K_spec, chosen, k, periods, split_primes, options)
            in_ideal = is_member(left, ideal, p, k, max_k)
            congruent = is_member(left - right, ideal + [(H, 1)], p, k, max_k)
            return left, right, in_ideal, congruent

        left, right, in_ideal, congruent = verdicts(convention)
        report.witnesses = {
            "split_primes": split_primes,
            "M_prime": M_prime,
            "tamagawa": {ell: periods[ell].valuation for ell in split_primes},
            "theta_L": left,
            "rhs": right,
            "difference": left - right,
            "theta_in_ideal": "undecided" if isinstance(in_ideal, Undecided) else in_ideal,
            "congruence": "undecided" if isinstance(congruent, Undecided) else congruent,
        }
        report.verdict = _membership_verdict(in_ideal, congruent)
        if report.verdict == Verdict.failed and split_primes:
            opposite = 'direct' if convention == 'inverse' else 'inverse'
            _, _, other_ideal, other_congruent = verdicts(opposite)
            other = _membership_verdict(other_ideal, other_congruent)
            report.witnesses["opposite_convention"] = other
            if other == Verdict.passed:
                report.message = f"reciprocity normalization discrepancy: the '{opposite}' convention passes"
                logger.warning(f"{curve.label}: {report.message}")
    return report
