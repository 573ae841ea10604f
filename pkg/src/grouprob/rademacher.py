"""Rademacher-sum laws and the four inequality checkers.

For elements x_1..x_n of an abelian metric group, the engine enumerates
all 2^n sign vectors and produces the exact law of d(1, prod x_k^{m r_k})
with rational probabilities.  On top of that law it verifies:

* the moment-comparison (Khinchin-Kahane) inequality, in its normed form
  (same Rademacher sum on both sides) and its general form (the left side
  carries an extra dyadic exponent 2^l with 2^(l-1) <= q < 2^l);
* a generalized maximal (Levy) inequality over laminar families;
* the tail-product bound that drives the dyadic induction;
* the maximal inequality for i.i.d. sums with constants 10 and 3.

Tail events follow the statements exactly: strict ">" in the Levy and
tail-product bounds, ">=" in the i.i.d. maximal inequality; at atoms of a
law the distinction changes exact values.

Verdicts on exact instances are never left to float rounding: each side
is either represented exactly as a power product or enclosed by directed
rational bounds (see grouprob.roots), so "satisfied" can only mean the
inequality really holds.
"""

from __future__ import annotations

import dataclasses
import hashlib
import itertools
import math
import random
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import kernels
from .algebra import EXACT, GroupError, GroupInstance, Payload
from .envelope import FiniteDistribution
from .instances import instance_from_dict
from .normedness import check_j_normed
from .rational import Scalar, frac, frac_str
from .reports import ConstantInfo, InequalityReport
from .roots import (MAX_BITS, PowerProduct, compare_products, pow_bounds,
                    product_value)

EXACT_ENUM_MAX = kernels.MAX_EXACT_N
GENERIC_ENUM_MAX = 20
MONT_EXACT_PATHS = 10 ** 7
FLOAT_REL_TOL = 1e-9
FLOAT_ABS_TOL = 1e-12

REGIMES = ("normed-general", "normed-sharp", "general")


class ScenarioError(GroupError):
    pass


class EnumerationLimitError(GroupError):
    pass


class NormednessGateError(GroupError):
    pass


# ---------------------------------------------------------------------------
# scenarios and laws


@dataclass(frozen=True)
class RademacherScenario:
    instance: GroupInstance
    elements: Tuple[Payload, ...]
    p: Fraction = Fraction(1)
    q: Fraction = Fraction(2)
    exponent: int = 1  # the m in x_k^{m r_k}

    def __post_init__(self):
        if len(self.elements) < 1:
            raise ScenarioError("need at least one element")
        if not self.instance.is_abelian:
            raise ScenarioError("Rademacher scenarios need an abelian instance")
        if not self.instance.has_inverses:
            raise ScenarioError("Rademacher exponents r_k = -1 need inverses")
        if self.p < 1 or self.q < 1:
            raise ScenarioError("p and q must be >= 1")
        if self.exponent < 1:
            raise ScenarioError("exponent must be >= 1")
        for x in self.elements:
            self.instance.validate(x)

    @property
    def n(self) -> int:
        return len(self.elements)

    def with_exponent(self, m: int) -> "RademacherScenario":
        return dataclasses.replace(self, exponent=m)

    def to_json_dict(self) -> dict:
        return {
            "group": self.instance.spec_dict(),
            "elements": [self.instance.element_to_json(x) for x in self.elements],
            "p": frac_str(self.p),
            "q": frac_str(self.q),
        }

    @staticmethod
    def from_json_dict(obj: dict) -> "RademacherScenario":
        instance = instance_from_dict(obj["group"])
        elements = tuple(instance.element_from_json(x) for x in obj["elements"])
        return RademacherScenario(instance, elements,
                                  frac(obj.get("p", "1/1")),
                                  frac(obj.get("q", "2/1")))


@dataclass(frozen=True)
class DistanceDistribution:
    """Finite law of a distance: atoms sorted ascending, exact rational
    probabilities summing to 1.  Values are Fractions on exact instances
    and floats on the torus (exact=False)."""

    atoms: Tuple[Tuple[Scalar, Fraction], ...]
    exact: bool

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("a law needs at least one atom")
        if sum(p for _, p in self.atoms) != 1:
            raise ValueError("atom probabilities must sum to exactly 1")

    @staticmethod
    def from_counts(counts: Dict[Scalar, int], total: int,
                    exact: bool = True) -> "DistanceDistribution":
        atoms = tuple(sorted((v, Fraction(c, total)) for v, c in counts.items()))
        return DistanceDistribution(atoms, exact)

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for v, _ in self.atoms)

    @property
    def max_value(self) -> Scalar:
        return self.atoms[-1][0]

    def tail_gt(self, threshold) -> Fraction:
        """P(Z > threshold), exact."""
        t = threshold if self.exact else float(threshold)
        return sum((p for v, p in self.atoms if v > t), start=Fraction(0))

    def tail_ge(self, threshold) -> Fraction:
        t = threshold if self.exact else float(threshold)
        return sum((p for v, p in self.atoms if v >= t), start=Fraction(0))

    def to_json_dict(self) -> dict:
        return {"atoms": [[frac_str(v) if isinstance(v, Fraction) else v,
                           frac_str(p)] for v, p in self.atoms],
                "exact": self.exact}


def _lattice_rows(instance: GroupInstance, elements: Sequence[Payload],
                  exponent: int) -> List[List[int]]:
    return [[c * exponent for c in instance.lattice_coordinates(x)]
            for x in elements]


def _law_by_composition(instance: GroupInstance, elements: Sequence[Payload],
                        exponent: int) -> Dict[Scalar, int]:
    """Reference enumeration through the instance's own operations."""
    if len(elements) > GENERIC_ENUM_MAX:
        raise EnumerationLimitError(
            f"generic enumeration capped at n = {GENERIC_ENUM_MAX}")
    ident = instance.identity()
    pos = [instance.power(x, exponent) for x in elements]
    neg = [instance.invert(x) for x in pos]
    counts: Dict[Scalar, int] = {}
    n = len(elements)

    def rec(prefix, k):
        if k == n:
            v = instance.distance(ident, prefix)
            counts[v] = counts.get(v, 0) + 1
            return
        rec(instance.compose(prefix, pos[k]), k + 1)
        rec(instance.compose(prefix, neg[k]), k + 1)

    rec(ident, 0)
    return counts


def enumerate_rademacher(scenario: RademacherScenario) -> DistanceDistribution:
    """Exact law of d(1, prod x_k^{m r_k}) over all 2^n sign vectors."""
    n = scenario.n
    if n > EXACT_ENUM_MAX:
        raise EnumerationLimitError(
            f"exact mode is capped at n = {EXACT_ENUM_MAX} "
            f"(2^{n} sign vectors); use sample_rademacher instead")
    instance = scenario.instance
    model = instance.lattice_model()
    if model is not None:
        rows = _lattice_rows(instance, scenario.elements, scenario.exponent)
        counts = kernels.rademacher_distance_counts(rows, model.weights_scaled,
                                                    model.mod)
        scaled = {Fraction(d, model.scale): c for d, c in counts.items()}
        return DistanceDistribution.from_counts(scaled, 1 << n, exact=True)
    counts = _law_by_composition(instance, scenario.elements, scenario.exponent)
    return DistanceDistribution.from_counts(
        counts, 1 << n, exact=instance.distance_exactness == EXACT)


def _stream(seed: int, index: int) -> random.Random:
    """Sample-indexed RNG stream: reproducible for a given seed regardless
    of how samples are partitioned across workers."""
    digest = hashlib.sha256(f"{seed}:{index}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def sample_rademacher(scenario: RademacherScenario, n_samples: int,
                      seed: int) -> DistanceDistribution:
    """Empirical law from n_samples seeded sign draws (frequencies are
    exact rationals count/n_samples; the law itself is an estimate)."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    instance = scenario.instance
    ident = instance.identity()
    pos = [instance.power(x, scenario.exponent) for x in scenario.elements]
    neg = [instance.invert(x) for x in pos]
    counts: Dict[Scalar, int] = {}
    for i in range(n_samples):
        rng = _stream(seed, i)
        acc = ident
        for k in range(scenario.n):
            acc = instance.compose(acc, pos[k] if rng.random() < 0.5 else neg[k])
        v = instance.distance(ident, acc)
        counts[v] = counts.get(v, 0) + 1
    return DistanceDistribution.from_counts(
        counts, n_samples, exact=instance.distance_exactness == EXACT)


# ---------------------------------------------------------------------------
# moments


@dataclass(frozen=True)
class MomentValue:
    p: Fraction
    value: Scalar  # E[Z^p]; exact Fraction when representable
    root: float    # E[Z^p]^(1/p)
    exact: bool


def moment(dist: DistanceDistribution, p) -> MomentValue:
    """E[Z^p] and its p-th root; exact for integer p on exact laws."""
    p = frac(p)
    if p < 1:
        raise ValueError("p must be >= 1")
    if dist.exact and p.denominator == 1:
        value = sum((prob * v ** p.numerator for v, prob in dist.atoms),
                    start=Fraction(0))
        root = float(value) ** (1.0 / int(p)) if value else 0.0
        return MomentValue(p, value, root, True)
    fp = float(p)
    value = sum(float(prob) * float(v) ** fp for v, prob in dist.atoms)
    root = value ** (1.0 / fp) if value else 0.0
    return MomentValue(p, value, root, False)


def _lp_norm_product(dist: DistanceDistribution, p: Fraction) -> Optional[PowerProduct]:
    """E[Z^p]^{1/p} as an exact power product, when representable.

    Representable when p is an integer (the moment itself is rational) or
    when the law has a single nonzero atom {c: beta}: the norm is then
    c * beta^{1/p}.  Callers handle the all-zero law separately.
    """
    if not dist.exact:
        return None
    nonzero = [(v, prob) for v, prob in dist.atoms if v != 0]
    if not nonzero:
        raise ValueError("zero law has no norm product")
    if p.denominator == 1:
        value = sum((prob * v ** p.numerator for v, prob in nonzero),
                    start=Fraction(0))
        return ((value, Fraction(1, p.numerator)),)
    if len(nonzero) == 1:
        v, prob = nonzero[0]
        return ((v, Fraction(1)), (prob, Fraction(1) / p))
    return None


def _norm_bounds(dist: DistanceDistribution, p: Fraction,
                 bits: int) -> Tuple[Fraction, Fraction]:
    """Directed enclosure of E[Z^p]^{1/p} on an exact law."""
    lo = hi = Fraction(0)
    for v, prob in dist.atoms:
        if v == 0:
            continue
        l, h = pow_bounds(v, p, bits)
        lo += prob * l
        hi += prob * h
    inv = Fraction(1) / p
    return pow_bounds(lo, inv, bits)[0], pow_bounds(hi, inv, bits)[1]


def _product_interval(factors: PowerProduct, bits: int) -> Tuple[Fraction, Fraction]:
    lo = hi = Fraction(1)
    for base, expo in factors:
        l, h = pow_bounds(base, expo, bits)
        lo *= l
        hi *= h
    return lo, hi


def _certified_leq(lhs_dist: DistanceDistribution, q: Fraction,
                   const_factors: PowerProduct,
                   rhs_dist: DistanceDistribution, p: Fraction,
                   start_bits: int = 96) -> Tuple[bool, str]:
    """Certified E[lhs^q]^{1/q} <= C * E[rhs^p]^{1/p} on exact laws.

    Exact power-product comparison when both norms are representable
    (this is what settles equality cases like the sharpness witness);
    otherwise escalating directed enclosures.  An undecided outcome at
    the precision cap is reported as a violation so it cannot pass
    silently.
    """
    lhs_pp = _lp_norm_product(lhs_dist, q)
    rhs_pp = _lp_norm_product(rhs_dist, p)
    if lhs_pp is not None and rhs_pp is not None:
        cmp = compare_products(lhs_pp, tuple(const_factors) + rhs_pp)
        return cmp <= 0, "exact-power-product"
    bits = start_bits
    while bits <= MAX_BITS:
        llo, lhi = _norm_bounds(lhs_dist, q, bits)
        clo, chi = _product_interval(const_factors, bits)
        rlo, rhi = _norm_bounds(rhs_dist, p, bits)
        if lhi <= clo * rlo:
            return True, f"directed-enclosure(bits={bits})"
        if llo > chi * rhi:
            return False, f"directed-enclosure(bits={bits})"
        bits *= 2
    return False, "undecided-at-precision-cap"


# ---------------------------------------------------------------------------
# the moment-comparison inequality


@dataclass(frozen=True)
class KKConstant:
    value: float
    formula: str
    factors: PowerProduct


def dyadic_level(q) -> int:
    """The unique l >= 1 with 2^(l-1) <= q < 2^l (so powers of two round up)."""
    q = frac(q)
    if q < 1:
        raise ValueError("q must be >= 1")
    l = 1
    while q >= 2 ** l:
        l += 1
    return l


def kk_constant(p, q, regime: str) -> KKConstant:
    """The comparison constant for the requested regime.

    normed-general: 1 for q <= p, else 64 q (q/4)^{1/q}
    normed-sharp:   2^{1-1/q}, only for p = 1 and 1 <= q <= 2 (optimal)
    general:        64 q^2 (q/4)^{1/q} for all p, q >= 1
    """
    p, q = frac(p), frac(q)
    if p < 1 or q < 1:
        raise ValueError("p and q must be >= 1")
    one = Fraction(1)
    if regime == "normed-sharp":
        if p != 1 or not 1 <= q <= 2:
            raise ValueError("the sharp constant needs p = 1 and 1 <= q <= 2")
        factors: PowerProduct = ((Fraction(2), 1 - 1 / q),)
        formula = "C_{1,q}=2^{1-1/q}"
    elif regime == "normed-general":
        if q <= p:
            factors = ((one, one),)
            formula = "C_{p,q}=1"
        else:
            factors = ((64 * q, one), (q / 4, 1 / q))
            formula = "C_{p,q}=64q(q/4)^{1/q}"
    elif regime == "general":
        factors = ((64 * q * q, one), (q / 4, 1 / q))
        formula = "K_{p,q}=64q^2(q/4)^{1/q}"
    else:
        raise ValueError(f"unknown regime {regime!r}; pick one of {REGIMES}")
    return KKConstant(product_value(factors), formula, factors)


def _normedness_gate(instance: GroupInstance, elements: Sequence[Payload]):
    verdict = check_j_normed(instance, {2}, elements)
    if not verdict.holds:
        ce = verdict.counterexample
        raise NormednessGateError(
            f"{instance.kind} fails the normedness gate at "
            f"{instance.element_to_json(ce.element)!r}: "
            f"d(z,z^{ce.n + 1}) = {ce.lhs} != {ce.rhs}")


def check_kk(scenario: RademacherScenario, regime: str) -> InequalityReport:
    """Moment-comparison verdict for one scenario.

    Normed regimes compare q-th against p-th moments of the same sum and
    require the scenario's elements to pass the {2}-normedness gate; the
    general regime puts the dyadic exponent m = 2^l on the left-hand sum.
    """
    p, q = scenario.p, scenario.q
    constant = kk_constant(p, q, regime)
    if regime in ("normed-sharp", "normed-general"):
        _normedness_gate(scenario.instance, scenario.elements)
        m = 1
    else:
        m = 2 ** dyadic_level(q)
    law_m = enumerate_rademacher(scenario.with_exponent(m))
    law_1 = law_m if m == 1 else enumerate_rademacher(scenario.with_exponent(1))
    lhs = moment(law_m, q).root
    rhs = constant.value * moment(law_1, p).root
    witness = scenario.to_json_dict()
    details = {"regime": regime, "m": m}
    if law_m.is_zero:
        satisfied, method, exact = True, "vacuous-zero", law_m.exact
    elif not (law_m.exact and law_1.exact):
        satisfied = lhs <= rhs * (1 + FLOAT_REL_TOL) + FLOAT_ABS_TOL
        method, exact = "float-tolerance", False
    elif law_1.is_zero:
        satisfied, method, exact = False, "zero-right-side", True
    else:
        satisfied, method = _certified_leq(law_m, q, constant.factors, law_1, p)
        exact = True
    details["method"] = method
    return InequalityReport(
        inequality="khinchin-kahane", lhs=lhs, rhs=rhs, satisfied=satisfied,
        exact=exact, constant=ConstantInfo(constant.value, constant.formula),
        witness=witness, details=details)


def sharpness_ratio(instance: GroupInstance, x: Payload, q) -> float:
    """E[P_2^q]^{1/q} / E[P_2] for the two-copy scenario [x, x].

    Equals 2^{1-1/q} for every normed instance and x != 1: the law is
    {0: 1/2, 2 d(1,x): 1/2}, which is exactly the case of equality.
    """
    q = frac(q)
    if not 1 <= q <= 2:
        raise ValueError("the sharp regime needs 1 <= q <= 2")
    if instance.equal(x, instance.identity()):
        raise ValueError("x must differ from the identity")
    _normedness_gate(instance, [x])
    law = enumerate_rademacher(RademacherScenario(instance, (x, x)))
    return moment(law, q).root / moment(law, 1).root


# ---------------------------------------------------------------------------
# laminar families and the maximal (Levy) inequality


@dataclass(frozen=True)
class LaminarFamily:
    subsets: Tuple[frozenset, ...]

    @staticmethod
    def prefixes(n: int) -> "LaminarFamily":
        return LaminarFamily(tuple(frozenset(range(1, k + 1)) for k in range(1, n + 1)))

    @staticmethod
    def singletons(n: int) -> "LaminarFamily":
        return LaminarFamily(tuple(frozenset([k]) for k in range(1, n + 1)))

    @staticmethod
    def suffixes(n: int) -> "LaminarFamily":
        return LaminarFamily(tuple(frozenset(range(n - k + 1, n + 1)) for k in range(1, n + 1)))

    def masks(self) -> List[int]:
        out = []
        for subset in self.subsets:
            mask = 0
            for i in subset:
                mask |= 1 << (i - 1)
            out.append(mask)
        return out

    def to_json_dict(self) -> dict:
        return {"subsets": [sorted(s) for s in self.subsets]}

    @staticmethod
    def from_json_dict(obj: dict) -> "LaminarFamily":
        return LaminarFamily(tuple(frozenset(s) for s in obj["subsets"]))


def validate_laminar(family: LaminarFamily) -> bool:
    """B_j cap B_k must be B_j or empty for every j <= k; all nonempty."""
    subs = family.subsets
    if not subs or any(not s for s in subs):
        return False
    if any(any(i < 1 for i in s) for s in subs):
        return False
    for j in range(len(subs)):
        for k in range(j, len(subs)):
            inter = subs[j] & subs[k]
            if inter and inter != subs[j]:
                return False
    return True


def _levy_pairs_generic(instance: GroupInstance, elements: Sequence[Payload],
                        masks: Sequence[int]) -> Dict[Tuple[Scalar, Scalar], int]:
    n = len(elements)
    if n > GENERIC_ENUM_MAX:
        raise EnumerationLimitError(
            f"generic enumeration capped at n = {GENERIC_ENUM_MAX}")
    ident = instance.identity()
    inv = [instance.invert(x) for x in elements]
    counts: Dict[Tuple[Scalar, Scalar], int] = {}
    for signs in itertools.product((1, -1), repeat=n):
        terms = [elements[k] if signs[k] > 0 else inv[k] for k in range(n)]
        maxd = None
        for mask in masks:
            acc = ident
            for k in range(n):
                if mask >> k & 1:
                    acc = instance.compose(acc, terms[k])
            d = instance.distance(ident, instance.compose(acc, acc))
            maxd = d if maxd is None or d > maxd else maxd
        full = ident
        for term in terms:
            full = instance.compose(full, term)
        key = (maxd, instance.distance(ident, full))
        counts[key] = counts.get(key, 0) + 1
    return counts


@dataclass(frozen=True)
class LevyLaw:
    """Joint enumeration output: the law of M = max_k d(1, X_{B_k}^2) and
    of F = d(1, S_n), reusable across a whole (s, t) grid."""
    max_atoms: Tuple[Tuple[Scalar, Fraction], ...]
    final_atoms: Tuple[Tuple[Scalar, Fraction], ...]
    exact: bool

    def max_tail_gt(self, threshold) -> Fraction:
        t = threshold if self.exact else float(threshold)
        return sum((p for v, p in self.max_atoms if v > t), start=Fraction(0))

    def final_tail_gt(self, threshold) -> Fraction:
        t = threshold if self.exact else float(threshold)
        return sum((p for v, p in self.final_atoms if v > t), start=Fraction(0))


def enumerate_levy(scenario: RademacherScenario,
                   family: LaminarFamily) -> LevyLaw:
    """Exact joint enumeration for the maximal inequality (X_i = x_i^{r_i})."""
    if not validate_laminar(family):
        raise ValueError("family is not laminar")
    n = scenario.n
    if any(max(s) > n for s in family.subsets):
        raise ValueError("family indexes past the scenario length")
    if n > EXACT_ENUM_MAX:
        raise EnumerationLimitError(f"exact mode is capped at n = {EXACT_ENUM_MAX}")
    instance = scenario.instance
    masks = family.masks()
    model = instance.lattice_model()
    if model is not None:
        rows = _lattice_rows(instance, scenario.elements, 1)
        pairs = kernels.levy_pair_counts(rows, model.weights_scaled, model.mod,
                                         masks)
        scale = model.scale
        pairs = {(Fraction(a, scale), Fraction(b, scale)): c
                 for (a, b), c in pairs.items()}
        exact = True
    else:
        pairs = _levy_pairs_generic(instance, scenario.elements, masks)
        exact = instance.distance_exactness == EXACT
    total = 1 << n
    max_counts: Dict[Scalar, int] = {}
    fin_counts: Dict[Scalar, int] = {}
    for (a, b), c in pairs.items():
        max_counts[a] = max_counts.get(a, 0) + c
        fin_counts[b] = fin_counts.get(b, 0) + c
    return LevyLaw(
        tuple(sorted((v, Fraction(c, total)) for v, c in max_counts.items())),
        tuple(sorted((v, Fraction(c, total)) for v, c in fin_counts.items())),
        exact)


def check_levy(scenario: RademacherScenario, family: LaminarFamily,
               s, t, law: Optional[LevyLaw] = None) -> InequalityReport:
    """P(max_k d(1, X_{B_k}^2) > s+t) <= P(d(1,S_n) > s) + P(d(1,S_n) > t).

    Both sides are exact rational tail probabilities from one joint
    enumeration; pass a precomputed law to sweep (s, t) grids cheaply.
    """
    s, t = frac(s), frac(t)
    if s <= 0 or t <= 0:
        raise ValueError("s and t must be positive")
    if law is None:
        law = enumerate_levy(scenario, family)
    lhs = law.max_tail_gt(s + t)
    rhs = law.final_tail_gt(s) + law.final_tail_gt(t)
    satisfied = lhs <= rhs
    return InequalityReport(
        inequality="levy", lhs=lhs, rhs=rhs, satisfied=satisfied,
        exact=law.exact,
        witness={**scenario.to_json_dict(), "family": family.to_json_dict(),
                 "s": frac_str(s), "t": frac_str(t)})


def check_tail_product(scenario: RademacherScenario, s, t, u, v) -> InequalityReport:
    """P(d(1, prod x_k^{2 r_k}) > s+t+u+v)
       <= (P(P_n > s) + P(P_n > t)) (P(P_n > u) + P(P_n > v))."""
    s, t, u, v = frac(s), frac(t), frac(u), frac(v)
    if min(s, t, u, v) <= 0:
        raise ValueError("s, t, u, v must be positive")
    law2 = enumerate_rademacher(scenario.with_exponent(2))
    law1 = enumerate_rademacher(scenario.with_exponent(1))
    lhs = law2.tail_gt(s + t + u + v)
    rhs = (law1.tail_gt(s) + law1.tail_gt(t)) * (law1.tail_gt(u) + law1.tail_gt(v))
    return InequalityReport(
        inequality="tail-product", lhs=lhs, rhs=rhs, satisfied=lhs <= rhs,
        exact=law2.exact and law1.exact,
        witness={**scenario.to_json_dict(),
                 "s": frac_str(s), "t": frac_str(t),
                 "u": frac_str(u), "v": frac_str(v)})


# ---------------------------------------------------------------------------
# the i.i.d. maximal inequality (constants c1 = 10, c2 = 3)

MONT_C1 = 10
MONT_C2 = 3


def _mont_exact_joint(instance: GroupInstance, law: FiniteDistribution,
                      z0: Payload, n: int) -> Dict[Tuple[Scalar, Payload], Fraction]:
    """DP over (running max of d(z0, z0 S_k), position S_n) with exact
    probabilities; states merge, so this stays far below |support|^n."""
    states: Dict[Tuple[Scalar, Payload], Fraction] = {}
    for x, prob in law.atoms:
        d = instance.distance(z0, instance.compose(z0, x))
        key = (d, x)
        states[key] = states.get(key, Fraction(0)) + prob
    for _ in range(n - 1):
        nxt: Dict[Tuple[Scalar, Payload], Fraction] = {}
        for (mx, pos), prob in states.items():
            for x, px in law.atoms:
                npos = instance.compose(pos, x)
                d = instance.distance(z0, instance.compose(z0, npos))
                key = (d if d > mx else mx, npos)
                nxt[key] = nxt.get(key, Fraction(0)) + prob * px
        states = nxt
    return states


def check_mont(instance: GroupInstance, law: FiniteDistribution,
               z0: Payload, z1: Payload, n: int, t_grid: Sequence,
               mode: str = "exact", seed: int = 0,
               samples: int = 100_000) -> InequalityReport:
    """P(max_{k<=n} d(z0, z0 S_k) >= t)
       <= 3 P(d(z0, z0 S_n) >= (t - d(z0, z1)) / 10)  for each grid t.

    S_k is an i.i.d. product drawn from the finite law.  Exact mode runs
    a merged dynamic program (gated at |support|^n <= 1e7 raw paths);
    sample mode draws seeded paths and allows a three-sigma margin on the
    difference of the two estimated tails.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    instance.validate(z0)
    instance.validate(z1)
    support = [x for x, _ in law.atoms]
    _normedness_gate(instance, support)
    ts = [frac(t) for t in t_grid]
    if not ts:
        raise ValueError("empty t grid")
    d01 = instance.distance(z0, z1)
    exact_mode = mode == "exact"
    if exact_mode:
        if len(support) ** n > MONT_EXACT_PATHS:
            raise EnumerationLimitError(
                f"|support|^n = {len(support)}^{n} exceeds {MONT_EXACT_PATHS}; "
                "use mode='sample'")
        joint = _mont_exact_joint(instance, law, z0, n)
        max_items = sorted(
            _merge((mx, prob) for (mx, _), prob in joint.items()).items())
        fin_items = sorted(_merge(
            (instance.distance(z0, instance.compose(z0, pos)), prob)
            for (_, pos), prob in joint.items()).items())
        errs = {t: Fraction(0) for t in ts}
    else:
        if mode != "sample":
            raise ValueError("mode must be 'exact' or 'sample'")
        cum = []
        acc = 0.0
        for _, prob in law.atoms:
            acc += float(prob)
            cum.append(acc)
        max_counts: Dict[Scalar, int] = {}
        fin_counts: Dict[Scalar, int] = {}
        for i in range(samples):
            rng = _stream(seed, i)
            pos = None
            mx = None
            for _ in range(n):
                u = rng.random()
                x = law.atoms[min(bisect_left(cum, u), len(cum) - 1)][0]
                pos = x if pos is None else instance.compose(pos, x)
                d = instance.distance(z0, instance.compose(z0, pos))
                mx = d if mx is None or d > mx else mx
            max_counts[mx] = max_counts.get(mx, 0) + 1
            fin = instance.distance(z0, instance.compose(z0, pos))
            fin_counts[fin] = fin_counts.get(fin, 0) + 1
        max_items = sorted((v, Fraction(c, samples)) for v, c in max_counts.items())
        fin_items = sorted((v, Fraction(c, samples)) for v, c in fin_counts.items())

    def tail_ge(items, threshold):
        return sum((p for v, p in items if v >= threshold), start=Fraction(0))

    per_t = []
    all_satisfied = True
    worst = None
    for t in ts:
        threshold = (t - d01) / MONT_C1
        lhs = tail_ge(max_items, t)
        rhs = MONT_C2 * tail_ge(fin_items, threshold)
        if exact_mode:
            ok = lhs <= rhs
        else:
            # binomial three-sigma margin on each estimated tail
            se = 3 * (math.sqrt(float(lhs) * float(1 - lhs) / samples)
                      + math.sqrt(float(rhs / MONT_C2)
                                  * float(1 - rhs / MONT_C2) / samples)
                      + 1.0 / samples)
            ok = float(lhs) <= float(rhs) + se
        all_satisfied = all_satisfied and ok
        per_t.append({"t": frac_str(t), "lhs": frac_str(lhs), "rhs": frac_str(rhs),
                      "threshold": frac_str(threshold), "satisfied": ok})
        margin = rhs - lhs
        if worst is None or margin < worst[0]:
            worst = (margin, lhs, rhs, t)
    _, lhs_w, rhs_w, t_w = worst
    return InequalityReport(
        inequality="maximal", lhs=lhs_w, rhs=rhs_w, satisfied=all_satisfied,
        exact=exact_mode and instance.distance_exactness == EXACT,
        constant=ConstantInfo(float(MONT_C2), "c1=10, c2=3"),
        witness={"group": instance.spec_dict(), "law": law.to_json_dict(),
                 "z0": instance.element_to_json(z0),
                 "z1": instance.element_to_json(z1),
                 "n": n, "tightest_t": frac_str(t_w), "mode": mode},
        details={"per_t": per_t,
                 **({} if exact_mode else {"samples": samples, "seed": seed})})


def _merge(pairs: Iterable[Tuple[Scalar, Fraction]]) -> Dict[Scalar, Fraction]:
    out: Dict[Scalar, Fraction] = {}
    for v, p in pairs:
        out[v] = out.get(v, Fraction(0)) + p
    return out
