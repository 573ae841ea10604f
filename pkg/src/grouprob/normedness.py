"""Normedness, torsion, and weak-commutativity checkers.

An instance is J-normed when d(z0, z0^{n+1}) = n * d(z0, z0^2) for every
n in J and every element z0.  Universally quantified, so a passing run is
only a *certificate on the sample*; a failing run is a genuine refutation
with a recomputable witness.  Exact instances compare exactly; float
instances use a relative tolerance (repeated arc arithmetic accumulates
ulp error).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .algebra import EXACT, GroupInstance, Payload
from .rational import Scalar, scalar_to_json

FLOAT_REL_TOL = 1e-9


def _norm_equal(lhs: Scalar, rhs: Scalar, exact: bool, rel_tol: float) -> bool:
    if exact:
        return lhs == rhs
    return abs(lhs - rhs) <= rel_tol * max(1.0, abs(lhs), abs(rhs))


@dataclass(frozen=True)
class NormednessCounterexample:
    element: Payload
    n: int
    lhs: Scalar  # d(z0, z0^(n+1))
    rhs: Scalar  # n * d(z0, z0^2)

    def to_json_dict(self, instance: GroupInstance) -> dict:
        return {
            "element": instance.element_to_json(self.element),
            "n": self.n,
            "lhs": scalar_to_json(self.lhs),
            "rhs": scalar_to_json(self.rhs),
        }


@dataclass
class NormednessVerdict:
    instance: GroupInstance
    j_tested: Tuple[int, ...]
    per_n: Dict[int, bool]
    counterexample: Optional[NormednessCounterexample]
    exact: bool
    elements_checked: int

    @property
    def holds(self) -> bool:
        return self.counterexample is None

    def to_json_dict(self) -> dict:
        return {
            "kind": self.instance.kind,
            "j_tested": list(self.j_tested),
            "holds": self.holds,
            "per_n": {str(n): ok for n, ok in sorted(self.per_n.items())},
            "counterexample": (None if self.counterexample is None
                               else self.counterexample.to_json_dict(self.instance)),
            "exact": self.exact,
            "elements_checked": self.elements_checked,
        }


def check_j_normed(instance: GroupInstance,
                   j_values: Iterable[int],
                   elements: Sequence[Payload],
                   rel_tol: float = FLOAT_REL_TOL) -> NormednessVerdict:
    """Verify d(z0, z0^{n+1}) = n d(z0, z0^2) for all z0 and n in J.

    Keeps the lowest-(element index, n) counterexample, and fills the
    per-n verdict map over the whole sample either way.
    """
    js = sorted(set(j_values))
    if not js or any(n < 1 for n in js):
        raise ValueError("J must be a nonempty set of positive integers")
    if not elements:
        raise ValueError("need at least one element to check")
    exact = instance.distance_exactness == EXACT
    per_n = {n: True for n in js}
    counterexample: Optional[NormednessCounterexample] = None
    for z0 in elements:
        base = instance.distance(z0, instance.compose(z0, z0))
        for n in js:
            lhs = instance.distance(z0, instance.power(z0, n + 1))
            rhs = n * base
            if not _norm_equal(lhs, rhs, exact, rel_tol):
                per_n[n] = False
                if counterexample is None:
                    counterexample = NormednessCounterexample(z0, n, lhs, rhs)
    return NormednessVerdict(instance, tuple(js), per_n, counterexample,
                             exact, len(elements))


@dataclass
class EquivalenceReport:
    """Empirical check of the {2}-normed <=> {1..n_max}-normed equivalence.

    An inconsistency would falsify the implementation, not the theorem.
    """
    two_normed: NormednessVerdict
    range_normed: NormednessVerdict
    consistent: bool

    def to_json_dict(self) -> dict:
        return {
            "two_normed": self.two_normed.to_json_dict(),
            "range_normed": self.range_normed.to_json_dict(),
            "consistent": self.consistent,
        }


def check_normed_equivalence(instance: GroupInstance,
                             elements: Sequence[Payload],
                             n_max: int,
                             rel_tol: float = FLOAT_REL_TOL) -> EquivalenceReport:
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    two = check_j_normed(instance, {2}, elements, rel_tol)
    full = check_j_normed(instance, range(1, n_max + 1), elements, rel_tol)
    return EquivalenceReport(two, full, consistent=(two.holds == full.holds))


@dataclass
class TorsionReport:
    instance: GroupInstance
    order_max: int
    witness: Optional[Tuple[Payload, int]]  # (z, n) with z != 1, z^n = 1
    cross_check_consistent: Optional[bool]

    @property
    def torsion_free(self) -> bool:
        return self.witness is None

    def to_json_dict(self) -> dict:
        return {
            "kind": self.instance.kind,
            "order_max": self.order_max,
            "torsion_free": self.torsion_free,
            "witness": (None if self.witness is None else {
                "element": self.instance.element_to_json(self.witness[0]),
                "order": self.witness[1]}),
            "cross_check_consistent": self.cross_check_consistent,
        }


def check_torsion_free(instance: GroupInstance,
                       elements: Sequence[Payload],
                       order_max: int) -> TorsionReport:
    """Find z != 1 of finite order <= order_max.

    Torsion obstructs normedness, so on a find the report cross-checks
    that {2}-normedness fails on the witness or one of its powers.
    """
    if not instance.has_identity:
        raise ValueError("torsion is defined relative to an identity")
    if order_max < 2:
        raise ValueError("order_max must be >= 2")
    ident = instance.identity()
    witness = None
    for z in elements:
        if instance.equal(z, ident):
            continue
        acc = z
        for n in range(2, order_max + 1):
            acc = instance.compose(acc, z)
            if instance.equal(acc, ident):
                witness = (z, n)
                break
        if witness:
            break
    cross = None
    if witness:
        z, order = witness
        powers = [instance.power(z, k) for k in range(1, order + 1)]
        powers = [p for p in powers if not instance.equal(p, ident)]
        cross = not check_j_normed(instance, {2}, powers).holds
    return TorsionReport(instance, order_max, witness, cross)


def check_weak_commutativity(instance: GroupInstance,
                             g: Payload,
                             h: Payload,
                             n_max: int) -> Optional[int]:
    """Least n <= n_max with (gh)^(2^n) = g^(2^n) h^(2^n), or None.

    Any commuting pair returns 1.  On free groups the doubling exponent
    can blow words up; the instance's power guard raises in that case.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    gh = instance.compose(g, h)
    for n in range(1, n_max + 1):
        e = 1 << n
        left = instance.power(gh, e)
        right = instance.compose(instance.power(g, e), instance.power(h, e))
        if instance.equal(left, right):
            return n
    return None
