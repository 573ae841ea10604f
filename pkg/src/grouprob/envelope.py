"""The constructive Banach-envelope chain and group-valued expectations.

A normed abelian metric semigroup embeds isometrically, stage by stage,
into a Banach space:

    semigroup -> monoid (adjoin the forced identity)
              -> group of formal differences (Grothendieck construction)
              -> rational scalars (denominators)
              -> Banach space

For the finitely generated families supported here the final space is a
weighted-L1 coordinate space, and every arrow preserves distances exactly
in rational arithmetic.  Abstract Cauchy completion would add nothing
testable at this scale, so the last stage is an identification, not a
quotient of Cauchy sequences.

Gates: the chain refuses non-abelian instances, instances with torsion
(torsion obstructs normedness), and non-cancellative fixtures (formal
differences need cancellation to embed).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .algebra import (EXACT, EnumerationBoundError, GroupError, GroupInstance,
                      Payload, adjoin_identity)
from .normedness import check_torsion_free
from .rational import frac, frac_str


class EnvelopeError(GroupError):
    pass


class NotNormedError(EnvelopeError):
    """The instance cannot be normed; there is no Banach envelope."""


class TorsionObstructionError(NotNormedError):
    pass


class NotLinearError(NotNormedError):
    pass


class CancellativityError(EnvelopeError):
    pass


class Stage(str, Enum):
    SEMIGROUP = "semigroup"
    MONOID = "monoid"
    DIFFERENCE = "difference"
    RATIONAL = "rational"
    BANACH = "banach"


@dataclass(frozen=True)
class EnvelopeElement:
    stage: Stage
    payload: object  # DIFFERENCE: (p, q); RATIONAL: ((p, q), k); BANACH: Fraction vector


@dataclass(frozen=True)
class FiniteDistribution:
    """Finite-support law with exact rational probabilities summing to 1."""

    instance: GroupInstance
    atoms: Tuple[Tuple[Payload, Fraction], ...]

    def __post_init__(self):
        merged = {}
        for payload, prob in self.atoms:
            self.instance.validate(payload)
            if not isinstance(prob, Fraction) or prob <= 0:
                raise ValueError(f"probabilities must be positive Fractions, got {prob!r}")
            if payload in merged:
                raise ValueError(f"duplicate support element {payload!r}")
            merged[payload] = prob
        if sum(merged.values()) != 1:
            raise ValueError("probabilities must sum to exactly 1")

    @staticmethod
    def from_pairs(instance: GroupInstance, pairs) -> "FiniteDistribution":
        return FiniteDistribution(
            instance, tuple((payload, frac(prob)) for payload, prob in pairs))

    @staticmethod
    def uniform(instance: GroupInstance, payloads: Sequence[Payload]) -> "FiniteDistribution":
        p = Fraction(1, len(payloads))
        return FiniteDistribution(instance, tuple((x, p) for x in payloads))

    def mixture(self, other: "FiniteDistribution", lam: Fraction) -> "FiniteDistribution":
        """lam * self + (1 - lam) * other, merged exactly."""
        if not 0 < lam < 1:
            raise ValueError("mixture weight must be strictly between 0 and 1")
        merged = {}
        for payload, prob in self.atoms:
            merged[payload] = merged.get(payload, Fraction(0)) + lam * prob
        for payload, prob in other.atoms:
            merged[payload] = merged.get(payload, Fraction(0)) + (1 - lam) * prob
        return FiniteDistribution(self.instance, tuple(merged.items()))

    def to_json_dict(self) -> dict:
        return {"atoms": [[self.instance.element_to_json(x), frac_str(p)]
                          for x, p in self.atoms]}

    @staticmethod
    def from_json_dict(instance: GroupInstance, obj: dict) -> "FiniteDistribution":
        if not isinstance(obj, dict) or "atoms" not in obj:
            raise ValueError("distribution JSON needs an 'atoms' list")
        return FiniteDistribution(instance, tuple(
            (instance.element_from_json(x), frac(p)) for x, p in obj["atoms"]))


@dataclass
class CancellativityReport:
    samples: int
    seed: int
    passed: bool
    counterexample: Optional[Tuple[Payload, Payload, Payload]]  # a*c = b*c, a != b

    def to_json_dict(self) -> dict:
        return {"samples": self.samples, "seed": self.seed, "passed": self.passed,
                "counterexample": None if self.counterexample is None
                else [repr(x) for x in self.counterexample]}


def check_cancellative(instance: GroupInstance, samples: int = 200,
                       seed: int = 0, bound: int = 6) -> CancellativityReport:
    """Sampled check of a*c = b*c => a = b; the gate before formal differences."""
    rng = random.Random(seed)
    for _ in range(samples):
        a = instance.random_element(rng, bound)
        b = instance.random_element(rng, bound)
        c = instance.random_element(rng, bound)
        if instance.equal(instance.compose(a, c), instance.compose(b, c)) \
                and not instance.equal(a, b):
            return CancellativityReport(samples, seed, False, (a, b, c))
    return CancellativityReport(samples, seed, True, None)


def _gate_elements(instance: GroupInstance, rng: random.Random,
                   count: int = 64) -> List[Payload]:
    for bound in (4, 2, 1):
        try:
            pool = instance.enumerate_elements(bound)
        except EnumerationBoundError:
            continue
        if len(pool) <= 4 * count:
            return pool
        return pool[:: max(1, len(pool) // count)]
    return [instance.random_element(rng, 4) for _ in range(count)]


class BanachEnvelope:
    """One instance's envelope chain, with all gates run at construction."""

    def __init__(self, instance: GroupInstance, *, samples: int = 200,
                 seed: int = 0, torsion_order_max: int = 16):
        if not instance.is_abelian:
            raise NotNormedError(
                f"{instance.kind}: envelope needs an abelian instance")
        rng = random.Random(seed)
        if instance.has_identity:
            torsion = check_torsion_free(
                instance, _gate_elements(instance, rng), torsion_order_max)
            if not torsion.torsion_free:
                z, n = torsion.witness
                raise TorsionObstructionError(
                    f"{instance.kind} is not normed: element "
                    f"{instance.element_to_json(z)!r} has order {n}")
        self.instance = instance
        self.monoid = adjoin_identity(instance)
        self.cancellativity = check_cancellative(instance, samples, seed)
        if not self.cancellativity.passed:
            a, b, c = self.cancellativity.counterexample
            raise CancellativityError(
                f"{instance.kind} is not cancellative: "
                f"{a!r}*{c!r} = {b!r}*{c!r} but {a!r} != {b!r}")
        if instance.distance_exactness != EXACT:
            raise NotNormedError(
                f"{instance.kind}: envelope arithmetic requires exact distances")
        self._linear = self.monoid.banach_weights is not None

    @property
    def has_linear_model(self) -> bool:
        return self._linear

    # --- formal differences (p, q) meaning p - q -----------------------------

    def _canonical_pair(self, p: Payload, q: Payload) -> Tuple[Payload, Payload]:
        cp = self.monoid.lattice_coordinates(p)
        cq = self.monoid.lattice_coordinates(q)
        if cp is None or cq is None:
            return (p, q)
        v = tuple(a - b for a, b in zip(cp, cq))
        if self.monoid.has_inverses:
            zero = tuple(0 for _ in v)
            return (self.monoid.payload_from_lattice(v),
                    self.monoid.payload_from_lattice(zero))
        pos = tuple(x if x > 0 else 0 for x in v)
        neg = tuple(-x if x < 0 else 0 for x in v)
        return (self.monoid.payload_from_lattice(pos),
                self.monoid.payload_from_lattice(neg))

    def lift(self, p: Payload, q: Payload) -> EnvelopeElement:
        """The formal difference p - q over the monoid."""
        self.monoid.validate(p)
        self.monoid.validate(q)
        return EnvelopeElement(Stage.DIFFERENCE, self._canonical_pair(p, q))

    def lift_element(self, g: Payload) -> EnvelopeElement:
        return self.lift(g, self.monoid.identity())

    def difference_zero(self) -> EnvelopeElement:
        e = self.monoid.identity()
        return EnvelopeElement(Stage.DIFFERENCE, (e, e))

    def _pair(self, x: EnvelopeElement) -> Tuple[Payload, Payload]:
        if x.stage is not Stage.DIFFERENCE:
            raise EnvelopeError(f"expected a difference element, got {x.stage}")
        return x.payload

    def difference_add(self, x: EnvelopeElement, y: EnvelopeElement) -> EnvelopeElement:
        p, q = self._pair(x)
        r, s = self._pair(y)
        return EnvelopeElement(Stage.DIFFERENCE, self._canonical_pair(
            self.monoid.compose(p, r), self.monoid.compose(q, s)))

    def difference_negate(self, x: EnvelopeElement) -> EnvelopeElement:
        p, q = self._pair(x)
        return EnvelopeElement(Stage.DIFFERENCE, self._canonical_pair(q, p))

    def difference_scale(self, x: EnvelopeElement, n: int) -> EnvelopeElement:
        if n == 0:
            return self.difference_zero()
        p, q = self._pair(x)
        if n < 0:
            p, q, n = q, p, -n
        return EnvelopeElement(Stage.DIFFERENCE, self._canonical_pair(
            self.monoid.power(p, n), self.monoid.power(q, n)))

    def difference_equal(self, x: EnvelopeElement, y: EnvelopeElement) -> bool:
        """(p - q) = (r - s) iff p + s = q + r in the monoid (cancellativity)."""
        p, q = self._pair(x)
        r, s = self._pair(y)
        return self.monoid.equal(self.monoid.compose(p, s),
                                 self.monoid.compose(q, r))

    def difference_distance(self, x: EnvelopeElement, y: EnvelopeElement) -> Fraction:
        """d(p - q, r - s) := d(p + s, q + r); representative-independent."""
        p, q = self._pair(x)
        r, s = self._pair(y)
        return self.monoid.distance(self.monoid.compose(p, s),
                                    self.monoid.compose(q, r))

    # --- rational scalars -----------------------------------------------------

    def _difference_content(self, pair: Tuple[Payload, Payload]) -> Optional[int]:
        cp = self.monoid.lattice_coordinates(pair[0])
        cq = self.monoid.lattice_coordinates(pair[1])
        if cp is None or cq is None:
            return None
        g = 0
        for a, b in zip(cp, cq):
            g = math.gcd(g, abs(a - b))
        return g

    def rationalize(self, x: EnvelopeElement, k: int) -> EnvelopeElement:
        """The element x / k of the rational stage, with the denominator
        reduced eagerly against the coordinate content where computable."""
        if k < 1:
            raise EnvelopeError("denominator must be a positive integer")
        pair = self._pair(x)
        content = self._difference_content(pair)
        if content is not None:
            if content == 0:
                e = self.monoid.identity()
                return EnvelopeElement(Stage.RATIONAL, ((e, e), 1))
            g = math.gcd(content, k)
            if g > 1:
                cp = self.monoid.lattice_coordinates(pair[0])
                cq = self.monoid.lattice_coordinates(pair[1])
                v = tuple((a - b) // g for a, b in zip(cp, cq))
                pair = self._canonical_pair_from_vector(v)
                k //= g
        return EnvelopeElement(Stage.RATIONAL, (pair, k))

    def _canonical_pair_from_vector(self, v: Tuple[int, ...]) -> Tuple[Payload, Payload]:
        if self.monoid.has_inverses:
            zero = tuple(0 for _ in v)
            return (self.monoid.payload_from_lattice(v),
                    self.monoid.payload_from_lattice(zero))
        pos = tuple(x if x > 0 else 0 for x in v)
        neg = tuple(-x if x < 0 else 0 for x in v)
        return (self.monoid.payload_from_lattice(pos),
                self.monoid.payload_from_lattice(neg))

    def denominator(self, x: EnvelopeElement) -> int:
        if x.stage is not Stage.RATIONAL:
            raise EnvelopeError(f"expected a rational-stage element, got {x.stage}")
        return x.payload[1]

    def rational_distance(self, a: EnvelopeElement, b: EnvelopeElement) -> Fraction:
        """d(g, h) = d_Z(n_h * (n_g g), n_g * (n_h h)) / (n_g n_h).

        Any valid denominator gives the same value (the formula is
        well-defined), so the stored one is used directly.
        """
        if a.stage is not Stage.RATIONAL or b.stage is not Stage.RATIONAL:
            raise EnvelopeError("rational_distance needs rational-stage elements")
        (xp, xk) = a.payload
        (yp, yk) = b.payload
        xd = EnvelopeElement(Stage.DIFFERENCE, xp)
        yd = EnvelopeElement(Stage.DIFFERENCE, yp)
        return Fraction(1, xk * yk) * self.difference_distance(
            self.difference_scale(xd, yk), self.difference_scale(yd, xk))

    def rational_scale(self, x: EnvelopeElement, r: Fraction) -> EnvelopeElement:
        """r * x on the rational stage."""
        if x.stage is not Stage.RATIONAL:
            raise EnvelopeError("rational_scale needs a rational-stage element")
        pair, k = x.payload
        diff = EnvelopeElement(Stage.DIFFERENCE, pair)
        scaled = self.difference_scale(diff, r.numerator)
        return self.rationalize(scaled, k * r.denominator)

    # --- the Banach stage -----------------------------------------------------

    def to_banach(self, x) -> EnvelopeElement:
        """Coordinates in the identified weighted-L1 space, any stage in."""
        if not self._linear:
            raise NotLinearError(
                f"{self.instance.kind} is not normed: no linear envelope model")
        if isinstance(x, EnvelopeElement):
            if x.stage is Stage.BANACH:
                return x
            if x.stage is Stage.DIFFERENCE:
                p, q = x.payload
                vec = tuple(a - b for a, b in zip(
                    self.monoid.banach_coordinates(p),
                    self.monoid.banach_coordinates(q)))
            elif x.stage is Stage.RATIONAL:
                (p, q), k = x.payload
                vec = tuple((a - b) / k for a, b in zip(
                    self.monoid.banach_coordinates(p),
                    self.monoid.banach_coordinates(q)))
            else:
                raise EnvelopeError(f"cannot embed stage {x.stage}")
        else:
            vec = self.monoid.banach_coordinates(self.monoid.validate(x))
        return EnvelopeElement(Stage.BANACH, tuple(Fraction(c) for c in vec))

    def banach_distance(self, u: EnvelopeElement, v: EnvelopeElement) -> Fraction:
        weights = self.monoid.banach_weights
        return sum((w * abs(a - b) for w, a, b in
                    zip(weights, u.payload, v.payload)), start=Fraction(0))

    def banach_norm(self, u: EnvelopeElement) -> Fraction:
        weights = self.monoid.banach_weights
        return sum((w * abs(a) for w, a in zip(weights, u.payload)),
                   start=Fraction(0))

    def expectation(self, dist: FiniteDistribution) -> EnvelopeElement:
        """Exact mixture of embedded support points; an element of the
        envelope that need not lie in the image of the instance itself."""
        if dist.instance is not self.instance and \
                dist.instance.spec_dict() != self.instance.spec_dict():
            raise EnvelopeError("distribution lives on a different instance")
        vec = None
        for payload, prob in dist.atoms:
            coords = self.to_banach(payload).payload
            if vec is None:
                vec = [prob * c for c in coords]
            else:
                for j, c in enumerate(coords):
                    vec[j] += prob * c
        return EnvelopeElement(Stage.BANACH, tuple(vec))

    # --- reporting ------------------------------------------------------------

    def trace(self, g: Payload) -> List[dict]:
        """The element's image and norm at each stage, exact rationals."""
        ident = self.monoid.identity()
        rows = []
        if not self.instance.has_identity:
            rows.append({"stage": Stage.SEMIGROUP.value,
                         "value": self.instance.element_to_json(g),
                         "norm": frac_str(self.instance.displacement(g, g))})
        rows.append({"stage": Stage.MONOID.value,
                     "value": self.monoid.element_to_json(g),
                     "norm": frac_str(self.monoid.distance(ident, g))})
        diff = self.lift(g, ident)
        rows.append({"stage": Stage.DIFFERENCE.value,
                     "value": [self.monoid.element_to_json(x) for x in diff.payload],
                     "norm": frac_str(self.difference_distance(diff, self.difference_zero()))})
        rat = self.rationalize(diff, 1)
        zero_rat = self.rationalize(self.difference_zero(), 1)
        rows.append({"stage": Stage.RATIONAL.value,
                     "value": {"difference": [self.monoid.element_to_json(x)
                                              for x in rat.payload[0]],
                               "denominator": rat.payload[1]},
                     "norm": frac_str(self.rational_distance(rat, zero_rat))})
        if self._linear:
            vec = self.to_banach(rat)
            rows.append({"stage": Stage.BANACH.value,
                         "value": [frac_str(c) for c in vec.payload],
                         "norm": frac_str(self.banach_norm(vec))})
        return rows


def embed_to_banach(instance: GroupInstance, g: Payload, **gate_kwargs) -> EnvelopeElement:
    """One-shot embedding; raises NotNormedError for obstructed instances."""
    return BanachEnvelope(instance, **gate_kwargs).to_banach(g)


@dataclass
class RoundtripReport:
    samples: int
    seed: int
    failures: List[str]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json_dict(self) -> dict:
        return {"samples": self.samples, "seed": self.seed,
                "passed": self.passed, "failures": self.failures}


def envelope_roundtrip(instance: GroupInstance, samples: int = 100,
                       seed: int = 0, bound: int = 6) -> RoundtripReport:
    """Chain isometry on random pairs: every stage of the envelope reports
    the same distance, and the composite construction agrees with the
    direct coordinate model exactly."""
    env = BanachEnvelope(instance, seed=seed)
    rng = random.Random(seed)
    ident = env.monoid.identity()
    failures: List[str] = []
    for i in range(samples):
        g = instance.random_element(rng, bound)
        h = instance.random_element(rng, bound)
        d0 = instance.distance(g, h)
        stages = {"monoid": env.monoid.distance(g, h)}
        dg, dh = env.lift(g, ident), env.lift(h, ident)
        stages["difference"] = env.difference_distance(dg, dh)
        rg, rh = env.rationalize(dg, 1), env.rationalize(dh, 1)
        stages["rational"] = env.rational_distance(rg, rh)
        if env.has_linear_model:
            stages["banach"] = env.banach_distance(env.to_banach(rg), env.to_banach(rh))
        for stage, value in stages.items():
            if value != d0:
                failures.append(f"sample {i}: {stage} distance {value} != {d0}")
        # representative independence: pad both sides of the pair by junk
        c = instance.random_element(rng, bound)
        padded = EnvelopeElement(Stage.DIFFERENCE,
                                 (env.monoid.compose(dg.payload[0], c),
                                  env.monoid.compose(dg.payload[1], c)))
        if not env.difference_equal(padded, dg):
            failures.append(f"sample {i}: padded pair is not the same class")
        if env.difference_distance(padded, dh) != stages["difference"]:
            failures.append(f"sample {i}: distance depends on the representative")
    return RoundtripReport(samples, seed, failures)
