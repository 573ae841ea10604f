"""Metric (semi)group abstractions.

A ``GroupInstance`` bundles a composition law with a translation-invariant
metric over instance-specific payloads (integer vectors, residue vectors,
rational points on a torus, bit vectors, reduced words, positive
integers).  Payloads are plain immutable Python values kept in canonical
form from construction onward; operations assume canonical inputs and
never re-normalize in the hot path.

Integer-like instances report ``distance_exactness == "exact-rational"``
and return Fractions; the torus returns floats and declares a tolerance
that downstream verdicts must honor.
"""

from __future__ import annotations

import random
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Tuple

from .rational import Scalar

Payload = Any

EXACT = "exact-rational"
FLOAT = "float"


class GroupError(Exception):
    """Base class for instance/operation failures."""


class InstanceMismatchError(GroupError):
    pass


class UnsupportedOperationError(GroupError):
    pass


class PowerError(GroupError):
    """Inverse-less power request, or a word power past the letter budget."""


class BrokenInstanceError(GroupError):
    """Structural impossibility observed (e.g. two distinct idempotents)."""


class EnumerationBoundError(GroupError):
    """A bound is required to enumerate an infinite instance."""


@dataclass(frozen=True)
class LatticeModel:
    """Integer model feeding the enumeration kernels.

    True distance of a vector v is  sum_j weights_scaled[j] * term(v_j) / scale
    with term = abs for mod == 0 and the wrap distance min(v, mod - v) on
    residues otherwise.
    """
    mod: int
    weights_scaled: Tuple[int, ...]
    scale: int


class GroupInstance(ABC):
    kind: str = "abstract"
    has_identity: bool = True
    has_inverses: bool = True
    is_abelian: bool = True
    distance_exactness: str = EXACT
    float_tolerance: float = 0.0
    is_finite: bool = False

    # --- group structure ---------------------------------------------------

    @abstractmethod
    def compose(self, g: Payload, h: Payload) -> Payload:
        ...

    @abstractmethod
    def distance(self, g: Payload, h: Payload) -> Scalar:
        ...

    def identity(self) -> Payload:
        raise UnsupportedOperationError(f"{self.kind}: no identity element")

    def invert(self, g: Payload) -> Payload:
        raise UnsupportedOperationError(f"{self.kind}: no inverses")

    def equal(self, g: Payload, h: Payload) -> bool:
        return g == h

    def power(self, g: Payload, k: int) -> Payload:
        """k-fold composition; inverse powers through inversion."""
        if k == 0:
            if not self.has_identity:
                raise PowerError(f"{self.kind}: zero power needs an identity")
            return self.identity()
        if k < 0:
            if not self.has_inverses:
                raise PowerError(f"{self.kind}: negative power needs inverses")
            return self.invert(self.power(g, -k))
        acc = None
        sq = g
        while k:
            if k & 1:
                acc = sq if acc is None else self.compose(acc, sq)
            k >>= 1
            if k:
                sq = self.compose(sq, sq)
        return acc

    def displacement(self, a: Payload, b: Payload) -> Scalar:
        """d(a, a*b); independent of the base point a by translation invariance."""
        return self.distance(a, self.compose(a, b))

    # --- element universe ---------------------------------------------------

    @abstractmethod
    def validate(self, payload: Payload) -> Payload:
        """Return the payload if canonical for this instance, else raise."""

    @abstractmethod
    def enumerate_elements(self, bound: Optional[int] = None) -> List[Payload]:
        """Deterministic listing: complete for finite instances, complete up
        to the bound otherwise (coordinates / word length / grid denominator)."""

    @abstractmethod
    def random_element(self, rng: random.Random, bound: int = 5) -> Payload:
        ...

    # --- serialization -------------------------------------------------------

    @abstractmethod
    def spec_dict(self) -> dict:
        ...

    def element_to_json(self, g: Payload):
        return g

    def element_from_json(self, obj) -> Payload:
        return self.validate(obj)

    # --- optional linear / lattice structure ---------------------------------

    def lattice_model(self) -> Optional[LatticeModel]:
        """Integer kernel model, if the instance has one."""
        return None

    def lattice_coordinates(self, g: Payload) -> Optional[Tuple[int, ...]]:
        return None

    def payload_from_lattice(self, vec: Sequence[int]) -> Payload:
        raise UnsupportedOperationError(f"{self.kind}: no lattice model")

    def banach_coordinates(self, g: Payload) -> Optional[Tuple[Fraction, ...]]:
        """Coordinates in the identified Banach space; None if there is none."""
        return None

    @property
    def banach_weights(self) -> Optional[Tuple[Fraction, ...]]:
        return None

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"<{type(self).__name__} {self.spec_dict()}>"


# ---------------------------------------------------------------------------
# idempotents and identity adjunction


def find_idempotent(instance: GroupInstance, elements: Sequence[Payload]) -> Optional[Payload]:
    """The unique e with e*e = e among candidates, or None.

    A metric semigroup has at most one idempotent and it must act as a
    two-sided identity; seeing either rule violated means the instance is
    structurally broken and raises.
    """
    found = None
    for e in elements:
        if instance.equal(instance.compose(e, e), e):
            if found is not None and not instance.equal(found, e):
                raise BrokenInstanceError(
                    f"two distinct idempotents: {found!r} and {e!r}")
            found = e
    if found is not None:
        for x in elements:
            if not (instance.equal(instance.compose(found, x), x)
                    and instance.equal(instance.compose(x, found), x)):
                raise BrokenInstanceError(
                    f"idempotent {found!r} is not a two-sided identity on {x!r}")
    return found


class AdjoinedIdentity(GroupInstance):
    """The smallest metric monoid containing an identity-less semigroup.

    The new identity is the payload ``None``; its distance to b is the
    displacement d(b, b*b), which is what translation invariance forces.
    """

    def __init__(self, base: GroupInstance):
        if base.has_identity:
            raise ValueError("base already has an identity; nothing to adjoin")
        self.base = base
        self.kind = f"adjoined({base.kind})"
        self.has_identity = True
        self.has_inverses = False
        self.is_abelian = base.is_abelian
        self.distance_exactness = base.distance_exactness
        self.float_tolerance = base.float_tolerance
        self.is_finite = base.is_finite

    def identity(self) -> Payload:
        return None

    def compose(self, g, h):
        if g is None:
            return h
        if h is None:
            return g
        return self.base.compose(g, h)

    def distance(self, g, h) -> Scalar:
        if g is None and h is None:
            return Fraction(0) if self.distance_exactness == EXACT else 0.0
        if g is None:
            return self.base.distance(h, self.base.compose(h, h))
        if h is None:
            return self.base.distance(g, self.base.compose(g, g))
        return self.base.distance(g, h)

    def validate(self, payload):
        if payload is None:
            return None
        return self.base.validate(payload)

    def enumerate_elements(self, bound=None):
        return [None] + self.base.enumerate_elements(bound)

    def random_element(self, rng, bound=5):
        if rng.randrange(max(bound, 2)) == 0:
            return None
        return self.base.random_element(rng, bound)

    def spec_dict(self) -> dict:
        return {"kind": "adjoined", "base": self.base.spec_dict()}

    def element_to_json(self, g):
        return None if g is None else self.base.element_to_json(g)

    def element_from_json(self, obj):
        return None if obj is None else self.base.element_from_json(obj)

    def lattice_coordinates(self, g):
        if g is None:
            w = self.base.banach_weights
            return None if w is None else tuple(0 for _ in w)
        return self.base.lattice_coordinates(g)

    def payload_from_lattice(self, vec):
        if all(v == 0 for v in vec):
            return None
        return self.base.payload_from_lattice(vec)

    def banach_coordinates(self, g):
        if g is None:
            w = self.base.banach_weights
            return None if w is None else tuple(Fraction(0) for _ in w)
        return self.base.banach_coordinates(g)

    @property
    def banach_weights(self):
        return self.base.banach_weights


def adjoin_identity(instance: GroupInstance) -> GroupInstance:
    """Embed a semigroup into its unique smallest metric monoid.

    Instances that already contain an idempotent (= identity) are returned
    unchanged, which also makes the operation idempotent.
    """
    if instance.has_identity:
        return instance
    if isinstance(instance, AdjoinedIdentity):
        return instance
    return AdjoinedIdentity(instance)


# ---------------------------------------------------------------------------
# seeded axiom audit


@dataclass(frozen=True)
class AxiomFailure:
    check: str
    witness: str


@dataclass
class AuditReport:
    kind: str
    sample_size: int
    seed: int
    checks_run: List[str]
    failures: List[AxiomFailure] = field(default_factory=list)
    metric_checked: bool = True

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "sample_size": self.sample_size,
            "seed": self.seed,
            "passed": self.passed,
            "metric_checked": self.metric_checked,
            "checks_run": self.checks_run,
            "failures": [{"check": f.check, "witness": f.witness} for f in self.failures],
        }


def audit_axioms(instance: GroupInstance, sample_size: int, seed: int,
                 bound: int = 6, tolerance: Optional[float] = None) -> AuditReport:
    """Seeded sample audit of the semigroup and metric axioms.

    Checks associativity, commutativity (when claimed), the metric axioms,
    translation invariance, the componentwise composition bound
    d(y1 y2, z1 z2) <= d(y1, z1) + d(y2, z2), and the telescoping chain
    bound it implies.  Failures are report entries, never exceptions; the
    first witness per check is kept.
    """
    if sample_size < 1:
        raise ValueError("sample_size must be >= 1")
    rng = random.Random(seed)
    tol = instance.float_tolerance if tolerance is None else tolerance
    report = AuditReport(kind=instance.kind, sample_size=sample_size, seed=seed,
                         checks_run=[])
    failed = set()

    def fail(check: str, witness: str):
        if check not in failed:
            failed.add(check)
            report.failures.append(AxiomFailure(check, witness))

    def close(x, y) -> bool:
        if isinstance(x, Fraction) and isinstance(y, Fraction):
            return x == y
        return abs(x - y) <= tol

    def leq(x, y) -> bool:
        if isinstance(x, Fraction) and isinstance(y, Fraction):
            return x <= y
        return x <= y + tol

    try:
        instance.distance(instance.random_element(rng, bound),
                          instance.random_element(rng, bound))
        has_metric = True
    except UnsupportedOperationError:
        has_metric = False
    report.metric_checked = has_metric

    report.checks_run.append("associativity")
    if instance.is_abelian:
        report.checks_run.append("commutativity")
    if has_metric:
        report.checks_run.extend([
            "nonnegativity", "symmetry", "identity-of-indiscernibles",
            "triangle", "translation-invariance", "composition-bound",
            "chain-bound",
        ])

    for _ in range(sample_size):
        a = instance.random_element(rng, bound)
        b = instance.random_element(rng, bound)
        c = instance.random_element(rng, bound)
        ab, bc = instance.compose(a, b), instance.compose(b, c)
        if not instance.equal(instance.compose(ab, c), instance.compose(a, bc)):
            fail("associativity", f"a={a!r} b={b!r} c={c!r}")
        if instance.is_abelian and not instance.equal(ab, instance.compose(b, a)):
            fail("commutativity", f"a={a!r} b={b!r}")
        if not has_metric:
            continue
        dab = instance.distance(a, b)
        if dab < 0:
            fail("nonnegativity", f"d({a!r},{b!r})={dab}")
        if not close(dab, instance.distance(b, a)):
            fail("symmetry", f"a={a!r} b={b!r}")
        if instance.equal(a, b):
            if not close(dab, 0):
                fail("identity-of-indiscernibles", f"d(a,a)={dab} a={a!r}")
        elif close(dab, 0) and isinstance(dab, Fraction) and dab == 0:
            fail("identity-of-indiscernibles", f"distinct at distance 0: {a!r},{b!r}")
        if not leq(instance.distance(a, c), dab + instance.distance(b, c)):
            fail("triangle", f"a={a!r} b={b!r} c={c!r}")
        if not (close(instance.distance(instance.compose(a, c), instance.compose(b, c)), dab)
                and close(instance.distance(instance.compose(c, a), instance.compose(c, b)), dab)):
            fail("translation-invariance", f"a={a!r} b={b!r} c={c!r}")
        y1, y2 = a, b
        z1, z2 = c, instance.random_element(rng, bound)
        lhs = instance.distance(instance.compose(y1, y2), instance.compose(z1, z2))
        if not leq(lhs, instance.distance(y1, z1) + instance.distance(y2, z2)):
            fail("composition-bound", f"y=({y1!r},{y2!r}) z=({z1!r},{z2!r})")
        # chain: d(z0...zk, z0...z(k+l)) <= sum_i d(z0, z0 z(k+i))
        k, l = rng.randint(0, 2), rng.randint(1, 3)
        zs = [instance.random_element(rng, bound) for _ in range(k + l + 1)]
        head = zs[0]
        for z in zs[1:k + 1]:
            head = instance.compose(head, z)
        tail_elems = zs[k + 1:]
        full = head
        for z in tail_elems:
            full = instance.compose(full, z)
        chain_rhs = sum((instance.distance(zs[0], instance.compose(zs[0], z))
                         for z in tail_elems), start=Fraction(0) if
                        instance.distance_exactness == EXACT else 0.0)
        if not leq(instance.distance(head, full), chain_rhs):
            fail("chain-bound", f"z0..z{k + l}={zs!r}")
    return report
