"""Concrete metric (semi)group families and their JSON schema.

Supported kinds:

``free-abelian``       Z^d with a weighted L1 metric (positive rational weights)
``cyclic``             (Z/m)^d with the weighted wrap metric
``torus``              (R/Z)^d restricted to rational points; float distances
``graph-space``        (Z/2)^E under XOR with weighted Hamming distance
``free-group``         free group of finite rank; metric served by wordnorm
``positive-naturals``  (N, +), the canonical identity-less semigroup

Group specs serialize as JSON objects with rationals as "p/q" strings:

    {"kind": "free-abelian", "dim": 2, "weights": ["1/1", "1/2"]}
"""

from __future__ import annotations

import itertools
import json
import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import wordnorm
from .algebra import (EXACT, FLOAT, EnumerationBoundError, GroupInstance,
                      InstanceMismatchError, LatticeModel, PowerError,
                      UnsupportedOperationError)
from .rational import frac, frac_str

KINDS = ("free-abelian", "cyclic", "torus", "graph-space", "free-group",
         "positive-naturals")

ENUMERATION_CAP = 2_000_000
WORD_LETTER_BUDGET = 1_000_000


class SpecError(ValueError):
    """Group-spec parse failure with a machine-readable code."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def _parse_weights(obj, count: int) -> Tuple[Fraction, ...]:
    if obj is None:
        return tuple(Fraction(1) for _ in range(count))
    if not isinstance(obj, list) or len(obj) != count:
        raise SpecError("invalid-parameter",
                        f"weights must be a list of {count} rationals")
    out = []
    for w in obj:
        try:
            value = frac(w)
        except (ValueError, ZeroDivisionError) as exc:
            raise SpecError("invalid-parameter", f"bad weight {w!r}: {exc}")
        if value <= 0:
            raise SpecError("invalid-parameter", f"weights must be positive, got {w!r}")
        out.append(value)
    return tuple(out)


def _weights_json(weights: Tuple[Fraction, ...]):
    return [frac_str(w) for w in weights]


def _scaled_weights(weights: Tuple[Fraction, ...]) -> Tuple[Tuple[int, ...], int]:
    scale = 1
    for w in weights:
        scale = scale * w.denominator // math.gcd(scale, w.denominator)
    return tuple(int(w * scale) for w in weights), scale


class _VectorInstance(GroupInstance):
    """Shared plumbing for the coordinate-vector families."""

    dim: int
    weights: Tuple[Fraction, ...]

    def validate(self, payload):
        if (not isinstance(payload, tuple)) or len(payload) != self.dim:
            raise InstanceMismatchError(
                f"{self.kind}: expected a {self.dim}-tuple, got {payload!r}")
        for x in payload:
            self._validate_coord(x)
        return payload

    def _validate_coord(self, x):
        raise NotImplementedError

    def element_to_json(self, g):
        return list(g)

    def element_from_json(self, obj):
        if not isinstance(obj, list):
            raise InstanceMismatchError(f"{self.kind}: element JSON must be a list")
        return self.validate(tuple(self._coord_from_json(x) for x in obj))

    def _coord_from_json(self, x):
        return x


class FreeAbelian(_VectorInstance):
    kind = "free-abelian"

    def __init__(self, dim: int, weights=None):
        if dim < 1:
            raise SpecError("invalid-parameter", "dim must be >= 1")
        self.dim = dim
        self.weights = _parse_weights(weights, dim)

    def compose(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def identity(self):
        return tuple(0 for _ in range(self.dim))

    def invert(self, g):
        return tuple(-a for a in g)

    def distance(self, g, h) -> Fraction:
        return sum((w * abs(a - b) for w, a, b in zip(self.weights, g, h)),
                   start=Fraction(0))

    def _validate_coord(self, x):
        if not isinstance(x, int) or isinstance(x, bool):
            raise InstanceMismatchError(f"{self.kind}: coordinates are integers")

    def enumerate_elements(self, bound=None):
        if bound is None:
            raise EnumerationBoundError("free-abelian needs a coordinate bound")
        if (2 * bound + 1) ** self.dim > ENUMERATION_CAP:
            raise EnumerationBoundError("bound too large to enumerate")
        return [tuple(v) for v in
                itertools.product(range(-bound, bound + 1), repeat=self.dim)]

    def random_element(self, rng, bound=5):
        return tuple(rng.randint(-bound, bound) for _ in range(self.dim))

    def spec_dict(self):
        return {"kind": self.kind, "dim": self.dim,
                "weights": _weights_json(self.weights)}

    def lattice_model(self):
        scaled, scale = _scaled_weights(self.weights)
        return LatticeModel(mod=0, weights_scaled=scaled, scale=scale)

    def lattice_coordinates(self, g):
        return g

    def payload_from_lattice(self, vec):
        return tuple(int(v) for v in vec)

    def banach_coordinates(self, g):
        return tuple(Fraction(a) for a in g)

    @property
    def banach_weights(self):
        return self.weights


class Cyclic(_VectorInstance):
    kind = "cyclic"
    is_finite = True

    def __init__(self, modulus: int, dim: int = 1, weights=None):
        if modulus < 2:
            raise SpecError("invalid-parameter", "modulus must be >= 2")
        if dim < 1:
            raise SpecError("invalid-parameter", "dim must be >= 1")
        self.modulus = modulus
        self.dim = dim
        self.weights = _parse_weights(weights, dim)

    def compose(self, g, h):
        m = self.modulus
        return tuple((a + b) % m for a, b in zip(g, h))

    def identity(self):
        return tuple(0 for _ in range(self.dim))

    def invert(self, g):
        m = self.modulus
        return tuple((-a) % m for a in g)

    def distance(self, g, h) -> Fraction:
        m = self.modulus
        total = Fraction(0)
        for w, a, b in zip(self.weights, g, h):
            delta = (a - b) % m
            total += w * min(delta, m - delta)
        return total

    def _validate_coord(self, x):
        if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < self.modulus:
            raise InstanceMismatchError(
                f"{self.kind}: residues lie in [0, {self.modulus})")

    def enumerate_elements(self, bound=None):
        if self.modulus ** self.dim > ENUMERATION_CAP:
            raise EnumerationBoundError("cyclic instance too large to enumerate")
        return [tuple(v) for v in
                itertools.product(range(self.modulus), repeat=self.dim)]

    def random_element(self, rng, bound=5):
        return tuple(rng.randrange(self.modulus) for _ in range(self.dim))

    def spec_dict(self):
        return {"kind": self.kind, "modulus": self.modulus, "dim": self.dim,
                "weights": _weights_json(self.weights)}

    def lattice_model(self):
        scaled, scale = _scaled_weights(self.weights)
        return LatticeModel(mod=self.modulus, weights_scaled=scaled, scale=scale)

    def lattice_coordinates(self, g):
        return g

    def payload_from_lattice(self, vec):
        return tuple(int(v) % self.modulus for v in vec)


class GraphSpace(_VectorInstance):
    """(Z/2)^E: the XOR group of edge sets, every element 2-torsion."""

    kind = "graph-space"
    is_finite = True

    def __init__(self, edges: int, weights=None):
        if edges < 1:
            raise SpecError("invalid-parameter", "edges must be >= 1")
        self.edges = edges
        self.dim = edges
        self.weights = _parse_weights(weights, edges)

    def compose(self, g, h):
        return tuple(a ^ b for a, b in zip(g, h))

    def identity(self):
        return tuple(0 for _ in range(self.edges))

    def invert(self, g):
        return g

    def distance(self, g, h) -> Fraction:
        return sum((w for w, a, b in zip(self.weights, g, h) if a != b),
                   start=Fraction(0))

    def _validate_coord(self, x):
        if isinstance(x, bool) or x not in (0, 1):
            raise InstanceMismatchError(f"{self.kind}: bits are 0 or 1")

    def element_to_json(self, g):
        return "".join(str(b) for b in g)

    def element_from_json(self, obj):
        if isinstance(obj, str):
            if len(obj) != self.edges or any(ch not in "01" for ch in obj):
                raise InstanceMismatchError(
                    f"{self.kind}: expected {self.edges} bits, got {obj!r}")
            return tuple(int(ch) for ch in obj)
        return super().element_from_json(obj)

    def enumerate_elements(self, bound=None):
        if 2 ** self.edges > ENUMERATION_CAP:
            raise EnumerationBoundError("graph space too large to enumerate")
        return [tuple(v) for v in itertools.product((0, 1), repeat=self.edges)]

    def random_element(self, rng, bound=5):
        return tuple(rng.randrange(2) for _ in range(self.edges))

    def spec_dict(self):
        return {"kind": self.kind, "edges": self.edges,
                "weights": _weights_json(self.weights)}

    def lattice_model(self):
        scaled, scale = _scaled_weights(self.weights)
        return LatticeModel(mod=2, weights_scaled=scaled, scale=scale)

    def lattice_coordinates(self, g):
        return g

    def payload_from_lattice(self, vec):
        return tuple(int(v) % 2 for v in vec)


class Torus(_VectorInstance):
    """Rational points of (R/Z)^d with the L1 sum of arc distances.

    Composition is exact rational arithmetic mod 1 so canonical forms and
    sign-vector enumeration stay stable; only the distance is reported as
    a float, with a declared tolerance.
    """

    kind = "torus"
    distance_exactness = FLOAT
    float_tolerance = 1e-12

    def __init__(self, dim: int, weights=None):
        if dim < 1:
            raise SpecError("invalid-parameter", "dim must be >= 1")
        self.dim = dim
        self.weights = _parse_weights(weights, dim)

    def compose(self, g, h):
        return tuple((a + b) % 1 for a, b in zip(g, h))

    def identity(self):
        return tuple(Fraction(0) for _ in range(self.dim))

    def invert(self, g):
        return tuple((-a) % 1 for a in g)

    def distance(self, g, h) -> float:
        total = Fraction(0)
        for w, a, b in zip(self.weights, g, h):
            delta = abs(a - b)
            total += w * min(delta, 1 - delta)
        return float(total)

    def _validate_coord(self, x):
        if not isinstance(x, Fraction) or not 0 <= x < 1:
            raise InstanceMismatchError(
                f"{self.kind}: coordinates are Fractions in [0, 1)")

    def element_to_json(self, g):
        return [frac_str(a) for a in g]

    def _coord_from_json(self, x):
        return frac(x)

    def enumerate_elements(self, bound=None):
        if bound is None:
            raise EnumerationBoundError("torus needs a grid denominator bound")
        if bound ** self.dim > ENUMERATION_CAP:
            raise EnumerationBoundError("bound too large to enumerate")
        grid = [Fraction(k, bound) for k in range(bound)]
        return [tuple(v) for v in itertools.product(grid, repeat=self.dim)]

    def random_element(self, rng, bound=5):
        den = max(2, min(bound * 4, 24))
        return tuple(Fraction(rng.randrange(den), den) for _ in range(self.dim))

    def spec_dict(self):
        return {"kind": self.kind, "dim": self.dim,
                "weights": _weights_json(self.weights)}


class FreeGroupInstance(GroupInstance):
    """Free group of finite rank; payloads are reduced words.

    The bi-invariant word metric is search-based, so distances are served
    by the wordnorm module rather than by this class.
    """

    kind = "free-group"
    is_abelian = False

    def __init__(self, rank: int):
        if rank < 1 or rank > 26:
            raise SpecError("invalid-parameter", "rank must be in 1..26")
        self.rank = rank

    def compose(self, g, h):
        return wordnorm.concat(g, h)

    def identity(self):
        return ()

    def invert(self, g):
        return wordnorm.inverse_word(g)

    def distance(self, g, h):
        raise UnsupportedOperationError(
            "free-group distance is the bi-invariant word metric; "
            "use grouprob.wordnorm (biinv_norm) for certified bounds")

    def power(self, g, k):
        if abs(k) * len(g) > WORD_LETTER_BUDGET:
            raise PowerError(
                f"word power would exceed {WORD_LETTER_BUDGET} letters")
        return wordnorm.word_power(g, k)

    def validate(self, payload):
        if not isinstance(payload, tuple):
            raise InstanceMismatchError("free-group: expected a letter tuple")
        if wordnorm.free_reduce(payload) != payload:
            raise InstanceMismatchError(f"word {payload!r} is not reduced")
        if any(abs(letter) > self.rank for letter in payload):
            raise InstanceMismatchError(f"letters outside rank {self.rank}")
        return payload

    def enumerate_elements(self, bound=None):
        if bound is None:
            raise EnumerationBoundError("free-group needs a word-length bound")
        words = wordnorm.reduced_words_up_to(self.rank, bound)
        if len(words) > ENUMERATION_CAP:
            raise EnumerationBoundError("bound too large to enumerate")
        return words

    def random_element(self, rng, bound=5):
        length = rng.randint(0, bound)
        letters: List[int] = []
        options = [i for g in range(1, self.rank + 1) for i in (g, -g)]
        while len(letters) < length:
            letter = rng.choice(options)
            if letters and letters[-1] == -letter:
                continue
            letters.append(letter)
        return tuple(letters)

    def spec_dict(self):
        return {"kind": self.kind, "rank": self.rank}

    def element_to_json(self, g):
        return wordnorm.format_word(g)

    def element_from_json(self, obj):
        if not isinstance(obj, str):
            raise InstanceMismatchError("free-group elements are word strings")
        return wordnorm.parse_word(obj, rank=self.rank)


class PositiveNaturals(GroupInstance):
    """(N, +) = {1, 2, ...}: an identity-less abelian metric semigroup."""

    kind = "positive-naturals"
    has_identity = False
    has_inverses = False

    def compose(self, g, h):
        return g + h

    def distance(self, g, h) -> Fraction:
        return Fraction(abs(g - h))

    def power(self, g, k):
        if k < 1:
            raise PowerError("positive-naturals: powers need k >= 1")
        return g * k

    def validate(self, payload):
        if not isinstance(payload, int) or isinstance(payload, bool) or payload < 1:
            raise InstanceMismatchError("positive-naturals: elements are ints >= 1")
        return payload

    def enumerate_elements(self, bound=None):
        if bound is None:
            raise EnumerationBoundError("positive-naturals needs a bound")
        return list(range(1, bound + 1))

    def random_element(self, rng, bound=5):
        return rng.randint(1, max(1, bound))

    def spec_dict(self):
        return {"kind": self.kind}

    def banach_coordinates(self, g):
        return (Fraction(g),)

    @property
    def banach_weights(self):
        return (Fraction(1),)

    def lattice_coordinates(self, g):
        return (g,)

    def payload_from_lattice(self, vec):
        v = int(vec[0])
        if v < 1:
            raise InstanceMismatchError("positive-naturals: lattice value must be >= 1")
        return v


def _require_int(spec: dict, key: str) -> int:
    if key not in spec:
        raise SpecError("invalid-parameter", f"missing {key!r}")
    value = spec[key]
    if not isinstance(value, int) or isinstance(value, bool):
        raise SpecError("invalid-parameter", f"{key!r} must be an integer")
    return value


def instance_from_dict(spec: dict) -> GroupInstance:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise SpecError("invalid-parameter", "group spec must be an object with 'kind'")
    kind = spec["kind"]
    weights = spec.get("weights")
    if kind == "free-abelian":
        return FreeAbelian(_require_int(spec, "dim"), weights)
    if kind == "cyclic":
        dim = _require_int(spec, "dim") if "dim" in spec else 1
        return Cyclic(_require_int(spec, "modulus"), dim, weights)
    if kind == "torus":
        return Torus(_require_int(spec, "dim"), weights)
    if kind == "graph-space":
        return GraphSpace(_require_int(spec, "edges"), weights)
    if kind == "free-group":
        return FreeGroupInstance(_require_int(spec, "rank"))
    if kind == "positive-naturals":
        return PositiveNaturals()
    raise SpecError("unknown-kind", f"unknown group kind {kind!r}")


def parse_group_spec(text) -> GroupInstance:
    """Parse the JSON group schema (bytes or str) into an instance."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError("malformed-json", f"group spec is not valid JSON: {exc}")
    return instance_from_dict(spec)


def serialize_group_spec(instance: GroupInstance) -> str:
    return json.dumps(instance.spec_dict(), sort_keys=True)


def enumerate_elements(instance: GroupInstance, bound: Optional[int] = None):
    return instance.enumerate_elements(bound)


def list_kinds() -> List[dict]:
    """Supported families with their parameter names (the --list-kinds hook)."""
    return [
        {"kind": "free-abelian", "params": ["dim", "weights?"]},
        {"kind": "cyclic", "params": ["modulus", "dim?", "weights?"]},
        {"kind": "torus", "params": ["dim", "weights?"]},
        {"kind": "graph-space", "params": ["edges", "weights?"]},
        {"kind": "free-group", "params": ["rank"]},
        {"kind": "positive-naturals", "params": []},
    ]
