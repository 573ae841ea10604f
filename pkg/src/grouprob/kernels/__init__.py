"""Kernel dispatch: compiled extension when available, pure Python otherwise.

Set GROUPPROB_PURE=1 to force the pure backend (useful for benchmarking
and for verifying that both backends agree).  The compiled kernel assumes
64-bit arithmetic and a flat histogram, so inputs outside its comfort
zone are routed to the pure backend, which uses unbounded integers.
"""

from __future__ import annotations

import os
from typing import Dict, Sequence, Tuple

from . import _pure

MAX_EXACT_N = _pure.MAX_EXACT_N

_fast = None
if not os.environ.get("GROUPPROB_PURE"):
    try:
        from . import _fast  # type: ignore[no-redef]
    except ImportError:
        _fast = None

_HIST_CAP = 50_000_000
_COORD_CAP = 10 ** 6


def active_backend() -> str:
    return "cython" if _fast is not None else "python"


def _fits_compiled(coords, weights, mod) -> bool:
    if _fast is None:
        return False
    biggest = 0
    total = 0
    for row in coords:
        for c in row:
            a = abs(c)
            if a > biggest:
                biggest = a
            total += a
    if biggest > _COORD_CAP or any(w > _COORD_CAP for w in weights):
        return False
    if mod:
        bound = sum(weights) * (mod // 2)
    else:
        bound = max(weights, default=0) * total * len(weights)
    return bound <= _HIST_CAP


def rademacher_distance_counts(coords: Sequence[Sequence[int]],
                               weights: Sequence[int],
                               mod: int) -> Dict[int, int]:
    if _fits_compiled(coords, weights, mod):
        return _fast.rademacher_distance_counts(coords, weights, mod)
    return _pure.rademacher_distance_counts(coords, weights, mod)


def levy_pair_counts(coords: Sequence[Sequence[int]],
                     weights: Sequence[int],
                     mod: int,
                     masks: Sequence[int]) -> Dict[Tuple[int, int], int]:
    if _fits_compiled(coords, weights, mod):
        return _fast.levy_pair_counts(coords, weights, mod, masks)
    return _pure.levy_pair_counts(coords, weights, mod, masks)
