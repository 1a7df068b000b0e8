"""Extended naturals [0..∞]: Python ints plus ``math.inf`` as the absorbing top."""

from __future__ import annotations

import math
from typing import Union

INF = math.inf
ExtNat = Union[int, float]  # float only ever holds INF


def add(a: ExtNat, b: ExtNat) -> ExtNat:
    if a == INF or b == INF:
        return INF
    return a + b


def mul(a: ExtNat, b: ExtNat) -> ExtNat:
    # ∞ absorbs, including ∞ × 0
    if a == INF or b == INF:
        return INF
    return a * b


def fmt(n: ExtNat, ascii: bool = False) -> str:
    if n == INF:
        return "inf" if ascii else "∞"
    return str(int(n))


def parse(s: str) -> ExtNat:
    s = s.strip()
    if s in ("∞", "inf", "oo"):
        return INF
    v = int(s)
    if v < 0:
        raise ValueError(f"negative cardinality {s!r}")
    return v
