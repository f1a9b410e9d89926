"""
Products of Ekedahl-Oort strata landing in signature ``(q-2, 2)``.

Two product maps are covered:

* ``M(m,1) x M(n,1) -> M(m+n,2)`` on strata ``gamma_{a+1}``, ``gamma_{b+1}``;
* ``M(m,2) x M(n,0) -> M(m+n,2)``, the second factor being superspecial.

Each has a closed form and an oracle that builds the direct sum of standard
objects and reads the stratum off a final filtration.  The closed forms feed a
small fixpoint that certifies strata meeting the supersingular locus.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .dieudonne import (
    direct_sum, extract_gamma, standard_object_a2, standard_object_m1,
    superspecial_block,
)
from .strata_index import GammaUV, enumerate_gamma

__all__ = [
    "M1Stratum", "Thresholds", "UpDown", "is_ss_m1", "thresholds", "phi_1x1",
    "phi_1x1_oracle", "up_down", "phi_2x0", "phi_2x0_oracle",
    "certified_ss_intersections", "verify_certificate", "CERTIFICATE_SCHEMA",
]


@dataclass(frozen=True)
class M1Stratum:
    m: int
    a: int

    def __post_init__(self):
        if not 0 <= self.a <= self.m:
            raise ValueError(f"need 0 <= a <= m, got m={self.m}, a={self.a}")

    @property
    def supersingular(self) -> bool:
        return is_ss_m1(self.m, self.a)

    @property
    def label(self) -> str:
        return f"gamma_{self.a + 1}"


@dataclass(frozen=True)
class Thresholds:
    low: int   # min{a+1, m+1-a}
    high: int  # max{a, m+1-a}


def is_ss_m1(m: int, a: int) -> bool:
    if not 0 <= a <= m:
        raise ValueError(f"need 0 <= a <= m, got m={m}, a={a}")
    return 2 * a <= m


def thresholds(m: int, a: int) -> Thresholds:
    return Thresholds(min(a + 1, m + 1 - a), max(a, m + 1 - a))


def phi_1x1(m: int, a: int, n: int, b: int) -> GammaUV:
    """Stratum of ``M(m+n, 2)`` containing ``M(m,1)_{gamma_{a+1}} x M(n,1)_{gamma_{b+1}}``."""
    M1Stratum(m, a)
    M1Stratum(n, b)
    q = m + n + 2
    ss_m, ss_n = is_ss_m1(m, a), is_ss_m1(n, b)
    if ss_m and ss_n:
        if a < b:
            m, a, n, b = n, b, m, a
        if a == b:
            return GammaUV(q, 2 * b + 1, 2 * b + 2)
        return GammaUV(q, 2 * b + 2, a + b + 2)
    if not ss_m and not ss_n:
        if m - a > n - b:
            m, a, n, b = n, b, m, a
        return GammaUV(q, a + b + 1, 2 * a + n - m + 2)
    if ss_m:
        m, a, n, b = n, b, m, a
    return GammaUV(q, b + 2 + min(b, m - a), a + 2 + max(n - m + a, n - b))


def phi_1x1_oracle(m: int, a: int, n: int, b: int) -> GammaUV:
    L = direct_sum([standard_object_m1(m, a), standard_object_m1(n, b)])
    return GammaUV.from_rep(extract_gamma(L, 2))


@dataclass(frozen=True)
class UpDown:
    s_up: tuple[int, ...]
    s_down: tuple[int, ...]
    r2: int
    r3: int


def up_down(m: int, u: int, v: int) -> UpDown:
    """The multisets governing how far ``V^{-1}F`` moves along ``C_{1,*}``."""
    qm = m + 2
    s_up = tuple(sorted((u, v, qm - v + 2, qm - u + 1)))
    s_down = tuple(sorted((u - 1, v - 1, qm - v + 2, qm - u + 1)))
    return UpDown(s_up, s_down, s_up[1], s_down[-2])


def phi_2x0(m: int, u: int, v: int, n: int) -> GammaUV:
    """Stratum of ``M(m+n, 2)`` containing ``M(m,2)_{gamma_{u,v}} x M(n,0)``."""
    GammaUV(m + 2, u, v)
    if n < 0:
        raise ValueError("n must be non-negative")
    r2 = up_down(m, u, v).r2
    y = u if u <= r2 else u + n
    s = v if v <= r2 else v + n
    return GammaUV(m + n + 2, y, s)


def phi_2x0_oracle(m: int, u: int, v: int, n: int) -> GammaUV:
    blocks = [standard_object_a2(m + 2, u, v)] + [superspecial_block() for _ in range(n)]
    L = direct_sum(blocks)
    return GammaUV.from_rep(extract_gamma(L, 2))


# ------------------------------------------------------------ certificates

Step = dict[str, Any]


def _seeds(m: int) -> list[tuple[GammaUV, Step]]:
    q = m + 2
    out: list[tuple[GammaUV, Step]] = []
    if m == 0:
        out.append((GammaUV(2, 1, 2), {"map": "base", "params": {"m": 0}}))
    if m == 2:
        for u, v in ((1, 2), (1, 3), (1, 4), (2, 3)):
            out.append((GammaUV(4, u, v), {"map": "base", "params": {"m": 2, "u": u, "v": v}}))
    for m1 in range(m + 1):
        n1 = m - m1
        for a in range(m1 // 2 + 1):
            for b in range(n1 // 2 + 1):
                if a < b:
                    continue  # the swapped tuple covers it
                g = phi_1x1(m1, a, n1, b)
                assert g.q == q
                out.append((g, {"map": "1x1", "params": {"m": m1, "a": a, "n": n1, "b": b}}))
    return out


def certified_ss_intersections(q: int) -> dict[GammaUV, list[Step]]:
    """
    Strata of ``M(q-2, 2)`` known to meet the supersingular locus, each with
    the chain of product steps proving it.

    Per ``m = 0..q-2`` the certified strata of ``M(m,2)`` are the seeds (the
    two fully supersingular small cases and all products of two supersingular
    ``(.,1)`` strata) together with everything pushed up from smaller ``m`` by
    a superspecial factor.  The first certificate found is kept.
    """
    if q < 2:
        raise ValueError("q must be at least 2")
    cert: dict[int, dict[GammaUV, list[Step]]] = {}
    for m in range(q - 1):
        here: dict[GammaUV, list[Step]] = {}
        for g, step in _seeds(m):
            here.setdefault(g, [step])
        for m0 in range(m):
            n = m - m0
            for g0, chain in cert[m0].items():
                g = phi_2x0(m0, g0.u, g0.v, n)
                here.setdefault(g, chain + [{"map": "2x0", "params": {"m": m0, "u": g0.u, "v": g0.v, "n": n}}])
        cert[m] = here
    final = cert[q - 2]
    return {g: final[g] for g in enumerate_gamma(q) if g in final}


def verify_certificate(target: GammaUV, chain: list[Step]) -> bool:
    """Replay a certificate, re-checking every hypothesis along the way."""
    if not chain:
        return False
    first, rest = chain[0], chain[1:]
    p = first["params"]
    if first["map"] == "base":
        if p["m"] == 0:
            cur = GammaUV(2, 1, 2)
        elif p["m"] == 2 and (p["u"], p["v"]) in {(1, 2), (1, 3), (1, 4), (2, 3)}:
            cur = GammaUV(4, p["u"], p["v"])
        else:
            return False
    elif first["map"] == "1x1":
        if not (is_ss_m1(p["m"], p["a"]) and is_ss_m1(p["n"], p["b"])):
            return False
        cur = phi_1x1(p["m"], p["a"], p["n"], p["b"])
    else:
        return False
    for step in rest:
        p = step["params"]
        if step["map"] != "2x0" or (p["m"] + 2, p["u"], p["v"]) != (cur.q, cur.u, cur.v) or p["n"] < 1:
            return False
        cur = phi_2x0(p["m"], p["u"], p["v"], p["n"])
    return cur == target


CERTIFICATE_SCHEMA = {
    "type": "object",
    "required": ["q", "stratum", "certificate"],
    "properties": {
        "q": {"type": "integer", "minimum": 2},
        "stratum": {
            "type": "object",
            "required": ["u", "v"],
            "properties": {"u": {"type": "integer"}, "v": {"type": "integer"}},
        },
        "certificate": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["map", "params"],
                "properties": {
                    "map": {"enum": ["base", "1x1", "2x0"]},
                    "params": {"type": "object"},
                },
            },
        },
    },
}
