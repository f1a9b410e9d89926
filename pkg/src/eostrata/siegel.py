"""
Forgetting the quadratic action: from ``gamma_{u,v}`` to the Siegel index set
``W_q`` inside ``S_{2q}``, and what that says about the supersingular locus.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import ceil, gcd
from typing import Iterable, Sequence

from .dieudonne import (
    MonomialModule, apply_F, direct_sum, eta, extract_siegel, final_filtration,
    jumps, minimal_block, omega_from_jumps, preimage_V, span, standard_object_a2,
)
from .product_maps import certified_ss_intersections
from .strata_index import GammaUV, enumerate_gamma
from .symmetric_group import Permutation

__all__ = [
    "psi", "psi_oracle", "is_siegel_perm", "ss_contained", "f_nilpotent",
    "word_value", "apply_word", "SlopeProfile", "ProfileError", "enumerate_profiles",
    "minimal_module", "minimal_omega", "check_words", "SSStatus", "classify",
    "classification_report", "ConflictError", "REPORT_SCHEMA",
]

VERDICTS = ("Contained", "Intersects", "Disjoint", "Unknown")


def _first_half(q: int, u: int, v: int) -> list[int]:
    if u == 1 and v == 2:
        return list(range(1, q + 1))
    out = []
    for i in range(1, q + 1):
        if u == 1:
            if i < q + 2 - v:
                w = i
            elif i == q + 2 - v:
                w = q + 1
            elif i < q:
                w = i - 1
            else:
                w = q + 2
        elif u == 2 and v == q:
            w = q + i if i <= 2 else i - 2
        elif u == 2:
            # the two middle tables differ only in where q+2 sits
            k = q + 2 - v if 1 < q + 1 - v <= v - 2 else q + 3 - v
            if i == 1:
                w = 1
            elif i == 2:
                w = q + 1
            elif i < k:
                w = i - 1
            elif i == k:
                w = q + 2
            else:
                w = i - 2
        elif u == q - 1:
            w = q + i if i <= 4 else i - 4
        elif v == q - 1:
            if i == 1:
                w = 1
            elif i <= 4:
                w = q + i - 1
            elif i < q + 3 - u:
                w = i - 3
            elif i == q + 3 - u:
                w = q + 4
            else:
                w = i - 4
        elif v == q:
            if i <= 2:
                w = q + i
            elif i == 3:
                w = i - 2
            elif i == 4:
                w = q + 3
            elif i < q + 3 - u:
                w = i - 3
            elif i == q + 3 - u:
                w = q + 4
            else:
                w = i - 4
        else:
            if i <= 2:
                w = i
            elif i <= 4:
                w = q + i - 2
            elif i < q + 3 - v:
                w = i - 2
            elif i == q + 3 - v:
                w = q + 3
            elif i < q + 3 - u:
                w = i - 3
            elif i == q + 3 - u:
                w = q + 4
            else:
                w = i - 4
        out.append(w)
    return out


def psi(q: int, u: int, v: int) -> Permutation:
    """Closed form of the Siegel permutation of ``gamma_{u,v}``."""
    GammaUV(q, u, v)
    half = _first_half(q, u, v)
    images = half + [0] * q
    for i in range(1, q + 1):
        images[2 * q - i] = 2 * q + 1 - half[i - 1]
    return Permutation(images)


def psi_oracle(q: int, u: int, v: int) -> Permutation:
    return extract_siegel(standard_object_a2(q, u, v))


def is_siegel_perm(w: Permutation) -> bool:
    n = w.degree
    if n % 2:
        return False
    q = n // 2
    if any(w(i) + w(n + 1 - i) != n + 1 for i in range(1, n + 1)):
        return False
    pos = [0] * (n + 1)
    for i in range(1, n + 1):
        pos[w(i)] = i
    return all(pos[k] < pos[k + 1] for k in range(1, q))


def ss_contained(w: Permutation) -> bool:
    """The stratum lies in the supersingular locus iff ``w`` fixes ``1..ceil(q/2)``."""
    q = w.degree // 2
    return all(w(i) == i for i in range(1, ceil(q / 2) + 1))


def f_nilpotent(w: Permutation) -> bool:
    return w(1) == 1


# ------------------------------------------------------------ minimal strata

def word_value(word: Sequence[str] | str, m: int, n: int) -> int:
    """
    Dimension of ``word(M_{m,n})`` for a word in ``F`` and ``V`` (standing for
    ``V^{-1}``).  The rightmost letter is applied first.
    """
    if m < 0 or n < 0:
        raise ValueError("m, n must be non-negative")
    val = m + n
    for letter in reversed(list(word)):
        if letter == "F":
            val = max(0, val - n)
        elif letter == "V":
            val = min(m + n, val + m)
        else:
            raise ValueError(f"unknown letter {letter!r}")
    return val


def apply_word(module: MonomialModule, word: Sequence[str] | str, start: int | None = None) -> int:
    s = module.full if start is None else start
    for letter in reversed(list(word)):
        s = apply_F(module, s) if letter == "F" else preimage_V(module, s)
    return s


class ProfileError(ValueError):
    pass


@dataclass(frozen=True)
class SlopeProfile:
    """``(n_1, ..., n_r)``; block ``l`` of the module is ``M_{n_{r+1-l}, n_l}``."""

    n_list: tuple[int, ...]

    def __post_init__(self):
        ns = self.n_list
        r = len(ns)
        if r == 0 or any(x < 0 for x in ns):
            raise ProfileError("profile must be a non-empty list of non-negative integers")
        for l in range(r):
            if gcd(ns[l], ns[r - 1 - l]) != 1:
                raise ProfileError(f"condition (ii) fails: gcd({ns[l]}, {ns[r - 1 - l]}) != 1")
        if all(ns[l] + ns[r - 1 - l] == 2 for l in range(r)):
            raise ProfileError("condition (iii) fails: every n_l + n_{r+1-l} equals 2 (supersingular)")

    @property
    def q(self) -> int:
        return sum(self.n_list)

    def blocks(self) -> list[tuple[int, int]]:
        r = len(self.n_list)
        return [(self.n_list[r - 1 - l], self.n_list[l]) for l in range(r)]

    def slopes(self) -> list[tuple[int, int]]:
        """Slopes as ``(numerator, denominator)`` per block."""
        return [(n, m + n) for m, n in self.blocks()]


def make_profile(n_list: Iterable[int], q: int | None = None) -> SlopeProfile:
    p = SlopeProfile(tuple(n_list))
    if q is not None and p.q != q:
        raise ProfileError(f"condition (i) fails: sum is {p.q}, not {q}")
    return p


def _pair_types(s: int) -> list[tuple[int, int]]:
    """Unordered coprime ``(x, y)``, ``x <= y``, ``x + y = s``."""
    return [(x, s - x) for x in range(0, s // 2 + 1) if gcd(x, s - x) == 1]


def enumerate_profiles(q: int, max_r: int | None = None) -> list[SlopeProfile]:
    """
    All admissible profiles for ``q`` up to isomorphism of the resulting module.

    A profile pairs ``n_l`` with ``n_{r+1-l}``; the module only depends on the
    multiset of these pairs plus, for odd ``r``, the middle entry (which must
    be 1).  One representative ``(x_1..x_k, [1], y_k..y_1)`` is returned per
    multiset.
    """
    types = [(x, y) for s in range(1, q + 1) for x, y in _pair_types(s)]
    out: list[SlopeProfile] = []

    def rec(start: int, remaining: int, chosen: list[tuple[int, int]]):
        if remaining == 0:
            emit(chosen, middle=False)
        if remaining == 1:
            emit(chosen, middle=True)
        for k in range(start, len(types)):
            x, y = types[k]
            if x + y <= remaining:
                chosen.append((x, y))
                rec(k, remaining - x - y, chosen)
                chosen.pop()

    def emit(chosen, middle):
        if not chosen and not middle:
            return
        ns = [x for x, _ in chosen] + ([1] if middle else []) + [y for _, y in reversed(chosen)]
        if max_r is not None and len(ns) > max_r:
            return
        try:
            out.append(SlopeProfile(tuple(ns)))
        except ProfileError:
            pass  # all pairs (1,1): supersingular

    rec(0, q, [])
    return out


def minimal_module(profile: SlopeProfile) -> MonomialModule:
    blocks = profile.blocks()
    r = len(blocks)
    plan = [(l, r - 1 - l) for l in range(r) if l <= r - 1 - l]
    return direct_sum([minimal_block(m, n) for m, n in blocks], plan)


def check_words(profile: SlopeProfile, module: MonomialModule, chain: Sequence[int],
                max_len: int | None = None) -> int:
    """
    Compare the chain against every word of length ``<= max_len`` (default
    ``4q``): the word's image must be the sum of the blockwise tail spans and
    ``eta`` there must equal ``sum(min(n_l, w(m_l, n_l)))``.

    Words reaching the same per-block value tuple give the same image, so the
    search runs over distinct tuples.  Returns the number of tuples checked.
    """
    q = profile.q
    max_len = 4 * q if max_len is None else max_len
    blocks = profile.blocks()
    e = eta(module, chain)
    members = set(chain)
    offsets = [o for o, _ in module.blocks]
    start = tuple(m + n for m, n in blocks)
    seen = {start}
    frontier = [start]
    for depth in range(max_len + 1):
        nxt = []
        for state in frontier:
            sub = 0
            for (m, n), o, val in zip(blocks, offsets, state):
                sub |= span(range(o + m + n - val, o + m + n))
            if sub not in members:
                raise AssertionError(f"word image {state} is not in the filtration")
            expected = sum(min(n, val) for (m, n), val in zip(blocks, state))
            if e[sum(state)] != expected:
                raise AssertionError(f"eta mismatch at {state}")
            if depth == max_len:
                continue
            f = tuple(max(0, val - n) for (m, n), val in zip(blocks, state))
            vv = tuple(min(m + n, val + m) for (m, n), val in zip(blocks, state))
            for t in (f, vv):
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
        if not frontier:
            break
    return len(seen)


@lru_cache(maxsize=None)
def _minimal_omega_cached(n_list: tuple[int, ...], cross_check: bool) -> Permutation:
    profile = SlopeProfile(n_list)
    module = minimal_module(profile)
    chain = final_filtration(module)
    if cross_check:
        check_words(profile, module, chain)
    return omega_from_jumps(profile.q, jumps(eta(module, chain)))


def minimal_omega(profile: SlopeProfile | Sequence[int], cross_check: bool = True) -> Permutation:
    """The Siegel permutation of the minimal stratum with this slope profile."""
    if not isinstance(profile, SlopeProfile):
        profile = SlopeProfile(tuple(profile))
    return _minimal_omega_cached(profile.n_list, cross_check)


@lru_cache(maxsize=None)
def minimal_omegas(q: int, max_r: int | None = None) -> dict[tuple[int, ...], tuple[int, ...]]:
    return {p.n_list: minimal_omega(p).images for p in enumerate_profiles(q, max_r)}


# ---------------------------------------------------------------- classify

class ConflictError(RuntimeError):
    pass


@dataclass
class SSStatus:
    verdict: str
    provenance: list[str] = field(default_factory=list)


def classify(q: int, u: int, v: int, certificates: dict | None = None,
             max_r: int | None = None) -> SSStatus:
    """How the stratum ``gamma_{u,v}`` meets the supersingular locus."""
    g = GammaUV(q, u, v)
    omega = psi(q, u, v)
    contained: list[str] = []
    disjoint: list[str] = []
    intersects: list[str] = []
    if ss_contained(omega):
        contained.append("contained: Siegel permutation fixes 1..ceil(q/2)")
    if not f_nilpotent(omega):
        disjoint.append("disjoint: F is not nilpotent (omega(1) != 1)")
    for n_list, images in minimal_omegas(q, max_r).items():
        if images == omega.images:
            disjoint.append(f"disjoint: equals minimal stratum of slope profile {list(n_list)}")
    if certificates is None:
        certificates = certified_ss_intersections(q)
    if g in certificates:
        steps = " -> ".join(s["map"] for s in certificates[g])
        intersects.append(f"intersects: product certificate ({steps})")
    if disjoint and (contained or intersects):
        raise ConflictError(f"conflicting verdicts for {g}: {contained + intersects + disjoint}")
    if contained:
        return SSStatus("Contained", contained + intersects)
    if disjoint:
        return SSStatus("Disjoint", disjoint)
    if intersects:
        return SSStatus("Intersects", intersects)
    return SSStatus("Unknown", [])


def classification_report(q: int, max_r: int | None = None) -> list[dict]:
    certs = certified_ss_intersections(q)
    rows = []
    for g in enumerate_gamma(q):
        st = classify(q, g.u, g.v, certs, max_r)
        rows.append({"u": g.u, "v": g.v, "dim": g.length, "verdict": st.verdict,
                     "provenance": st.provenance})
    return rows


REPORT_SCHEMA = {
    "type": "object",
    "required": ["q", "strata"],
    "properties": {
        "q": {"type": "integer", "minimum": 2},
        "strata": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["u", "v", "dim", "verdict", "provenance"],
                "properties": {
                    "u": {"type": "integer"},
                    "v": {"type": "integer"},
                    "dim": {"type": "integer"},
                    "verdict": {"enum": list(VERDICTS)},
                    "provenance": {"type": "array", "items": {"type": "string"}},
                },
            },
        },
    },
}
