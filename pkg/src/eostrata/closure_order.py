"""
The closure order on Ekedahl-Oort strata of signature ``(q-2, 2)``.

``w <= w'`` in the closure order iff some ``h`` in the parabolic subgroup
``W_J = S_{1,2} x S_{3..q}`` has ``h . w = h w c h^{-1} c`` below ``w'`` in
Bruhat order, where ``c`` is the longest element of ``W_J``.

The search runs the compiled kernel in :mod:`eostrata._kernels` over cosets
of ``W_J``; the pure-Python :func:`closure_leq_reference` is kept as an oracle.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable, Iterable

import numpy as np

from . import _kernels as K
from .strata_index import GammaUV, enumerate_gamma
from .symmetric_group import (
    Permutation, bruhat_leq, compose, identity, inverse, length,
    longest_element_block2, simple_reflection,
)

log = logging.getLogger(__name__)

__all__ = [
    "ClosureWitness", "CoverRelation", "TheoremRelation", "in_parabolic",
    "dot_action", "closure_leq", "closure_leq_reference", "closure_relation",
    "closure_poset", "theorem_relations", "tau_primary", "tau_secondary",
    "verify_conjecture", "single_transposition_scan", "parabolic_elements",
    "CONJECTURE_SCHEMA", "poset_to_dot", "expected_nonbruhat_count",
    "single_transposition_pairs", "ConjectureReport", "STRATEGIES",
]

STRATEGIES = ("exhaustive", "pruned")


@dataclass(frozen=True)
class ClosureWitness:
    h: Permutation
    source: GammaUV
    target: GammaUV

    def check(self) -> bool:
        x = dot_action(self.h, self.source.permutation())
        return bruhat_leq(x, self.target.permutation())


@dataclass(frozen=True)
class CoverRelation:
    lower: GammaUV
    upper: GammaUV
    kind: str  # "Bruhat" or "NonBruhat"
    witness: Permutation | None = None


@dataclass(frozen=True)
class TheoremRelation:
    """A relation ``lower <= upper`` together with the element that realizes it
    on inverses: ``witness . lower^{-1} <= upper^{-1}``."""

    lower: GammaUV
    upper: GammaUV
    witness: Permutation
    family: str  # "primary" or "secondary"
    j: int
    i: int = 0

    def direct_witness(self) -> Permutation:
        """The same relation written without inverses: conjugate by ``c``."""
        c = longest_element_block2(self.lower.q)
        return compose(compose(c, self.witness), c)


def in_parabolic(h: Permutation) -> bool:
    return h.degree >= 2 and {h(1), h(2)} == {1, 2}


def dot_action(h: Permutation, w: Permutation, q: int | None = None) -> Permutation:
    """``h w c h^{-1} c``; raises ``ValueError`` unless ``h`` lies in ``W_J``."""
    q = w.degree if q is None else q
    if h.degree != q or w.degree != q:
        raise ValueError("degree mismatch")
    if not in_parabolic(h):
        raise ValueError(f"{h} does not stabilize {{1,2}}")
    c = longest_element_block2(q)
    return compose(compose(compose(compose(h, w), c), inverse(h)), c)


def parabolic_elements(q: int) -> Iterable[Permutation]:
    for head in ((1, 2), (2, 1)):
        for tail in permutations(range(3, q + 1)):
            yield Permutation(head + tail)


def closure_leq_reference(w1: GammaUV, w2: GammaUV) -> Permutation | None:
    """Plain enumeration of ``W_J``; returns the first witness or ``None``."""
    x, y = w1.permutation(), w2.permutation()
    for h in parabolic_elements(w1.q):
        if bruhat_leq(dot_action(h, x), y):
            return h
    return None


# ---------------------------------------------------------------- kernel glue

def _arr(p: Permutation) -> np.ndarray:
    return np.array(p.images, dtype=np.int64) - 1


def _chunks(q: int) -> tuple[np.ndarray, np.ndarray]:
    blocks = max(q - 2, 1)
    a = np.repeat(np.array([0, 1], dtype=np.int64), blocks)
    c = np.tile(np.arange(blocks, dtype=np.int64), 2)
    return a, c


def _set_threads(threads: int | None) -> int:
    import numba

    cap = numba.config.NUMBA_NUM_THREADS
    n = cap if threads is None else max(1, min(int(threads), cap))
    numba.set_num_threads(n)
    return n


class _Targets:
    def __init__(self, gammas: list[GammaUV]):
        self.gammas = gammas
        self.R = np.stack([K.rank_table(_arr(g.permutation())) for g in gammas])
        self.lengths = np.array([g.length for g in gammas], dtype=np.int64)


def _search(w: GammaUV, targets: _Targets, open_: np.ndarray, exhaustive: bool,
            batch: int, above: list[set[int]] | None = None) -> dict[int, Permutation]:
    """Witnesses for every open target reachable from ``w``.

    ``above[t]``, when given, lists targets known to lie above ``t``; once
    ``t`` is reached those are closed without searching."""
    q = w.q
    warr = _arr(w.permutation())
    carr = _arr(longest_element_block2(q))
    ca, cc = _chunks(q)
    open_ = open_.copy()
    out: dict[int, Permutation] = {}
    for start in range(0, len(ca), batch):
        if not open_.any():
            break
        found, wit = K.search_chunks(warr, carr, ca[start:start + batch],
                                     cc[start:start + batch], targets.R,
                                     targets.lengths, open_, exhaustive)
        for b in range(found.shape[0]):
            for t in np.nonzero(found[b])[0]:
                t = int(t)
                if t not in out:
                    out[t] = Permutation(wit[b, t] + 1)
        if not exhaustive:
            for t in out:
                open_[t] = False
                if above is not None:
                    for k in above[t]:
                        open_[k] = False
    return out


def closure_leq(w1: GammaUV, w2: GammaUV, strategy: str = "pruned",
                threads: int | None = None) -> tuple[bool, ClosureWitness | None]:
    if w1.q != w2.q:
        raise ValueError("different q")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if bruhat_leq(w1.permutation(), w2.permutation()):
        return True, ClosureWitness(identity(w1.q), w1, w2)
    if w1.q < 3:
        h = closure_leq_reference(w1, w2)
        return (h is not None, ClosureWitness(h, w1, w2) if h else None)
    n = _set_threads(threads)
    targets = _Targets([w2])
    res = _search(w1, targets, np.ones(1, dtype=np.bool_), strategy == "exhaustive", n)
    if 0 in res:
        return True, ClosureWitness(res[0], w1, w2)
    return False, None


def closure_relation(q: int, strategy: str = "pruned", threads: int | None = None,
                     progress: Callable[[str], None] | None = None,
                     resume: dict | None = None,
                     checkpoint: Callable[[dict], None] | None = None
                     ) -> tuple[list[GammaUV], dict[tuple[int, int], Permutation | None]]:
    """
    The full relation ``<=`` on all strata of ``W(q-2,2)``.

    Returns the strata (sorted by ``(length, u, v)``) and a map from index pairs
    ``(i, j)`` with ``gammas[i] <= gammas[j]``, ``i != j`` to a witness ``h``.
    Under the pruned strategy a pair may map to ``None`` when it was inferred
    by transitivity instead of found directly.

    ``resume``/``checkpoint`` allow long runs to be continued: ``checkpoint``
    receives a JSON-friendly dict after each source stratum.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if q < 2:
        raise ValueError("q must be at least 2")
    gammas = enumerate_gamma(q)
    N = len(gammas)
    rel: dict[tuple[int, int], Permutation | None] = {}
    done: set[int] = set()
    if resume:
        if resume.get("q") != q or resume.get("strategy") != strategy:
            raise ValueError("checkpoint does not match this run")
        for i, j, h in resume["pairs"]:
            rel[(i, j)] = Permutation(h) if h else None
        done = set(resume["done"])
    if q < 3:
        for i, a in enumerate(gammas):
            for j, b in enumerate(gammas):
                if i != j:
                    h = closure_leq_reference(a, b)
                    if h is not None:
                        rel[(i, j)] = h
        return gammas, rel

    n = _set_threads(threads)
    targets = _Targets(gammas)
    exhaustive = strategy == "exhaustive"
    ident = identity(q)
    perms = [g.permutation() for g in gammas]
    # sources from the top down, so relations out of longer strata are known
    for i in sorted(range(N), key=lambda k: gammas[k].sort_key(), reverse=True):
        if i in done:
            continue
        src = gammas[i]
        open_ = np.zeros(N, dtype=np.bool_)
        for j in range(N):
            if j == i:
                continue
            if exhaustive:
                open_[j] = True
            elif bruhat_leq(perms[i], perms[j]):
                rel[(i, j)] = ident
            elif gammas[j].length > src.length:
                open_[j] = True
        if not exhaustive:
            _close_open(i, open_, rel, N)
        up = None if exhaustive else _above(rel, N)
        hits = _search(src, targets, open_, exhaustive, n, up)
        for j, h in hits.items():
            rel[(i, j)] = h
            if not exhaustive:
                # everything above j is above i as well
                for k in range(N):
                    if (j, k) in rel and (i, k) not in rel:
                        rel[(i, k)] = None
        done.add(i)
        if progress:
            progress(f"q={q} source {src.label}: {len(done)}/{N}")
        if checkpoint:
            checkpoint({"q": q, "strategy": strategy, "done": sorted(done),
                        "pairs": [[a, b, list(h.images) if h else None]
                                  for (a, b), h in sorted(rel.items())]})
    return gammas, rel


def _above(rel: dict, N: int) -> list[set[int]]:
    up: list[set[int]] = [set() for _ in range(N)]
    for a, b in rel:
        up[a].add(b)
    return up


def _close_open(i: int, open_: np.ndarray, rel: dict, N: int) -> None:
    """Drop targets already implied by a known ``i <= k <= j`` chain."""
    for k in range(N):
        if (i, k) in rel:
            for j in range(N):
                if open_[j] and (k, j) in rel:
                    open_[j] = False
                    rel[(i, j)] = None


def _reduce(N: int, pairs: set[tuple[int, int]]) -> set[tuple[int, int]]:
    above: dict[int, set[int]] = {i: set() for i in range(N)}
    for a, b in pairs:
        above[a].add(b)
    covers = set()
    for a, b in pairs:
        if not any(b in above[m] for m in above[a] if m != b):
            covers.add((a, b))
    return covers


def closure_poset(q: int, strategy: str = "pruned", threads: int | None = None,
                  progress: Callable[[str], None] | None = None,
                  **kw) -> list[CoverRelation]:
    """Cover relations of the closure order, ordered by ``(lower, upper)`` keys."""
    gammas, rel = closure_relation(q, strategy, threads, progress, **kw)
    covers = _reduce(len(gammas), set(rel))
    perms = [g.permutation() for g in gammas]
    out = []
    for a, b in sorted(covers, key=lambda ab: (gammas[ab[0]].sort_key(), gammas[ab[1]].sort_key())):
        if bruhat_leq(perms[a], perms[b]):
            out.append(CoverRelation(gammas[a], gammas[b], "Bruhat", identity(q)))
        else:
            h = rel[(a, b)]
            if h is None:  # cannot happen for a cover, but be safe
                _, cw = closure_leq(gammas[a], gammas[b], strategy, threads)
                h = cw.h if cw else None
            out.append(CoverRelation(gammas[a], gammas[b], "NonBruhat", h))
    return out


# ------------------------------------------------------- theorem relations

def _word(q: int, indices: Iterable[int]) -> Permutation:
    h = identity(q)
    for k in indices:
        h = compose(h, simple_reflection(q, k))
    return h


def theorem_relations(q: int) -> list[TheoremRelation]:
    """All relations given by the primary and secondary families."""
    out: list[TheoremRelation] = []
    if q < 5:
        return out
    G = lambda u, v: GammaUV(q, u, v)  # noqa: E731
    for j in range(3, q):
        if 2 * j < q:
            out.append(TheoremRelation(G(j + 1, q + 1 - j), G(j, q + 3 - j),
                                       simple_reflection(q, j), "primary", j))
        if 2 * j > q + 2:
            out.append(TheoremRelation(G(q - j, j + 1), G(q - j + 2, j),
                                       simple_reflection(q, j), "primary", j))
    for j in range(4, q):
        if 2 * j < q:
            for i in range(1, j - 2):
                h = _word(q, [*range(j, j - i - 1, -1), *(q - (j - m) for m in range(1, i + 1))])
                out.append(TheoremRelation(G(j + 1, q + 1 - j + i), G(j, q + 3 - j + i),
                                           h, "secondary", j, i))
        if 2 * j > q + 4:
            for i in range(1, q):
                if not 2 * i < 2 * j - q - 2:
                    break
                h = _word(q, [*range(j, j - i - 1, -1), *(q + 1 - (j - m) for m in range(1, i + 1))])
                out.append(TheoremRelation(G(q - j, j + 1 - i), G(q + 2 - j, j - i),
                                           h, "secondary", j, i))
    return sorted(out, key=lambda r: (r.lower.sort_key(), r.upper.sort_key()))


def tau_primary(q: int, j: int) -> Permutation:
    """Closed form of ``s_j . gamma^{-1}`` for the primary relations."""
    im = []
    if 3 <= j and 2 * j < q:
        for k in range(1, q + 1):
            if k == 1:
                im.append(j)
            elif k == 2:
                im.append(q + 1 - j)
            elif k <= j + 1:
                im.append(k - 2)
            elif k <= q + 1 - j:
                im.append(k - 1)
            elif k == q + 2 - j:
                im.append(q + 3 - j)
            elif k == q + 3 - j:
                im.append(q + 2 - j)
            else:
                im.append(k)
    elif 2 * j > q + 2 and j <= q - 1:
        for k in range(1, q + 1):
            if k == 1:
                im.append(q - j)
            elif k == 2:
                im.append(j)
            elif k <= q + 1 - j:
                im.append(k - 2)
            elif k == q + 2 - j:
                im.append(q + 2 - j)
            elif k == q + 3 - j:
                im.append(q + 1 - j)
            elif k <= j:
                im.append(k - 1)
            else:
                im.append(k)
    else:
        raise ValueError(f"j={j} outside the primary ranges for q={q}")
    return Permutation(im)


def tau_secondary(q: int, i: int, j: int) -> Permutation:
    """Closed form of ``h_{i,j} . gamma^{-1}`` for the secondary relations."""
    im = []
    if 4 <= j and 2 * j < q and 1 <= i <= j - 3:
        for k in range(1, q + 1):
            if k == 1:
                im.append(j)
            elif k == 2:
                im.append(q + 1 - j)
            elif k <= j + 1:
                im.append(k - 2)
            elif k <= q + 1 - j:
                im.append(k - 1)
            elif k == q + 2 - j:
                im.append(q + 3 - j + i)
            elif k <= q + 3 - j + i:
                im.append(k - 1)
            else:
                im.append(k)
    elif 2 * j > q + 4 and j <= q - 1 and 1 <= i and 2 * i < 2 * j - q - 2:
        for k in range(1, q + 1):
            if k == 1:
                im.append(q - j)
            elif k == 2:
                im.append(j - i)
            elif k <= q + 1 - j:
                im.append(k - 2)
            elif k == q + 2 - j:
                im.append(q + 2 - j)
            elif k == q + 3 - j:
                im.append(q + 1 - j)
            elif k <= j - i:
                im.append(k - 1)
            else:
                im.append(k)
    else:
        raise ValueError(f"(i,j)=({i},{j}) outside the secondary ranges for q={q}")
    return Permutation(im)


def expected_nonbruhat_count(q: int) -> int:
    return max(0, math.ceil(q / 2) - 2) ** 2 if q >= 5 else 0


# ------------------------------------------------------------- conjecture

def _generated_order(gammas: list[GammaUV], gens: set[tuple[int, int]]) -> set[tuple[int, int]]:
    N = len(gammas)
    succ: dict[int, set[int]] = {i: set() for i in range(N)}
    for a, b in gens:
        succ[a].add(b)
    closure = set()
    for s in range(N):
        stack, seen = [s], set()
        while stack:
            x = stack.pop()
            for y in succ[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        closure.update((s, t) for t in seen if t != s)
    return closure


@dataclass
class ConjectureReport:
    q: int
    holds: bool
    covers: list[CoverRelation]
    extra_covers: list[tuple[GammaUV, GammaUV]] = field(default_factory=list)
    missing_covers: list[tuple[GammaUV, GammaUV]] = field(default_factory=list)

    def to_json(self) -> dict:
        lab = lambda g: [g.u, g.v]  # noqa: E731
        return {
            "q": self.q,
            "holds": self.holds,
            "non_bruhat_covers": [
                {"lower": lab(c.lower), "upper": lab(c.upper),
                 "witness": list(c.witness.images) if c.witness else None}
                for c in self.covers if c.kind == "NonBruhat"
            ],
            "extra_covers": [[lab(a), lab(b)] for a, b in self.extra_covers],
            "missing_covers": [[lab(a), lab(b)] for a, b in self.missing_covers],
        }


def verify_conjecture(q: int, threads: int | None = None, strategy: str = "pruned",
                      progress: Callable[[str], None] | None = None, **kw) -> ConjectureReport:
    """Compare the searched order with the one generated by Bruhat covers and
    the theorem relations."""
    gammas, rel = closure_relation(q, strategy, threads, progress, **kw)
    index = {g: k for k, g in enumerate(gammas)}
    perms = [g.permutation() for g in gammas]
    N = len(gammas)
    found = set(rel)
    gens = {(a, b) for a in range(N) for b in range(N)
            if a != b and bruhat_leq(perms[a], perms[b])}
    gens |= {(index[r.lower], index[r.upper]) for r in theorem_relations(q)}
    predicted = _generated_order(gammas, gens)
    c_found = _reduce(N, found)
    c_pred = _reduce(N, predicted)
    key = lambda ab: (gammas[ab[0]].sort_key(), gammas[ab[1]].sort_key())  # noqa: E731
    extra = [(gammas[a], gammas[b]) for a, b in sorted(c_found - c_pred, key=key)]
    missing = [(gammas[a], gammas[b]) for a, b in sorted(c_pred - c_found, key=key)]
    covers = []
    for a, b in sorted(c_found, key=key):
        kind = "Bruhat" if bruhat_leq(perms[a], perms[b]) else "NonBruhat"
        covers.append(CoverRelation(gammas[a], gammas[b], kind,
                                    identity(q) if kind == "Bruhat" else rel[(a, b)]))
    return ConjectureReport(q, found == predicted, covers, extra, missing)


CONJECTURE_SCHEMA = {
    "type": "object",
    "required": ["q", "holds", "non_bruhat_covers"],
    "properties": {
        "q": {"type": "integer", "minimum": 2},
        "holds": {"type": "boolean"},
        "non_bruhat_covers": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["lower", "upper", "witness"],
                "properties": {
                    "lower": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
                    "upper": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
                    "witness": {"type": ["array", "null"], "items": {"type": "integer"}},
                },
            },
        },
        "extra_covers": {"type": "array"},
        "missing_covers": {"type": "array"},
    },
}


# ------------------------------------------------------------ single scan

def single_transposition_scan(q_max: int, q_min: int = 3
                              ) -> dict[int, set[tuple[GammaUV, GammaUV]]]:
    """
    For each ``q`` in ``q_min..q_max``: pairs ``(w1, w2)`` that are not Bruhat
    related but have ``s_k . w1 <= w2`` for a simple reflection ``s_k`` of
    ``W_J``.  Only the minimal such pairs are kept, i.e. those not already
    explained by Bruhat order composed with another pair from the scan.
    """
    if q_max < 3:
        raise ValueError("q_max must be at least 3")
    out: dict[int, set[tuple[GammaUV, GammaUV]]] = {}
    for q in range(max(3, q_min), q_max + 1):
        out[q] = _scan_one(q)
    return out


def single_transposition_pairs(q: int) -> set[tuple[int, int]]:
    """Index pairs (into ``enumerate_gamma(q)``) found by the raw scan."""
    gammas = enumerate_gamma(q)
    N = len(gammas)
    targets = _Targets(gammas)
    carr = _arr(longest_element_block2(q))
    refl = np.array([k for k in range(q - 1) if k != 1], dtype=np.int64)
    perms = [g.permutation() for g in gammas]
    pairs = set()
    for i in range(N):
        open_ = np.array([j != i and not bruhat_leq(perms[i], perms[j]) for j in range(N)])
        hit = K.scan_reflections(_arr(perms[i]), carr, refl, targets.R, targets.lengths, open_)
        for j in np.nonzero(hit.any(axis=0))[0]:
            pairs.add((i, int(j)))
    return pairs


def _scan_one(q: int) -> set[tuple[GammaUV, GammaUV]]:
    gammas = enumerate_gamma(q)
    N = len(gammas)
    perms = [g.permutation() for g in gammas]
    raw = single_transposition_pairs(q)
    bru = {(a, b) for a in range(N) for b in range(N)
           if a != b and bruhat_leq(perms[a], perms[b])}
    order = _generated_order(gammas, bru | raw)
    minimal = _reduce(N, order) & raw
    return {(gammas[a], gammas[b]) for a, b in minimal}


# ------------------------------------------------------------------- DOT

def poset_to_dot(q: int, covers: list[CoverRelation]) -> str:
    """Hasse diagram: nodes ``u_v`` labelled ``(u,v)``, ranked by length.
    Arrows point from the larger stratum to the smaller one."""
    lines = [f'digraph closure_q{q} {{', "  rankdir=TB;", "  node [shape=plaintext];"]
    by_len: dict[int, list[GammaUV]] = {}
    for g in enumerate_gamma(q):
        by_len.setdefault(g.length, []).append(g)
    for ell in sorted(by_len, reverse=True):
        nodes = " ".join(f'{g.u}_{g.v} [label="{g.label}"];' for g in by_len[ell])
        lines.append(f"  {{ rank=same; {nodes} }}  // length {ell}")
    for c in covers:
        a = f"{c.upper.u}_{c.upper.v}"
        b = f"{c.lower.u}_{c.lower.v}"
        if c.kind == "Bruhat":
            lines.append(f"  {a} -> {b};")
        else:
            lines.append(f'  {a} -> {b} [style=dashed, color="#e66100", constraint=false];')
    lines.append("}")
    return "\n".join(lines) + "\n"
