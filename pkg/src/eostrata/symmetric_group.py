"""
Permutations of ``{1, ..., n}`` in one-line notation, viewed as elements of the
Coxeter group of type A_{n-1}.

Composition is right-to-left: ``compose(p, r)(x) == p(r(x))``.  Cycle products
such as ``(2,3)(1,2)`` are read the same way, so the rightmost cycle acts first.

>>> p = parse("(2,3)(1,2)", 4)
>>> p
Permutation([3, 1, 2, 4])
>>> length(p)
2
>>> bruhat_leq(identity(4), p)
True
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Iterator, Sequence

__all__ = [
    "Permutation", "identity", "compose", "inverse", "length", "inversions",
    "bruhat_leq", "bruhat_leq_chain", "longest_element", "longest_element_block2",
    "simple_reflection", "transposition", "cycle", "parse", "all_permutations",
]


@dataclass(frozen=True)
class Permutation:
    """A bijection of ``{1..n}`` stored by its images ``(p(1), ..., p(n))``."""

    images: tuple[int, ...]

    def __init__(self, images: Iterable[int]):
        images = tuple(int(x) for x in images)
        n = len(images)
        if n < 1:
            raise ValueError("degree must be at least 1")
        if sorted(images) != list(range(1, n + 1)):
            raise ValueError(f"not a permutation of 1..{n}: {list(images)}")
        object.__setattr__(self, "images", images)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __len__(self) -> int:
        return len(self.images)

    def __iter__(self) -> Iterator[int]:
        return iter(self.images)

    def __repr__(self) -> str:
        return f"Permutation({list(self.images)})"

    def __str__(self) -> str:
        return "[" + ",".join(map(str, self.images)) + "]"

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each starting at its smallest element."""
        seen = set()
        out = []
        for start in range(1, self.degree + 1):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            x = self(start)
            while x != start:
                cyc.append(x)
                seen.add(x)
                x = self(x)
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def cycle_string(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + ",".join(map(str, c)) + ")" for c in cyc)


def identity(n: int) -> Permutation:
    return Permutation(range(1, n + 1))


def _check_degree(p: Permutation, r: Permutation) -> None:
    if p.degree != r.degree:
        raise ValueError(f"degree mismatch: {p.degree} != {r.degree}")


def compose(p: Permutation, r: Permutation) -> Permutation:
    """Return ``p o r``, i.e. ``x -> p(r(x))``."""
    _check_degree(p, r)
    pi = p.images
    return Permutation(pi[y - 1] for y in r.images)


def inverse(p: Permutation) -> Permutation:
    inv = [0] * p.degree
    for i, y in enumerate(p.images, start=1):
        inv[y - 1] = i
    return Permutation(inv)


def inversions(p: Permutation) -> list[tuple[int, int]]:
    """Pairs ``(i, j)`` with ``i < j`` and ``p(i) > p(j)``."""
    im = p.images
    n = len(im)
    return [(i + 1, j + 1) for i in range(n) for j in range(i + 1, n) if im[i] > im[j]]


def length(p: Permutation) -> int:
    """Coxeter length, computed as the number of inversions."""
    im = p.images
    n = len(im)
    return sum(1 for i in range(n) for j in range(i + 1, n) if im[i] > im[j])


def bruhat_leq(p: Permutation, r: Permutation) -> bool:
    """
    Bruhat comparison by the sorted-prefix (tableau) criterion.

    ``p <= r`` iff for every ``k`` the increasingly sorted prefix
    ``p(1..k)`` is entrywise bounded by the sorted prefix ``r(1..k)``.
    """
    _check_degree(p, r)
    pre_p: list[int] = []
    pre_r: list[int] = []
    for a, b in zip(p.images, r.images):
        _insort(pre_p, a)
        _insort(pre_r, b)
        for x, y in zip(pre_p, pre_r):
            if x > y:
                return False
    return True


def _insort(seq: list[int], x: int) -> None:
    lo, hi = 0, len(seq)
    while lo < hi:
        mid = (lo + hi) // 2
        if seq[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    seq.insert(lo, x)


def bruhat_leq_chain(p: Permutation, r: Permutation) -> bool:
    """
    Bruhat comparison straight from the definition: search for a chain
    ``p = v_0, v_1, ..., v_m = r`` where each ``v_{i-1}^{-1} v_i`` is a
    reflection (a transposition) and lengths increase along the chain.

    Exponential; only meant as an oracle for small degrees.
    """
    _check_degree(p, r)
    target_len = length(r)
    if length(p) > target_len:
        return False
    n = p.degree
    seen = {p.images}
    queue = deque([p.images])
    while queue:
        v = queue.popleft()
        if v == r.images:
            return True
        lv = length(Permutation(v))
        for i in range(n):
            for j in range(i + 1, n):
                # right multiplication by the transposition (i+1, j+1)
                if v[i] > v[j]:
                    continue
                nxt = list(v)
                nxt[i], nxt[j] = nxt[j], nxt[i]
                t = tuple(nxt)
                if t in seen:
                    continue
                lt = length(Permutation(t))
                if lv < lt <= target_len:
                    seen.add(t)
                    queue.append(t)
    return False


def longest_element(n: int) -> Permutation:
    if n < 1:
        raise ValueError("degree must be at least 1")
    return Permutation(range(n, 0, -1))


def longest_element_block2(q: int) -> Permutation:
    """Longest element of the parabolic subgroup S_{1,2} x S_{3..q}: ``[2,1,q,q-1,...,3]``."""
    if q < 3:
        raise ValueError("q must be at least 3")
    return Permutation([2, 1] + list(range(q, 2, -1)))


def transposition(n: int, i: int, j: int) -> Permutation:
    im = list(range(1, n + 1))
    im[i - 1], im[j - 1] = im[j - 1], im[i - 1]
    return Permutation(im)


def simple_reflection(n: int, i: int) -> Permutation:
    """``s_i = (i, i+1)`` for ``1 <= i <= n-1``."""
    if not 1 <= i <= n - 1:
        raise ValueError(f"s_{i} is not a simple reflection of S_{n}")
    return transposition(n, i, i + 1)


def cycle(n: int, *elements: int) -> Permutation:
    """The cycle ``(e_1, e_2, ..., e_k)`` sending ``e_i`` to ``e_{i+1}``."""
    im = list(range(1, n + 1))
    for a, b in zip(elements, elements[1:] + elements[:1]):
        im[a - 1] = b
    return Permutation(im)


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse(text: str, n: int | None = None) -> Permutation:
    """
    Parse one-line form ``[3,1,4,2]`` or a cycle product ``(2,3)(1,2)``.

    Cycle products need the degree ``n`` unless it can be read off the
    largest entry.
    """
    text = text.strip()
    if text.startswith("["):
        if not text.endswith("]"):
            raise ValueError(f"unbalanced one-line form: {text!r}")
        body = text[1:-1].strip()
        p = Permutation(int(x) for x in body.split(",")) if body else None
        if p is None:
            raise ValueError("empty permutation")
        if n is not None and p.degree != n:
            raise ValueError(f"expected degree {n}, got {p.degree}")
        return p
    groups = _CYCLE_RE.findall(text)
    if _CYCLE_RE.sub("", text).strip():
        raise ValueError(f"cannot parse permutation: {text!r}")
    cycles = [tuple(int(x) for x in g.split(",")) if g.strip() else () for g in groups]
    largest = max((max(c) for c in cycles if c), default=1)
    n = largest if n is None else n
    if largest > n:
        raise ValueError(f"entry {largest} exceeds degree {n}")
    result = identity(n)
    for c in cycles:
        if len(c) > 1:
            result = compose(result, cycle(n, *c))
    return result


def all_permutations(n: int) -> Iterator[Permutation]:
    for im in permutations(range(1, n + 1)):
        yield Permutation(im)


def from_zero_based(seq: Sequence[int]) -> Permutation:
    return Permutation(x + 1 for x in seq)
