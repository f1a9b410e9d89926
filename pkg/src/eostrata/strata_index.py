"""
Index sets W(a,b) of Ekedahl-Oort strata: minimal-length coset representatives
``gamma_u`` of ``W_J \\ S_{a+b}``, labelled by strictly increasing tuples
``u = (u_1 < ... < u_b)`` with ``gamma_u(u_i) = i``.

For signature ``(q-2, 2)`` the representatives are written ``gamma_{u,v}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from itertools import combinations
from math import comb

from .symmetric_group import Permutation, compose, cycle

__all__ = [
    "Signature", "CosetRep", "GammaUV", "enumerate_reps", "enumerate_gamma",
    "to_permutation", "coset_length", "bruhat_leq_reps", "count_by_dimension",
    "count_formula_b2", "gaussian_binomial", "stratum_record", "STRATUM_SCHEMA",
]


@dataclass(frozen=True)
class Signature:
    a: int
    b: int

    def __post_init__(self):
        if self.a < 0 or self.b < 0 or self.a + self.b < 1:
            raise ValueError(f"invalid signature ({self.a},{self.b})")

    @property
    def q(self) -> int:
        return self.a + self.b

    def normalized(self) -> "Signature":
        return self if self.a >= self.b else Signature(self.b, self.a)


@dataclass(frozen=True)
class CosetRep:
    signature: Signature
    u: tuple[int, ...]

    def __post_init__(self):
        sig = self.signature
        if len(self.u) != sig.b:
            raise ValueError(f"expected {sig.b} entries, got {self.u}")
        prev = 0
        for x in self.u:
            if not prev < x <= sig.q:
                raise ValueError(f"u must be strictly increasing in 1..{sig.q}: {self.u}")
            prev = x

    @property
    def q(self) -> int:
        return self.signature.q

    def permutation(self) -> Permutation:
        return to_permutation(self)

    @property
    def length(self) -> int:
        return coset_length(self)


@total_ordering
@dataclass(frozen=True)
class GammaUV:
    """``gamma_{u,v}`` in W(q-2,2); ordered by ``(length, u, v)``."""

    q: int
    u: int
    v: int

    def __post_init__(self):
        if self.q < 2 or not 1 <= self.u < self.v <= self.q:
            raise ValueError(f"need 1 <= u < v <= q, got q={self.q}, u={self.u}, v={self.v}")

    @property
    def length(self) -> int:
        return self.u + self.v - 3

    def sort_key(self) -> tuple[int, int, int]:
        return (self.length, self.u, self.v)

    def __lt__(self, other: "GammaUV") -> bool:
        if not isinstance(other, GammaUV):
            return NotImplemented
        return (self.q,) + self.sort_key() < (other.q,) + other.sort_key()

    def to_rep(self) -> CosetRep:
        return CosetRep(Signature(self.q - 2, 2), (self.u, self.v))

    @classmethod
    def from_rep(cls, rep: CosetRep) -> "GammaUV":
        if rep.signature.b != 2:
            raise ValueError("GammaUV needs b = 2")
        return cls(rep.q, rep.u[0], rep.u[1])

    def permutation(self) -> Permutation:
        """``(2,3,...,v)(1,2,...,u)``."""
        n = self.q
        return compose(cycle(n, *range(2, self.v + 1)), cycle(n, *range(1, self.u + 1)))

    @property
    def label(self) -> str:
        return f"({self.u},{self.v})"

    def __str__(self) -> str:
        return f"gamma_{{{self.u},{self.v}}}"


def enumerate_reps(signature: Signature) -> list[CosetRep]:
    """All ``C(a+b, b)`` representatives, lexicographic in ``u``."""
    return [CosetRep(signature, u) for u in combinations(range(1, signature.q + 1), signature.b)]


def enumerate_gamma(q: int) -> list[GammaUV]:
    """All ``gamma_{u,v}`` of W(q-2,2) sorted by ``(length, u, v)``."""
    return sorted((GammaUV(q, u, v) for u, v in combinations(range(1, q + 1), 2)),
                  key=GammaUV.sort_key)


def to_permutation(rep: CosetRep) -> Permutation:
    """``gamma_u(u_i) = i``; the complement is sent increasingly onto ``b+1..q``."""
    q, b = rep.q, rep.signature.b
    images = [0] * q
    chosen = set(rep.u)
    for i, x in enumerate(rep.u, start=1):
        images[x - 1] = i
    nxt = b + 1
    for z in range(1, q + 1):
        if z not in chosen:
            images[z - 1] = nxt
            nxt += 1
    return Permutation(images)


def coset_length(rep: CosetRep) -> int:
    return sum(x - i for i, x in enumerate(rep.u, start=1))


def bruhat_leq_reps(r1: CosetRep, r2: CosetRep) -> bool:
    if r1.signature != r2.signature:
        raise ValueError("signature mismatch")
    return all(x <= y for x, y in zip(r1.u, r2.u))


def count_by_dimension(signature: Signature, d: int) -> int:
    """Number of representatives of length ``d`` (by enumeration)."""
    if d < 0 or d > signature.a * signature.b:
        return 0
    return sum(1 for rep in enumerate_reps(signature) if coset_length(rep) == d)


def count_formula_b2(q: int, d: int) -> int:
    """Closed form of ``n_d(q-2, 2)``."""
    if d < 0 or d > 2 * (q - 2):
        return 0
    if d <= q - 2:
        return d // 2 + 1
    return max(0, d // 2 + 1 - (d - (q - 2)))


def gaussian_binomial(n: int, k: int) -> list[int]:
    """
    Coefficients of the Gaussian binomial ``[n choose k]_t`` as a polynomial in
    ``t``, via the product ``prod_{i<k} (1 - t^{n-i}) / (1 - t^{i+1})``.

    Numerator and denominator are expanded separately; the quotient is taken by
    exact long division.
    """
    if k < 0 or k > n:
        return [0]
    num = [1]
    den = [1]
    for i in range(k):
        num = _polymul(num, [1] + [0] * (n - i - 1) + [-1])
        den = _polymul(den, [1] + [0] * i + [-1])
    quot, rem = _polydiv(num, den)
    if any(rem):
        raise ArithmeticError("Gaussian binomial division left a remainder")
    return quot


def _polymul(p: list[int], r: list[int]) -> list[int]:
    out = [0] * (len(p) + len(r) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(r):
                out[i + j] += a * b
    return out


def _polydiv(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    num = list(num)
    while len(den) > 1 and den[-1] == 0:
        den = den[:-1]
    lead = den[-1]
    if len(num) < len(den):
        return [0], num
    quot = [0] * (len(num) - len(den) + 1)
    for i in range(len(quot) - 1, -1, -1):
        coef, rem = divmod(num[i + len(den) - 1], lead)
        if rem:
            raise ArithmeticError("non-integral quotient")
        quot[i] = coef
        for j, d in enumerate(den):
            num[i + j] -= coef * d
    return quot, num[: len(den) - 1]


def stratum_record(g: GammaUV) -> dict:
    return {"q": g.q, "u": g.u, "v": g.v, "dim": g.length}


STRATUM_SCHEMA = {
    "type": "object",
    "required": ["q", "u", "v", "dim"],
    "properties": {
        "q": {"type": "integer", "minimum": 2},
        "u": {"type": "integer", "minimum": 1},
        "v": {"type": "integer", "minimum": 2},
        "dim": {"type": "integer", "minimum": 0},
    },
}


def total_count(signature: Signature) -> int:
    return comb(signature.q, signature.b)
