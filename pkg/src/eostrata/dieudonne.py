"""
Monomial mod-p Dieudonne modules at the level of supports.

Every basis vector is sent by ``F`` and ``V`` to another basis vector or to
zero, so subspaces spanned by basis vectors are closed under image, preimage
and orthogonal complement.  Such a coordinate subspace is stored as an ``int``
bitmask over the basis indices; a chain is a tuple of masks ordered by size.
Frobenius twists play no role at this level and are not modelled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .strata_index import CosetRep, Signature
from .symmetric_group import Permutation

ZERO = -1

__all__ = [
    "ZERO", "MonomialModule", "standard_object_a2", "standard_object_m1",
    "superspecial_block", "minimal_block", "direct_sum", "apply_F", "preimage_V",
    "complement", "canonical_filtration", "final_filtration", "eta",
    "eta_component", "jumps", "extract_gamma", "extract_siegel", "span",
    "dim", "NotAChainError", "MODULE_SCHEMA", "is_stable_flag", "component_flag",
    "omega_from_jumps", "row_span", "a2_index", "chain_to_json", "auto_pairing_plan",
]


class NotAChainError(ValueError):
    pass


@dataclass(frozen=True)
class MonomialModule:
    """
    ``F[i]``/``V[i]`` give the image index of basis vector ``i`` or ``ZERO``.
    ``component[i]`` is 1 or 2 for the two eigenspaces of the quadratic
    action, 0 when there is none.  ``partner[i]`` is the index paired with
    ``i`` (or ``ZERO``); ``None`` means the module carries no pairing.
    """

    F: tuple[int, ...]
    V: tuple[int, ...]
    component: tuple[int, ...]
    partner: tuple[int, ...] | None = None
    labels: tuple[str, ...] = ()
    shape: tuple[int, int] | None = None  # (m, n) for a minimal block
    blocks: tuple[tuple[int, int], ...] = field(default=(), compare=False)

    def __post_init__(self):
        n = len(self.F)
        if len(self.V) != n or len(self.component) != n:
            raise ValueError("F, V and component must have equal length")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"e{i}" for i in range(n)))
        for name, op in (("F", self.F), ("V", self.V)):
            targets = [t for t in op if t != ZERO]
            if any(not 0 <= t < n for t in targets):
                raise ValueError(f"{name} has an out-of-range image")
            if len(set(targets)) != len(targets):
                raise ValueError(f"{name} is not injective on its support")
        if self.partner is not None:
            p = self.partner
            if len(p) != n:
                raise ValueError("partner has wrong length")
            for i, j in enumerate(p):
                if j == ZERO:
                    continue
                if j == i or not 0 <= j < n or p[j] != i:
                    raise ValueError(f"partner is not a fixed-point-free involution at {i}")
            if not self.pairing_compatible():
                raise ValueError("pairing is not compatible with F and V")

    @property
    def dim(self) -> int:
        return len(self.F)

    @property
    def full(self) -> int:
        return (1 << self.dim) - 1

    @property
    def fully_paired(self) -> bool:
        return self.partner is not None and ZERO not in self.partner

    def pairing_compatible(self) -> bool:
        """``<F a, b> = <a, V b>`` on all basis pairs."""
        p = self.partner
        if p is None:
            return True
        for a in range(self.dim):
            for b in range(self.dim):
                lhs = self.F[a] != ZERO and p[self.F[a]] == b
                rhs = self.V[b] != ZERO and p[a] == self.V[b]
                if lhs != rhs:
                    return False
        return True

    def kernel_F(self) -> int:
        return _mask(i for i, t in enumerate(self.F) if t == ZERO)

    def kernel_V(self) -> int:
        return _mask(i for i, t in enumerate(self.V) if t == ZERO)

    def component_mask(self, c: int) -> int:
        return _mask(i for i, t in enumerate(self.component) if t == c)

    def is_polarized(self) -> bool:
        k = self.dim
        return self.fully_paired and 2 * dim(self.kernel_F()) == k == 2 * dim(self.kernel_V())

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "F": list(self.F),
            "V": list(self.V),
            "component": [c or None for c in self.component],
            "partner": list(self.partner) if self.partner is not None else [ZERO] * self.dim,
            "labels": list(self.labels),
        }


MODULE_SCHEMA = {
    "type": "object",
    "required": ["dim", "F", "V", "component", "partner"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "F": {"type": "array", "items": {"type": "integer", "minimum": -1}},
        "V": {"type": "array", "items": {"type": "integer", "minimum": -1}},
        "component": {"type": "array", "items": {"enum": [1, 2, None]}},
        "partner": {"type": "array", "items": {"type": "integer", "minimum": -1}},
        "labels": {"type": "array", "items": {"type": "string"}},
    },
}


def _mask(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def span(indices: Iterable[int]) -> int:
    return _mask(indices)


def dim(s: int) -> int:
    return bin(s).count("1")


def _bits(s: int) -> list[int]:
    out = []
    i = 0
    while s:
        if s & 1:
            out.append(i)
        s >>= 1
        i += 1
    return out


# --------------------------------------------------------------- builders

def _two_row(q: int, F: dict, V: dict, partner_col) -> MonomialModule:
    """Basis ``e_{i,j}`` (i in 1..2, j in 1..q) at index ``(i-1)*q + j-1``."""
    idx = lambda i, j: (i - 1) * q + (j - 1)  # noqa: E731
    n = 2 * q
    Fa = [ZERO] * n
    Va = [ZERO] * n
    for (i, j), t in F.items():
        if t is not None:
            Fa[idx(i, j)] = idx(*t)
    for (i, j), t in V.items():
        if t is not None:
            Va[idx(i, j)] = idx(*t)
    partner = [ZERO] * n
    for j in range(1, q + 1):
        k = partner_col(j)
        partner[idx(1, j)] = idx(2, k)
        partner[idx(2, k)] = idx(1, j)
    comp = tuple([1] * q + [2] * q)
    labels = tuple(f"e{i},{j}" for i in (1, 2) for j in range(1, q + 1))
    return MonomialModule(tuple(Fa), tuple(Va), comp, tuple(partner), labels)


def standard_object_a2(q: int, u: int, v: int) -> MonomialModule:
    """The standard object of the stratum ``gamma_{u,v}`` in signature ``(q-2, 2)``."""
    if not 1 <= u < v <= q:
        raise ValueError(f"need 1 <= u < v <= q, got ({q},{u},{v})")
    F: dict = {}
    V: dict = {}
    for j in range(1, q + 1):
        if j in (u, v):
            F[1, j] = None
        elif j < u:
            F[1, j] = (2, j)
        elif j < v:
            F[1, j] = (2, j - 1)
        else:
            F[1, j] = (2, j - 2)

        if j <= 2:
            V[1, j] = None
        elif j <= q - v + 2:
            V[1, j] = (2, j - 2)
        elif j <= q - u + 1:
            V[1, j] = (2, j - 1)
        else:
            V[1, j] = (2, j)

        F[2, j] = (1, 1) if j == q - v + 1 else (1, 2) if j == q - u + 1 else None
        V[2, j] = (1, u) if j == q - 1 else (1, v) if j == q else None
    return _two_row(q, F, V, lambda j: q + 1 - j)


def standard_object_m1(m: int, a: int) -> MonomialModule:
    """The standard object of the stratum ``gamma_{a+1}`` in signature ``(m, 1)``."""
    if m < 0 or not 0 <= a <= m:
        raise ValueError(f"need 0 <= a <= m, got m={m}, a={a}")
    q = m + 1
    F: dict = {}
    V: dict = {}
    for j in range(1, q + 1):
        F[1, j] = (2, j) if j <= a else None if j == a + 1 else (2, j - 1)
        V[1, j] = None if j == 1 else (2, j - 1) if j <= m + 1 - a else (2, j)
        F[2, j] = (1, 1) if j == m + 1 - a else None
        V[2, j] = (1, a + 1) if j == m + 1 else None
    return _two_row(q, F, V, lambda j: m + 2 - j)


def superspecial_block() -> MonomialModule:
    """``F(g1) = V(g1) = g2``, ``F(g2) = V(g2) = 0``."""
    return MonomialModule((1, ZERO), (1, ZERO), (1, 2), (1, 0), ("g1", "g2"))


def minimal_block(m: int, n: int) -> MonomialModule:
    """``M_{m,n}`` on ``e_0..e_{m+n-1}``: F shifts by n, V shifts by m."""
    if m < 0 or n < 0 or m + n < 1:
        raise ValueError("need m, n >= 0 with m + n >= 1")
    k = m + n
    F = tuple(i + n if i <= m - 1 else ZERO for i in range(k))
    V = tuple(i + m if i <= n - 1 else ZERO for i in range(k))
    return MonomialModule(F, V, (0,) * k, None, tuple(f"e{i}" for i in range(k)), (m, n))


def auto_pairing_plan(modules: Sequence[MonomialModule]) -> list[tuple[int, int]]:
    """Pair each already-paired module with itself and each minimal block with a
    dual ``M_{n,m}`` (or itself when ``m == n``)."""
    plan = []
    used = set()
    for i, mod in enumerate(modules):
        if i in used:
            continue
        if mod.partner is not None:
            plan.append((i, i))
            used.add(i)
            continue
        if mod.shape is None:
            raise ValueError(f"module {i} has neither a pairing nor a block shape")
        m, n = mod.shape
        if m == n:
            plan.append((i, i))
            used.add(i)
            continue
        for j in range(i + 1, len(modules)):
            if j not in used and modules[j].partner is None and modules[j].shape == (n, m):
                plan.append((i, j))
                used.update((i, j))
                break
        else:
            raise ValueError(f"no dual block for M_{{{m},{n}}}")
    return plan


def direct_sum(modules: Sequence[MonomialModule],
               pairing_plan: Sequence[tuple[int, int]] | None = None) -> MonomialModule:
    """
    Block-diagonal sum.  ``pairing_plan`` lists pairs of block indices: ``(i, i)``
    keeps block ``i``'s own pairing (or pairs a minimal block ``M_{m,m}`` with
    itself), ``(i, j)`` pairs dual minimal blocks by ``e_k <-> f_{m+n-1-k}``.
    Pass an empty plan for an unpaired sum.
    """
    if not modules:
        raise ValueError("empty direct sum")
    offsets = []
    off = 0
    for mod in modules:
        offsets.append(off)
        off += mod.dim
    shift = lambda t, o: t if t == ZERO else t + o  # noqa: E731
    F: list[int] = []
    V: list[int] = []
    comp: list[int] = []
    labels: list[str] = []
    for b, (mod, o) in enumerate(zip(modules, offsets)):
        F += [shift(t, o) for t in mod.F]
        V += [shift(t, o) for t in mod.V]
        comp += list(mod.component)
        labels += [f"{b}:{lab}" for lab in mod.labels]
    if pairing_plan is None:
        pairing_plan = auto_pairing_plan(modules)
    partner: list[int] | None = None
    if pairing_plan:
        partner = [ZERO] * off
        seen = set()
        for i, j in pairing_plan:
            if not (0 <= i < len(modules) and 0 <= j < len(modules)) or i in seen or j in seen:
                raise ValueError(f"bad pairing plan entry {(i, j)}")
            seen.update((i, j))
            A, B = modules[i], modules[j]
            if i == j and A.partner is not None:
                for k, p in enumerate(A.partner):
                    partner[offsets[i] + k] = shift(p, offsets[i])
                continue
            if A.shape is None or B.shape is None or A.shape != B.shape[::-1]:
                raise ValueError(f"blocks {i} and {j} are not dual minimal blocks")
            k_dim = A.dim
            for k in range(k_dim):
                partner[offsets[i] + k] = offsets[j] + k_dim - 1 - k
                partner[offsets[j] + k_dim - 1 - k] = offsets[i] + k
    return MonomialModule(tuple(F), tuple(V), tuple(comp),
                          tuple(partner) if partner is not None else None,
                          tuple(labels), None, tuple((o, m.dim) for o, m in zip(offsets, modules)))


# ------------------------------------------------------------- operations

def apply_F(module: MonomialModule, s: int) -> int:
    out = 0
    for i in _bits(s):
        t = module.F[i]
        if t != ZERO:
            out |= 1 << t
    return out


def preimage_V(module: MonomialModule, s: int) -> int:
    """``V^{-1}(s)``; always contains ``ker V``."""
    out = 0
    for i, t in enumerate(module.V):
        if t == ZERO or (s >> t) & 1:
            out |= 1 << i
    return out


def complement(module: MonomialModule, s: int) -> int:
    if not module.fully_paired:
        raise ValueError("complement needs a perfect pairing")
    out = 0
    for i, p in enumerate(module.partner):
        if not (s >> p) & 1:
            out |= 1 << i
    return out


def _operators(module: MonomialModule):
    ops = [lambda s: apply_F(module, s), lambda s: preimage_V(module, s)]
    if module.fully_paired:
        ops.append(lambda s: complement(module, s))
    return ops


def _close(module: MonomialModule, members: set[int]) -> set[int]:
    ops = _operators(module)
    out = set(members)
    todo = list(members)
    while todo:
        s = todo.pop()
        for op in ops:
            t = op(s)
            if t not in out:
                out.add(t)
                todo.append(t)
    return out


def _as_chain(members: Iterable[int]) -> tuple[int, ...] | None:
    chain = sorted(members, key=dim)
    for a, b in zip(chain, chain[1:]):
        if a & ~b or dim(a) == dim(b):
            return None
    return tuple(chain)


def canonical_filtration(module: MonomialModule) -> tuple[int, ...]:
    """Smallest set containing 0 and the whole space, closed under ``F``,
    ``V^{-1}`` and (if paired) complement; must be totally ordered."""
    chain = _as_chain(_close(module, {0, module.full}))
    if chain is None:
        raise NotAChainError("canonical filtration is not a chain")
    return chain


def final_filtration(module: MonomialModule, order: Sequence[int] | str = "forward") -> tuple[int, ...]:
    """
    A complete coordinate flag refining the canonical filtration.

    Gaps are filled one basis vector at a time in the given tie-break ``order``
    (``"forward"``, ``"reversed"`` or an explicit index list), re-closing under
    ``F``, ``V^{-1}`` and complement after each insertion and backtracking when
    the result stops being a chain.

    When ``F`` or ``V`` permutes basis vectors cyclically the stable members of
    a gap are not coordinate subspaces.  Such a gap is then filled without the
    stability requirement.  This cannot change ``eta``: every gap of the
    canonical filtration lies entirely inside ``ker F`` or meets it trivially,
    which is checked up front.
    """
    return _final(module, order)[0]


def _final(module: MonomialModule, order) -> tuple[tuple[int, ...], frozenset[int]]:
    if isinstance(order, str):
        if order == "forward":
            order = list(range(module.dim))
        elif order == "reversed":
            order = list(range(module.dim - 1, -1, -1))
        else:
            raise ValueError(f"unknown order {order!r}")
    order = list(order)
    if sorted(order) != list(range(module.dim)):
        raise ValueError("order must list every basis index once")
    start = _close(module, {0, module.full})
    canon = _as_chain(start)
    if canon is None:
        raise NotAChainError("canonical filtration is not a chain")
    kf = module.kernel_F()
    for a, b in zip(canon, canon[1:]):
        gap = b & ~a
        if gap & kf and gap & ~kf:
            raise NotAChainError("a canonical gap is only partly killed by F")
    budget = [_REFINE_BUDGET]
    result = _refine(module, start, frozenset(), order, budget)
    if result is None:
        raise NotAChainError("no refinement found")
    return result


_REFINE_BUDGET = 20000


def _refine(module, members: set[int], free: frozenset[int], order: list[int],
            budget: list[int]):
    chain = _as_chain(members | free)
    if chain is None:
        return None
    for a, b in zip(chain, chain[1:]):
        if dim(b) - dim(a) > 1:
            break
    else:
        return chain, free
    gap = b & ~a
    candidates = [x for x in order if (gap >> x) & 1]
    if budget[0] > 0:
        for x in candidates:
            budget[0] -= 1
            trial = _close(module, members | {a | (1 << x)})
            found = _refine(module, trial, free, order, budget)
            if found is not None:
                return found
            if budget[0] <= 0:
                break
    # no stable coordinate choice: fill this gap freely
    return _refine(module, members, free | {a | (1 << candidates[0])}, order, budget)


def is_stable_flag(module: MonomialModule, chain: Sequence[int]) -> bool:
    """Every operator maps every member onto a member."""
    members = set(chain)
    return all(op(w) in members for w in chain for op in _operators(module))


def eta(module: MonomialModule, chain: Sequence[int]) -> list[int]:
    """``eta(j) = dim(W_j & ker F)`` for ``j = 0..dim``."""
    if len(chain) != module.dim + 1 or any(dim(w) != j for j, w in enumerate(chain)):
        raise ValueError("eta needs a complete flag")
    kf = module.kernel_F()
    return [dim(w & kf) for w in chain]


def eta_component(module: MonomialModule, chain: Sequence[int], i: int) -> list[int]:
    """Same as :func:`eta` on the flag induced in component ``i``."""
    if len(chain) != module.dim + 1:
        raise ValueError("eta needs a complete flag")
    cm = module.component_mask(i)
    induced: list[int] = []
    for w in chain:
        c = w & cm
        if not induced or induced[-1] != c:
            induced.append(c)
    if len(induced) != dim(cm) + 1:
        raise ValueError("flag does not induce a complete flag on the component")
    kf = module.kernel_F()
    return [dim(c & kf) for c in induced]


def component_flag(module: MonomialModule, chain: Sequence[int], i: int) -> list[int]:
    """The flag ``C_{i,0} < C_{i,1} < ...`` induced on component ``i``."""
    cm = module.component_mask(i)
    out: list[int] = []
    for w in chain:
        c = w & cm
        if not out or out[-1] != c:
            out.append(c)
    return out


def jumps(values: Sequence[int]) -> list[int]:
    """Indices ``j >= 1`` with ``values[j] > values[j-1]``."""
    return [j for j in range(1, len(values)) if values[j] > values[j - 1]]


def extract_gamma(module: MonomialModule, b: int, chain: Sequence[int] | None = None) -> CosetRep:
    chain = final_filtration(module) if chain is None else chain
    e1 = eta_component(module, chain, 1)
    js = jumps(e1)
    q = len(e1) - 1
    if len(js) != b:
        raise ValueError(f"eta_1 jumps {len(js)} times, expected {b}")
    return CosetRep(Signature(q - b, b), tuple(js))


def extract_siegel(module: MonomialModule, chain: Sequence[int] | None = None) -> Permutation:
    """The element of ``S_{2q}`` read off from the jumps of ``eta``."""
    if module.dim % 2:
        raise ValueError("module dimension must be even")
    q = module.dim // 2
    chain = final_filtration(module) if chain is None else chain
    js = jumps(eta(module, chain))
    if len(js) != q:
        raise ValueError(f"eta jumps {len(js)} times, expected {q}")
    return omega_from_jumps(q, js)


def omega_from_jumps(q: int, js: Sequence[int]) -> Permutation:
    images = [0] * (2 * q)
    jset = set(js)
    for l, j in enumerate(sorted(js), start=1):
        images[j - 1] = l
    rest = [i for i in range(1, 2 * q + 1) if i not in jset]
    for m, i in enumerate(rest, start=1):
        images[i - 1] = m + q
    return Permutation(images)


def chain_to_json(chain: Sequence[int]) -> list[list[int]]:
    return [_bits(w) for w in chain]


def a2_index(q: int, i: int, j: int) -> int:
    """Basis index of ``e_{i,j}`` in a two-row module with ``q`` columns."""
    return (i - 1) * q + (j - 1)


def row_span(q: int, i: int, j: int, offset: int = 0) -> int:
    """``C_{i,j} = <e_{i,1}, ..., e_{i,j}>`` in a two-row module, shifted by ``offset``."""
    return span(offset + a2_index(q, i, l) for l in range(1, j + 1))
