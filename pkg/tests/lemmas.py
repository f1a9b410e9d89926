"""
Subspace identities for the standard objects and their products, checked as
exact equalities of coordinate subspaces.  Each ``check_*`` returns a list of
failure descriptions; an empty list means every identity held.
"""

from __future__ import annotations

from eostrata.dieudonne import (
    apply_F, component_flag, direct_sum, final_filtration, preimage_V,
    row_span, standard_object_a2, standard_object_m1, superspecial_block,
)


def _vf(module, s):
    return preimage_V(module, apply_F(module, s))


def _fix(module, s, comp_mask):
    """Iterate ``V^{-1}F`` from ``s`` until it stabilises; return the part in ``comp_mask``."""
    seen = set()
    while s not in seen:
        seen.add(s)
        s = _vf(module, s)
    return s & comp_mask


def _iter(module, s, c):
    for _ in range(c):
        s = _vf(module, s)
    return s


def check_som_m1(m: int, a: int) -> list[str]:
    """Action of F and V^{-1} on the row spans of the (m,1) standard object.

    The V^{-1} row into component 2 is checked in its corrected form
    (``C_{2,m}`` for ``j <= a``, ``C_{2,m+1}`` otherwise)."""
    M = standard_object_m1(m, a)
    q = m + 1
    C = lambda i, j: row_span(q, i, j)  # noqa: E731
    M1, M2 = M.component_mask(1), M.component_mask(2)
    bad = []
    for j in range(q + 1):
        exp = C(2, j) if j <= a else C(2, j - 1)
        if apply_F(M, C(1, j)) != exp:
            bad.append(f"F(C1,{j})")
        exp = C(2, m) if j <= a else C(2, m + 1)
        if preimage_V(M, C(1, j)) & M2 != exp:
            bad.append(f"V^-1(C1,{j})")
        exp = C(1, 0) if j < m + 1 - a else C(1, 1)
        if apply_F(M, C(2, j)) != exp:
            bad.append(f"F(C2,{j})")
        exp = C(1, j + 1) if j < m + 1 - a else C(1, j)
        if preimage_V(M, C(2, j)) & M1 != exp:
            bad.append(f"V^-1(C2,{j})")
    return [f"m={m} a={a}: {b}" for b in bad]


def _s12(m: int, a: int) -> tuple[int, int]:
    return min(a + 1, m + 1 - a), max(a, m + 1 - a)


def check_vf_m1(m: int, a: int) -> list[str]:
    """One step of V^{-1}F on C_{1,j}, plus the moving up/down corollaries."""
    M = standard_object_m1(m, a)
    q = m + 1
    M1 = M.component_mask(1)
    s1, s2 = _s12(m, a)
    bad = []
    for j in range(1, q + 1):
        got = _vf(M, row_span(q, 1, j)) & M1
        if j < s1:
            exp = row_span(q, 1, j + 1)
        elif j > s2:
            exp = row_span(q, 1, j - 1)
        elif j in (s1, s2):
            exp = row_span(q, 1, j)
        else:
            continue
        if got != exp:
            bad.append(f"VF(C1,{j})")
    for c in range(q + 3):
        if _iter(M, 0, c) & M1 != row_span(q, 1, min(c, s1)):
            bad.append(f"up c={c}")
        if _iter(M, M.full, c) & M1 != row_span(q, 1, max(m + 1 - c, s2)):
            bad.append(f"down c={c}")
    return [f"m={m} a={a}: {b}" for b in bad]


def _product_1x1(m, a, n, b):
    L = direct_sum([standard_object_m1(m, a), standard_object_m1(n, b)])
    off = 2 * (m + 1)
    C = lambda i, j: row_span(m + 1, i, j)  # noqa: E731
    D = lambda i, j: row_span(n + 1, i, j, off)  # noqa: E731
    return L, C, D


def check_moving_1x1(m: int, a: int, n: int, b: int) -> list[str]:
    """Moving up and down in the sum of two (.,1) standard objects, and the
    claim that the results are members of the induced final flag."""
    L, C, D = _product_1x1(m, a, n, b)
    L1 = L.component_mask(1)
    E1 = set(component_flag(L, final_filtration(L), 1))
    s1, s2 = _s12(m, a)
    u1, u2 = _s12(n, b)
    bad = []
    for c in range(m + n + 4):
        exp = C(1, min(c, s1)) | D(1, min(c, u1))
        if _iter(L, 0, c) & L1 != exp:
            bad.append(f"up c={c}")
        if exp not in E1:
            bad.append(f"up c={c} not in final flag")
        exp = C(1, max(m + 1 - c, s2)) | D(1, max(n + 1 - c, u2))
        if _iter(L, L.full, c) & L1 != exp:
            bad.append(f"down c={c}")
        if exp not in E1:
            bad.append(f"down c={c} not in final flag")
    return [f"({m},{a})x({n},{b}): {x}" for x in bad]


def f2_hypothesis(m: int, a: int, n: int, b: int) -> bool:
    ss_m, ss_n = 2 * a <= m, 2 * b <= n
    return ((ss_m and ss_n and a > b) or (not ss_m and not ss_n and m - a < n - b)
            or (not ss_m and ss_n))


def check_f2_1x1(m: int, a: int, n: int, b: int) -> list[str]:
    """Under the lemma's hypotheses the induced flag on L_1 starts with
    ``C_{1,1} + D_{1,0}`` and ends with ``C_{1,m} + D_{1,n+1}``."""
    if not f2_hypothesis(m, a, n, b):
        return []
    L, C, D = _product_1x1(m, a, n, b)
    E1 = component_flag(L, final_filtration(L), 1)
    q = m + n + 2
    bad = []
    if E1[1] != C(1, 1) | D(1, 0):
        bad.append("E1,1")
    if E1[q - 1] != C(1, m) | D(1, n + 1):
        bad.append(f"E1,{q - 1}")
    return [f"({m},{a})x({n},{b}): {x}" for x in bad]


def check_som_a2(q: int, u: int, v: int) -> list[str]:
    """Action of F and V^{-1} on the row spans of the (q-2,2) standard object."""
    M = standard_object_a2(q, u, v)
    C = lambda i, j: row_span(q, i, j)  # noqa: E731
    M1, M2 = M.component_mask(1), M.component_mask(2)
    bad = []
    for j in range(q + 1):
        exp = C(2, j) if j < u else C(2, j - 1) if j < v else C(2, j - 2)
        if apply_F(M, C(1, j)) != exp:
            bad.append(f"F(C1,{j})")
        exp = C(2, q - 2) if j < u else C(2, q - 1) if j < v else C(2, q)
        if preimage_V(M, C(1, j)) & M2 != exp:
            bad.append(f"V^-1(C1,{j})")
        exp = C(1, 0) if j <= q - v else C(1, 1) if j <= q - u else C(1, 2)
        if apply_F(M, C(2, j)) != exp:
            bad.append(f"F(C2,{j})")
        exp = C(1, j + 2) if j <= q - v else C(1, j + 1) if j <= q - u else C(1, j)
        if preimage_V(M, C(2, j)) & M1 != exp:
            bad.append(f"V^-1(C2,{j})")
    return [f"({q},{u},{v}): {b}" for b in bad]


def r2_r3(q: int, u: int, v: int) -> tuple[int, int]:
    up = sorted((u, v, q - v + 2, q - u + 1))
    down = sorted((u - 1, v - 1, q - v + 2, q - u + 1))
    return up[1], down[-2]


def check_moving_a2(q: int, u: int, v: int) -> list[str]:
    """V^{-1}F moves C_{1,j} up below r_2, down above r_3, and fixes both."""
    M = standard_object_a2(q, u, v)
    M1 = M.component_mask(1)
    r2, r3 = r2_r3(q, u, v)
    C = lambda j: row_span(q, 1, j)  # noqa: E731
    bad = []
    for j in range(q + 1):
        got = _vf(M, C(j)) & M1
        if j < r2 and C(j + 1) & ~got:
            bad.append(f"up at {j}")
        if j > r3 and got & ~C(j - 1):
            bad.append(f"down at {j}")
        if j in (r2, r3) and got != C(j):
            bad.append(f"fixed at {j}")
    kf = M.kernel_F()
    if C(r2) & kf != C(r3) & kf:
        bad.append("kernel between r2 and r3")
    return [f"({q},{u},{v}): {b}" for b in bad]


def check_2x0(m: int, u: int, v: int, n: int) -> list[str]:
    """Fixpoints of V^{-1}F from 0 and from L in ``M + N^n``."""
    qm = m + 2
    L = direct_sum([standard_object_a2(qm, u, v)] + [superspecial_block()] * n)
    L1 = L.component_mask(1)
    r2, r3 = r2_r3(qm, u, v)
    g1 = 0
    for k in range(n):
        g1 |= 1 << (2 * qm + 2 * k)
    bad = []
    if _fix(L, 0, L1) != row_span(qm, 1, r2):
        bad.append("up fixpoint")
    if _fix(L, L.full, L1) != row_span(qm, 1, r3) | g1:
        bad.append("down fixpoint")
    return [f"({m},{u},{v})x{n}: {b}" for b in bad]


def all_failures(max_dim: int = 24) -> dict[str, list[str]]:
    """Run every check over all parameters whose total dimension is at most ``max_dim``."""
    out: dict[str, list[str]] = {k: [] for k in ("som_m1", "vf_m1", "moving_1x1", "f2_1x1",
                                                  "som_a2", "moving_a2", "2x0")}
    for m in range(max_dim // 2):
        for a in range(m + 1):
            out["som_m1"] += check_som_m1(m, a)
            out["vf_m1"] += check_vf_m1(m, a)
    for m in range(max_dim // 2 - 1):
        for n in range(max_dim // 2 - 1 - m):
            for a in range(m + 1):
                for b in range(n + 1):
                    out["moving_1x1"] += check_moving_1x1(m, a, n, b)
                    out["f2_1x1"] += check_f2_1x1(m, a, n, b)
    for q in range(2, max_dim // 2 + 1):
        for u in range(1, q):
            for v in range(u + 1, q + 1):
                out["som_a2"] += check_som_a2(q, u, v)
                out["moving_a2"] += check_moving_a2(q, u, v)
                for n in range(max_dim // 2 - q + 1):
                    out["2x0"] += check_2x0(q - 2, u, v, n)
    return out
