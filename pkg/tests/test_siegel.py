from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from eostrata.dieudonne import dim, eta, final_filtration, minimal_block
from eostrata.siegel import (
    REPORT_SCHEMA, ProfileError, SlopeProfile, apply_word, check_words, classification_report,
    classify, enumerate_profiles, f_nilpotent, is_siegel_perm, make_profile,
    minimal_module, minimal_omega, psi, psi_oracle, ss_contained, word_value,
)
from eostrata.strata_index import enumerate_gamma
from eostrata.symmetric_group import identity


def test_psi_examples():
    assert psi(5, 1, 2) == identity(10)
    assert list(psi(5, 1, 3).images[:5]) == [1, 2, 3, 6, 7]
    for q in range(5, 11):
        w = psi(q, q - 1, q)
        assert [w(i) for i in range(1, 5)] == [q + 1, q + 2, q + 3, q + 4]


@pytest.mark.parametrize("q", range(2, 13))
def test_psi_matches_oracle(q):
    for g in enumerate_gamma(q):
        w = psi(q, g.u, g.v)
        assert w == psi_oracle(q, g.u, g.v), g
        assert is_siegel_perm(w)


@pytest.mark.parametrize("q", range(2, 13))
def test_ss_contained_criterion(q):
    for g in enumerate_gamma(q):
        w = psi(q, g.u, g.v)
        assert ss_contained(w) == (g.u == 1 and g.v < q // 2 + 2), g
        if g.u == 1:
            assert f_nilpotent(w)
        if g.u > 1 and g.v == q:
            assert not f_nilpotent(w)


def test_ss_contained_examples():
    assert ss_contained(psi(6, 1, 4))
    assert not ss_contained(psi(6, 1, 5))
    assert f_nilpotent(identity(8))


def test_word_values():
    assert word_value("", 2, 1) == 3
    assert word_value("F", 2, 1) == 2
    with pytest.raises(ValueError):
        word_value("X", 2, 1)


@given(st.integers(0, 5), st.integers(0, 5), st.text(alphabet="FV", max_size=12))
def test_word_value_is_subspace_dimension(m, n, word):
    if m + n == 0:
        return
    block = minimal_block(m, n)
    img = apply_word(block, word)
    assert dim(img) == word_value(word, m, n)
    # the image is the span of the last basis vectors
    k = dim(img)
    assert img == ((1 << (m + n)) - 1) ^ ((1 << (m + n - k)) - 1)


def test_profile_validation():
    p = make_profile([1, 2], 3)
    assert p.blocks() == [(2, 1), (1, 2)]
    assert minimal_module(p).dim == 6
    with pytest.raises(ProfileError):
        SlopeProfile((1, 1, 1, 1))
    with pytest.raises(ProfileError):
        SlopeProfile((2, 2))
    with pytest.raises(ProfileError):
        make_profile([1, 2], 4)


@pytest.mark.parametrize("q", range(2, 9))
def test_profiles_and_minimal_omegas(q):
    profiles = enumerate_profiles(q)
    assert len({p.n_list for p in profiles}) == len(profiles)
    for p in profiles:
        assert p.q == q
        r = len(p.n_list)
        assert all(gcd(p.n_list[l], p.n_list[r - 1 - l]) == 1 for l in range(r))
        w = minimal_omega(p)
        assert is_siegel_perm(w)
        M = minimal_module(p)
        e = eta(M, final_filtration(M))
        assert all(e[j] + q == e[2 * q - j] + j for j in range(2 * q + 1))
        # an etale or multiplicative block forces F to be non-nilpotent
        has_01 = any({p.n_list[l], p.n_list[r - 1 - l]} == {0, 1} for l in range(r))
        if has_01:
            assert not f_nilpotent(w)


def test_word_cross_check_runs():
    p = make_profile([1, 2])
    M = minimal_module(p)
    assert check_words(p, M, final_filtration(M)) >= 1
    assert is_siegel_perm(minimal_omega([1, 2]))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 10).flatmap(lambda q: st.sampled_from(enumerate_profiles(q, 4))))
def test_word_cross_check_property(p):
    M = minimal_module(p)
    check_words(p, M, final_filtration(M, "reversed"))


def test_classification_q5():
    rows = {(r["u"], r["v"]): r["verdict"] for r in classification_report(5)}
    by = lambda verdict: {k for k, v in rows.items() if v == verdict}  # noqa: E731
    assert by("Contained") == {(1, 2), (1, 3)}
    assert {(2, 5), (3, 5), (4, 5)} <= by("Disjoint")
    assert (2, 3) in by("Intersects")
    assert classify(5, 2, 3).provenance


def test_classification_q4():
    rows = {(r["u"], r["v"]): r["verdict"] for r in classification_report(4)}
    meets = {k for k, v in rows.items() if v in ("Contained", "Intersects")}
    assert meets == {(1, 2), (1, 3), (1, 4), (2, 3)}


@pytest.mark.parametrize("q", range(2, 11))
def test_classification_consistent(q):
    jsonschema = pytest.importorskip("jsonschema")
    rows = classification_report(q)
    jsonschema.validate({"q": q, "strata": rows}, REPORT_SCHEMA)
    assert len(rows) == q * (q - 1) // 2
    for r in rows:
        if r["verdict"] == "Contained":
            assert r["u"] == 1
        if r["verdict"] != "Unknown":
            assert r["provenance"]
