from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from hrtool.bits import mask_of
from hrtool.family import (SetFamily, generated_family, is_antichain, is_maximal, restrict,
                           shift, simplify, slice, star)
from hrtool.io import FamilyFormatError, format_text, load_family, parse_json, parse_text
from hrtool.matching import nu
from oracles import as_sets, brute_nu, brute_shadow, fam, families

M = mask_of


def test_restrict_examples():
    F = fam(5, [1, 2, 3], [1, 2, 4], [3, 4, 5])
    assert restrict(F, M([1, 2])) == fam(5, [3], [4])
    assert restrict(F, 0) == F
    assert len(restrict(fam(5, [1, 2, 3]), M([4]))) == 0


def test_star_examples():
    F = fam(5, [1, 2, 3], [1, 2, 4], [3, 4, 5])
    assert star(F, M([1, 2])) == fam(5, [1, 2, 3], [1, 2, 4])
    assert star(F, 0) == F
    assert star(fam(3, [1, 2, 3]), M([1, 2, 3])) == fam(3, [1, 2, 3])


def test_slice_examples():
    F = fam(5, [1, 2, 3], [1, 2, 4], [3, 4, 5])
    assert slice(F, M([1]), M([1, 5])) == fam(5, [2, 3], [2, 4])
    assert slice(F, 0, 0) == F
    assert slice(fam(4, [1, 2, 3]), M([3]), M([3, 4])) == fam(4, [1, 2])
    assert slice(F, M([1]), M([1, 5]), keep_X=True) == fam(5, [1, 2, 3], [1, 2, 4])
    with pytest.raises(ValueError):
        slice(F, M([2]), M([1]))


def test_generated_family_examples():
    assert generated_family(fam(4, [1, 2]), 3) == fam(4, [1, 2, 3], [1, 2, 4])
    assert len(generated_family(SetFamily(5, (0,)), 2)) == 10
    G = generated_family(fam(5, [1, 2], [3, 4]), 3)
    assert G == fam(5, [1, 2, 3], [1, 2, 4], [1, 2, 5], [1, 3, 4], [2, 3, 4], [3, 4, 5])


def test_antichain_examples():
    assert is_antichain(fam(4, [1, 2], [3, 4]))
    assert not is_antichain(fam(4, [1, 2], [1, 2, 3]))
    assert is_antichain(SetFamily(4, ()))


def test_simplify_examples():
    assert simplify(fam(3, [1, 2, 3]), 2, 1) == fam(3, [1, 2])
    assert simplify(fam(4, [1, 2], [3, 4]), 2, 2) == fam(4, [1, 2], [3, 4])
    with pytest.raises(ValueError):
        simplify(fam(6, [1, 2], [3, 4], [5, 6]), 1, 2)


def test_shift_examples():
    assert shift(fam(3, [2, 3]), 1, 2) == fam(3, [1, 3])
    assert shift(fam(3, [1, 3], [2, 3]), 1, 2) == fam(3, [1, 3], [2, 3])


@given(families(n_max=6, size_max=4, count_max=8), st.integers(1, 2), st.integers(1, 3))
def test_simplify_properties(F, t, s):
    if nu(F, t, cap=s)[0] > s:
        return
    T = simplify(F, t, s)
    assert is_antichain(T)
    assert nu(T, t)[0] <= s
    assert all(any(g & m == g for m in F.members) for g in T.members)   # each T inside some S
    assert all(any(g & m == g for g in T.members) for m in F.members)   # each S contains some T
    assert is_maximal(T, t, s)
    # maximality, checked against the slow nu for every proper subset
    sets = as_sets(T)
    for g in sets:
        others = [x for x in sets if x != g]
        for j in range(len(g)):
            for X in combinations(sorted(g), j):
                assert brute_nu(others + [frozenset(X)], t) > s
    assert simplify(T, t, s) == T


@given(families(n_max=7, size_max=3, count_max=6), st.integers(1, 7), st.integers(1, 7))
def test_restrict_star_sizes(F, a, b):
    X = M({a, b} & set(range(1, F.n + 1)))
    assert len(restrict(F, X)) == len(star(F, X))


@given(families(n_max=7, size_max=4, count_max=6), st.integers(1, 7), st.integers(1, 7))
def test_restrict_composes(F, a, b):
    if a == b or max(a, b) > F.n:
        return
    X, Y = M([a]), M([b])
    assert restrict(restrict(F, X), Y) == restrict(F, X | Y)


@given(families(n_max=6, size_max=3, count_max=6), st.integers(3, 4))
def test_generated_family_matches_oracle(F, k):
    if F.max_size > k or k > F.n:
        return
    G = generated_family(F, k)
    assert set(as_sets(G)) == brute_shadow(as_sets(F), F.n, k)
    sub = F.with_members(F.members[: len(F) // 2])
    assert set(generated_family(sub, k).members) <= set(G.members)


@given(families(n_max=8, size_max=4, count_max=8, uniform=True), st.integers(1, 8), st.integers(1, 8))
def test_shift_preserves_size(F, i, j):
    if i == j or max(i, j) > F.n:
        return
    assert len(shift(F, i, j)) == len(F)


def test_parse_text_and_errors(tmp_path):
    F = parse_text("# family\nn=5\n1 2 3\n\n2 4  # trailing\n")
    assert F == fam(5, [1, 2, 3], [2, 4])
    assert parse_text(format_text(F)) == F
    with pytest.raises(FamilyFormatError, match=":3:"):
        parse_text("n=4\n1 2\n2 1\n")
    with pytest.raises(FamilyFormatError, match=":2:.*outside"):
        parse_text("n=3\n1 4\n")
    with pytest.raises(FamilyFormatError, match="duplicate"):
        parse_text("n=3\n1 2\n1 2\n")
    with pytest.raises(FamilyFormatError, match="header"):
        parse_text("1 2\n")
    assert parse_json('{"n": 4, "sets": [[1, 2], [3]]}') == fam(4, [1, 2], [3])
    with pytest.raises(FamilyFormatError):
        parse_json('{"n": 4, "sets": [[1, 9]]}')
    p = tmp_path / "f.json"
    p.write_text('{"n": 3, "sets": [[1, 2]]}')
    assert load_family(p) == fam(3, [1, 2])


def test_family_is_canonical():
    assert fam(4, [3, 4], [1, 2]) == fam(4, [1, 2], [3, 4], [1, 2])
    with pytest.raises(ValueError):
        SetFamily(3, (M([4]),))
