import pytest
from hypothesis import given, strategies as st

from eqseq.syntax import (
    Atom,
    BoundVar,
    Eq,
    Forall,
    FunApp,
    Param,
    PathError,
    Sequent,
    is_identity,
    occurrences,
    replace_at,
    substitute,
    term_height,
)

a, b, c = Param("a"), Param("b"), Param("c")


def f(*args):
    return FunApp("f", tuple(args))


def test_substitute_equality():
    assert substitute(Eq(BoundVar("x"), b), "x", a) == Eq(a, b)


def test_substitute_all_occurrences():
    g = Atom("P", (BoundVar("x"), BoundVar("x")))
    assert substitute(g, "x", f(a)) == Atom("P", (f(a), f(a)))


def test_substitute_under_other_binder():
    g = Forall("y", Atom("P", (BoundVar("x"), BoundVar("y"))))
    assert substitute(g, "x", a) == Forall("y", Atom("P", (a, BoundVar("y"))))


def test_substitute_shadowed_binder_untouched():
    g = Forall("x", Atom("P", (BoundVar("x"),)))
    assert substitute(g, "x", a) == g


def test_substitute_rejects_bound_variables_in_replacement():
    with pytest.raises(Exception):
        substitute(Eq(BoundVar("x"), b), "x", BoundVar("y"))


def test_occurrences_nested():
    assert occurrences(Eq(a, f(a)), a) == [(0,), (1, 0)]
    assert occurrences(Eq(a, b), c) == []
    assert occurrences(Atom("P", (f(f(a)),)), f(a)) == [(0, 0)]


def test_replace_at_examples():
    assert replace_at(Eq(a, f(a)), {(1, 0)}, a, f(a)) == Eq(a, f(f(a)))
    assert replace_at(Eq(a, c), {(1,)}, c, b) == Eq(a, b)
    r = Param("r")
    assert replace_at(Atom("P", (r,)), {(0,)}, r, r) == Atom("P", (r,))


def test_replace_at_rejects_empty_and_overlapping():
    with pytest.raises(PathError):
        replace_at(Eq(a, b), set(), a, b)
    with pytest.raises(PathError):
        replace_at(Eq(f(a), b), {(0,), (0, 0)}, f(a), b)
    with pytest.raises(PathError):
        replace_at(Eq(a, b), {(0,)}, b, c)


terms = st.recursive(
    st.sampled_from([a, b, c]),
    lambda sub: st.builds(lambda x: f(x), sub),
    max_leaves=4,
)
atomics = st.one_of(
    st.builds(Eq, terms, terms),
    st.builds(lambda t: Atom("P", (t,)), terms),
    st.builds(lambda s, t: Atom("R", (s, t)), terms, terms),
)


@given(atomics, terms)
def test_occurrences_complete(g, t):
    # replacing every reported occurrence by a fresh parameter removes them all
    occ = occurrences(g, t)
    keep = [p for p in occ if all(not (q != p and q == p[: len(q)]) for q in occ)]
    if not keep:
        return
    out = replace_at(g, set(keep), t, Param("zfresh"))
    assert occurrences(out, t) == []


@given(atomics, terms, terms)
def test_replace_round_trip(g, t, s):
    occ = occurrences(g, t)
    keep = [p for p in occ if all(not (q != p and q == p[: len(q)]) for q in occ)]
    if not keep or s == t:
        return
    forward = replace_at(g, set(keep), t, s)
    if occurrences(g, s):
        return  # pre-existing copies of s would be picked up by the way back
    assert replace_at(forward, set(keep), s, t) == g


def test_sequent_multiset_semantics():
    s1 = Sequent((Eq(a, b), Eq(b, c)), (Eq(a, c),))
    s2 = Sequent((Eq(b, c), Eq(a, b)), (Eq(a, c),))
    s3 = Sequent((Eq(a, b), Eq(a, b), Eq(b, c)), (Eq(a, c),))
    assert s1 == s2
    assert hash(s1) == hash(s2)
    assert s1 != s3


def test_identity_and_height():
    assert is_identity(Eq(f(a), f(a)))
    assert not is_identity(Eq(a, b))
    assert term_height(a) == 0
    assert term_height(f(f(a))) == 2


@given(atomics, terms)
def test_substitute_composes_through_fresh_parameter(g, t):
    # abstract one occurrence into a bound variable, then substitute in two hops
    from eqseq.syntax import substitute_param

    occ = occurrences(g, Param("a"))
    if not occ:
        return
    abstracted = replace_at(g, {occ[0]}, Param("a"), BoundVar("x"))
    via_fresh = substitute_param(substitute(abstracted, "x", Param("zfresh")), "zfresh", t)
    assert via_fresh == substitute(abstracted, "x", t)


def test_position_resolves_to_one_occurrence():
    from eqseq.syntax import Position

    s = Sequent((Eq(a, f(a)),), (Atom("P", (f(f(b)),)),))
    assert Position("ante", 0, (1, 0)).resolve(s) == a
    assert Position("succ", 0, (0, 0)).resolve(s) == f(b)
