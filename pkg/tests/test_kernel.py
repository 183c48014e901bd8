import random

import pytest

from sttkit import kernel as k
from sttkit.errors import (
    NonBooleanBinderBody,
    TypeMismatch,
    UnknownBaseType,
    UnknownConstant,
)

from genterms import TermGen, random_signature

M = k.Base("M")
R = k.Base("R")
MM = k.fun_type(M, M, M)

SIG = k.Signature(frozenset({"M", "R"}), {
    "e": M,
    "*": MM,
    "0": R,
    "+": k.fun_type(R, R, R),
})

STAR = k.Const("*", MM)
E = k.Const("e", M)


def dot(a, b):
    return k.App(k.App(STAR, a), b)


def var(n, ty=M):
    return k.Var(n, ty)


def id_elt_is_unique():
    x, y = var("x"), var("y")
    inner = k.Forall("y", M, k.And(k.Eq(dot(x, y), dot(y, x)),
                                   k.Eq(dot(y, x), y)))
    return k.Forall("x", M, k.Implies(inner, k.Eq(x, E)))


# ---------------------------------------------------------------------------
# type_of


def test_identity_function_types():
    assert k.type_of(k.Abs("x", R, var("x", R)), SIG) == k.Fun(R, R)


def test_id_elt_is_unique_is_boolean():
    assert k.type_of(id_elt_is_unique(), SIG) == k.BOOL


def test_partial_application_curries():
    plus = k.Const("+", k.fun_type(R, R, R))
    zero = k.Const("0", R)
    assert k.type_of(k.App(plus, zero), SIG) == k.Fun(R, R)


def test_unknown_constant():
    with pytest.raises(UnknownConstant):
        k.type_of(k.Const("mystery", M), SIG)


def test_constant_annotation_must_match_signature():
    with pytest.raises(TypeMismatch):
        k.type_of(k.Const("e", R), SIG)


def test_unknown_base_type():
    with pytest.raises(UnknownBaseType):
        k.type_of(k.Abs("x", k.Base("Q"), var("x", k.Base("Q"))), SIG)


def test_application_type_mismatch():
    with pytest.raises(TypeMismatch):
        k.type_of(k.App(STAR, k.Const("0", R)), SIG)


def test_non_boolean_binder_body():
    with pytest.raises(NonBooleanBinderBody):
        k.type_of(k.Forall("x", M, var("x")), SIG)
    with pytest.raises(NonBooleanBinderBody):
        k.type_of(k.Iota("x", M, var("x")), SIG)


def test_iota_types_as_binder_type():
    e = k.Iota("x", M, k.Eq(var("x"), E))
    assert k.type_of(e, SIG) == M


def test_guarded_abs_typing():
    guard = k.SetLit(M, (E,))
    e = k.GuardedAbs("x", M, guard, var("x"))
    assert k.type_of(e, SIG) == k.Fun(M, M)
    bad = k.GuardedAbs("x", M, E, var("x"))
    with pytest.raises(TypeMismatch):
        k.type_of(bad, SIG)


def test_pair_proj_member_types():
    p = k.Pair(E, k.Const("0", R))
    assert k.type_of(p, SIG) == k.Prod(M, R)
    assert k.type_of(k.Proj1(p), SIG) == M
    assert k.type_of(k.Proj2(p), SIG) == R
    assert k.type_of(k.Member(E, k.SetLit(M, (E,))), SIG) == k.BOOL


def test_env_types_free_variables():
    assert k.type_of(var("q"), SIG, {"q": M}) == M
    with pytest.raises(TypeMismatch):
        k.type_of(var("q", R), SIG, {"q": M})


def test_type_of_is_deterministic():
    e = id_elt_is_unique()
    assert k.type_of(e, SIG) == k.type_of(e, SIG)


# ---------------------------------------------------------------------------
# substitute


def test_substitute_free_variable():
    assert k.substitute(var("y"), "y", E) == E


def test_substitute_avoids_capture_with_fresh_suffix():
    body = k.Abs("x", M, dot(var("x"), var("y")))
    out = k.substitute(body, "y", var("x"))
    assert out == k.Abs("x1", M, dot(var("x1"), var("x")))


def test_substitute_ignores_bound_occurrences():
    e = k.Forall("y", M, k.Eq(var("y"), var("y")))
    assert k.substitute(e, "y", E) == e


def test_substitute_reaches_guards_but_not_bound_body():
    guard = k.SetLit(M, (var("y"),))
    e = k.GuardedAbs("y", M, guard, var("y"))
    out = k.substitute(e, "y", E)
    assert out == k.GuardedAbs("y", M, k.SetLit(M, (E,)), var("y"))


def test_fresh_name_picks_smallest_unused_index():
    assert k.fresh_name("x", {"x"}) == "x1"
    assert k.fresh_name("x", {"x", "x1", "x2"}) == "x3"


def test_substitution_is_deterministic():
    body = k.Abs("x", M, k.Abs("x1", M, dot(var("x"), dot(var("x1"), var("y")))))
    once = k.substitute(body, "y", var("x"))
    twice = k.substitute(body, "y", var("x"))
    assert once == twice
    # both binders moved out of the way of the free x, capture-free
    expected = k.Abs("a", M, k.Abs("b", M, dot(var("a"), dot(var("b"), var("x")))))
    assert k.alpha_equal(once, expected)


# ---------------------------------------------------------------------------
# alpha equivalence


def test_alpha_equal_basic():
    assert k.alpha_equal(k.Abs("x", R, var("x", R)), k.Abs("y", R, var("y", R)))
    assert not k.alpha_equal(k.Abs("x", R, var("x", R)),
                             k.Abs("x", M, var("x", M)))
    assert k.alpha_equal(k.Forall("x", M, k.Eq(var("x"), E)),
                         k.Forall("z", M, k.Eq(var("z"), E)))


def test_alpha_distinguishes_free_variables():
    assert not k.alpha_equal(var("x"), var("y"))
    assert k.alpha_equal(var("x"), var("x"))


def test_alpha_equivalence_relation_and_substitutivity():
    rng = random.Random(7)
    sig = random_signature(rng)
    gen = TermGen(rng, sig)
    b = k.Base("M")
    for _ in range(60):
        e = gen.sentence(depth=3)
        assert k.alpha_equal(e, e)
        renamed = _rename_binders(e)
        assert k.alpha_equal(e, renamed)
        assert k.alpha_equal(renamed, e)
        v = gen.expr(b, 2, {})
        for name, ty in k.free_vars(e):
            if ty == b:
                assert k.alpha_equal(k.substitute(e, name, v),
                                     k.substitute(renamed, name, v))


def _rename_binders(e: k.Expr) -> k.Expr:
    """Uniformly rename every binder (alpha-preserving) to stress alpha_equal."""
    match e:
        case k.Abs(v, ty, b) | k.Iota(v, ty, b) | k.Forall(v, ty, b) | k.Exists(v, ty, b):
            fresh = k.fresh_name(v, k.free_names(b) | {v})
            b2 = _rename_binders(k.substitute(b, v, k.Var(fresh, ty)))
            return type(e)(fresh, ty, b2)
        case k.GuardedAbs(v, ty, g, b):
            fresh = k.fresh_name(v, k.free_names(b) | {v})
            b2 = _rename_binders(k.substitute(b, v, k.Var(fresh, ty)))
            return k.GuardedAbs(fresh, ty, _rename_binders(g), b2)
        case k.Var(_, _) | k.Const(_, _):
            return e
        case k.SetLit(ty, ms):
            return k.SetLit(ty, tuple(_rename_binders(m) for m in ms))
        case _:
            kids = [_rename_binders(c) for c in k._children(e)]
            ctor = type(e)
            return ctor(*kids)


def test_alpha_key_matches_alpha_equal():
    a = k.Forall("x", M, k.Eq(var("x"), E))
    b = k.Forall("w", M, k.Eq(var("w"), E))
    c = k.Forall("x", M, k.Eq(E, var("x")))
    assert k.alpha_key(a) == k.alpha_key(b)
    assert k.alpha_key(a) != k.alpha_key(c)


# ---------------------------------------------------------------------------
# free_vars


def test_free_vars_examples():
    e = k.Abs("x", M, dot(var("x"), var("y")))
    assert k.free_vars(e) == frozenset({("y", M)})
    assert k.free_vars(id_elt_is_unique()) == frozenset()
    assert k.free_vars(var("x")) == frozenset({("x", M)})


def test_sentence_characterization():
    s = id_elt_is_unique()
    assert not k.free_vars(s) and k.type_of(s, SIG) == k.BOOL


# ---------------------------------------------------------------------------
# type preservation under substitution (randomized)


def test_type_preservation_under_substitution():
    rng = random.Random(21)
    sig = random_signature(rng)
    gen = TermGen(rng, sig)
    b = k.Base("M")
    checked = 0
    for _ in range(120):
        e = gen.expr(k.BOOL, 3, {"h": b})
        before = k.type_of(e, sig, {"h": b})
        v = gen.expr(b, 2, {})
        after = k.type_of(k.substitute(e, "h", v), sig)
        assert before == after == k.BOOL
        checked += 1
    assert checked == 120
