"""A second, independently written brute-force interpreter.

Used as the oracle for the main evaluator: same semantic contract
(undefined non-Boolean values, Boolean nodes never undefined, equality
false on undefined operands), but its own value representation, its own
carrier enumeration, and no code shared with sttkit.model beyond the
Expr data type itself.
"""

from __future__ import annotations

import itertools

from sttkit import kernel as K
from sttkit import model as M

UNDEF = "<undef>"


def truth(b):
    return ("B", bool(b))


def is_truth(v, b):
    return v == ("B", b)


# ---------------------------------------------------------------------------
# carriers


def domain(model, ty):
    """All values of a type, as oracle reps (order irrelevant)."""
    if isinstance(ty, K.Bool):
        return [("B", False), ("B", True)]
    if isinstance(ty, K.Base):
        return [("E", x) for x in model.carriers[ty.name]]
    if isinstance(ty, K.Fun):
        dom = domain(model, ty.dom)
        cod = domain(model, ty.cod)
        out = []
        for choice in itertools.product([None] + cod, repeat=len(dom)):
            table = frozenset((a, r) for a, r in zip(dom, choice)
                              if r is not None)
            out.append(("F", table))
        return out
    if isinstance(ty, K.Prod):
        return [("T", a, b)
                for a in domain(model, ty.left)
                for b in domain(model, ty.right)]
    if isinstance(ty, K.SetOf):
        elems = domain(model, ty.elem)
        out = []
        for picks in itertools.product([False, True], repeat=len(elems)):
            out.append(("S", frozenset(e for e, p in zip(elems, picks) if p)))
        return out
    raise AssertionError(ty)


# ---------------------------------------------------------------------------
# a minimal type synthesizer of its own (annotations only)


def ty_of(e):
    if isinstance(e, (K.Var, K.Const)):
        return e.ty
    if isinstance(e, K.App):
        return ty_of(e.fn).cod
    if isinstance(e, (K.Abs, K.GuardedAbs)):
        return K.Fun(e.var_ty, ty_of(e.body))
    if isinstance(e, K.Iota):
        return e.var_ty
    if isinstance(e, K.Pair):
        return K.Prod(ty_of(e.fst), ty_of(e.snd))
    if isinstance(e, K.Proj1):
        return ty_of(e.arg).left
    if isinstance(e, K.Proj2):
        return ty_of(e.arg).right
    if isinstance(e, K.SetLit):
        return K.SetOf(e.elem_ty)
    return K.BOOL


def boolish(e):
    return ty_of(e) == K.BOOL


# ---------------------------------------------------------------------------
# evaluation


def ev(e, model, env):
    if isinstance(e, K.Var):
        return env[e.name]
    if isinstance(e, K.Const):
        return convert(model.const_interp[e.name])
    if isinstance(e, K.App):
        f = ev(e.fn, model, env)
        a = ev(e.arg, model, env)
        out = UNDEF
        if f != UNDEF and a != UNDEF:
            out = dict(f[1]).get(a, UNDEF)
        if out == UNDEF and boolish(e):
            return truth(False)
        return out
    if isinstance(e, K.Abs):
        table = set()
        for c in domain(model, e.var_ty):
            r = ev(e.body, model, {**env, e.var: c})
            if r != UNDEF:
                table.add((c, r))
        return ("F", frozenset(table))
    if isinstance(e, K.GuardedAbs):
        g = ev(e.guard, model, env)
        if g == UNDEF:
            return UNDEF
        table = set()
        for c in g[1]:
            r = ev(e.body, model, {**env, e.var: c})
            if r != UNDEF:
                table.add((c, r))
        return ("F", frozenset(table))
    if isinstance(e, K.Eq):
        l = ev(e.lhs, model, env)
        r = ev(e.rhs, model, env)
        if l == UNDEF or r == UNDEF:
            return truth(False)
        return truth(l == r)
    if isinstance(e, K.Iota):
        hits = [c for c in domain(model, e.var_ty)
                if is_truth(ev(e.body, model, {**env, e.var: c}), True)]
        if len(hits) == 1:
            return hits[0]
        return truth(False) if e.var_ty == K.BOOL else UNDEF
    if isinstance(e, K.Not):
        return truth(is_truth(ev(e.arg, model, env), False))
    if isinstance(e, K.And):
        return truth(is_truth(ev(e.lhs, model, env), True)
                     and is_truth(ev(e.rhs, model, env), True))
    if isinstance(e, K.Or):
        return truth(is_truth(ev(e.lhs, model, env), True)
                     or is_truth(ev(e.rhs, model, env), True))
    if isinstance(e, K.Implies):
        return truth(is_truth(ev(e.lhs, model, env), False)
                     or is_truth(ev(e.rhs, model, env), True))
    if isinstance(e, K.Iff):
        return truth(ev(e.lhs, model, env) == ev(e.rhs, model, env))
    if isinstance(e, K.Forall):
        return truth(all(
            is_truth(ev(e.body, model, {**env, e.var: c}), True)
            for c in domain(model, e.var_ty)))
    if isinstance(e, K.Exists):
        return truth(any(
            is_truth(ev(e.body, model, {**env, e.var: c}), True)
            for c in domain(model, e.var_ty)))
    if isinstance(e, K.IsDefined):
        return truth(ev(e.arg, model, env) != UNDEF)
    if isinstance(e, K.Pair):
        a = ev(e.fst, model, env)
        b = ev(e.snd, model, env)
        if a == UNDEF or b == UNDEF:
            return UNDEF
        return ("T", a, b)
    if isinstance(e, (K.Proj1, K.Proj2)):
        v = ev(e.arg, model, env)
        if v == UNDEF:
            return truth(False) if boolish(e) else UNDEF
        return v[1] if isinstance(e, K.Proj1) else v[2]
    if isinstance(e, K.SetLit):
        vals = [ev(x, model, env) for x in e.members]
        if UNDEF in vals:
            return UNDEF
        return ("S", frozenset(vals))
    if isinstance(e, K.Member):
        item = ev(e.item, model, env)
        coll = ev(e.coll, model, env)
        if item == UNDEF or coll == UNDEF:
            return truth(False)
        return truth(item in coll[1])
    raise AssertionError(e)


# ---------------------------------------------------------------------------
# bridging: main-evaluator values -> oracle reps


def convert(v):
    if isinstance(v, M.UndefValue):
        return UNDEF
    if isinstance(v, M.Truth):
        return ("B", v.value)
    if isinstance(v, M.Elem):
        return ("E", v.name)
    if isinstance(v, M.FuncV):
        return ("F", frozenset((convert(a), convert(r)) for a, r in v.entries))
    if isinstance(v, M.TupleV):
        return ("T", convert(v.fst), convert(v.snd))
    if isinstance(v, M.SetV):
        return ("S", frozenset(convert(x) for x in v.members))
    raise AssertionError(v)


def oracle_eval(e, model, env=None):
    env = {k_: convert(v) for k_, v in (env or {}).items()}
    return ev(e, model, env)
