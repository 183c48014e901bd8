"""Deterministic printers: compact notation (reparseable) and LaTeX.

`print_compact` refolds registered sugar, infix operators, and chained
relations, and emits text that `parse_expr` turns back into an
alpha-equal term.  `print_latex` emits plain math-mode LaTeX with no
package requirements beyond amsmath.
"""

from __future__ import annotations

import re
from typing import Mapping

from . import kernel as k
from .notation import KEYWORDS, OPERATORS, NotationDef

# precedence levels, loosest to tightest
BINDER, IFF, IMPLIES, OR, AND, REL, ADD, MUL, NOT, APP, ATOM = range(11)

_OP_LEVEL = {"*": MUL, "/": MUL, "+": ADD, "-": ADD, "<": REL}

_NAME_RE = re.compile(r"[A-Za-z](?:[A-Za-z0-9_@]|-(?=[A-Za-z0-9_@]))*$")


def _printable(name: str) -> bool:
    return bool(_NAME_RE.match(name)) and name not in KEYWORDS


def _const_names(e: k.Expr, out: set[str]):
    if isinstance(e, k.Const):
        out.add(e.name)
    for child in k._children(e):
        _const_names(child, out)


def _all_names(e: k.Expr, out: set[str]):
    match e:
        case k.Var(name, _) | k.Const(name, _):
            out.add(name)
        case k.Abs(var, _, _) | k.Iota(var, _, _) | k.Forall(var, _, _) | \
                k.Exists(var, _, _) | k.GuardedAbs(var, _, _, _):
            out.add(var)
    for child in k._children(e):
        _all_names(child, out)


def _safe_binder(var: str, var_ty: k.Type, body: k.Expr) -> tuple[str, k.Expr]:
    """Rename a bound variable that would shadow a constant used in the
    body (or that cannot be re-lexed), keeping output reparseable."""
    consts: set[str] = set()
    _const_names(body, consts)
    if _printable(var) and var not in consts:
        return var, body
    names: set[str] = set()
    _all_names(body, names)
    base = var if _printable(var) else "v"
    fresh = k.fresh_name(base, names | consts | KEYWORDS)
    return fresh, k.substitute(body, var, k.Var(fresh, var_ty))


def _spine(e: k.Expr) -> tuple[k.Expr, list[k.Expr]]:
    args: list[k.Expr] = []
    while isinstance(e, k.App):
        args.append(e.arg)
        e = e.fn
    args.reverse()
    return e, args


def _as_relation(e: k.Expr):
    match e:
        case k.Eq(l, r):
            return "=", l, r
        case k.App(k.App(k.Const("<", _), l), r):
            return "<", l, r
    return None


def _chain_parts(e: k.Expr):
    """Flatten an And spine into `a R b R c` pieces, or None."""
    spine: list[k.Expr] = []

    def flat(x):
        if isinstance(x, k.And):
            flat(x.lhs)
            spine.append(x.rhs)
        else:
            spine.append(x)

    flat(e)
    if len(spine) < 2:
        return None
    rels = [_as_relation(x) for x in spine]
    if any(r is None for r in rels):
        return None
    for (_, _, rhs), (_, lhs, _) in zip(rels, rels[1:]):
        if rhs != lhs:
            return None
    return rels


def _pair_elems(e: k.Expr) -> list[k.Expr]:
    elems = [e]
    while isinstance(elems[-1], k.Pair):
        last = elems.pop()
        elems.append(last.fst)
        elems.append(last.snd)
    return elems


def _match_notation(e: k.Expr, defn: NotationDef):
    head, args = _spine(e)
    if head != k.Const(defn.target, defn.target_ty):
        return None
    if len(args) != len(defn.arg_order):
        return None
    slots = dict(zip(defn.arg_order, args))
    fn = slots["body"]
    if defn.guard is None:
        if not (isinstance(fn, k.Abs) and fn.var_ty == defn.binder_ty):
            return None
    else:
        if not (isinstance(fn, k.GuardedAbs) and fn.var_ty == defn.binder_ty
                and fn.guard == defn.guard_expr()):
            return None
    var, body = _safe_binder(fn.var, fn.var_ty, fn.body)
    return slots, var, body


# ---------------------------------------------------------------------------
# compact notation


def print_compact(e: k.Expr, notations: Mapping[str, NotationDef] | None = None) -> str:
    return _pc(e, BINDER, dict(notations or {}))


def type_compact(ty: k.Type) -> str:
    return str(ty)


def _wrap(s: str, lvl: int, need: int) -> str:
    return f"({s})" if lvl < need else s


def _pc(e: k.Expr, need: int, notations) -> str:
    match e:
        case k.Var(name, _):
            return name
        case k.Const(name, _):
            return f"({name})" if name in OPERATORS else name
        case k.App(_, _):
            folded = _pc_app(e, notations)
            return _wrap(folded[0], folded[1], need)
        case k.And(_, _):
            chain = _chain_parts(e)
            if chain is not None:
                parts = [_pc(chain[0][1], ADD, notations)]
                for op, _, rhs in chain:
                    parts.append(op)
                    parts.append(_pc(rhs, ADD, notations))
                return _wrap(" ".join(parts), REL, need)
            s = f"{_pc(e.lhs, AND, notations)} and {_pc(e.rhs, AND + 1, notations)}"
            return _wrap(s, AND, need)
        case k.Eq(l, r):
            s = f"{_pc(l, ADD, notations)} = {_pc(r, ADD, notations)}"
            return _wrap(s, REL, need)
        case k.Member(item, coll):
            s = f"{_pc(item, ADD, notations)} in {_pc(coll, ADD, notations)}"
            return _wrap(s, REL, need)
        case k.Or(l, r):
            s = f"{_pc(l, OR, notations)} or {_pc(r, OR + 1, notations)}"
            return _wrap(s, OR, need)
        case k.Implies(l, r):
            s = f"{_pc(l, IMPLIES + 1, notations)} => {_pc(r, IMPLIES, notations)}"
            return _wrap(s, IMPLIES, need)
        case k.Iff(l, r):
            s = f"{_pc(l, IFF, notations)} <=> {_pc(r, IFF + 1, notations)}"
            return _wrap(s, IFF, need)
        case k.Not(arg):
            return _wrap(f"not {_pc(arg, NOT, notations)}", NOT, need)
        case k.IsDefined(arg):
            return f"defined({_pc(arg, BINDER, notations)})"
        case k.Proj1(arg):
            return f"fst({_pc(arg, BINDER, notations)})"
        case k.Proj2(arg):
            return f"snd({_pc(arg, BINDER, notations)})"
        case k.Pair(_, _):
            elems = _pair_elems(e)
            return "(" + ", ".join(_pc(x, BINDER, notations) for x in elems) + ")"
        case k.SetLit(elem_ty, members):
            if not members:
                return f"{{:{type_compact(elem_ty)}}}"
            return "{" + ", ".join(_pc(x, BINDER, notations) for x in members) + "}"
        case k.Forall(var, var_ty, body):
            var, body = _safe_binder(var, var_ty, body)
            s = f"forall {var}:{type_compact(var_ty)}. {_pc(body, BINDER, notations)}"
            return _wrap(s, BINDER, need)
        case k.Exists(var, var_ty, body):
            var, body = _safe_binder(var, var_ty, body)
            s = f"exists {var}:{type_compact(var_ty)}. {_pc(body, BINDER, notations)}"
            return _wrap(s, BINDER, need)
        case k.Iota(var, var_ty, body):
            var, body = _safe_binder(var, var_ty, body)
            s = f"iota {var}:{type_compact(var_ty)}. {_pc(body, BINDER, notations)}"
            return _wrap(s, BINDER, need)
        case k.Abs(var, var_ty, body):
            var, body = _safe_binder(var, var_ty, body)
            s = f"fun {var}:{type_compact(var_ty)}. {_pc(body, BINDER, notations)}"
            return _wrap(s, BINDER, need)
        case k.GuardedAbs(var, var_ty, guard, body):
            var, body = _safe_binder(var, var_ty, body)
            s = (f"fun {var} in {_pc(guard, APP, notations)}. "
                 f"{_pc(body, BINDER, notations)}")
            return _wrap(s, BINDER, need)
    raise TypeError(f"not an Expr: {e!r}")


def _pc_app(e: k.App, notations) -> tuple[str, int]:
    for defn in notations.values():
        m = _match_notation(e, defn)
        if m is None:
            continue
        slots, var, body = m
        body_s = _pc(body, BINDER, notations)
        if defn.shape == "over-range":
            lo = _pc(slots["lo"], REL, notations)
            hi = _pc(slots["hi"], REL, notations)
            return f"{defn.name} {var} = {lo} to {hi} of {body_s}", BINDER
        if defn.shape == "at-point":
            pt = _pc(slots["point"], REL, notations)
            return f"{defn.name} {var} -> {pt} of {body_s}", BINDER
        if defn.shape == "plain":
            return f"{defn.name} {var} of {body_s}", BINDER
        lo = _pc(slots["lo"], REL, notations)
        hi = _pc(slots["hi"], REL, notations)
        return f"{defn.name} from {lo} to {hi} of {body_s} d{var}", BINDER

    match e:
        case k.App(k.App(k.Const(name, _), l), r) if name in OPERATORS:
            lvl = _OP_LEVEL[name]
            if lvl == REL:  # '<' prints like a one-link chain
                s = f"{_pc(l, ADD, notations)} {name} {_pc(r, ADD, notations)}"
            else:
                s = (f"{_pc(l, lvl, notations)} {name} "
                     f"{_pc(r, lvl + 1, notations)}")
            return s, lvl
        case k.App(k.Const("abs", _), arg):
            return f"|{_pc(arg, BINDER, notations)}|", ATOM
    head_s = _pc(e.fn, APP, notations)
    args = _pair_elems(e.arg)
    arg_s = ", ".join(_pc(x, BINDER, notations) for x in args)
    return f"{head_s}({arg_s})", APP


# ---------------------------------------------------------------------------
# LaTeX


def print_latex(e: k.Expr, notations: Mapping[str, NotationDef] | None = None) -> str:
    return _pl(e, BINDER, dict(notations or {}))


def type_latex(ty: k.Type) -> str:
    match ty:
        case k.Bool():
            return r"\mathrm{Bool}"
        case k.Base(name):
            return _tex_name_plain(name)
        case k.Fun(dom, cod):
            dom_s = type_latex(dom)
            if isinstance(dom, k.Fun):
                dom_s = f"({dom_s})"
            return f"{dom_s} \\rightarrow {type_latex(cod)}"
        case k.Prod(left, right):
            def wrap(t):
                s = type_latex(t)
                return f"({s})" if isinstance(t, (k.Fun, k.Prod)) else s
            return f"{wrap(left)} \\times {wrap(right)}"
        case k.SetOf(elem):
            inner = type_latex(elem)
            if isinstance(elem, (k.Fun, k.Prod)):
                inner = f"({inner})"
            return f"\\mathrm{{set}}\\, {inner}"
    raise TypeError(f"not a Type: {ty!r}")


def _tex_name_plain(name: str) -> str:
    return name.replace("_", r"\_")


def _tex_const(name: str) -> str:
    if name in ("+", "-", "<", "="):
        return name
    if name == "*":
        return r"\cdot"
    if name == "/":
        return "/"
    if name.isdigit():
        return name
    return rf"\mathsf{{{_tex_name_plain(name)}}}"


def _pl(e: k.Expr, need: int, notations) -> str:
    match e:
        case k.Var(name, _):
            return _tex_name_plain(name)
        case k.Const(name, _):
            s = _tex_const(name)
            return f"({s})" if name in OPERATORS else s
        case k.App(_, _):
            folded = _pl_app(e, notations)
            return _wrap(folded[0], folded[1], need)
        case k.And(_, _):
            chain = _chain_parts(e)
            if chain is not None:
                parts = [_pl(chain[0][1], ADD, notations)]
                for op, _, rhs in chain:
                    parts.append(op)
                    parts.append(_pl(rhs, ADD, notations))
                return _wrap(" ".join(parts), REL, need)
            s = f"{_pl(e.lhs, AND, notations)} \\wedge {_pl(e.rhs, AND + 1, notations)}"
            return _wrap(s, AND, need)
        case k.Eq(l, r):
            s = f"{_pl(l, ADD, notations)} = {_pl(r, ADD, notations)}"
            return _wrap(s, REL, need)
        case k.Member(item, coll):
            s = f"{_pl(item, ADD, notations)} \\in {_pl(coll, ADD, notations)}"
            return _wrap(s, REL, need)
        case k.Or(l, r):
            s = f"{_pl(l, OR, notations)} \\vee {_pl(r, OR + 1, notations)}"
            return _wrap(s, OR, need)
        case k.Implies(l, r):
            s = f"{_pl(l, IMPLIES + 1, notations)} \\supset {_pl(r, IMPLIES, notations)}"
            return _wrap(s, IMPLIES, need)
        case k.Iff(l, r):
            s = f"{_pl(l, IFF, notations)} \\equiv {_pl(r, IFF + 1, notations)}"
            return _wrap(s, IFF, need)
        case k.Not(arg):
            return _wrap(f"\\neg {_pl(arg, NOT, notations)}", NOT, need)
        case k.IsDefined(arg):
            return f"{_pl(arg, APP, notations)}{{\\downarrow}}"
        case k.Proj1(arg):
            return f"\\pi_1({_pl(arg, BINDER, notations)})"
        case k.Proj2(arg):
            return f"\\pi_2({_pl(arg, BINDER, notations)})"
        case k.Pair(_, _):
            elems = _pair_elems(e)
            return "(" + ", ".join(_pl(x, BINDER, notations) for x in elems) + ")"
        case k.SetLit(elem_ty, members):
            if not members:
                return rf"\emptyset_{{{type_latex(elem_ty)}}}"
            inner = ", ".join(_pl(x, BINDER, notations) for x in members)
            return rf"\{{{inner}\}}"
        case k.Forall(var, var_ty, body):
            s = (rf"\forall\, {_tex_name_plain(var)}{{:}}{type_latex(var_ty)}.\; "
                 f"{_pl(body, BINDER, notations)}")
            return _wrap(s, BINDER, need)
        case k.Exists(var, var_ty, body):
            s = (rf"\exists\, {_tex_name_plain(var)}{{:}}{type_latex(var_ty)}.\; "
                 f"{_pl(body, BINDER, notations)}")
            return _wrap(s, BINDER, need)
        case k.Iota(var, var_ty, body):
            s = (rf"\iota\, {_tex_name_plain(var)}{{:}}{type_latex(var_ty)}.\; "
                 f"{_pl(body, BINDER, notations)}")
            return _wrap(s, BINDER, need)
        case k.Abs(var, var_ty, body):
            s = (rf"\lambda\, {_tex_name_plain(var)}{{:}}{type_latex(var_ty)}.\; "
                 f"{_pl(body, BINDER, notations)}")
            return _wrap(s, BINDER, need)
        case k.GuardedAbs(var, _, guard, body):
            s = (rf"\lambda\, {_tex_name_plain(var)} \in {_pl(guard, APP, notations)}.\; "
                 f"{_pl(body, BINDER, notations)}")
            return _wrap(s, BINDER, need)
    raise TypeError(f"not an Expr: {e!r}")


def _pl_app(e: k.App, notations) -> tuple[str, int]:
    for defn in notations.values():
        if defn.latex is None:
            continue
        m = _match_notation(e, defn)
        if m is None:
            continue
        slots, var, body = m
        cmd = defn.latex
        var_s = _tex_name_plain(var)
        body_s = _pl(body, ADD, notations)
        if defn.shape == "over-range":
            lo = _pl(slots["lo"], BINDER, notations)
            hi = _pl(slots["hi"], BINDER, notations)
            return f"{cmd}_{{{var_s}={lo}}}^{{{hi}}} {body_s}", APP
        if defn.shape == "at-point":
            pt = _pl(slots["point"], BINDER, notations)
            return f"{cmd}_{{{var_s}\\to {pt}}} {body_s}", APP
        if defn.shape == "plain":
            return f"{cmd}_{{{var_s}\\to\\infty}} {body_s}", APP
        lo = _pl(slots["lo"], BINDER, notations)
        hi = _pl(slots["hi"], BINDER, notations)
        return f"{cmd}_{{{lo}}}^{{{hi}}} {body_s}\\, d{var_s}", APP

    match e:
        case k.App(k.App(k.Const("/", _), l), r):
            num = _pl(l, BINDER, notations)
            den = _pl(r, BINDER, notations)
            return rf"\frac{{{num}}}{{{den}}}", ATOM
        case k.App(k.App(k.Const(name, _), l), r) if name in OPERATORS:
            lvl = _OP_LEVEL[name]
            op = _tex_const(name)
            if lvl == REL:
                s = f"{_pl(l, ADD, notations)} {op} {_pl(r, ADD, notations)}"
            else:
                s = f"{_pl(l, lvl, notations)} {op} {_pl(r, lvl + 1, notations)}"
            return s, lvl
        case k.App(k.Const("abs", _), arg):
            return f"|{_pl(arg, BINDER, notations)}|", ATOM
    head_s = _pl(e.fn, APP, notations)
    args = _pair_elems(e.arg)
    arg_s = ", ".join(_pl(x, BINDER, notations) for x in args)
    return f"{head_s}({arg_s})", APP
