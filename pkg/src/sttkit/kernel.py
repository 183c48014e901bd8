"""Terms and types of the logic.

The term language is a simple type theory with equality, definite
description, classical connectives and quantifiers, a definedness test,
pairs, enumerated sets, and set-guarded abstraction.  Everything here is
an immutable value; the operations (`type_of`, `substitute`,
`alpha_equal`, `free_vars`) are pure functions over those values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .errors import (
    NonBooleanBinderBody,
    TypeMismatch,
    UnknownBaseType,
    UnknownConstant,
)


# ---------------------------------------------------------------------------
# types


class Type:
    __slots__ = ()


@dataclass(frozen=True)
class Bool(Type):
    def __str__(self):
        return "Bool"


@dataclass(frozen=True)
class Base(Type):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Fun(Type):
    dom: Type
    cod: Type

    def __str__(self):
        dom = f"({self.dom})" if isinstance(self.dom, Fun) else str(self.dom)
        return f"{dom} -> {self.cod}"


@dataclass(frozen=True)
class Prod(Type):
    left: Type
    right: Type

    def __str__(self):
        def wrap(t):
            return f"({t})" if isinstance(t, (Fun, Prod)) else str(t)
        return f"{wrap(self.left)} * {wrap(self.right)}"


@dataclass(frozen=True)
class SetOf(Type):
    elem: Type

    def __str__(self):
        inner = str(self.elem)
        if isinstance(self.elem, (Fun, Prod)):
            inner = f"({inner})"
        return f"set {inner}"


BOOL = Bool()


def fun_type(*types: Type) -> Type:
    """Right-fold argument types into a curried function type."""
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Fun(t, result)
    return result


def curried_args(ty: Type) -> tuple[list[Type], Type]:
    """Split a type into its curried argument list and final result."""
    args = []
    while isinstance(ty, Fun):
        args.append(ty.dom)
        ty = ty.cod
    return args, ty


# ---------------------------------------------------------------------------
# expressions


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Expr):
    name: str
    ty: Type


@dataclass(frozen=True)
class Const(Expr):
    name: str
    ty: Type


@dataclass(frozen=True)
class App(Expr):
    fn: Expr
    arg: Expr


@dataclass(frozen=True)
class Abs(Expr):
    var: str
    var_ty: Type
    body: Expr


@dataclass(frozen=True)
class Eq(Expr):
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Iota(Expr):
    var: str
    var_ty: Type
    body: Expr


@dataclass(frozen=True)
class Not(Expr):
    arg: Expr


@dataclass(frozen=True)
class And(Expr):
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Or(Expr):
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Implies(Expr):
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Iff(Expr):
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Forall(Expr):
    var: str
    var_ty: Type
    body: Expr


@dataclass(frozen=True)
class Exists(Expr):
    var: str
    var_ty: Type
    body: Expr


@dataclass(frozen=True)
class IsDefined(Expr):
    arg: Expr


@dataclass(frozen=True)
class Pair(Expr):
    fst: Expr
    snd: Expr


@dataclass(frozen=True)
class Proj1(Expr):
    arg: Expr


@dataclass(frozen=True)
class Proj2(Expr):
    arg: Expr


@dataclass(frozen=True)
class SetLit(Expr):
    elem_ty: Type
    members: tuple[Expr, ...]


@dataclass(frozen=True)
class Member(Expr):
    item: Expr
    coll: Expr


@dataclass(frozen=True)
class GuardedAbs(Expr):
    """Abstraction restricted to a set: the function is undefined outside
    the guard.  The guard is evaluated outside the binder's scope."""

    var: str
    var_ty: Type
    guard: Expr
    body: Expr


#: binder node classes sharing (var, var_ty, body); GuardedAbs adds a guard
BINDERS = (Abs, Iota, Forall, Exists, GuardedAbs)

#: binary connective classes
CONNECTIVES = (And, Or, Implies, Iff)


def _children(e: Expr) -> Iterator[Expr]:
    match e:
        case App(f, a) | Eq(f, a) | Member(f, a) | Pair(f, a):
            yield f
            yield a
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            yield l
            yield r
        case Not(x) | IsDefined(x) | Proj1(x) | Proj2(x):
            yield x
        case SetLit(_, members):
            yield from members
        case GuardedAbs(_, _, guard, body):
            yield guard
            yield body
        case Abs(_, _, body) | Iota(_, _, body) | Forall(_, _, body) | Exists(_, _, body):
            yield body


# ---------------------------------------------------------------------------
# signatures


@dataclass(frozen=True)
class Signature:
    """A language's nonlogical vocabulary: base type names and typed constants."""

    base_types: frozenset[str] = frozenset()
    constants: Mapping[str, Type] = field(default_factory=dict)

    def check_type_declared(self, ty: Type, where: str):
        match ty:
            case Base(name):
                if name not in self.base_types:
                    raise UnknownBaseType(f"base type {name} in {where}")
            case Fun(dom, cod):
                self.check_type_declared(dom, where)
                self.check_type_declared(cod, where)
            case Prod(left, right):
                self.check_type_declared(left, where)
                self.check_type_declared(right, where)
            case SetOf(elem):
                self.check_type_declared(elem, where)

    def with_base(self, name: str) -> "Signature":
        return Signature(self.base_types | {name}, dict(self.constants))

    def with_constant(self, name: str, ty: Type) -> "Signature":
        self.check_type_declared(ty, f"type of constant {name}")
        consts = dict(self.constants)
        consts[name] = ty
        return Signature(self.base_types, consts)

    def __post_init__(self):
        for name, ty in self.constants.items():
            self.check_type_declared(ty, f"type of constant {name}")


EMPTY_SIGNATURE = Signature()


# ---------------------------------------------------------------------------
# type synthesis


def type_of(e: Expr, sig: Signature, env: Mapping[str, Type] | None = None) -> Type:
    """Synthesize the unique type of `e` against `sig`.

    `env` supplies types for free variables; bound variables shadow it.
    Raises a KernelError subclass when no type exists.
    """
    return _type_of(e, sig, dict(env) if env else {})


def _expect(e: Expr, found: Type, expected: Type, location):
    if found != expected:
        raise TypeMismatch(expected, found, location)


def _type_of(e: Expr, sig: Signature, env: dict[str, Type]) -> Type:
    match e:
        case Var(name, ty):
            if name in env:
                _expect(e, ty, env[name], f"variable {name}")
            sig.check_type_declared(ty, f"variable {name}")
            return ty
        case Const(name, ty):
            declared = sig.constants.get(name)
            if declared is None:
                raise UnknownConstant(name)
            _expect(e, ty, declared, f"constant {name}")
            return ty
        case App(fn, arg):
            fn_ty = _type_of(fn, sig, env)
            arg_ty = _type_of(arg, sig, env)
            if not isinstance(fn_ty, Fun):
                raise TypeMismatch("a function type", fn_ty, e)
            _expect(e, arg_ty, fn_ty.dom, e)
            return fn_ty.cod
        case Abs(var, var_ty, body):
            sig.check_type_declared(var_ty, f"binder {var}")
            return Fun(var_ty, _type_of(body, sig, _bind(env, var, var_ty)))
        case GuardedAbs(var, var_ty, guard, body):
            sig.check_type_declared(var_ty, f"binder {var}")
            guard_ty = _type_of(guard, sig, env)
            _expect(e, guard_ty, SetOf(var_ty), e)
            return Fun(var_ty, _type_of(body, sig, _bind(env, var, var_ty)))
        case Eq(lhs, rhs):
            lt = _type_of(lhs, sig, env)
            rt = _type_of(rhs, sig, env)
            _expect(e, rt, lt, e)
            return BOOL
        case Iota(var, var_ty, body):
            sig.check_type_declared(var_ty, f"binder {var}")
            body_ty = _type_of(body, sig, _bind(env, var, var_ty))
            if body_ty != BOOL:
                raise NonBooleanBinderBody(f"iota body has type {body_ty}")
            return var_ty
        case Not(arg):
            _expect(e, _type_of(arg, sig, env), BOOL, e)
            return BOOL
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            _expect(e, _type_of(l, sig, env), BOOL, e)
            _expect(e, _type_of(r, sig, env), BOOL, e)
            return BOOL
        case Forall(var, var_ty, body) | Exists(var, var_ty, body):
            sig.check_type_declared(var_ty, f"binder {var}")
            body_ty = _type_of(body, sig, _bind(env, var, var_ty))
            if body_ty != BOOL:
                raise NonBooleanBinderBody(f"quantifier body has type {body_ty}")
            return BOOL
        case IsDefined(arg):
            _type_of(arg, sig, env)
            return BOOL
        case Pair(fst, snd):
            return Prod(_type_of(fst, sig, env), _type_of(snd, sig, env))
        case Proj1(arg):
            arg_ty = _type_of(arg, sig, env)
            if not isinstance(arg_ty, Prod):
                raise TypeMismatch("a product type", arg_ty, e)
            return arg_ty.left
        case Proj2(arg):
            arg_ty = _type_of(arg, sig, env)
            if not isinstance(arg_ty, Prod):
                raise TypeMismatch("a product type", arg_ty, e)
            return arg_ty.right
        case SetLit(elem_ty, members):
            sig.check_type_declared(elem_ty, e)
            for m in members:
                _expect(e, _type_of(m, sig, env), elem_ty, e)
            return SetOf(elem_ty)
        case Member(item, coll):
            item_ty = _type_of(item, sig, env)
            coll_ty = _type_of(coll, sig, env)
            _expect(e, coll_ty, SetOf(item_ty), e)
            return BOOL
    raise TypeError(f"not an Expr: {e!r}")


def _bind(env: dict[str, Type], var: str, ty: Type) -> dict[str, Type]:
    new = dict(env)
    new[var] = ty
    return new


def synth_type(e: Expr) -> Type:
    """Type of a term read off its own annotations, with no signature checks.

    Assumes `e` is well typed; used where only the shape of the type is
    needed (evaluation, printing).
    """
    match e:
        case Var(_, ty) | Const(_, ty):
            return ty
        case App(fn, _):
            fn_ty = synth_type(fn)
            assert isinstance(fn_ty, Fun)
            return fn_ty.cod
        case Abs(_, var_ty, body) | GuardedAbs(_, var_ty, _, body):
            return Fun(var_ty, synth_type(body))
        case Iota(_, var_ty, _):
            return var_ty
        case Pair(fst, snd):
            return Prod(synth_type(fst), synth_type(snd))
        case Proj1(arg):
            return synth_type(arg).left
        case Proj2(arg):
            return synth_type(arg).right
        case SetLit(elem_ty, _):
            return SetOf(elem_ty)
    return BOOL


# ---------------------------------------------------------------------------
# free variables and substitution


def free_vars(e: Expr) -> frozenset[tuple[str, Type]]:
    match e:
        case Var(name, ty):
            return frozenset({(name, ty)})
        case Const(_, _):
            return frozenset()
        case GuardedAbs(var, var_ty, guard, body):
            inner = {(n, t) for n, t in free_vars(body) if n != var}
            return free_vars(guard) | frozenset(inner)
        case Abs(var, _, body) | Iota(var, _, body) | Forall(var, _, body) | Exists(var, _, body):
            return frozenset({(n, t) for n, t in free_vars(body) if n != var})
        case _:
            out: frozenset = frozenset()
            for child in _children(e):
                out |= free_vars(child)
            return out


def free_names(e: Expr) -> frozenset[str]:
    return frozenset(n for n, _ in free_vars(e))


def is_closed(e: Expr) -> bool:
    return not free_vars(e)


def fresh_name(base: str, avoid: frozenset[str] | set[str]) -> str:
    """Smallest numeric suffix on `base` avoiding every name in `avoid`."""
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def substitute(e: Expr, name: str, value: Expr) -> Expr:
    """Capture-avoiding substitution of `value` for free occurrences of `name`.

    Bound variables that would capture a free variable of `value` are
    renamed with `fresh_name`, so results are deterministic.
    """
    value_free = free_names(value)

    def enter_binder(var, var_ty, body):
        if var == name:
            return var, body  # occurrence is bound below here
        if var in value_free and name in free_names(body):
            avoid = value_free | free_names(body) | {name}
            var2 = fresh_name(var, avoid)
            body = substitute(body, var, Var(var2, var_ty))
            return var2, go(body)
        return var, go(body)

    def go(e: Expr) -> Expr:
        match e:
            case Var(n, _):
                return value if n == name else e
            case Const(_, _):
                return e
            case App(fn, arg):
                return App(go(fn), go(arg))
            case Eq(l, r):
                return Eq(go(l), go(r))
            case Not(x):
                return Not(go(x))
            case And(l, r):
                return And(go(l), go(r))
            case Or(l, r):
                return Or(go(l), go(r))
            case Implies(l, r):
                return Implies(go(l), go(r))
            case Iff(l, r):
                return Iff(go(l), go(r))
            case IsDefined(x):
                return IsDefined(go(x))
            case Pair(f, s):
                return Pair(go(f), go(s))
            case Proj1(x):
                return Proj1(go(x))
            case Proj2(x):
                return Proj2(go(x))
            case SetLit(ty, members):
                return SetLit(ty, tuple(go(m) for m in members))
            case Member(i, c):
                return Member(go(i), go(c))
            case GuardedAbs(var, var_ty, guard, body):
                new_guard = go(guard)
                var2, body2 = enter_binder(var, var_ty, body)
                return GuardedAbs(var2, var_ty, new_guard, body2)
            case Abs(var, var_ty, body):
                var2, body2 = enter_binder(var, var_ty, body)
                return Abs(var2, var_ty, body2)
            case Iota(var, var_ty, body):
                var2, body2 = enter_binder(var, var_ty, body)
                return Iota(var2, var_ty, body2)
            case Forall(var, var_ty, body):
                var2, body2 = enter_binder(var, var_ty, body)
                return Forall(var2, var_ty, body2)
            case Exists(var, var_ty, body):
                var2, body2 = enter_binder(var, var_ty, body)
                return Exists(var2, var_ty, body2)
        raise TypeError(f"not an Expr: {e!r}")

    return go(e)


# ---------------------------------------------------------------------------
# alpha equivalence


def alpha_equal(a: Expr, b: Expr) -> bool:
    """True when the terms differ at most in bound-variable names."""
    return _alpha(a, b, {}, {}, 0)


def _alpha(a: Expr, b: Expr, env_a: dict, env_b: dict, depth: int) -> bool:
    if type(a) is not type(b):
        return False
    match a, b:
        case Var(na, ta), Var(nb, tb):
            if ta != tb:
                return False
            la, lb = env_a.get(na), env_b.get(nb)
            if la is not None or lb is not None:
                return la == lb
            return na == nb
        case Const(na, ta), Const(nb, tb):
            return na == nb and ta == tb
        case SetLit(ta, ms_a), SetLit(tb, ms_b):
            return (ta == tb and len(ms_a) == len(ms_b)
                    and all(_alpha(x, y, env_a, env_b, depth)
                            for x, y in zip(ms_a, ms_b)))
        case GuardedAbs(va, ta, ga, ba), GuardedAbs(vb, tb, gb, bb):
            if ta != tb or not _alpha(ga, gb, env_a, env_b, depth):
                return False
            return _alpha(ba, bb, {**env_a, va: depth}, {**env_b, vb: depth},
                          depth + 1)
        case (Abs(va, ta, ba) | Iota(va, ta, ba) | Forall(va, ta, ba) | Exists(va, ta, ba)), _:
            vb, tb, bb = b.var, b.var_ty, b.body
            if ta != tb:
                return False
            return _alpha(ba, bb, {**env_a, va: depth}, {**env_b, vb: depth},
                          depth + 1)
        case _:
            kids_a = list(_children(a))
            kids_b = list(_children(b))
            return len(kids_a) == len(kids_b) and all(
                _alpha(x, y, env_a, env_b, depth)
                for x, y in zip(kids_a, kids_b))


def alpha_key(e: Expr) -> str:
    """Canonical string invariant under renaming of bound variables.

    Two terms have equal keys iff they are alpha-equal; handy for
    deduplication in maps.
    """
    parts: list[str] = []
    _alpha_key(e, {}, 0, parts)
    return "".join(parts)


def _alpha_key(e: Expr, env: dict, depth: int, out: list[str]):
    match e:
        case Var(name, ty):
            level = env.get(name)
            if level is None:
                out.append(f"V!{name}:{ty};")
            else:
                out.append(f"V#{level};")
        case Const(name, ty):
            out.append(f"C!{name}:{ty};")
        case SetLit(ty, members):
            out.append(f"L{ty}({len(members)};")
            for m in members:
                _alpha_key(m, env, depth, out)
            out.append(")")
        case GuardedAbs(var, var_ty, guard, body):
            out.append(f"G{var_ty}(")
            _alpha_key(guard, env, depth, out)
            _alpha_key(body, {**env, var: depth}, depth + 1, out)
            out.append(")")
        case Abs(var, var_ty, body) | Iota(var, var_ty, body) | Forall(var, var_ty, body) | Exists(var, var_ty, body):
            out.append(f"{type(e).__name__}{var_ty}(")
            _alpha_key(body, {**env, var: depth}, depth + 1, out)
            out.append(")")
        case _:
            out.append(f"{type(e).__name__}(")
            for child in _children(e):
                _alpha_key(child, env, depth, out)
            out.append(")")
