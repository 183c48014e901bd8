"""Finite standard models and the undefinedness-aware evaluator.

Values of non-Boolean type may be undefined (`UNDEF`); Boolean-typed
expressions always evaluate to a truth value.  Where the generic rule
would make a Boolean-typed node undefined (applying a partial function,
projecting from an undefined pair, a description with no unique
witness), the node evaluates to false instead.  Equality and membership
are false whenever an operand is undefined, and `IsDefined` reflects
definedness into a truth value.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

from . import kernel as k
from .errors import InfiniteOnlyTheory, ModelDoesNotMatchSignature, SearchSpaceTooLarge
from .theory import Theory


# ---------------------------------------------------------------------------
# values


class Value:
    __slots__ = ()


@dataclass(frozen=True)
class Elem(Value):
    name: str


@dataclass(frozen=True)
class Truth(Value):
    value: bool


@dataclass(frozen=True)
class FuncV(Value):
    """Finite partial map; absent arguments are undefined points.

    Entries are kept sorted by argument key so equal functions compare
    and hash equal.
    """

    entries: tuple[tuple[Value, Value], ...]

    @staticmethod
    def from_pairs(pairs) -> "FuncV":
        table = {a: v for a, v in pairs}
        return FuncV(tuple(sorted(table.items(), key=lambda av: value_key(av[0]))))

    def lookup(self, arg: Value) -> Value:
        for a, v in self.entries:
            if a == arg:
                return v
        return UNDEF


@dataclass(frozen=True)
class TupleV(Value):
    fst: Value
    snd: Value


@dataclass(frozen=True)
class SetV(Value):
    members: tuple[Value, ...]

    @staticmethod
    def from_iter(values) -> "SetV":
        uniq = {value_key(v): v for v in values}
        return SetV(tuple(uniq[key] for key in sorted(uniq)))

    def contains(self, v: Value) -> bool:
        return v in self.members


@dataclass(frozen=True)
class UndefValue(Value):
    def __repr__(self):
        return "UNDEF"


UNDEF = UndefValue()
TRUE = Truth(True)
FALSE = Truth(False)


def value_key(v: Value):
    """Total deterministic order on values, used for canonical layouts."""
    match v:
        case Truth(b):
            return (0, b)
        case Elem(name):
            return (1, name)
        case TupleV(f, s):
            return (2, value_key(f), value_key(s))
        case SetV(members):
            return (3, tuple(value_key(m) for m in members))
        case FuncV(entries):
            return (4, tuple((value_key(a), value_key(r)) for a, r in entries))
        case UndefValue():
            return (5,)
    raise TypeError(f"not a Value: {v!r}")


# ---------------------------------------------------------------------------
# models


DEFAULT_CARRIER_BUDGET = 1 << 20


@dataclass
class FiniteModel:
    """Finite carriers per base type plus interpretations for constants."""

    carriers: dict[str, tuple[str, ...]]
    const_interp: dict[str, Value]
    name: str = "model"
    _carrier_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def carrier(self, base: str) -> tuple[str, ...]:
        return self.carriers[base]


def carrier_size(model: FiniteModel, ty: k.Type, budget: int = DEFAULT_CARRIER_BUDGET) -> int:
    match ty:
        case k.Bool():
            n = 2
        case k.Base(name):
            if name not in model.carriers:
                raise ModelDoesNotMatchSignature(f"no carrier for base type {name}")
            n = len(model.carriers[name])
        case k.Fun(dom, cod):
            d = carrier_size(model, dom, budget)
            c = carrier_size(model, cod, budget)
            n = (c + 1) ** d
        case k.Prod(left, right):
            n = carrier_size(model, left, budget) * carrier_size(model, right, budget)
        case k.SetOf(elem):
            n = 2 ** carrier_size(model, elem, budget)
        case _:
            raise TypeError(f"not a Type: {ty!r}")
    if n > budget:
        raise SearchSpaceTooLarge(f"carrier of {ty} has {n} elements")
    return n


def carrier_values(model: FiniteModel, ty: k.Type,
                   budget: int = DEFAULT_CARRIER_BUDGET) -> tuple[Value, ...]:
    """All values of a type over the model's carriers, in canonical order.

    Function types enumerate every partial map, so an `Abs` body that is
    undefined somewhere still lands inside its type's carrier.
    """
    cached = model._carrier_cache.get(ty)
    if cached is not None:
        return cached
    carrier_size(model, ty, budget)
    match ty:
        case k.Bool():
            values = (FALSE, TRUE)
        case k.Base(name):
            values = tuple(Elem(x) for x in model.carriers[name])
        case k.Fun(dom, cod):
            dom_vals = carrier_values(model, dom, budget)
            options = (None,) + carrier_values(model, cod, budget)
            values = tuple(
                FuncV.from_pairs(
                    (a, r) for a, r in zip(dom_vals, row) if r is not None)
                for row in itertools.product(options, repeat=len(dom_vals)))
        case k.Prod(left, right):
            values = tuple(
                TupleV(l, r)
                for l in carrier_values(model, left, budget)
                for r in carrier_values(model, right, budget))
        case k.SetOf(elem):
            elems = carrier_values(model, elem, budget)
            values = tuple(
                SetV.from_iter(v for v, keep in zip(elems, picks) if keep)
                for picks in itertools.product((False, True), repeat=len(elems)))
        case _:
            raise TypeError(f"not a Type: {ty!r}")
    model._carrier_cache[ty] = values
    return values


def value_conforms(model: FiniteModel, v: Value, ty: k.Type) -> bool:
    """Structural check that a value inhabits a type over the carriers."""
    match ty, v:
        case _, UndefValue():
            return not isinstance(ty, k.Bool)
        case k.Bool(), Truth(_):
            return True
        case k.Base(name), Elem(x):
            return name in model.carriers and x in model.carriers[name]
        case k.Fun(dom, cod), FuncV(entries):
            return all(
                value_conforms(model, a, dom) and not isinstance(a, UndefValue)
                and value_conforms(model, r, cod) and not isinstance(r, UndefValue)
                for a, r in entries)
        case k.Prod(l, r), TupleV(a, b):
            return value_conforms(model, a, l) and value_conforms(model, b, r)
        case k.SetOf(elem), SetV(members):
            return all(
                value_conforms(model, m, elem) and not isinstance(m, UndefValue)
                for m in members)
    return False


def validate_model(model: FiniteModel, sig: k.Signature):
    for base in sig.base_types:
        if base not in model.carriers:
            raise ModelDoesNotMatchSignature(f"no carrier for base type {base}")
        if not model.carriers[base]:
            raise ModelDoesNotMatchSignature(f"empty carrier for {base}")
    for name, ty in sig.constants.items():
        if name not in model.const_interp:
            raise ModelDoesNotMatchSignature(f"constant {name} not interpreted")
        if not value_conforms(model, model.const_interp[name], ty):
            raise ModelDoesNotMatchSignature(
                f"interpretation of {name} does not inhabit {ty}")


# ---------------------------------------------------------------------------
# evaluation


def eval_expr(e: k.Expr, model: FiniteModel, env: Mapping[str, Value] | None = None,
              budget: int = DEFAULT_CARRIER_BUDGET) -> Value:
    """Evaluate a well-typed term; never raises on well-typed input."""
    return _eval(e, model, dict(env) if env else {}, budget)


def _bool_default(e: k.Expr, v: Value) -> Value:
    # Boolean-typed nodes never stay undefined.
    if v is UNDEF and k.synth_type(e) == k.BOOL:
        return FALSE
    return v


def _eval(e: k.Expr, m: FiniteModel, env: dict[str, Value], budget: int) -> Value:
    match e:
        case k.Var(name, _):
            return env[name]
        case k.Const(name, _):
            return m.const_interp[name]
        case k.App(fn, arg):
            fv = _eval(fn, m, env, budget)
            av = _eval(arg, m, env, budget)
            if fv is UNDEF or av is UNDEF:
                return _bool_default(e, UNDEF)
            return _bool_default(e, fv.lookup(av))
        case k.Abs(var, var_ty, body):
            pairs = []
            for c in carrier_values(m, var_ty, budget):
                r = _eval(body, m, {**env, var: c}, budget)
                if r is not UNDEF:
                    pairs.append((c, r))
            return FuncV.from_pairs(pairs)
        case k.GuardedAbs(var, var_ty, guard, body):
            gv = _eval(guard, m, env, budget)
            if gv is UNDEF:
                return UNDEF
            pairs = []
            for c in gv.members:
                r = _eval(body, m, {**env, var: c}, budget)
                if r is not UNDEF:
                    pairs.append((c, r))
            return FuncV.from_pairs(pairs)
        case k.Eq(lhs, rhs):
            lv = _eval(lhs, m, env, budget)
            rv = _eval(rhs, m, env, budget)
            if lv is UNDEF or rv is UNDEF:
                return FALSE
            return Truth(lv == rv)
        case k.Iota(var, var_ty, body):
            witnesses = []
            for c in carrier_values(m, var_ty, budget):
                if _eval(body, m, {**env, var: c}, budget) == TRUE:
                    witnesses.append(c)
                    if len(witnesses) > 1:
                        break
            if len(witnesses) == 1:
                return witnesses[0]
            return _bool_default(e, UNDEF)
        case k.Not(arg):
            return Truth(_eval(arg, m, env, budget) == FALSE)
        case k.And(l, r):
            if _eval(l, m, env, budget) == FALSE:
                return FALSE
            return _eval(r, m, env, budget)
        case k.Or(l, r):
            if _eval(l, m, env, budget) == TRUE:
                return TRUE
            return _eval(r, m, env, budget)
        case k.Implies(l, r):
            if _eval(l, m, env, budget) == FALSE:
                return TRUE
            return _eval(r, m, env, budget)
        case k.Iff(l, r):
            return Truth(_eval(l, m, env, budget) == _eval(r, m, env, budget))
        case k.Forall(var, var_ty, body):
            for c in carrier_values(m, var_ty, budget):
                if _eval(body, m, {**env, var: c}, budget) == FALSE:
                    return FALSE
            return TRUE
        case k.Exists(var, var_ty, body):
            for c in carrier_values(m, var_ty, budget):
                if _eval(body, m, {**env, var: c}, budget) == TRUE:
                    return TRUE
            return FALSE
        case k.IsDefined(arg):
            return Truth(_eval(arg, m, env, budget) is not UNDEF)
        case k.Pair(fst, snd):
            fv = _eval(fst, m, env, budget)
            sv = _eval(snd, m, env, budget)
            if fv is UNDEF or sv is UNDEF:
                return UNDEF
            return TupleV(fv, sv)
        case k.Proj1(arg):
            v = _eval(arg, m, env, budget)
            if v is UNDEF:
                return _bool_default(e, UNDEF)
            return v.fst
        case k.Proj2(arg):
            v = _eval(arg, m, env, budget)
            if v is UNDEF:
                return _bool_default(e, UNDEF)
            return v.snd
        case k.SetLit(_, members):
            values = [_eval(x, m, env, budget) for x in members]
            if any(v is UNDEF for v in values):
                return UNDEF
            return SetV.from_iter(values)
        case k.Member(item, coll):
            iv = _eval(item, m, env, budget)
            cv = _eval(coll, m, env, budget)
            if iv is UNDEF or cv is UNDEF:
                return FALSE
            return Truth(cv.contains(iv))
    raise TypeError(f"not an Expr: {e!r}")


# ---------------------------------------------------------------------------
# checking sentences of a theory


@dataclass
class CheckResult:
    sentence_true: bool
    failed_axioms: tuple[str, ...]
    value: Value


def interpret_definitions(t: Theory, model: FiniteModel,
                          budget: int = DEFAULT_CARRIER_BUDGET) -> FiniteModel:
    """Extend a base-signature model with interpretations of every defined
    constant, evaluating the defining expressions in declaration order."""
    interp = dict(model.const_interp)
    extended = FiniteModel(dict(model.carriers), interp, model.name)
    for d in t.definitions.values():
        interp[d.const_name] = eval_expr(d.body, extended, {}, budget)
    return extended


def check_sentence(t: Theory, model: FiniteModel, sentence,
                   budget: int = DEFAULT_CARRIER_BUDGET) -> CheckResult:
    """Evaluate one sentence of a theory in a model.

    `sentence` is either a named axiom/theorem of the theory or an Expr
    that is a sentence over the theory's vocabulary.  The result also
    reports which of the theory's axioms fail in the model.
    """
    if t.infinite_only:
        raise InfiniteOnlyTheory(f"theory {t.name} has no finite models")
    validate_model(model, t.sig)
    full = interpret_definitions(t, model, budget)
    expr = _resolve_sentence(t, sentence)
    failed = tuple(
        name for name, ax in t.axioms.items()
        if eval_expr(ax, full, {}, budget) != TRUE)
    value = eval_expr(expr, full, {}, budget)
    return CheckResult(value == TRUE, failed, value)


def _resolve_sentence(t: Theory, sentence) -> k.Expr:
    if isinstance(sentence, k.Expr):
        t.check_sentence_wellformed(sentence)
        return sentence
    if sentence in t.axioms:
        return t.axioms[sentence]
    if sentence in t.theorems:
        return t.theorems[sentence].statement
    raise ModelDoesNotMatchSignature(
        f"no axiom or theorem named {sentence} in {t.name}")
