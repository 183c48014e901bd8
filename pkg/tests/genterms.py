"""Random well-typed term and model generation for tests.

All randomness flows through an explicit random.Random so every test
fixes its own seed schedule.
"""

from __future__ import annotations

import random

from sttkit import kernel as k
from sttkit.model import FiniteModel, carrier_size, carrier_values

VAR_NAMES = ["x", "y", "z", "u", "v", "w", "s", "t", "p", "q"]

CARRIER_CAP = 300


def small_types(sig: k.Signature) -> list[k.Type]:
    bases = [k.Base(b) for b in sorted(sig.base_types)]
    types: list[k.Type] = [k.BOOL] + bases
    for b in bases:
        types.append(k.Fun(b, b))
        types.append(k.Fun(b, k.BOOL))
        types.append(k.Prod(b, b))
        types.append(k.SetOf(b))
    if bases:
        types.append(k.Prod(bases[0], k.BOOL))
    return types


class TermGen:
    """Generates closed (or env-open) well-typed terms over a signature."""

    def __init__(self, rng: random.Random, sig: k.Signature,
                 types: list[k.Type] | None = None, allow_guards: bool = True):
        self.rng = rng
        self.sig = sig
        self.types = types or small_types(sig)
        self.allow_guards = allow_guards
        self.counter = 0

    def fresh_var(self) -> str:
        name = VAR_NAMES[self.counter % len(VAR_NAMES)]
        bump = self.counter // len(VAR_NAMES)
        self.counter += 1
        return name if bump == 0 else f"{name}{bump}"

    def pick_type(self) -> k.Type:
        return self.rng.choice(self.types)

    def sentence(self, depth: int) -> k.Expr:
        self.counter = 0
        return self.expr(k.BOOL, depth, {})

    def expr(self, ty: k.Type, depth: int, env: dict[str, k.Type]) -> k.Expr:
        if depth <= 0:
            return self.leaf(ty, env)
        makers = self.makers_for(ty, depth, env)
        for _ in range(6):
            make = self.rng.choice(makers)
            out = make()
            if out is not None:
                return out
        return self.leaf(ty, env)

    def leaf(self, ty: k.Type, env: dict[str, k.Type]) -> k.Expr:
        options: list[k.Expr] = []
        options += [k.Var(n, t) for n, t in env.items() if t == ty]
        options += [k.Const(n, t) for n, t in self.sig.constants.items()
                    if t == ty]
        if options:
            return self.rng.choice(options)
        # No leaf available: build the cheapest canonical inhabitant.
        match ty:
            case k.Bool():
                return self._tautology(env)
            case k.Fun(dom, cod):
                v = self.fresh_var()
                return k.Abs(v, dom, self.leaf(cod, {**env, v: dom}))
            case k.Prod(left, right):
                return k.Pair(self.leaf(left, env), self.leaf(right, env))
            case k.SetOf(elem):
                return k.SetLit(elem, ())
            case k.Base(_):
                # No constant or variable of a bare base type: describe one.
                v = self.fresh_var()
                return k.Iota(v, ty, self._tautology({**env, v: ty}))
        raise AssertionError(f"no inhabitant strategy for {ty}")

    def _tautology(self, env) -> k.Expr:
        v = self.fresh_var()
        ty = self.pick_type()
        return k.Forall(v, ty, k.Eq(k.Var(v, ty), k.Var(v, ty)))

    def makers_for(self, ty, depth, env):
        rng = self.rng
        d = depth - 1

        def sub(t, e=None):
            return self.expr(t, d, e if e is not None else env)

        def mk_leaf():
            return self.leaf(ty, env)

        def mk_app():
            arg_ty = self.pick_type()
            fn = sub(k.Fun(arg_ty, ty))
            return k.App(fn, sub(arg_ty))

        def mk_iota():
            v = self.fresh_var()
            return k.Iota(v, ty, sub(k.BOOL, {**env, v: ty}))

        def mk_proj():
            other = self.pick_type()
            if rng.random() < 0.5:
                return k.Proj1(sub(k.Prod(ty, other)))
            return k.Proj2(sub(k.Prod(other, ty)))

        makers = [mk_leaf, mk_app, mk_proj]
        if not isinstance(ty, k.Bool) and ty in self.types:
            makers.append(mk_iota)  # iota enumerates its carrier in eval

        match ty:
            case k.Bool():
                def mk_eq():
                    t = self.pick_type()
                    return k.Eq(sub(t), sub(t))

                def mk_conn():
                    ctor = rng.choice([k.And, k.Or, k.Implies, k.Iff])
                    return ctor(sub(k.BOOL), sub(k.BOOL))

                def mk_not():
                    return k.Not(sub(k.BOOL))

                def mk_quant():
                    v = self.fresh_var()
                    ctor = rng.choice([k.Forall, k.Exists])
                    vt = self.pick_type()
                    return ctor(v, vt, sub(k.BOOL, {**env, v: vt}))

                def mk_defined():
                    return k.IsDefined(sub(self.pick_type()))

                def mk_member():
                    t = self.pick_type()
                    return k.Member(sub(t), sub(k.SetOf(t)))

                def mk_bool_iota():
                    v = self.fresh_var()
                    return k.Iota(v, k.BOOL, sub(k.BOOL, {**env, v: k.BOOL}))

                makers += [mk_eq, mk_conn, mk_conn, mk_not, mk_quant,
                           mk_quant, mk_defined, mk_member, mk_bool_iota]
            case k.Fun(dom, cod):
                def mk_abs():
                    v = self.fresh_var()
                    return k.Abs(v, dom, sub(cod, {**env, v: dom}))

                makers += [mk_abs, mk_abs]
                if self.allow_guards:
                    def mk_guarded():
                        v = self.fresh_var()
                        guard = sub(k.SetOf(dom))
                        return k.GuardedAbs(v, dom, guard,
                                            sub(cod, {**env, v: dom}))
                    makers.append(mk_guarded)
            case k.Prod(left, right):
                def mk_pair():
                    return k.Pair(sub(left), sub(right))
                makers += [mk_pair, mk_pair]
            case k.SetOf(elem):
                def mk_setlit():
                    n = rng.randrange(0, 3)
                    return k.SetLit(elem, tuple(sub(elem) for _ in range(n)))
                makers += [mk_setlit, mk_setlit]
        return makers


# ---------------------------------------------------------------------------
# random signatures and models


def random_signature(rng: random.Random, base: str = "M") -> k.Signature:
    b = k.Base(base)
    sig = k.Signature(frozenset({base}), {})
    pool = [
        ("c", b), ("d", b),
        ("f", k.Fun(b, b)), ("g", k.Fun(b, b)),
        ("op", k.fun_type(b, b, b)),
        ("p", k.Fun(b, k.BOOL)),
        ("rel", k.fun_type(b, b, k.BOOL)),
        ("ns", k.SetOf(b)),
        ("pair0", k.Prod(b, b)),
    ]
    n = rng.randrange(3, len(pool) + 1)
    for name, ty in rng.sample(pool, n):
        sig = sig.with_constant(name, ty)
    return sig


def random_value(rng: random.Random, model: FiniteModel, ty: k.Type,
                 partial_rate: float = 0.15):
    """Sample a value without enumerating the whole (possibly huge) carrier."""
    from sttkit.model import Elem, FuncV, SetV, Truth, TupleV
    match ty:
        case k.Bool():
            return Truth(rng.random() < 0.5)
        case k.Base(name):
            return Elem(rng.choice(model.carriers[name]))
        case k.Fun(dom, cod):
            pairs = []
            for a in carrier_values(model, dom, budget=CARRIER_CAP):
                if rng.random() >= partial_rate:
                    pairs.append((a, random_value(rng, model, cod, partial_rate)))
            return FuncV.from_pairs(pairs)
        case k.Prod(left, right):
            return TupleV(random_value(rng, model, left, partial_rate),
                          random_value(rng, model, right, partial_rate))
        case k.SetOf(elem):
            members = [x for x in carrier_values(model, elem, budget=CARRIER_CAP)
                       if rng.random() < 0.5]
            return SetV.from_iter(members)
    raise AssertionError(ty)


def random_model(rng: random.Random, sig: k.Signature,
                 max_carrier: int = 3) -> FiniteModel:
    carriers = {b: tuple(str(i) for i in range(rng.randrange(1, max_carrier + 1)))
                for b in sorted(sig.base_types)}
    model = FiniteModel(carriers, {}, "random")
    for name, ty in sig.constants.items():
        model.const_interp[name] = random_value(rng, model, ty)
    return model


def generation_types(sig: k.Signature, model: FiniteModel) -> list[k.Type]:
    """Types whose carriers stay small enough to enumerate in eval."""
    out = []
    for ty in small_types(sig):
        try:
            if carrier_size(model, ty, budget=CARRIER_CAP) <= CARRIER_CAP:
                out.append(ty)
        except Exception:
            pass
    return out
