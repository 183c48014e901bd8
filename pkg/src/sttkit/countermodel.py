"""Bounded exhaustive countermodel search.

Models are enumerated in lexicographic order over interpretation
tables: carrier sizes ascending, then constants in signature order,
then table cells row-major with candidate values in carrier order.
The search assigns one cell at a time and prunes a branch as soon as
some ground axiom instance is definitely false under the partial
assignment (a three-valued evaluation: true / false / not yet known).
Pruning only discards models that violate an axiom, so the enumeration
stays exhaustive and the first countermodel found is the
lexicographically least one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import kernel as k
from .errors import InfiniteOnlyTheory, SearchSpaceTooLarge
from .model import (
    FALSE,
    TRUE,
    UNDEF,
    Elem,
    FiniteModel,
    FuncV,
    Truth,
    Value,
    carrier_values,
    eval_expr,
)
from .theory import Theory

_UNKNOWN = object()  # cell not yet assigned / outcome not yet determined

DEFAULT_NODE_BUDGET = 2_000_000
DEFAULT_CELL_BUDGET = 200_000


def unfold_definitions(t: Theory, e: k.Expr) -> k.Expr:
    """Replace defined constants by their defining expressions, repeatedly."""
    by_const = {d.const_name: d.body for d in t.definitions.values()}

    def go(x: k.Expr) -> k.Expr:
        match x:
            case k.Const(name, _) if name in by_const:
                return go(by_const[name])
            case k.Var(_, _) | k.Const(_, _):
                return x
            case k.App(f, a):
                return k.App(go(f), go(a))
            case k.Abs(v, ty, b):
                return k.Abs(v, ty, go(b))
            case k.GuardedAbs(v, ty, g, b):
                return k.GuardedAbs(v, ty, go(g), go(b))
            case k.Eq(l, r):
                return k.Eq(go(l), go(r))
            case k.Iota(v, ty, b):
                return k.Iota(v, ty, go(b))
            case k.Not(a):
                return k.Not(go(a))
            case k.And(l, r):
                return k.And(go(l), go(r))
            case k.Or(l, r):
                return k.Or(go(l), go(r))
            case k.Implies(l, r):
                return k.Implies(go(l), go(r))
            case k.Iff(l, r):
                return k.Iff(go(l), go(r))
            case k.Forall(v, ty, b):
                return k.Forall(v, ty, go(b))
            case k.Exists(v, ty, b):
                return k.Exists(v, ty, go(b))
            case k.IsDefined(a):
                return k.IsDefined(go(a))
            case k.Pair(f, s):
                return k.Pair(go(f), go(s))
            case k.Proj1(a):
                return k.Proj1(go(a))
            case k.Proj2(a):
                return k.Proj2(go(a))
            case k.SetLit(ty, ms):
                return k.SetLit(ty, tuple(go(m) for m in ms))
            case k.Member(i, c):
                return k.Member(go(i), go(c))
        raise TypeError(f"not an Expr: {x!r}")

    return go(e)


def _cell(const: str, args: tuple[Value, ...] = ()) -> tuple:
    return (const, args)


class _Searcher:
    def __init__(self, t: Theory, conjecture: k.Expr, carriers: dict[str, tuple[str, ...]],
                 node_budget: int, cell_budget: int):
        self.theory = t
        self.model = FiniteModel(carriers, {}, "candidate")
        self.node_budget = node_budget
        self.cells: list[tuple] = []
        self.candidates: list[tuple[Value, ...]] = []
        self.arity: dict[str, int] = {}
        for name, ty in t.sig.constants.items():
            args, result = k.curried_args(ty)
            self.arity[name] = len(args)
            arg_space = [carrier_values(self.model, a) for a in args]
            result_vals = carrier_values(self.model, result)
            for combo in itertools.product(*arg_space):
                self.cells.append(_cell(name, combo))
                self.candidates.append(result_vals)
                if len(self.cells) > cell_budget:
                    raise SearchSpaceTooLarge(
                        f"more than {cell_budget} interpretation cells")
        self.assignment: dict[tuple, Value] = {}
        self.instances = []
        for name, ax in t.axioms.items():
            body = unfold_definitions(t, ax)
            for env in self._ground_envs(body):
                stripped, genv = self._strip_foralls(body, env)
                self.instances.append(self._compile(stripped, genv))
        self.conjecture = unfold_definitions(t, conjecture)

    def _ground_envs(self, e: k.Expr):
        envs = [{}]
        while isinstance(e, k.Forall):
            vals = carrier_values(self.model, e.var_ty)
            envs = [{**env, e.var: v} for env in envs for v in vals]
            e = e.body
        return envs

    def _strip_foralls(self, e: k.Expr, env: dict) -> tuple[k.Expr, dict]:
        while isinstance(e, k.Forall):
            e = e.body
        return (e, env)

    # -- instance compilation -----------------------------------------------
    #
    # Ground axiom instances are hot: every one may be re-checked after
    # each cell assignment.  Compiling them once into closures over the
    # assignment dict removes the tree-walking overhead; anything the
    # compiler does not specialize falls back to eval3.

    def _compile(self, e: k.Expr, env: dict):
        assignment = self.assignment

        def is_static(f):
            # During compilation no cells are assigned, so a closure
            # producing a definite value reads no cells at all.
            v = f()
            return (v is not _UNKNOWN, v)

        match e:
            case k.Var(name, _):
                v = env[name]
                return lambda: v
            case k.Const(name, _) if self.arity.get(name) == 0:
                cell = _cell(name)
                return lambda: assignment.get(cell, _UNKNOWN)
            case k.App(_, _):
                spine, args = _app_spine(e)
                if isinstance(spine, k.Const) and spine.name in self.arity \
                        and self.arity[spine.name] == len(args) > 0:
                    name = spine.name
                    argfs = [self._compile(a, env) for a in args]
                    static = [is_static(f) for f in argfs]
                    bool_node = k.synth_type(e) == k.BOOL
                    if all(ok for ok, _ in static) \
                            and not any(v is UNDEF for _, v in static):
                        cell = _cell(name, tuple(v for _, v in static))
                        return lambda: assignment.get(cell, _UNKNOWN)

                    def run_app():
                        vals = []
                        for f in argfs:
                            v = f()
                            if v is _UNKNOWN:
                                return _UNKNOWN
                            if v is UNDEF:
                                return FALSE if bool_node else UNDEF
                            vals.append(v)
                        return assignment.get(_cell(name, tuple(vals)), _UNKNOWN)
                    return run_app
                return self._fallback(e, env)
            case k.Eq(lhs, rhs):
                lf = self._compile(lhs, env)
                rf = self._compile(rhs, env)

                def run_eq():
                    l = lf()
                    r = rf()
                    if l is UNDEF or r is UNDEF:
                        return FALSE
                    if l is _UNKNOWN or r is _UNKNOWN:
                        return _UNKNOWN
                    return TRUE if l == r else FALSE
                return run_eq
            case k.Not(arg):
                f = self._compile(arg, env)

                def run_not():
                    v = f()
                    if v is _UNKNOWN:
                        return _UNKNOWN
                    return TRUE if v == FALSE else FALSE
                return run_not
            case k.And(l, r) | k.Or(l, r) | k.Implies(l, r) | k.Iff(l, r):
                lf = self._compile(l, env)
                rf = self._compile(r, env)
                return _kleene(type(e), lf, rf)
            case k.Forall(var, var_ty, body):
                subfs = [self._compile(body, {**env, var: c})
                         for c in carrier_values(self.model, var_ty)]
                return _kleene_all(subfs)
            case k.Exists(var, var_ty, body):
                subfs = [self._compile(body, {**env, var: c})
                         for c in carrier_values(self.model, var_ty)]
                return _kleene_any(subfs)
            case k.IsDefined(arg):
                f = self._compile(arg, env)

                def run_def():
                    v = f()
                    if v is _UNKNOWN:
                        return _UNKNOWN
                    return TRUE if v is not UNDEF else FALSE
                return run_def
            case k.Iota(var, var_ty, body):
                vals = carrier_values(self.model, var_ty)
                subfs = [self._compile(body, {**env, var: c}) for c in vals]
                boolish = var_ty == k.BOOL

                def run_iota():
                    trues = []
                    unknown = 0
                    for c, f in zip(vals, subfs):
                        r = f()
                        if r is _UNKNOWN:
                            unknown += 1
                        elif r == TRUE:
                            trues.append(c)
                    if len(trues) > 1:
                        return FALSE if boolish else UNDEF
                    if unknown:
                        return _UNKNOWN
                    if len(trues) == 1:
                        return trues[0]
                    return FALSE if boolish else UNDEF
                return run_iota
            case k.Member(item, coll):
                itf = self._compile(item, env)
                cf = self._compile(coll, env)

                def run_member():
                    iv = itf()
                    cv = cf()
                    if iv is UNDEF or cv is UNDEF:
                        return FALSE
                    if iv is _UNKNOWN or cv is _UNKNOWN:
                        return _UNKNOWN
                    return TRUE if cv.contains(iv) else FALSE
                return run_member
            case _:
                return self._fallback(e, env)

    def _fallback(self, e: k.Expr, env: dict):
        return lambda: self.eval3(e, env)

    # -- three-valued evaluation over the partial assignment ---------------

    def eval3(self, e: k.Expr, env: dict):
        match e:
            case k.Var(name, _):
                return env[name]
            case k.Const(name, _):
                if self.arity[name] == 0:
                    return self.assignment.get(_cell(name), _UNKNOWN)
                return self._whole_function(name)
            case k.App(_, _):
                spine, args = _app_spine(e)
                if isinstance(spine, k.Const) and spine.name in self.arity \
                        and self.arity[spine.name] == len(args):
                    vals = []
                    for a in args:
                        v = self.eval3(a, env)
                        if v is _UNKNOWN:
                            return _UNKNOWN
                        if v is UNDEF:
                            return self._bool3(e, UNDEF)
                        vals.append(v)
                    got = self.assignment.get(_cell(spine.name, tuple(vals)), _UNKNOWN)
                    return self._bool3(e, got) if got is not _UNKNOWN else _UNKNOWN
                fv = self.eval3(e.fn, env)
                if fv is _UNKNOWN:
                    return _UNKNOWN
                av = self.eval3(e.arg, env)
                if av is _UNKNOWN:
                    return _UNKNOWN
                if fv is UNDEF or av is UNDEF:
                    return self._bool3(e, UNDEF)
                return self._bool3(e, fv.lookup(av))
            case k.Abs(var, var_ty, body):
                pairs = []
                for c in carrier_values(self.model, var_ty):
                    r = self.eval3(body, {**env, var: c})
                    if r is _UNKNOWN:
                        return _UNKNOWN
                    if r is not UNDEF:
                        pairs.append((c, r))
                return FuncV.from_pairs(pairs)
            case k.GuardedAbs(var, _, guard, body):
                gv = self.eval3(guard, env)
                if gv is _UNKNOWN:
                    return _UNKNOWN
                if gv is UNDEF:
                    return UNDEF
                pairs = []
                for c in gv.members:
                    r = self.eval3(body, {**env, var: c})
                    if r is _UNKNOWN:
                        return _UNKNOWN
                    if r is not UNDEF:
                        pairs.append((c, r))
                return FuncV.from_pairs(pairs)
            case k.Eq(lhs, rhs):
                lv = self.eval3(lhs, env)
                rv = self.eval3(rhs, env)
                if lv is UNDEF or rv is UNDEF:
                    return FALSE
                if lv is _UNKNOWN or rv is _UNKNOWN:
                    return _UNKNOWN
                return Truth(lv == rv)
            case k.Iota(var, var_ty, body):
                trues = []
                unknown = 0
                for c in carrier_values(self.model, var_ty):
                    r = self.eval3(body, {**env, var: c})
                    if r is _UNKNOWN:
                        unknown += 1
                    elif r == TRUE:
                        trues.append(c)
                if len(trues) > 1:
                    return self._bool3(e, UNDEF)
                if unknown:
                    return _UNKNOWN
                if len(trues) == 1:
                    return trues[0]
                return self._bool3(e, UNDEF)
            case k.Not(arg):
                v = self.eval3(arg, env)
                if v is _UNKNOWN:
                    return _UNKNOWN
                return Truth(v == FALSE)
            case k.And(l, r):
                lv = self.eval3(l, env)
                if lv == FALSE:
                    return FALSE
                rv = self.eval3(r, env)
                if rv == FALSE:
                    return FALSE
                if lv is _UNKNOWN or rv is _UNKNOWN:
                    return _UNKNOWN
                return TRUE
            case k.Or(l, r):
                lv = self.eval3(l, env)
                if lv == TRUE:
                    return TRUE
                rv = self.eval3(r, env)
                if rv == TRUE:
                    return TRUE
                if lv is _UNKNOWN or rv is _UNKNOWN:
                    return _UNKNOWN
                return FALSE
            case k.Implies(l, r):
                lv = self.eval3(l, env)
                if lv == FALSE:
                    return TRUE
                rv = self.eval3(r, env)
                if rv == TRUE:
                    return TRUE
                if lv is _UNKNOWN or rv is _UNKNOWN:
                    return _UNKNOWN
                return FALSE
            case k.Iff(l, r):
                lv = self.eval3(l, env)
                rv = self.eval3(r, env)
                if lv is _UNKNOWN or rv is _UNKNOWN:
                    return _UNKNOWN
                return Truth(lv == rv)
            case k.Forall(var, var_ty, body):
                unknown = False
                for c in carrier_values(self.model, var_ty):
                    r = self.eval3(body, {**env, var: c})
                    if r == FALSE:
                        return FALSE
                    if r is _UNKNOWN:
                        unknown = True
                return _UNKNOWN if unknown else TRUE
            case k.Exists(var, var_ty, body):
                unknown = False
                for c in carrier_values(self.model, var_ty):
                    r = self.eval3(body, {**env, var: c})
                    if r == TRUE:
                        return TRUE
                    if r is _UNKNOWN:
                        unknown = True
                return _UNKNOWN if unknown else FALSE
            case k.IsDefined(arg):
                v = self.eval3(arg, env)
                if v is _UNKNOWN:
                    return _UNKNOWN
                return Truth(v is not UNDEF)
            case k.Pair(fst, snd):
                fv = self.eval3(fst, env)
                sv = self.eval3(snd, env)
                if fv is _UNKNOWN or sv is _UNKNOWN:
                    return _UNKNOWN
                if fv is UNDEF or sv is UNDEF:
                    return UNDEF
                return _tuple_value(fv, sv)
            case k.Proj1(arg) | k.Proj2(arg):
                v = self.eval3(arg, env)
                if v is _UNKNOWN:
                    return _UNKNOWN
                if v is UNDEF:
                    return self._bool3(e, UNDEF)
                return v.fst if isinstance(e, k.Proj1) else v.snd
            case k.SetLit(_, members):
                vals = []
                for x in members:
                    v = self.eval3(x, env)
                    if v is _UNKNOWN:
                        return _UNKNOWN
                    vals.append(v)
                if any(v is UNDEF for v in vals):
                    return UNDEF
                from .model import SetV
                return SetV.from_iter(vals)
            case k.Member(item, coll):
                iv = self.eval3(item, env)
                cv = self.eval3(coll, env)
                if iv is UNDEF or cv is UNDEF:
                    return FALSE
                if iv is _UNKNOWN or cv is _UNKNOWN:
                    return _UNKNOWN
                return Truth(cv.contains(iv))
        raise TypeError(f"not an Expr: {e!r}")

    def _bool3(self, e: k.Expr, v: Value):
        if v is UNDEF and k.synth_type(e) == k.BOOL:
            return FALSE
        return v

    def _whole_function(self, name: str) -> Value:
        # Usable only once every cell of the constant is assigned.
        ty = self.theory.sig.constants[name]
        args, _ = k.curried_args(ty)

        def build(prefix: tuple[Value, ...], rest: list[k.Type]) -> Value:
            if not rest:
                got = self.assignment.get(_cell(name, prefix), _UNKNOWN)
                return got
            pairs = []
            for v in carrier_values(self.model, rest[0]):
                r = build(prefix + (v,), rest[1:])
                if r is _UNKNOWN:
                    return _UNKNOWN
                pairs.append((v, r))
            return FuncV.from_pairs(pairs)

        return build((), args)

    # -- the backtracking enumeration --------------------------------------

    def run(self) -> FiniteModel | None:
        self.nodes = 0
        return self._search(0, self.instances)

    def _search(self, i: int, pending) -> FiniteModel | None:
        if i == len(self.cells):
            return self._leaf(pending)
        cell = self.cells[i]
        for v in self.candidates[i]:
            self.nodes += 1
            if self.nodes > self.node_budget:
                raise SearchSpaceTooLarge(
                    f"exceeded search budget of {self.node_budget} assignments")
            self.assignment[cell] = v
            still = []
            ok = True
            for inst in pending:
                r = inst()
                if r == FALSE:
                    ok = False
                    break
                if r != TRUE:
                    still.append(inst)
            if ok:
                found = self._search(i + 1, still)
                if found is not None:
                    return found
            del self.assignment[cell]
        return None

    def _leaf(self, pending) -> FiniteModel | None:
        for inst in pending:  # complete assignments decide every instance
            if inst() != TRUE:
                return None
        model = self._materialize()
        if eval_expr(self.conjecture, model) == FALSE:
            return model
        return None

    def _materialize(self) -> FiniteModel:
        interp = {}
        for name in self.theory.sig.constants:
            if self.arity[name] == 0:
                interp[name] = self.assignment[_cell(name)]
            else:
                interp[name] = self._whole_function(name)
        return FiniteModel(dict(self.model.carriers), interp, "countermodel")


def _kleene(node_type, lf, rf):
    if node_type is k.And:
        def run():
            l = lf()
            if l == FALSE:
                return FALSE
            r = rf()
            if r == FALSE:
                return FALSE
            if l is _UNKNOWN or r is _UNKNOWN:
                return _UNKNOWN
            return TRUE
    elif node_type is k.Or:
        def run():
            l = lf()
            if l == TRUE:
                return TRUE
            r = rf()
            if r == TRUE:
                return TRUE
            if l is _UNKNOWN or r is _UNKNOWN:
                return _UNKNOWN
            return FALSE
    elif node_type is k.Implies:
        def run():
            l = lf()
            if l == FALSE:
                return TRUE
            r = rf()
            if r == TRUE:
                return TRUE
            if l is _UNKNOWN or r is _UNKNOWN:
                return _UNKNOWN
            return FALSE
    else:  # Iff
        def run():
            l = lf()
            r = rf()
            if l is _UNKNOWN or r is _UNKNOWN:
                return _UNKNOWN
            return TRUE if l == r else FALSE
    return run


def _kleene_all(subfs):
    def run():
        unknown = False
        for f in subfs:
            r = f()
            if r == FALSE:
                return FALSE
            if r is _UNKNOWN:
                unknown = True
        return _UNKNOWN if unknown else TRUE
    return run


def _kleene_any(subfs):
    def run():
        unknown = False
        for f in subfs:
            r = f()
            if r == TRUE:
                return TRUE
            if r is _UNKNOWN:
                unknown = True
        return _UNKNOWN if unknown else FALSE
    return run


def _tuple_value(f: Value, s: Value) -> Value:
    from .model import TupleV
    return TupleV(f, s)


def _app_spine(e: k.Expr) -> tuple[k.Expr, list[k.Expr]]:
    args: list[k.Expr] = []
    while isinstance(e, k.App):
        args.append(e.arg)
        e = e.fn
    args.reverse()
    return e, args


def find_countermodel(t: Theory, s: k.Expr, max_size: int,
                      node_budget: int = DEFAULT_NODE_BUDGET,
                      cell_budget: int = DEFAULT_CELL_BUDGET) -> FiniteModel | None:
    """Search for a finite model of all of t's axioms falsifying `s`.

    Carrier sizes run from 1 up to `max_size` per base type.  Returns
    the lexicographically first countermodel, or None when every model
    within the bound satisfies the sentence.
    """
    if t.infinite_only:
        raise InfiniteOnlyTheory(f"theory {t.name} has no finite models")
    t.check_sentence_wellformed(s)
    bases = sorted(t.sig.base_types)
    if not bases:
        sizes_iter = [()]
    else:
        sizes_iter = itertools.product(range(1, max_size + 1), repeat=len(bases))
    for sizes in sizes_iter:
        carriers = {b: tuple(str(i) for i in range(n))
                    for b, n in zip(bases, sizes)}
        searcher = _Searcher(t, s, carriers, node_budget, cell_budget)
        found = searcher.run()
        if found is not None:
            return found
    return None
