"""Theory morphisms: translation of types and expressions, obligation
ledgers, transport with provenance, and composition.

A morphism totally maps the source's primitive vocabulary.  Constants
the source *defines* travel differently: a translated occurrence uses
the already-transported counterpart in the target when present, and
otherwise expands the definition inline.  An inclusion is an identity
mapping and requires the source vocabulary (definitions included) to be
present verbatim in the target.

Meaning preservation is tracked, not proved: each translated source
axiom gets an obligation, auto-discharged when it is alpha-equal to a
target axiom or theorem, and otherwise settled by assertion or model
evidence, or left open.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import kernel as k
from .errors import (
    NameClash,
    OpenObligations,
    TheoryMismatch,
    TypeMismatch,
    UnknownItem,
    UnmappedBaseType,
    UnmappedConstant,
)
from .theory import Theory, Transported


# obligation statuses

class ObligationStatus:
    __slots__ = ()


@dataclass(frozen=True)
class Open(ObligationStatus):
    pass


@dataclass(frozen=True)
class DischargedByAxiom(ObligationStatus):
    axiom: str


@dataclass(frozen=True)
class DischargedByTheorem(ObligationStatus):
    theorem: str


@dataclass(frozen=True)
class ModelEvidence(ObligationStatus):
    models: tuple[str, ...]


@dataclass(frozen=True)
class Asserted(ObligationStatus):
    justification: str


INCLUSION = "inclusion"
GENERAL = "general"


@dataclass(frozen=True)
class Morphism:
    id: str
    source: str
    target: str
    type_map: dict[str, k.Type] = field(default_factory=dict)
    const_map: dict[str, k.Expr] = field(default_factory=dict)
    kind: str = GENERAL
    obligations: dict[str, ObligationStatus] = field(default_factory=dict)

    def open_obligations(self) -> list[str]:
        return [n for n, s in self.obligations.items() if isinstance(s, Open)]


def identity_morphism(t: Theory, mid: str | None = None) -> Morphism:
    return Morphism(mid or f"id-{t.name}", t.name, t.name, kind=INCLUSION)


# ---------------------------------------------------------------------------
# translation


def translate_type(m: Morphism, ty: k.Type) -> k.Type:
    if m.kind == INCLUSION:
        return ty
    match ty:
        case k.Bool():
            return ty
        case k.Base(name):
            mapped = m.type_map.get(name)
            if mapped is None:
                raise UnmappedBaseType(f"{name} not mapped by {m.id}")
            return mapped
        case k.Fun(dom, cod):
            return k.Fun(translate_type(m, dom), translate_type(m, cod))
        case k.Prod(left, right):
            return k.Prod(translate_type(m, left), translate_type(m, right))
        case k.SetOf(elem):
            return k.SetOf(translate_type(m, elem))
    raise TypeError(f"not a Type: {ty!r}")


def translate_expr(m: Morphism, e: k.Expr, source: Theory, target: Theory) -> k.Expr:
    """Homomorphic translation of a source expression into the target.

    The result is type-checked against the target vocabulary; a failure
    there signals an ill-formed morphism.
    """
    if m.kind == INCLUSION:
        out = e
    else:
        src_defs = {d.const_name: d for d in source.definitions.values()}
        tgt_vocab = target.vocabulary()

        def tr_const(name: str, ty: k.Type) -> k.Expr:
            if name in m.const_map:
                return m.const_map[name]
            if name in src_defs:
                transported = f"{name}@{m.id}"
                want = translate_type(m, ty)
                if tgt_vocab.constants.get(transported) == want:
                    return k.Const(transported, want)
                return go(src_defs[name].body)
            raise UnmappedConstant(f"{name} not mapped by {m.id}")

        def go(e: k.Expr) -> k.Expr:
            match e:
                case k.Var(n, ty):
                    return k.Var(n, translate_type(m, ty))
                case k.Const(n, ty):
                    return tr_const(n, ty)
                case k.App(f, a):
                    return k.App(go(f), go(a))
                case k.Abs(v, ty, b):
                    return k.Abs(v, translate_type(m, ty), go(b))
                case k.GuardedAbs(v, ty, g, b):
                    return k.GuardedAbs(v, translate_type(m, ty), go(g), go(b))
                case k.Eq(l, r):
                    return k.Eq(go(l), go(r))
                case k.Iota(v, ty, b):
                    return k.Iota(v, translate_type(m, ty), go(b))
                case k.Not(x):
                    return k.Not(go(x))
                case k.And(l, r):
                    return k.And(go(l), go(r))
                case k.Or(l, r):
                    return k.Or(go(l), go(r))
                case k.Implies(l, r):
                    return k.Implies(go(l), go(r))
                case k.Iff(l, r):
                    return k.Iff(go(l), go(r))
                case k.Forall(v, ty, b):
                    return k.Forall(v, translate_type(m, ty), go(b))
                case k.Exists(v, ty, b):
                    return k.Exists(v, translate_type(m, ty), go(b))
                case k.IsDefined(x):
                    return k.IsDefined(go(x))
                case k.Pair(f, s):
                    return k.Pair(go(f), go(s))
                case k.Proj1(x):
                    return k.Proj1(go(x))
                case k.Proj2(x):
                    return k.Proj2(go(x))
                case k.SetLit(ty, ms):
                    return k.SetLit(translate_type(m, ty), tuple(go(x) for x in ms))
                case k.Member(i, c):
                    return k.Member(go(i), go(c))
            raise TypeError(f"not an Expr: {e!r}")

        out = go(e)
    k.type_of(out, target.vocabulary(), dict(k.free_vars(out)))
    return out


def validate_morphism(m: Morphism, source: Theory, target: Theory):
    """Check endpoints, totality on the primitive vocabulary, and type
    correctness of every mapped constant."""
    if m.source != source.name or m.target != target.name:
        raise TheoryMismatch(
            f"{m.id} maps {m.source}->{m.target}, got {source.name}->{target.name}")
    if m.kind == INCLUSION:
        if m.type_map or m.const_map:
            raise TheoryMismatch(f"inclusion {m.id} carries nonidentity maps")
        tgt_vocab = target.vocabulary()
        for base in source.sig.base_types:
            if base not in target.sig.base_types:
                raise UnmappedBaseType(
                    f"inclusion {m.id}: base type {base} missing from {target.name}")
        for name, ty in source.vocabulary().constants.items():
            if tgt_vocab.constants.get(name) != ty:
                raise UnmappedConstant(
                    f"inclusion {m.id}: constant {name} : {ty} missing from {target.name}")
        return
    tgt_vocab = target.vocabulary()
    for base in source.sig.base_types:
        if base not in m.type_map:
            raise UnmappedBaseType(f"{m.id} does not map base type {base}")
    for name, ty in source.sig.constants.items():
        image = m.const_map.get(name)
        if image is None:
            raise UnmappedConstant(f"{m.id} does not map constant {name}")
        if not k.is_closed(image):
            raise UnmappedConstant(
                f"{m.id} maps {name} to an open expression")
        want = translate_type(m, ty)
        got = k.type_of(image, tgt_vocab)
        if got != want:
            raise TypeMismatch(want, got, f"image of {name} under {m.id}")


# ---------------------------------------------------------------------------
# obligations


def generate_obligations(m: Morphism, source: Theory, target: Theory
                         ) -> tuple[dict[str, k.Expr], Morphism]:
    """Translate every source axiom and refresh the ledger.

    A translated sentence alpha-equal to a target axiom or theorem is
    discharged automatically; explicit statuses already on the ledger
    are kept; everything else is Open.
    """
    translated: dict[str, k.Expr] = {}
    statuses: dict[str, ObligationStatus] = {}
    for name, ax in source.axioms.items():
        sentence = translate_expr(m, ax, source, target)
        translated[name] = sentence
        status: ObligationStatus | None = None
        for tname, tax in target.axioms.items():
            if k.alpha_equal(sentence, tax):
                status = DischargedByAxiom(tname)
                break
        if status is None:
            for tname, thm in target.theorems.items():
                if k.alpha_equal(sentence, thm.statement):
                    status = DischargedByTheorem(tname)
                    break
        if status is None:
            prior = m.obligations.get(name)
            status = prior if prior is not None and not isinstance(prior, Open) \
                else Open()
        statuses[name] = status
    return translated, replace(m, obligations=statuses)


# ---------------------------------------------------------------------------
# transport


def transport(m: Morphism, item: str, source: Theory, target: Theory,
              new_name: str | None = None) -> Theory:
    """Install a translated theorem or definition in the target with
    provenance.  Re-transporting an identical item is a no-op; a name
    collision with different content is an error."""
    missing = set(source.axioms) - set(m.obligations)
    if missing or m.open_obligations():
        names = sorted(set(m.open_obligations()) | missing)
        raise OpenObligations(f"{m.id} has open obligations: {', '.join(names)}")
    if item in source.theorems:
        stmt = translate_expr(m, source.theorems[item].statement, source, target)
        name = new_name or f"{item}@{m.id}"
        proof = Transported(source.name, m.id, item)
        existing = target.theorems.get(name)
        if existing is not None:
            if k.alpha_equal(existing.statement, stmt) and existing.proof == proof:
                return target
            raise NameClash(f"theorem {name} already present with different content")
        if name in target.item_names():
            raise NameClash(name)
        return target.add_theorem(name, stmt, proof)
    if item in source.definitions:
        d = source.definitions[item]
        body = translate_expr(m, d.body, source, target)
        name = new_name or f"{item}@{m.id}"
        const_name = f"{d.const_name}@{m.id}" if new_name is None else new_name
        existing = target.definitions.get(name)
        if existing is not None:
            if existing.const_name == const_name and k.alpha_equal(existing.body, body):
                return target
            raise NameClash(f"definition {name} already present with different content")
        if name in target.item_names():
            raise NameClash(name)
        return target.add_definition(name, const_name, body)
    raise UnknownItem(f"{source.name} has no theorem or definition {item}")


# ---------------------------------------------------------------------------
# composition


def compose(m1: Morphism, m2: Morphism, source: Theory, middle: Theory,
            target: Theory) -> Morphism:
    """Composite morphism applying m1 then m2 (maps composed pointwise)."""
    if m1.target != m2.source:
        raise TheoryMismatch(
            f"cannot compose {m1.id} ({m1.target}) with {m2.id} ({m2.source})")
    mid = f"{m1.id};{m2.id}"
    if m1.kind == INCLUSION and m2.kind == INCLUSION:
        return Morphism(mid, m1.source, m2.target, kind=INCLUSION)
    type_map = {}
    for base in source.sig.base_types:
        first = m1.type_map.get(base, k.Base(base)) if m1.kind != INCLUSION \
            else k.Base(base)
        type_map[base] = translate_type(m2, first)
    const_map = {}
    for name, ty in source.sig.constants.items():
        first = m1.const_map.get(name, k.Const(name, ty)) if m1.kind != INCLUSION \
            else k.Const(name, ty)
        const_map[name] = translate_expr(m2, first, middle, target)
    return Morphism(mid, m1.source, m2.target, type_map, const_map, GENERAL)
