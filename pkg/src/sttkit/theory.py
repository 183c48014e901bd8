"""Theories as immutable values: a signature plus named axioms,
conservative definitions, and theorems carrying proof records.

Proofs are never checked here; a record says how a statement was
justified (traditional prose, model evidence, assumption, or transport
along a morphism) and the toolchain preserves that provenance.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import kernel as k
from .errors import ConstantExists, DuplicateName, NotASentence, NotClosed


# proof records


class ProofRecord:
    __slots__ = ()


@dataclass(frozen=True)
class Traditional(ProofRecord):
    text: str


@dataclass(frozen=True)
class ModelChecked(ProofRecord):
    model_ids: tuple[str, ...]


@dataclass(frozen=True)
class Assumed(ProofRecord):
    pass


@dataclass(frozen=True)
class Transported(ProofRecord):
    source_theory: str
    morphism_id: str
    source_item: str


@dataclass(frozen=True)
class Definition:
    const_name: str
    ty: k.Type
    body: k.Expr

    def defining_axiom(self) -> k.Expr:
        return k.Eq(k.Const(self.const_name, self.ty), self.body)


@dataclass(frozen=True)
class Theorem:
    statement: k.Expr
    proof: ProofRecord


@dataclass(frozen=True)
class Theory:
    name: str
    sig: k.Signature = k.EMPTY_SIGNATURE
    axioms: dict[str, k.Expr] = field(default_factory=dict)
    definitions: dict[str, Definition] = field(default_factory=dict)
    theorems: dict[str, Theorem] = field(default_factory=dict)
    infinite_only: bool = False

    # -- queries ------------------------------------------------------------

    def vocabulary(self) -> k.Signature:
        """Base signature extended with every defined constant, in order."""
        sig = self.sig
        for d in self.definitions.values():
            sig = sig.with_constant(d.const_name, d.ty)
        return sig

    def item_names(self) -> set[str]:
        return set(self.axioms) | set(self.definitions) | set(self.theorems)

    def check_sentence_wellformed(self, s: k.Expr, vocab: k.Signature | None = None):
        fv = k.free_vars(s)
        if fv:
            names = ", ".join(sorted(n for n, _ in fv))
            raise NotASentence(f"free variables: {names}")
        ty = k.type_of(s, vocab if vocab is not None else self.vocabulary())
        if ty != k.BOOL:
            raise NotASentence(f"has type {ty}, not Bool")

    # -- construction (persistent: each op returns a new Theory) ------------

    def _fresh_item_name(self, name: str):
        if name in self.item_names():
            raise DuplicateName(f"{name} already names an item of {self.name}")

    def add_axiom(self, name: str, s: k.Expr) -> "Theory":
        self._fresh_item_name(name)
        self.check_sentence_wellformed(s)
        return replace(self, axioms={**self.axioms, name: s})

    def add_definition(self, name: str, const_name: str, body: k.Expr) -> "Theory":
        self._fresh_item_name(name)
        vocab = self.vocabulary()
        if const_name in vocab.constants:
            raise ConstantExists(const_name)
        if not k.is_closed(body):
            names = ", ".join(sorted(k.free_names(body)))
            raise NotClosed(f"defining expression has free variables: {names}")
        ty = k.type_of(body, vocab)
        d = Definition(const_name, ty, body)
        return replace(self, definitions={**self.definitions, name: d})

    def add_theorem(self, name: str, s: k.Expr, proof: ProofRecord) -> "Theory":
        self._fresh_item_name(name)
        self.check_sentence_wellformed(s)
        return replace(self, theorems={**self.theorems, name: Theorem(s, proof)})

    def with_base(self, name: str) -> "Theory":
        return replace(self, sig=self.sig.with_base(name))

    def with_constant(self, name: str, ty: k.Type) -> "Theory":
        if name in self.vocabulary().constants:
            raise ConstantExists(name)
        return replace(self, sig=self.sig.with_constant(name, ty))

    def mark_infinite_only(self) -> "Theory":
        return replace(self, infinite_only=True)
