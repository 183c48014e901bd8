"""Theory graphs: directed multigraphs of theories and morphisms.

Parallel edges and self-loops are allowed, so every query takes an
explicit path-length bound.  Provenance for reachable items is the
shortest path, ties broken lexicographically by morphism id.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import kernel as k
from .errors import DanglingEndpoint, DuplicateName, SttError, UnknownTheory
from .morphism import (
    Asserted,
    DischargedByAxiom,
    DischargedByTheorem,
    ModelEvidence,
    Morphism,
    Open,
    compose,
    generate_obligations,
    identity_morphism,
    translate_expr,
    validate_morphism,
)
from .theory import Theory, Transported


@dataclass(frozen=True)
class TheoryGraph:
    theories: dict[str, Theory] = field(default_factory=dict)
    morphisms: dict[str, Morphism] = field(default_factory=dict)

    def theory(self, name: str) -> Theory:
        t = self.theories.get(name)
        if t is None:
            raise UnknownTheory(name)
        return t

    def add_theory(self, t: Theory) -> "TheoryGraph":
        if t.name in self.theories:
            raise DuplicateName(f"theory {t.name}")
        return TheoryGraph({**self.theories, t.name: t}, dict(self.morphisms))

    def replace_theory(self, t: Theory) -> "TheoryGraph":
        if t.name not in self.theories:
            raise UnknownTheory(t.name)
        return TheoryGraph({**self.theories, t.name: t}, dict(self.morphisms))

    def add_morphism(self, m: Morphism) -> "TheoryGraph":
        if m.id in self.morphisms:
            raise DuplicateName(f"morphism {m.id}")
        for endpoint in (m.source, m.target):
            if endpoint not in self.theories:
                raise DanglingEndpoint(
                    f"morphism {m.id} references unknown theory {endpoint}")
        validate_morphism(m, self.theories[m.source], self.theories[m.target])
        return TheoryGraph(dict(self.theories), {**self.morphisms, m.id: m})


def paths(g: TheoryGraph, frm: str, to: str, max_length: int
          ) -> list[tuple[str, ...]]:
    """All edge-id sequences from `frm` to `to` of length <= max_length,
    in lexicographic order (the empty path appears when frm == to)."""
    g.theory(frm)
    g.theory(to)
    out: list[tuple[str, ...]] = []
    by_source: dict[str, list[str]] = {}
    for mid in sorted(g.morphisms):
        by_source.setdefault(g.morphisms[mid].source, []).append(mid)

    def walk(cur: str, acc: list[str]):
        if cur == to:
            out.append(tuple(acc))
        if len(acc) == max_length:
            return
        for mid in by_source.get(cur, ()):
            acc.append(mid)
            walk(g.morphisms[mid].target, acc)
            acc.pop()

    walk(frm, [])
    return sorted(out)


def compose_path(g: TheoryGraph, frm: str, path: tuple[str, ...]) -> Morphism:
    """Fold a path of morphism ids into one morphism (identity for the
    empty path)."""
    if not path:
        return identity_morphism(g.theory(frm))
    m = g.morphisms[path[0]]
    for mid in path[1:]:
        nxt = g.morphisms[mid]
        m = compose(m, nxt, g.theory(m.source), g.theory(nxt.source),
                    g.theory(nxt.target))
    return m


@dataclass(frozen=True)
class AvailableItem:
    source: str
    name: str
    kind: str  # "definition" | "theorem"
    path: tuple[str, ...]
    translated: k.Expr


def available_items(g: TheoryGraph, t: str, max_length: int) -> list[AvailableItem]:
    """Definitions and theorems reachable into `t` along morphism paths.

    Entries are grouped by the translated content: two paths producing
    alpha-equal translations collapse to one entry carrying the
    canonical (shortest, then lexicographically least) path, while
    parallel morphisms that translate an item differently stay distinct.
    """
    g.theory(t)
    best: dict[tuple[str, str, str], AvailableItem] = {}
    for src_name in sorted(g.theories):
        src = g.theories[src_name]
        items = [("definition", name, d.body) for name, d in src.definitions.items()]
        items += [("theorem", name, thm.statement) for name, thm in src.theorems.items()]
        if not items:
            continue
        for path in paths(g, src_name, t, max_length):
            m = compose_path(g, src_name, path)
            target = g.theory(t)
            for kind, name, expr in items:
                translated = translate_expr(m, expr, src, target)
                key = (src_name, name, k.alpha_key(translated))
                prior = best.get(key)
                if prior is None or (len(path), path) < (len(prior.path), prior.path):
                    best[key] = AvailableItem(src_name, name, kind, path, translated)
    return sorted(best.values(),
                  key=lambda a: (a.source, a.name, len(a.path), a.path))


# ---------------------------------------------------------------------------
# validation report


@dataclass
class MorphismSummary:
    id: str
    source: str
    target: str
    kind: str
    open: tuple[str, ...]
    asserted: int
    model_evidence: int
    by_axiom: int
    by_theorem: int
    errors: tuple[str, ...]


@dataclass
class TheorySummary:
    name: str
    axioms: int
    definitions: int
    theorems: int
    errors: tuple[str, ...]


@dataclass
class GraphReport:
    theories: list[TheorySummary]
    morphisms: list[MorphismSummary]
    dangling: list[str]

    def open_count(self) -> int:
        return sum(len(m.open) for m in self.morphisms)

    def error_count(self) -> int:
        return (len(self.dangling)
                + sum(len(t.errors) for t in self.theories)
                + sum(len(m.errors) for m in self.morphisms))

    def is_clean(self) -> bool:
        return self.open_count() == 0 and self.error_count() == 0


def validate(g: TheoryGraph) -> GraphReport:
    """Re-check every stored sentence, morphism ledger, and provenance
    reference; findings go in the report rather than exceptions."""
    theories = [_validate_theory(g, t) for _, t in sorted(g.theories.items())]
    morphisms = [_validate_morphism_entry(g, m)
                 for _, m in sorted(g.morphisms.items())]
    dangling = []
    for mid, m in sorted(g.morphisms.items()):
        for endpoint in (m.source, m.target):
            if endpoint not in g.theories:
                dangling.append(f"morphism {mid}: unknown theory {endpoint}")
    return GraphReport(theories, morphisms, dangling)


def _validate_theory(g: TheoryGraph, t: Theory) -> TheorySummary:
    errors = []
    sig = t.sig
    for name, d in t.definitions.items():
        try:
            if not k.is_closed(d.body):
                raise SttError(f"definition {name} not closed")
            got = k.type_of(d.body, sig)
            if got != d.ty:
                errors.append(f"definition {name}: type drift {got} vs {d.ty}")
        except SttError as err:
            errors.append(f"definition {name}: {err.message}")
        sig = sig.with_constant(d.const_name, d.ty)
    vocab = t.vocabulary()
    for group, entries in (("axiom", t.axioms.items()),
                           ("theorem", ((n, x.statement) for n, x in t.theorems.items()))):
        for name, stmt in entries:
            try:
                t.check_sentence_wellformed(stmt, vocab)
            except SttError as err:
                errors.append(f"{group} {name}: {err.message}")
    for name, thm in t.theorems.items():
        proof = thm.proof
        if isinstance(proof, Transported):
            err = _check_provenance(g, t, name, proof)
            if err:
                errors.append(err)
    return TheorySummary(t.name, len(t.axioms), len(t.definitions),
                         len(t.theorems), tuple(errors))


def _check_provenance(g: TheoryGraph, t: Theory, name: str,
                      proof: Transported) -> str | None:
    m = g.morphisms.get(proof.morphism_id)
    src = g.theories.get(proof.source_theory)
    if m is None or src is None:
        return f"theorem {name}: transported from unknown {proof.source_theory}/{proof.morphism_id}"
    if proof.source_item not in src.theorems:
        return f"theorem {name}: source item {proof.source_item} missing"
    try:
        again = translate_expr(m, src.theorems[proof.source_item].statement, src, t)
    except SttError as err:
        return f"theorem {name}: retranslation failed: {err.message}"
    if not k.alpha_equal(again, t.theorems[name].statement):
        return f"theorem {name}: retranslation differs from stored sentence"
    return None


def _validate_morphism_entry(g: TheoryGraph, m: Morphism) -> MorphismSummary:
    errors: list[str] = []
    counts = {Asserted: 0, ModelEvidence: 0, DischargedByAxiom: 0,
              DischargedByTheorem: 0}
    open_names: list[str] = []
    src = g.theories.get(m.source)
    tgt = g.theories.get(m.target)
    if src is None or tgt is None:
        return MorphismSummary(m.id, m.source, m.target, m.kind, (), 0, 0, 0, 0,
                               ("dangling endpoint",))
    try:
        validate_morphism(m, src, tgt)
        _, refreshed = generate_obligations(m, src, tgt)
        for name, status in refreshed.obligations.items():
            if isinstance(status, Open):
                open_names.append(name)
            else:
                counts[type(status)] += 1
            if isinstance(status, DischargedByAxiom) and status.axiom not in tgt.axioms:
                errors.append(f"obligation {name}: unknown axiom {status.axiom}")
            if isinstance(status, DischargedByTheorem) and status.theorem not in tgt.theorems:
                errors.append(f"obligation {name}: unknown theorem {status.theorem}")
    except SttError as err:
        errors.append(err.message)
    return MorphismSummary(
        m.id, m.source, m.target, m.kind, tuple(sorted(open_names)),
        counts[Asserted], counts[ModelEvidence], counts[DischargedByAxiom],
        counts[DischargedByTheorem], tuple(errors))
