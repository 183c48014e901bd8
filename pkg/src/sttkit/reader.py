"""The on-disk theory source format.

A source file is a sequence of blocks, one directive per line:

    theory NAME ... end       bases, constants, axioms, definitions,
                              theorems (with proof blocks), notation
                              directives, an `infinite-only` flag
    morphism ID : SRC -> TGT [inclusion] ... end
    notation for THEORY ... end
    graph NAME ... end        membership lists over loaded items

Files are order-sensitive: everything must be declared before use.
Model files (`model NAME ... end`) carry carriers and operation tables
for first-order constants.  See docs/grammar.md.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from . import kernel as k
from .errors import (
    DuplicateName,
    InfiniteOnlyTheory,
    ModelDoesNotMatchSignature,
    ParseError,
    SourceSpan,
    SttError,
    UnknownTheory,
)
from .graph import TheoryGraph
from .model import (
    FALSE,
    TRUE,
    Elem,
    FiniteModel,
    FuncV,
    Truth,
    eval_expr,
    interpret_definitions,
    validate_model,
)
from .morphism import (
    Asserted,
    GENERAL,
    INCLUSION,
    ModelEvidence,
    Morphism,
    DischargedByTheorem,
    generate_obligations,
    translate_expr,
    validate_morphism,
)
from .notation import (
    SHAPE_SLOTS,
    NotationDef,
    Token,
    parse_expr_tokens,
    parse_type,
    register_notation,
    tokenize,
)
from .theory import Assumed, ModelChecked, ProofRecord, Theory, Traditional, Transported


@dataclass
class Session:
    """Everything elaborated from a list of source files, in order."""

    theories: dict[str, Theory] = field(default_factory=dict)
    morphisms: dict[str, Morphism] = field(default_factory=dict)
    graphs: dict[str, TheoryGraph] = field(default_factory=dict)
    notations: dict[str, NotationDef] = field(default_factory=dict)
    notation_theory: dict[str, str] = field(default_factory=dict)
    theory_location: dict[str, tuple[str, int]] = field(default_factory=dict)
    theory_order: list[str] = field(default_factory=list)

    def whole_graph(self) -> TheoryGraph:
        """One graph over every loaded theory and morphism."""
        g = TheoryGraph()
        for t in self.theories.values():
            g = g.add_theory(t)
        for m in self.morphisms.values():
            g = g.add_morphism(m)
        return g

    def named_or_whole_graph(self) -> tuple[str, TheoryGraph]:
        if self.graphs:
            name = next(iter(self.graphs))
            return name, self.graphs[name]
        return "(all)", self.whole_graph()


def load_files(paths: list[str]) -> Session:
    """Elaborate files in order; raises on the first error."""
    session = Session()
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            _elaborate(fh.read(), path, session)
    return session


def check_files(paths: list[str]) -> tuple[Session, list[SttError]]:
    """Elaborate with block-level recovery, collecting diagnostics."""
    session = Session()
    errors: list[SttError] = []
    for path in paths:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            errors.append(SttError(str(exc)))
            continue
        _elaborate(text, path, session, errors)
    errors.sort(key=lambda e: (e.span.file, e.span.line_begin, e.span.col_begin)
                if e.span else ("", 0, 0))
    return session, errors


# ---------------------------------------------------------------------------
# elaboration


def _line_tokens(lines: list[str], i: int, path: str) -> list[Token]:
    return tokenize(lines[i], path, line=i + 1)


def _is_blank(toks: list[Token]) -> bool:
    return toks[0].kind == "EOF"


def _with_eof(toks: list[Token], tail: Token) -> list[Token]:
    if toks and toks[-1].kind == "EOF":
        return toks
    return toks + [Token("EOF", "", tail.span)]


def _find_sym(toks: list[Token], text: str) -> int:
    for idx, t in enumerate(toks):
        if t.kind == "SYM" and t.text == text:
            return idx
    raise ParseError(f"expected {text!r}", toks[0].span)


def _skip_block(lines: list[str], i: int, path: str) -> int:
    """Advance past the current block, honoring nested proof blocks."""
    depth = 1
    i += 1
    while i < len(lines) and depth > 0:
        toks = _line_tokens(lines, i, path)
        head = toks[0].text
        if head == "end":
            depth -= 1
        elif head == "proof":
            depth += 1
        i += 1
    return i


def _elaborate(text: str, path: str, session: Session,
               errors: list[SttError] | None = None):
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        toks = _line_tokens(lines, i, path)
        if _is_blank(toks):
            i += 1
            continue
        head = toks[0]
        try:
            if head.text == "theory":
                i = _parse_theory(lines, i, toks, path, session)
            elif head.text == "morphism":
                i = _parse_morphism(lines, i, toks, path, session)
            elif head.text == "notation":
                i = _parse_notation_block(lines, i, toks, path, session)
            elif head.text == "graph":
                i = _parse_graph(lines, i, toks, path, session)
            else:
                raise ParseError(f"unknown block {head.text!r}", head.span)
        except SttError as err:
            if errors is None:
                raise
            err.with_span(head.span)
            errors.append(err)
            i = _skip_block(lines, i, path)
    return session


# -- theory blocks ----------------------------------------------------------


def _expect_name(toks: list[Token], idx: int) -> Token:
    t = toks[idx] if idx < len(toks) else toks[-1]
    if t.kind not in ("IDENT", "NUMBER") and not (t.kind == "SYM" and t.text in "*+-/<"):
        raise ParseError(f"expected a name, found {t.text or t.kind!r}", t.span)
    return t


def _parse_theory(lines, i, toks, path, session: Session) -> int:
    name = _expect_name(toks, 1).text
    if name in session.theories:
        raise DuplicateName(f"theory {name}", toks[1].span)
    t = Theory(name)
    i += 1
    while True:
        if i >= len(lines):
            raise ParseError(f"theory {name} not closed with 'end'",
                             toks[0].span)
        ltoks = _line_tokens(lines, i, path)
        if _is_blank(ltoks):
            i += 1
            continue
        head = ltoks[0]
        if head.text == "end":
            session.theories[name] = t
            session.theory_location[name] = (path, i)
            session.theory_order.append(name)
            return i + 1
        if head.text == "base":
            t = t.with_base(_expect_name(ltoks, 1).text)
        elif head.text == "include":
            other = session.theories.get(_expect_name(ltoks, 1).text)
            if other is None:
                raise UnknownTheory(ltoks[1].text, ltoks[1].span)
            t = _merge_theory(t, other, ltoks[1].span)
        elif head.text == "const":
            cname = _expect_name(ltoks, 1).text
            colon = _find_sym(ltoks, ":")
            ty = parse_type(_with_eof(ltoks[colon + 1:], ltoks[-1]), t.sig)
            t = t.with_constant(cname, ty)
        elif head.text == "infinite-only":
            t = t.mark_infinite_only()
        elif head.text == "axiom":
            aname = _expect_name(ltoks, 1).text
            colon = _find_sym(ltoks, ":")
            s = parse_expr_tokens(_with_eof(ltoks[colon + 1:], ltoks[-1]),
                                  t.vocabulary(), session.notations)
            t = t.add_axiom(aname, s)
        elif head.text == "define":
            dname = _expect_name(ltoks, 1).text
            cname = _expect_name(ltoks, 2).text
            walrus = _find_sym(ltoks, ":=")
            body = parse_expr_tokens(_with_eof(ltoks[walrus + 1:], ltoks[-1]),
                                     t.vocabulary(), session.notations)
            t = t.add_definition(dname, cname, body)
        elif head.text == "theorem":
            tname = _expect_name(ltoks, 1).text
            colon = _find_sym(ltoks, ":")
            s = parse_expr_tokens(_with_eof(ltoks[colon + 1:], ltoks[-1]),
                                  t.vocabulary(), session.notations)
            proof, i = _parse_proof(lines, i + 1, path, head.span)
            t = t.add_theorem(tname, s, proof)
        elif head.text == "notation":
            _parse_notation_line(ltoks[1:], t.vocabulary(), name, session,
                                 head.span)
        else:
            raise ParseError(f"unknown theory directive {head.text!r}", head.span)
        i += 1


def _merge_theory(t: Theory, other: Theory, span: SourceSpan) -> Theory:
    """Copy another theory's development verbatim (the `include` directive).

    Name clashes are errors: included vocabularies must be disjoint from
    what the block declared so far.
    """
    try:
        for base in sorted(other.sig.base_types):
            if base not in t.sig.base_types:
                t = t.with_base(base)
        for cname, ty in other.sig.constants.items():
            t = t.with_constant(cname, ty)
        for dname, d in other.definitions.items():
            t = t.add_definition(dname, d.const_name, d.body)
        for aname, ax in other.axioms.items():
            t = t.add_axiom(aname, ax)
        for tname, thm in other.theorems.items():
            t = t.add_theorem(tname, thm.statement, thm.proof)
    except SttError as err:
        raise err.with_span(span)
    if other.infinite_only:
        t = t.mark_infinite_only()
    return t


def _parse_proof(lines, i, path, span) -> tuple[ProofRecord, int]:
    while i < len(lines) and _is_blank(_line_tokens(lines, i, path)):
        i += 1
    if i >= len(lines):
        raise ParseError("theorem lacks a proof block", span)
    ptoks = _line_tokens(lines, i, path)
    if ptoks[0].text != "proof":
        raise ParseError(f"expected 'proof', found {ptoks[0].text!r}",
                         ptoks[0].span)
    kind = ptoks[1].text if len(ptoks) > 1 else ""
    if kind == "traditional":
        prose = []
        i += 1
        while i < len(lines):
            if lines[i].strip() == "end":
                return Traditional("\n".join(prose).strip("\n")), i
            prose.append(lines[i].strip())
            i += 1
        raise ParseError("proof block not closed with 'end'", ptoks[0].span)
    if kind == "assumed":
        record: ProofRecord = Assumed()
    elif kind == "model-checked":
        ids = tuple(tok.text for tok in ptoks[2:] if tok.kind != "EOF")
        record = ModelChecked(ids)
    elif kind == "transported":
        words = [tok.text for tok in ptoks[2:] if tok.kind != "EOF"]
        if len(words) != 4 or words[2] != "via":
            raise ParseError("expected: proof transported SRC ITEM via MORPHISM",
                             ptoks[0].span)
        record = Transported(words[0], words[1], words[3])
    else:
        raise ParseError(f"unknown proof status {kind!r}", ptoks[0].span)
    i += 1
    while i < len(lines) and _is_blank(_line_tokens(lines, i, path)):
        i += 1
    if i >= len(lines) or lines[i].strip() != "end":
        raise ParseError("proof block not closed with 'end'", ptoks[0].span)
    return record, i


# -- notation ----------------------------------------------------------------


def _parse_notation_line(toks: list[Token], vocab: k.Signature, theory: str,
                         session: Session, span: SourceSpan):
    # NAME : SHAPE VAR (: TYPE | in CONST) => TARGET SLOTS... [latex "CMD"]
    name = _expect_name(toks, 0).text
    if not (toks[1].kind == "SYM" and toks[1].text == ":"):
        raise ParseError("expected ':' after notation name", toks[1].span)
    shape = toks[2].text
    idx = 4  # after VAR
    guard = None
    if toks[idx].kind == "KW" and toks[idx].text == "in":
        guard = _expect_name(toks, idx + 1).text
        guard_ty = vocab.constants.get(guard)
        if not isinstance(guard_ty, k.SetOf):
            raise ParseError(f"guard {guard} is not a set constant",
                             toks[idx + 1].span)
        binder_ty = guard_ty.elem
        idx += 2
    elif toks[idx].kind == "SYM" and toks[idx].text == ":":
        arrow = idx
        while not (toks[arrow].kind == "SYM" and toks[arrow].text == "=>"):
            arrow += 1
            if arrow >= len(toks):
                raise ParseError("expected '=>' in notation", toks[idx].span)
        binder_ty = parse_type(_with_eof(toks[idx + 1:arrow], toks[-1]), vocab)
        idx = arrow
    else:
        raise ParseError("expected ':TYPE' or 'in CONST' binder spec",
                         toks[idx].span)
    if not (toks[idx].kind == "SYM" and toks[idx].text == "=>"):
        raise ParseError("expected '=>' in notation", toks[idx].span)
    target = _expect_name(toks, idx + 1).text
    idx += 2
    slots = []
    latex = None
    while idx < len(toks) and toks[idx].kind != "EOF":
        if toks[idx].text == "latex":
            if toks[idx + 1].kind != "STRING":
                raise ParseError("latex command must be a string",
                                 toks[idx + 1].span)
            latex = toks[idx + 1].text
            idx += 2
            continue
        slots.append(toks[idx].text)
        idx += 1
    target_ty = vocab.constants.get(target)
    if target_ty is None:
        raise ParseError(f"unknown notation target {target}", span)
    defn = NotationDef(name, shape, target, target_ty, tuple(slots), binder_ty,
                       guard=guard, latex=latex)
    session.notations = register_notation(defn, vocab, session.notations)
    session.notation_theory[name] = theory


def _parse_notation_block(lines, i, toks, path, session: Session) -> int:
    if len(toks) < 3 or toks[1].text != "for":
        raise ParseError("expected: notation for THEORY", toks[0].span)
    tname = toks[2].text
    t = session.theories.get(tname)
    if t is None:
        raise UnknownTheory(tname, toks[2].span)
    vocab = t.vocabulary()
    i += 1
    while i < len(lines):
        ltoks = _line_tokens(lines, i, path)
        if _is_blank(ltoks):
            i += 1
            continue
        if ltoks[0].text == "end":
            return i + 1
        _parse_notation_line(ltoks, vocab, tname, session, ltoks[0].span)
        i += 1
    raise ParseError("notation block not closed with 'end'", toks[0].span)


# -- morphisms ----------------------------------------------------------------


def _parse_morphism(lines, i, toks, path, session: Session) -> int:
    mid = _expect_name(toks, 1).text
    if mid in session.morphisms:
        raise DuplicateName(f"morphism {mid}", toks[1].span)
    colon = _find_sym(toks, ":")
    arrow = _find_sym(toks, "->")
    src_name = toks[colon + 1].text
    tgt_name = toks[arrow + 1].text
    kind = GENERAL
    rest = [t.text for t in toks[arrow + 2:] if t.kind != "EOF"]
    if rest == ["inclusion"]:
        kind = INCLUSION
    elif rest:
        raise ParseError(f"unexpected {rest[0]!r} on morphism header",
                         toks[arrow + 2].span)
    source = session.theories.get(src_name)
    target = session.theories.get(tgt_name)
    if source is None:
        raise UnknownTheory(src_name, toks[colon + 1].span)
    if target is None:
        raise UnknownTheory(tgt_name, toks[arrow + 1].span)
    type_map: dict[str, k.Type] = {}
    const_map: dict[str, k.Expr] = {}
    explicit: list[tuple[str, str, Token, list[Token]]] = []
    i += 1
    while True:
        if i >= len(lines):
            raise ParseError(f"morphism {mid} not closed with 'end'", toks[0].span)
        ltoks = _line_tokens(lines, i, path)
        if _is_blank(ltoks):
            i += 1
            continue
        head = ltoks[0]
        if head.text == "end":
            break
        if head.text == "map" and ltoks[1].text == "type":
            base = _expect_name(ltoks, 2).text
            arrow_i = _find_sym(ltoks, "=>")
            type_map[base] = parse_type(_with_eof(ltoks[arrow_i + 1:], ltoks[-1]),
                                        target.sig)
        elif head.text == "map" and ltoks[1].text == "const":
            cname = _expect_name(ltoks, 2).text
            arrow_i = _find_sym(ltoks, "=>")
            const_map[cname] = parse_expr_tokens(
                _with_eof(ltoks[arrow_i + 1:], ltoks[-1]),
                target.vocabulary(), session.notations)
        elif head.text == "obligation":
            oname = _expect_name(ltoks, 1).text
            walrus = _find_sym(ltoks, ":=")
            mode = ltoks[walrus + 1].text
            explicit.append((oname, mode, ltoks[walrus + 1],
                             ltoks[walrus + 2:]))
        else:
            raise ParseError(f"unknown morphism directive {head.text!r}",
                             head.span)
        i += 1
    m = Morphism(mid, src_name, tgt_name, type_map, const_map, kind)
    validate_morphism(m, source, target)
    statuses = {}
    for oname, mode, mtok, args in explicit:
        if oname not in source.axioms:
            raise ParseError(f"{src_name} has no axiom {oname}", mtok.span)
        if mode == "asserted":
            if not args or args[0].kind != "STRING":
                raise ParseError("asserted needs a quoted justification",
                                 mtok.span)
            statuses[oname] = Asserted(args[0].text)
        elif mode == "by-theorem":
            thm = args[0].text
            if thm not in target.theorems:
                raise ParseError(f"{tgt_name} has no theorem {thm}", mtok.span)
            statuses[oname] = DischargedByTheorem(thm)
        elif mode == "by-model":
            if not args or args[0].kind != "STRING":
                raise ParseError("by-model needs a quoted file path", mtok.span)
            model_path = os.path.join(os.path.dirname(path), args[0].text)
            statuses[oname] = _model_evidence(
                m, oname, model_path, source, target, session, mtok.span)
        else:
            raise ParseError(f"unknown obligation mode {mode!r}", mtok.span)
    m = Morphism(mid, src_name, tgt_name, type_map, const_map, kind, statuses)
    _, m = generate_obligations(m, source, target)
    session.morphisms[mid] = m
    return i + 1


def _model_evidence(m, oname, model_path, source, target, session,
                    span) -> ModelEvidence:
    if target.infinite_only:
        raise InfiniteOnlyTheory(
            f"cannot model-check obligations in {target.name}", span)
    with open(model_path, encoding="utf-8") as fh:
        model = parse_model_file(fh.read(), target.sig, model_path)
    full = interpret_definitions(target, model)
    for axname, ax in target.axioms.items():
        if eval_expr(ax, full) != TRUE:
            raise ModelDoesNotMatchSignature(
                f"model {model.name} violates target axiom {axname}", span)
    sentence = translate_expr(m, source.axioms[oname], source, target)
    if eval_expr(sentence, full) != TRUE:
        raise ModelDoesNotMatchSignature(
            f"model {model.name} does not satisfy obligation {oname}", span)
    return ModelEvidence((model.name,))


# -- graphs -------------------------------------------------------------------


def _parse_graph(lines, i, toks, path, session: Session) -> int:
    gname = _expect_name(toks, 1).text
    if gname in session.graphs:
        raise DuplicateName(f"graph {gname}", toks[1].span)
    g = TheoryGraph()
    i += 1
    while True:
        if i >= len(lines):
            raise ParseError(f"graph {gname} not closed with 'end'", toks[0].span)
        ltoks = _line_tokens(lines, i, path)
        if _is_blank(ltoks):
            i += 1
            continue
        head = ltoks[0]
        if head.text == "end":
            session.graphs[gname] = g
            return i + 1
        if head.text == "theory":
            tname = _expect_name(ltoks, 1).text
            t = session.theories.get(tname)
            if t is None:
                raise UnknownTheory(tname, ltoks[1].span)
            g = g.add_theory(t)
        elif head.text == "morphism":
            mname = _expect_name(ltoks, 1).text
            m = session.morphisms.get(mname)
            if m is None:
                raise UnknownTheory(f"morphism {mname}", ltoks[1].span)
            g = g.add_morphism(m)
        else:
            raise ParseError(f"unknown graph directive {head.text!r}", head.span)
        i += 1


# ---------------------------------------------------------------------------
# model files


def parse_model_file(text: str, sig: k.Signature, path: str = "<model>") -> FiniteModel:
    """Parse carriers and first-order operation tables against `sig`."""
    lines = text.splitlines()
    name = "model"
    carriers: dict[str, tuple[str, ...]] = {}
    interp: dict[str, object] = {}
    i = 0
    while i < len(lines):
        toks = _line_tokens(lines, i, path)
        if _is_blank(toks):
            i += 1
            continue
        head = toks[0]
        if head.text == "model":
            name = _expect_name(toks, 1).text
        elif head.text == "end":
            i += 1
            continue
        elif head.text == "carrier":
            base = _expect_name(toks, 1).text
            colon = _find_sym(toks, ":")
            elems = tuple(t.text for t in toks[colon + 1:] if t.kind != "EOF")
            if not elems:
                raise ModelDoesNotMatchSignature("empty carrier", head.span)
            carriers[base] = elems
        elif head.text == "const":
            cname = _expect_name(toks, 1).text
            eq = _find_sym(toks, "=")
            ty = _model_const_type(sig, cname, head.span)
            value_tok = toks[eq + 1]
            interp[cname] = _scalar_value(value_tok, ty, carriers)
        elif head.text == "table":
            cname = _expect_name(toks, 1).text
            ty = _model_const_type(sig, cname, head.span)
            args, result = k.curried_args(ty)
            if not 1 <= len(args) <= 2 or not all(
                    isinstance(a, (k.Base, k.Bool)) for a in args):
                raise ModelDoesNotMatchSignature(
                    f"table only supports first-order unary/binary constants, "
                    f"not {cname} : {ty}", head.span)
            rows_needed = 1 if len(args) == 1 else _width(args[0], carriers, head.span)
            cols_needed = _width(args[-1], carriers, head.span)
            rows = []
            for r in range(rows_needed):
                i += 1
                if i >= len(lines):
                    raise ParseError(f"table {cname} is missing rows", head.span)
                rtoks = _line_tokens(lines, i, path)
                entries = [t for t in rtoks if t.kind != "EOF"]
                if len(entries) != cols_needed:
                    raise ModelDoesNotMatchSignature(
                        f"table {cname} row {r} has {len(entries)} entries, "
                        f"expected {cols_needed}", rtoks[0].span if entries else head.span)
                rows.append(entries)
            interp[cname] = _table_value(rows, args, result, carriers, head.span)
        else:
            raise ParseError(f"unknown model directive {head.text!r}", head.span)
        i += 1
    model = FiniteModel(carriers, interp, name)
    validate_model(model, sig)
    return model


def _model_const_type(sig: k.Signature, cname: str, span) -> k.Type:
    ty = sig.constants.get(cname)
    if ty is None:
        raise ModelDoesNotMatchSignature(f"constant {cname} not in signature",
                                         span)
    return ty


def _width(ty: k.Type, carriers, span) -> int:
    vals = _domain_values(ty, carriers, span)
    return len(vals)


def _domain_values(ty: k.Type, carriers, span):
    if isinstance(ty, k.Bool):
        return (FALSE, TRUE)
    if isinstance(ty, k.Base):
        if ty.name not in carriers:
            raise ModelDoesNotMatchSignature(
                f"carrier {ty.name} must be declared before tables", span)
        return tuple(Elem(x) for x in carriers[ty.name])
    raise ModelDoesNotMatchSignature(f"unsupported table argument type {ty}", span)


def _scalar_value(tok: Token, ty: k.Type, carriers):
    if isinstance(ty, k.Bool):
        if tok.text not in ("true", "false"):
            raise ModelDoesNotMatchSignature(
                f"expected true/false, found {tok.text}", tok.span)
        return Truth(tok.text == "true")
    if isinstance(ty, k.Base):
        if ty.name not in carriers or tok.text not in carriers[ty.name]:
            raise ModelDoesNotMatchSignature(
                f"{tok.text} is not an element of {ty}", tok.span)
        return Elem(tok.text)
    raise ModelDoesNotMatchSignature(f"unsupported constant type {ty}", tok.span)


def _table_value(rows, args, result, carriers, span):
    def entry(tok):
        if tok.text == "-" and tok.kind == "SYM":
            return None
        return _scalar_value(tok, result, carriers)

    if len(args) == 1:
        dom = _domain_values(args[0], carriers, span)
        pairs = [(a, entry(tok)) for a, tok in zip(dom, rows[0])]
        return FuncV.from_pairs((a, v) for a, v in pairs if v is not None)
    outer = _domain_values(args[0], carriers, span)
    inner = _domain_values(args[1], carriers, span)
    outer_pairs = []
    for a, row in zip(outer, rows):
        pairs = [(b, entry(tok)) for b, tok in zip(inner, row)]
        outer_pairs.append((a, FuncV.from_pairs(
            (b, v) for b, v in pairs if v is not None)))
    return FuncV.from_pairs(outer_pairs)
