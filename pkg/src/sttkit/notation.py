"""Surface notation: lexing, parsing, and registered notational sugar.

The grammar is ASCII-first with a fixed precedence table, from tightest
to loosest: application, `not`, multiplicative, additive, relational
chains, connectives (`and`, `or`, `=>`, `<=>`), binders.  Chained
relations such as `a = b = c` or `0 < x < d` elaborate to conjunctions
of adjacent relations.  Binder bodies extend as far right as possible.

Registered notations add binder-shaped sugar (`sum i = 1 to n of A`,
`lim x -> a of B`, ...) that expands to curried applications of a
target constant.  See docs/grammar.md for the full EBNF.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from . import kernel as k
from .errors import (
    DuplicateNotation,
    IncompatibleShape,
    KernelError,
    ParseError,
    SourceSpan,
    UnknownBaseType,
    UnknownConstant,
)

KEYWORDS = frozenset({
    "forall", "exists", "iota", "fun", "not", "and", "or", "in",
    "to", "of", "from", "defined", "fst", "snd", "set", "Bool",
})

#: infix operator constants with their precedence tier
OPERATORS = {"*": "mul", "/": "mul", "+": "add", "-": "add", "<": "rel"}

_SYMBOLS = ["<=>", "=>", "->", ":=", "(", ")", "{", "}", ",", ".", ":",
            "|", "=", "<", "*", "+", "-", "/"]


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT KW NUMBER STRING SYM EOF
    text: str
    span: SourceSpan


def _ident_char(c: str) -> bool:
    return c.isalnum() or c in "_@"


def tokenize(text: str, file: str = "<expr>", line: int = 1, col: int = 1) -> list[Token]:
    """Lex `text` into tokens with source spans.

    Identifiers may contain `-` when the following character is
    alphanumeric (`cont-at`, `lim-seq`); a binary minus therefore needs
    surrounding whitespace.
    """
    toks: list[Token] = []
    i = 0
    n = len(text)
    cur_line, cur_col = line, col

    def advance(ch: str):
        nonlocal cur_line, cur_col
        if ch == "\n":
            cur_line += 1
            cur_col = 1
        else:
            cur_col += 1

    while i < n:
        c = text[i]
        if c in " \t\r\n":
            advance(c)
            i += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                advance(text[i])
                i += 1
            continue
        start_line, start_col = cur_line, cur_col
        if c.isalpha():
            j = i
            while j < n:
                ch = text[j]
                if _ident_char(ch):
                    j += 1
                elif ch == "-" and j + 1 < n and _ident_char(text[j + 1]):
                    j += 1
                else:
                    break
            word = text[i:j]
            for ch in word:
                advance(ch)
            kind = "KW" if word in KEYWORDS else "IDENT"
            toks.append(Token(kind, word, SourceSpan(
                file, start_line, start_col, cur_line, cur_col)))
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            word = text[i:j]
            for ch in word:
                advance(ch)
            toks.append(Token("NUMBER", word, SourceSpan(
                file, start_line, start_col, cur_line, cur_col)))
            i = j
            continue
        if c == '"':
            j = i + 1
            out = []
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n and text[j + 1] in '"\\':
                    out.append(text[j + 1])
                    j += 2
                else:
                    out.append(text[j])
                    j += 1
            if j >= n:
                raise ParseError("unterminated string", SourceSpan(
                    file, start_line, start_col, cur_line, cur_col))
            for ch in text[i:j + 1]:
                advance(ch)
            toks.append(Token("STRING", "".join(out), SourceSpan(
                file, start_line, start_col, cur_line, cur_col)))
            i = j + 1
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                for ch in sym:
                    advance(ch)
                toks.append(Token("SYM", sym, SourceSpan(
                    file, start_line, start_col, cur_line, cur_col)))
                i += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", SourceSpan(
                file, start_line, start_col, start_line, start_col + 1))
    toks.append(Token("EOF", "", SourceSpan(file, cur_line, cur_col, cur_line, cur_col)))
    return toks


# ---------------------------------------------------------------------------
# notational definitions

SHAPES = ("over-range", "at-point", "plain", "with-bounds")

SHAPE_SLOTS = {
    "over-range": ("lo", "hi", "body"),
    "at-point": ("point", "body"),
    "plain": ("body",),
    "with-bounds": ("lo", "hi", "body"),
}


@dataclass(frozen=True)
class NotationDef:
    """Binder-shaped sugar expanding to a curried application of `target`.

    `arg_order` lists the slot names in the order the target constant
    consumes them; `guard` names a set constant restricting the binder
    (the bound variable's honest type stays the set's element type).
    """

    name: str
    shape: str
    target: str
    target_ty: k.Type
    arg_order: tuple[str, ...]
    binder_ty: k.Type
    guard: str | None = None
    latex: str | None = None

    def guard_expr(self) -> k.Expr | None:
        if self.guard is None:
            return None
        return k.Const(self.guard, k.SetOf(self.binder_ty))

    def make_binder(self, var: str, body: k.Expr) -> k.Expr:
        g = self.guard_expr()
        if g is None:
            return k.Abs(var, self.binder_ty, body)
        return k.GuardedAbs(var, self.binder_ty, g, body)

    def expand(self, slots: Mapping[str, k.Expr]) -> k.Expr:
        e: k.Expr = k.Const(self.target, self.target_ty)
        for slot in self.arg_order:
            e = k.App(e, slots[slot])
        return e


Notations = dict  # str -> NotationDef, insertion ordered


def register_notation(defn: NotationDef, sig: k.Signature,
                      notations: Mapping[str, NotationDef]) -> dict[str, NotationDef]:
    """Validate a definition against a signature and add it to the set."""
    if defn.name in notations:
        raise DuplicateNotation(defn.name)
    if defn.shape not in SHAPES:
        raise IncompatibleShape(f"unknown shape {defn.shape}")
    slots = SHAPE_SLOTS[defn.shape]
    if sorted(defn.arg_order) != sorted(slots):
        raise IncompatibleShape(
            f"argument order {defn.arg_order} is not a permutation of {slots}")
    declared = sig.constants.get(defn.target)
    if declared is None:
        raise UnknownConstant(defn.target)
    if declared != defn.target_ty:
        raise IncompatibleShape(
            f"target {defn.target} has type {declared}, not {defn.target_ty}")
    if defn.guard is not None:
        guard_ty = sig.constants.get(defn.guard)
        if guard_ty != k.SetOf(defn.binder_ty):
            raise IncompatibleShape(
                f"guard {defn.guard} must be a set of {defn.binder_ty}")
    args, _ = k.curried_args(defn.target_ty)
    if len(args) < len(slots):
        raise IncompatibleShape(
            f"target {defn.target} takes {len(args)} curried arguments, "
            f"need {len(slots)}")
    for slot, arg_ty in zip(defn.arg_order, args):
        if slot == "body":
            if not (isinstance(arg_ty, k.Fun) and arg_ty.dom == defn.binder_ty):
                raise IncompatibleShape(
                    f"body argument of {defn.target} has type {arg_ty}, "
                    f"expected a function from {defn.binder_ty}")
        elif arg_ty != defn.binder_ty:
            raise IncompatibleShape(
                f"slot {slot} of {defn.name} has type {arg_ty}, "
                f"expected {defn.binder_ty}")
    out = dict(notations)
    out[defn.name] = defn
    return out


# ---------------------------------------------------------------------------
# parsing


def parse_type(text_or_tokens, sig: k.Signature, file: str = "<type>") -> k.Type:
    if isinstance(text_or_tokens, str):
        toks = tokenize(text_or_tokens, file)
    else:
        toks = text_or_tokens
    p = _Parser(toks, sig, {}, {}, file)
    ty = p.type_()
    p.expect_eof()
    return ty


def parse_expr(text: str, sig: k.Signature,
               notations: Mapping[str, NotationDef] | None = None,
               env: Mapping[str, k.Type] | None = None,
               file: str = "<expr>", line: int = 1, col: int = 1) -> k.Expr:
    """Parse and type-check one expression.

    `env` types any free variables.  Raises ParseError with a span for
    syntax problems; kernel typing errors propagate with the nearest
    span attached.
    """
    toks = tokenize(text, file, line, col)
    return parse_expr_tokens(toks, sig, notations, env)


def parse_expr_tokens(toks: list[Token], sig: k.Signature,
                      notations: Mapping[str, NotationDef] | None = None,
                      env: Mapping[str, k.Type] | None = None) -> k.Expr:
    file = toks[0].span.file if toks else "<expr>"
    p = _Parser(toks, sig, dict(env) if env else {}, dict(notations or {}), file)
    e = p.expr()
    p.expect_eof()
    try:
        k.type_of(e, sig, env)
    except KernelError as err:
        raise err.with_span(p.span_of(getattr(err, "location", None))
                            or toks[0].span)
    return e


class _Parser:
    def __init__(self, toks, sig, scope, notations, file):
        self.toks = toks
        self.pos = 0
        self.stop: int | None = None
        self.sig = sig
        self.scope: dict[str, k.Type] = scope  # bound + free variable types
        self.notations = notations
        self.file = file
        self.spans: dict[int, SourceSpan] = {}

    # -- token plumbing ------------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        i = self.pos + ahead
        if self.stop is not None and i >= self.stop:
            return Token("EOF", "", self.toks[self.stop].span)
        return self.toks[min(i, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.peek()
        if t.kind != "EOF":
            self.pos += 1
        return t

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    def expect(self, kind: str, text: str | None = None) -> Token:
        if not self.at(kind, text):
            got = self.peek()
            want = text or kind
            raise ParseError(f"expected {want!r}, found {got.text or got.kind!r}",
                             got.span)
        return self.next()

    def expect_eof(self):
        if self.peek().kind != "EOF":
            t = self.peek()
            raise ParseError(f"unexpected {t.text!r}", t.span)

    def note(self, e: k.Expr, begin: Token) -> k.Expr:
        end = self.toks[max(self.pos - 1, 0)]
        self.spans[id(e)] = SourceSpan(
            self.file, begin.span.line_begin, begin.span.col_begin,
            end.span.line_end, end.span.col_end)
        return e

    def span_of(self, e) -> SourceSpan | None:
        return self.spans.get(id(e)) if e is not None else None

    # -- types ----------------------------------------------------------------

    def type_(self) -> k.Type:
        left = self.prod_type()
        if self.at("SYM", "->"):
            self.next()
            return k.Fun(left, self.type_())
        return left

    def prod_type(self) -> k.Type:
        left = self.atom_type()
        while self.at("SYM", "*"):
            self.next()
            left = k.Prod(left, self.atom_type())
        return left

    def atom_type(self) -> k.Type:
        t = self.peek()
        if t.kind == "KW" and t.text == "Bool":
            self.next()
            return k.BOOL
        if t.kind == "KW" and t.text == "set":
            self.next()
            return k.SetOf(self.atom_type())
        if t.kind == "SYM" and t.text == "(":
            self.next()
            ty = self.type_()
            self.expect("SYM", ")")
            return ty
        if t.kind == "IDENT":
            self.next()
            if t.text not in self.sig.base_types:
                raise UnknownBaseType(t.text, t.span)
            return k.Base(t.text)
        raise ParseError(f"expected a type, found {t.text or t.kind!r}", t.span)

    # -- expressions -----------------------------------------------------------

    def expr(self) -> k.Expr:
        return self.iff_()

    def iff_(self) -> k.Expr:
        left = self.implies_()
        while self.at("SYM", "<=>"):
            self.next()
            left = k.Iff(left, self.implies_())
        return left

    def implies_(self) -> k.Expr:
        left = self.or_()
        if self.at("SYM", "=>"):
            self.next()
            return k.Implies(left, self.implies_())
        return left

    def or_(self) -> k.Expr:
        left = self.and_()
        while self.at("KW", "or"):
            self.next()
            left = k.Or(left, self.and_())
        return left

    def and_(self) -> k.Expr:
        left = self.rel_()
        while self.at("KW", "and"):
            self.next()
            left = k.And(left, self.rel_())
        return left

    def rel_(self) -> k.Expr:
        begin = self.peek()
        first = self.add_()
        if self.at("KW", "in"):
            self.next()
            coll = self.add_()
            return self.note(k.Member(first, coll), begin)
        links: list[tuple[Token, k.Expr]] = []
        while self.at("SYM", "=") or self.at("SYM", "<"):
            op = self.next()
            links.append((op, self.add_()))
        if not links:
            return first
        rels = []
        lhs = first
        for op, rhs in links:
            rels.append(self.note(self.make_relation(op, lhs, rhs), begin))
            lhs = rhs
        out = rels[0]
        for r in rels[1:]:
            out = self.note(k.And(out, r), begin)
        return out

    def make_relation(self, op: Token, lhs: k.Expr, rhs: k.Expr) -> k.Expr:
        if op.text == "=":
            return k.Eq(lhs, rhs)
        return k.App(k.App(self.constant(op), lhs), rhs)

    def add_(self) -> k.Expr:
        begin = self.peek()
        left = self.mul_()
        while self.at("SYM", "+") or self.at("SYM", "-"):
            op = self.next()
            left = self.note(
                k.App(k.App(self.constant(op), left), self.mul_()), begin)
        return left

    def mul_(self) -> k.Expr:
        begin = self.peek()
        left = self.unary_()
        while self.at("SYM", "*") or self.at("SYM", "/"):
            op = self.next()
            left = self.note(
                k.App(k.App(self.constant(op), left), self.unary_()), begin)
        return left

    def unary_(self) -> k.Expr:
        if self.at("KW", "not"):
            begin = self.next()
            return self.note(k.Not(self.unary_()), begin)
        return self.postfix_()

    def postfix_(self) -> k.Expr:
        begin = self.peek()
        e = self.primary_()
        while self.at("SYM", "("):
            self.next()
            arg = self.comma_group()
            self.expect("SYM", ")")
            e = self.note(k.App(e, arg), begin)
        return e

    def comma_group(self) -> k.Expr:
        """One or more comma-separated expressions, right-nested as pairs."""
        elems = [self.expr()]
        while self.at("SYM", ","):
            self.next()
            elems.append(self.expr())
        out = elems[-1]
        for x in reversed(elems[:-1]):
            out = k.Pair(x, out)
        return out

    def constant(self, tok: Token) -> k.Const:
        ty = self.sig.constants.get(tok.text)
        if ty is None:
            raise UnknownConstant(tok.text, tok.span)
        e = k.Const(tok.text, ty)
        self.spans[id(e)] = tok.span
        return e

    def primary_(self) -> k.Expr:
        t = self.peek()
        if t.kind == "KW" and t.text in ("forall", "exists", "iota", "fun"):
            return self.binder_()
        if t.kind == "KW" and t.text == "defined":
            self.next()
            self.expect("SYM", "(")
            e = self.expr()
            self.expect("SYM", ")")
            return self.note(k.IsDefined(e), t)
        if t.kind == "KW" and t.text in ("fst", "snd"):
            self.next()
            self.expect("SYM", "(")
            e = self.expr()
            self.expect("SYM", ")")
            node = k.Proj1(e) if t.text == "fst" else k.Proj2(e)
            return self.note(node, t)
        if t.kind == "SYM" and t.text == "|":
            self.next()
            e = self.expr()
            self.expect("SYM", "|")
            abs_tok = Token("IDENT", "abs", t.span)
            return self.note(k.App(self.constant(abs_tok), e), t)
        if t.kind == "SYM" and t.text == "{":
            return self.set_literal_()
        if t.kind == "SYM" and t.text == "(":
            self.next()
            nxt = self.peek()
            if nxt.kind == "SYM" and nxt.text in OPERATORS and \
                    self.peek(1).kind == "SYM" and self.peek(1).text == ")":
                op = self.next()
                self.expect("SYM", ")")
                return self.constant(op)
            e = self.comma_group()
            self.expect("SYM", ")")
            if isinstance(e, k.Pair):
                self.note(e, t)
            return e
        if t.kind == "NUMBER":
            self.next()
            return self.constant(t)
        if t.kind == "IDENT":
            if t.text in self.notations and self.sugar_ahead(self.notations[t.text]):
                return self.sugar_(self.notations[t.text])
            self.next()
            if t.text in self.scope:
                e = k.Var(t.text, self.scope[t.text])
                self.spans[id(e)] = t.span
                return e
            return self.constant(t)
        raise ParseError(f"expected an expression, found {t.text or t.kind!r}",
                         t.span)

    # -- binders ----------------------------------------------------------------

    def binder_(self) -> k.Expr:
        kw = self.next()
        names = [self.expect("IDENT")]
        while self.at("SYM", ","):
            self.next()
            names.append(self.expect("IDENT"))
        if self.at("KW", "in"):
            self.next()
            guard = self.postfix_()
            guard_ty = k.type_of(guard, self.sig, self.scope)
            if not isinstance(guard_ty, k.SetOf):
                raise ParseError(
                    f"binder guard has type {guard_ty}, expected a set",
                    kw.span)
            var_ty, use_guard = guard_ty.elem, guard
        else:
            self.expect("SYM", ":")
            var_ty, use_guard = self.type_(), None
        self.expect("SYM", ".")
        saved = {n.text: self.scope.get(n.text) for n in names}
        for n in names:
            self.scope[n.text] = var_ty
        body = self.expr()
        for n in names:
            if saved[n.text] is None:
                del self.scope[n.text]
            else:
                self.scope[n.text] = saved[n.text]
        for n in reversed(names):
            body = self.note(
                self.close_binder(kw.text, n.text, var_ty, use_guard, body), kw)
        return body

    def close_binder(self, kw: str, var: str, var_ty: k.Type,
                     guard: k.Expr | None, body: k.Expr) -> k.Expr:
        v = k.Var(var, var_ty)
        if kw == "forall":
            if guard is not None:
                return k.Forall(var, var_ty, k.Implies(k.Member(v, guard), body))
            return k.Forall(var, var_ty, body)
        if kw == "exists":
            if guard is not None:
                return k.Exists(var, var_ty, k.And(k.Member(v, guard), body))
            return k.Exists(var, var_ty, body)
        if kw == "iota":
            if guard is not None:
                return k.Iota(var, var_ty, k.And(k.Member(v, guard), body))
            return k.Iota(var, var_ty, body)
        if guard is not None:
            return k.GuardedAbs(var, var_ty, guard, body)
        return k.Abs(var, var_ty, body)

    # -- registered sugar ---------------------------------------------------------

    def sugar_ahead(self, defn: NotationDef) -> bool:
        nxt, nxt2 = self.peek(1), self.peek(2)
        if defn.shape == "over-range":
            return nxt.kind == "IDENT" and nxt2.kind == "SYM" and nxt2.text == "="
        if defn.shape == "at-point":
            return nxt.kind == "IDENT" and nxt2.kind == "SYM" and nxt2.text == "->"
        if defn.shape == "plain":
            return nxt.kind == "IDENT" and nxt2.kind == "KW" and nxt2.text == "of"
        return nxt.kind == "KW" and nxt.text == "from"

    def sugar_(self, defn: NotationDef) -> k.Expr:
        begin = self.next()
        slots: dict[str, k.Expr] = {}
        if defn.shape == "with-bounds":
            self.expect("KW", "from")
            slots["lo"] = self.expr_before("to")
            self.expect("KW", "to")
            slots["hi"] = self.expr_before("of")
            self.expect("KW", "of")
            var, body = self.integral_body_(defn, begin)
        else:
            var = self.expect("IDENT").text
            if defn.shape == "over-range":
                self.expect("SYM", "=")
                slots["lo"] = self.expr_before("to")
                self.expect("KW", "to")
                slots["hi"] = self.expr_before("of")
            elif defn.shape == "at-point":
                self.expect("SYM", "->")
                slots["point"] = self.expr_before("of")
            self.expect("KW", "of")
            body = self.bound_body_(var, defn.binder_ty)
        slots["body"] = defn.make_binder(var, body)
        return self.note(defn.expand(slots), begin)

    def expr_before(self, keyword: str) -> k.Expr:
        e = self.expr()
        if not self.at("KW", keyword):
            t = self.peek()
            raise ParseError(f"expected {keyword!r}, found {t.text or t.kind!r}",
                             t.span)
        return e

    def bound_body_(self, var: str, var_ty: k.Type) -> k.Expr:
        saved = self.scope.get(var)
        self.scope[var] = var_ty
        body = self.expr()
        if saved is None:
            del self.scope[var]
        else:
            self.scope[var] = saved
        return body

    def integral_body_(self, defn: NotationDef, begin: Token) -> tuple[str, k.Expr]:
        # The bound variable is named by the trailing d-token, so locate
        # it first: the first depth-0 identifier starting with "d" that
        # follows a token able to end an expression.
        depth = 0
        bars = 0
        j = self.pos
        end = self.stop if self.stop is not None else len(self.toks) - 1
        found = None
        while j < end:
            tok = self.toks[j]
            if tok.kind == "SYM" and tok.text in ("(", "{"):
                depth += 1
            elif tok.kind == "SYM" and tok.text in (")", "}"):
                depth -= 1
            elif tok.kind == "SYM" and tok.text == "|":
                bars += 1
            elif (depth == 0 and tok.kind == "IDENT" and len(tok.text) > 1
                  and tok.text.startswith("d") and j > self.pos):
                prev = self.toks[j - 1]
                ends_expr = (prev.kind in ("IDENT", "NUMBER")
                             or (prev.kind == "SYM" and prev.text in (")", "}"))
                             or (prev.kind == "SYM" and prev.text == "|"
                                 and bars % 2 == 0))
                if ends_expr:
                    found = j
                    break
            j += 1
        if found is None:
            raise ParseError(
                f"missing d<var> terminator for {defn.name}", begin.span)
        var = self.toks[found].text[1:]
        old_stop = self.stop
        self.stop = found
        body = self.bound_body_(var, defn.binder_ty)
        if self.pos != found:
            t = self.peek()
            raise ParseError(f"unexpected {t.text!r}", t.span)
        self.stop = old_stop
        self.next()  # consume the d-token
        return var, body

    def set_literal_(self) -> k.Expr:
        begin = self.expect("SYM", "{")
        if self.at("SYM", ":"):
            self.next()
            ty = self.type_()
            self.expect("SYM", "}")
            return self.note(k.SetLit(ty, ()), begin)
        members = [self.expr()]
        while self.at("SYM", ","):
            self.next()
            members.append(self.expr())
        self.expect("SYM", "}")
        elem_ty = k.type_of(members[0], self.sig, self.scope)
        return self.note(k.SetLit(elem_ty, tuple(members)), begin)
