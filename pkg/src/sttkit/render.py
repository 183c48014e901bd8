"""Rendering theories back to text: source format and LaTeX.

Source rendering emits sugar-free compact notation so the output
reparses against an empty notation set; items are ordered bases,
constants, definitions, axioms, theorems, which is always a valid
declaration order.  LaTeX rendering uses the registered sugar and the
environment layout documented in docs/latex.md.
"""

from __future__ import annotations

from . import kernel as k
from .model import FALSE, TRUE, Elem, FiniteModel, FuncV, Truth, UndefValue
from .morphism import Morphism
from .notation import NotationDef
from .printer import print_compact, print_latex, type_compact, type_latex
from .theory import (
    Assumed,
    ModelChecked,
    ProofRecord,
    Theory,
    Traditional,
    Transported,
)


def proof_block_lines(proof: ProofRecord, indent: str = "  ") -> list[str]:
    match proof:
        case Traditional(text):
            lines = [f"{indent}proof traditional"]
            lines += [f"{indent}  {line}" if line else "" for line in text.splitlines()]
            lines.append(f"{indent}end")
            return lines
        case Assumed():
            return [f"{indent}proof assumed", f"{indent}end"]
        case ModelChecked(ids):
            return [f"{indent}proof model-checked {' '.join(ids)}", f"{indent}end"]
        case Transported(src, mid, item):
            return [f"{indent}proof transported {src} {item} via {mid}",
                    f"{indent}end"]
    raise TypeError(f"not a ProofRecord: {proof!r}")


def theorem_block_lines(name: str, statement: k.Expr, proof: ProofRecord,
                        notations=None, indent: str = "  ") -> list[str]:
    stmt = print_compact(statement, notations)
    return [f"{indent}theorem {name} : {stmt}"] + proof_block_lines(proof, indent)


def render_theory_source(t: Theory) -> str:
    lines = [f"theory {t.name}"]
    if t.infinite_only:
        lines.append("  infinite-only")
    for base in sorted(t.sig.base_types):
        lines.append(f"  base {base}")
    for cname, ty in t.sig.constants.items():
        lines.append(f"  const {cname} : {type_compact(ty)}")
    for dname, d in t.definitions.items():
        lines.append(f"  define {dname} {d.const_name} := {print_compact(d.body)}")
    for aname, ax in t.axioms.items():
        lines.append(f"  axiom {aname} : {print_compact(ax)}")
    for tname, thm in t.theorems.items():
        lines.extend(theorem_block_lines(tname, thm.statement, thm.proof))
    lines.append("end")
    return "\n".join(lines) + "\n"


def render_theory_latex(t: Theory, notations: dict[str, NotationDef] | None = None) -> str:
    """Theory as a LaTeX environment; see docs/latex.md for the macros."""
    lines = [rf"\begin{{theorymodule}}{{{t.name}}}"]
    for base in sorted(t.sig.base_types):
        lines.append(rf"  \basetype{{{base}}}")
    for cname, ty in t.sig.constants.items():
        lines.append(rf"  \constant{{{_tex(cname)}}}{{{type_latex(ty)}}}")
    for dname, d in t.definitions.items():
        body = print_latex(d.body, notations)
        lines.append(
            rf"  \definition{{{dname}}}{{\mathsf{{{_tex(d.const_name)}}} : "
            rf"{type_latex(d.ty)}}}{{{body}}}")
    for aname, ax in t.axioms.items():
        lines.append(rf"  \axiom{{{aname}}}{{{print_latex(ax, notations)}}}")
    for tname, thm in t.theorems.items():
        lines.append(
            rf"  \theorem{{{tname}}}{{{print_latex(thm.statement, notations)}}}"
            rf"{{{_proof_note(thm.proof)}}}")
    lines.append(r"\end{theorymodule}")
    return "\n".join(lines) + "\n"


def _tex(name: str) -> str:
    return name.replace("_", r"\_")


def _proof_note(proof: ProofRecord) -> str:
    match proof:
        case Traditional(_):
            return "traditional proof"
        case Assumed():
            return "assumed"
        case ModelChecked(ids):
            return f"checked in models {', '.join(ids)}"
        case Transported(src, mid, item):
            return f"transported from {src}.{item} via {mid}"
    return ""


def render_morphism_source(m: Morphism) -> str:
    header = f"morphism {m.id} : {m.source} -> {m.target}"
    if m.kind == "inclusion":
        header += " inclusion"
    lines = [header]
    for base, ty in m.type_map.items():
        lines.append(f"  map type {base} => {type_compact(ty)}")
    for cname, image in m.const_map.items():
        lines.append(f"  map const {cname} => {print_compact(image)}")
    lines.append("end")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# model tables


def _value_text(v) -> str:
    match v:
        case None | UndefValue():
            return "-"
        case Elem(name):
            return name
        case Truth(b):
            return "true" if b else "false"
    raise TypeError(f"no table syntax for {v!r}")


def render_model(model: FiniteModel, sig: k.Signature) -> str:
    """Model as loadable model-file text (carriers, constants, tables)."""
    lines = [f"model {model.name}"]
    for base in sorted(model.carriers):
        lines.append(f"  carrier {base} : {' '.join(model.carriers[base])}")
    for cname, ty in sig.constants.items():
        v = model.const_interp[cname]
        args, result = k.curried_args(ty)
        if not args:
            lines.append(f"  const {cname} = {_value_text(v)}")
            continue
        lines.append(f"  table {cname} :")
        doms = [_domain(model, a) for a in args]
        if len(args) == 1:
            row = [_value_text(v.lookup(a)) for a in doms[0]]
            lines.append("    " + " ".join(row))
        else:
            for a in doms[0]:
                inner = v.lookup(a)
                row = []
                for b in doms[1]:
                    cell = inner.lookup(b) if isinstance(inner, FuncV) else None
                    row.append(_value_text(cell))
                lines.append("    " + " ".join(row))
    lines.append("end")
    return "\n".join(lines) + "\n"


def _domain(model: FiniteModel, ty: k.Type):
    if isinstance(ty, k.Bool):
        return (FALSE, TRUE)
    if isinstance(ty, k.Base):
        return tuple(Elem(x) for x in model.carriers[ty.name])
    raise TypeError(f"unsupported table argument type {ty}")
