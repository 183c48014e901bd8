"""Loader for the bundled theory-graph corpus.

The corpus ships as source files plus a manifest of expected statistics;
loading re-counts everything and refuses to hand out a corrupted bundle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import SttError
from .graph import TheoryGraph
from .morphism import Morphism, Open
from .notation import NotationDef
from .reader import Session, load_files
from .theory import Theory

DATA_DIR = Path(__file__).parent / "corpus_data"

GRAPH_NAME = "monoid-theory"


@dataclass
class CorpusBundle:
    session: Session
    graph: TheoryGraph
    graph_name: str
    notations: dict[str, NotationDef]
    paths: list[str]

    @property
    def theories(self) -> dict[str, Theory]:
        return self.session.theories

    @property
    def morphisms(self) -> dict[str, Morphism]:
        return self.session.morphisms


def manifest() -> list[dict]:
    with open(DATA_DIR / "manifest.json", encoding="utf-8") as fh:
        return json.load(fh)


def corpus_paths() -> list[str]:
    seen: dict[str, None] = {}
    for entry in manifest():
        seen.setdefault(str(DATA_DIR / entry["path"]))
    return list(seen)


def model_path(name: str) -> str:
    return str(DATA_DIR / name)


def load_corpus() -> CorpusBundle:
    """Load and verify the bundled corpus; stat drift is a hard error."""
    entries = manifest()
    session = load_files(corpus_paths())
    for entry in entries:
        _verify_entry(entry, session)
    graph = session.graphs.get(GRAPH_NAME)
    if graph is None:
        raise SttError(f"bundled graph {GRAPH_NAME} missing")
    return CorpusBundle(session, graph, GRAPH_NAME, session.notations,
                        corpus_paths())


def _verify_entry(entry: dict, session: Session):
    expected = entry.get("expected", {})
    kind = entry["kind"]
    path = entry["path"]

    def bail(msg):
        raise SttError(f"corpus entry {path}: {msg}")

    if kind == "theory":
        for name in expected.get("theories", []):
            if name not in session.theories:
                bail(f"theory {name} missing")
        for name, counts in expected.get("stats", {}).items():
            t = session.theories[name]
            got = {"axioms": len(t.axioms), "definitions": len(t.definitions),
                   "theorems": len(t.theorems)}
            if got != counts:
                bail(f"{name} has {got}, manifest says {counts}")
    elif kind == "morphism":
        for name in expected.get("morphisms", []):
            m = session.morphisms.get(name)
            if m is None:
                bail(f"morphism {name} missing")
            open_names = [n for n, s in m.obligations.items()
                          if isinstance(s, Open)]
            if open_names:
                bail(f"{name} has open obligations {open_names}")
    elif kind == "graph":
        g = session.graphs.get(expected["graph"])
        if g is None:
            bail("graph missing")
        if len(g.theories) != expected["theories"]:
            bail(f"{len(g.theories)} theories, manifest says {expected['theories']}")
        if len(g.morphisms) != expected["morphisms"]:
            bail(f"{len(g.morphisms)} morphisms, manifest says {expected['morphisms']}")
    elif kind == "notation":
        for name in expected.get("notations", []):
            if name not in session.notations:
                bail(f"notation {name} missing")
    else:
        bail(f"unknown kind {kind}")
