import pytest

from sttkit import kernel as k
from sttkit.errors import ConstantExists, DuplicateName, NotASentence, NotClosed
from sttkit.theory import Theory, Traditional

M = k.Base("M")
MM = k.fun_type(M, M, M)


def mon_base() -> Theory:
    return (Theory("MON")
            .with_base("M")
            .with_constant("e", M)
            .with_constant("*", MM))


def star():
    return k.Const("*", MM)


def dot(a, b):
    return k.App(k.App(star(), a), b)


def assoc_sentence():
    x, y, z = (k.Var(n, M) for n in "xyz")
    return k.Forall("x", M, k.Forall("y", M, k.Forall("z", M, k.Eq(
        dot(dot(x, y), z), dot(x, dot(y, z))))))


def test_add_axiom():
    t = mon_base().add_axiom("assoc", assoc_sentence())
    assert list(t.axioms) == ["assoc"]


def test_add_axiom_rejects_open_formulas():
    t = mon_base()
    with pytest.raises(NotASentence):
        t.add_axiom("bad", k.Eq(k.Var("x", M), k.Const("e", M)))


def test_add_axiom_rejects_non_boolean():
    t = mon_base()
    with pytest.raises(NotASentence):
        t.add_axiom("bad", k.Iota("x", M, k.Eq(k.Var("x", M), k.Var("x", M))))


def test_duplicate_axiom_name():
    t = mon_base().add_axiom("assoc", assoc_sentence())
    with pytest.raises(DuplicateName):
        t.add_axiom("assoc", assoc_sentence())


def test_add_definition_extends_vocabulary():
    t = mon_base()
    body = k.Abs("x", M, dot(k.Var("x", M), k.Var("x", M)))
    t2 = t.add_definition("square-def", "square", body)
    vocab = t2.vocabulary()
    assert vocab.constants["square"] == k.Fun(M, M)
    d = t2.definitions["square-def"]
    assert d.defining_axiom() == k.Eq(k.Const("square", k.Fun(M, M)), body)


def test_definition_rejects_existing_constant():
    t = mon_base()
    with pytest.raises(ConstantExists):
        t.add_definition("dup", "*", k.Abs("x", M, k.Var("x", M)))


def test_definition_rejects_open_bodies():
    t = mon_base()
    with pytest.raises(NotClosed):
        t.add_definition("bad", "thing", k.Var("x", M))


def test_definitions_can_chain():
    t = mon_base()
    t = t.add_definition("sq", "square",
                         k.Abs("x", M, dot(k.Var("x", M), k.Var("x", M))))
    body = k.Abs("x", M, k.App(k.Const("square", k.Fun(M, M)),
                               k.App(k.Const("square", k.Fun(M, M)),
                                     k.Var("x", M))))
    t = t.add_definition("fourth", "pow4", body)
    assert t.vocabulary().constants["pow4"] == k.Fun(M, M)


def test_add_theorem_records_proof():
    t = mon_base().add_theorem("triv", assoc_sentence(),
                               Traditional("rebracket three times"))
    assert t.theorems["triv"].proof == Traditional("rebracket three times")


def test_theorem_with_free_variable_rejected():
    t = mon_base()
    with pytest.raises(NotASentence):
        t.add_theorem("bad", k.Eq(k.Var("x", M), k.Var("x", M)),
                      Traditional("nope"))


def test_vocabulary_examples():
    t = mon_base()
    vocab = t.vocabulary()
    assert vocab.constants == {"e": M, "*": MM}
    assert Theory("EMPTY").vocabulary() == k.Signature()


def test_persistence():
    t = mon_base()
    t2 = t.add_axiom("assoc", assoc_sentence())
    assert not t.axioms and list(t2.axioms) == ["assoc"]
    t3 = t2.add_definition("sq", "square",
                           k.Abs("x", M, k.Var("x", M)))
    assert "square" not in t2.vocabulary().constants
    assert "square" in t3.vocabulary().constants


def test_replay_reproduces_vocabulary():
    t = mon_base()
    t = t.add_definition("sq", "square",
                         k.Abs("x", M, dot(k.Var("x", M), k.Var("x", M))))
    t = t.add_definition("id-def", "ident", k.Abs("x", M, k.Var("x", M)))
    sig = t.sig
    for d in t.definitions.values():
        assert k.type_of(d.body, sig) == d.ty
        sig = sig.with_constant(d.const_name, d.ty)
    assert sig == t.vocabulary()


def test_sentences_check_at_insertion_point():
    t = mon_base()
    sq = k.Const("square", k.Fun(M, M))
    uses_square = k.Forall("x", M, k.Eq(k.App(sq, k.Var("x", M)),
                                        k.Var("x", M)))
    with pytest.raises(Exception):
        t.add_axiom("early", uses_square)
    t = t.add_definition("sq", "square", k.Abs("x", M, k.Var("x", M)))
    t = t.add_axiom("late", uses_square)
    assert "late" in t.axioms
