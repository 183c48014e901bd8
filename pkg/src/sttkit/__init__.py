"""sttkit: typed theories, morphisms, and desk-scale model checking."""

from .errors import SttError, SourceSpan
from .kernel import (
    BOOL,
    Abs,
    And,
    App,
    Base,
    Bool,
    Const,
    Eq,
    Exists,
    Expr,
    Forall,
    Fun,
    GuardedAbs,
    Iff,
    Implies,
    Iota,
    IsDefined,
    Member,
    Not,
    Or,
    Pair,
    Prod,
    Proj1,
    Proj2,
    SetLit,
    SetOf,
    Signature,
    Type,
    Var,
    alpha_equal,
    free_vars,
    fun_type,
    substitute,
    type_of,
)

__all__ = [name for name in dir() if not name.startswith("_")]
