"""Exception hierarchy and source positions shared by all sttkit modules."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    """Half-open region of a source file; begin must not come after end."""

    file: str
    line_begin: int
    col_begin: int
    line_end: int
    col_end: int

    def __post_init__(self):
        if (self.line_begin, self.col_begin) > (self.line_end, self.col_end):
            raise ValueError("span begin after end")

    def __str__(self):
        return f"{self.file}:{self.line_begin}:{self.col_begin}"


class SttError(Exception):
    """Base class for every domain error raised by this package."""

    def __init__(self, message, span: SourceSpan | None = None):
        super().__init__(message)
        self.message = message
        self.span = span

    def with_span(self, span: SourceSpan | None) -> "SttError":
        if span is not None and self.span is None:
            self.span = span
        return self

    def diagnostic(self) -> str:
        where = f"{self.span}: " if self.span else ""
        return f"{where}{type(self).__name__}: {self.message}"


# kernel

class KernelError(SttError):
    pass


class UnknownConstant(KernelError):
    pass


class UnknownBaseType(KernelError):
    pass


class TypeMismatch(KernelError):
    def __init__(self, expected, found, location, span=None):
        super().__init__(
            f"expected {expected}, found {found} in {location}", span)
        self.expected = expected
        self.found = found
        self.location = location


class NonBooleanBinderBody(KernelError):
    pass


# notation

class NotationError(SttError):
    pass


class ParseError(NotationError):
    pass


class IncompatibleShape(NotationError):
    pass


class DuplicateNotation(NotationError):
    pass


# theory

class TheoryError(SttError):
    pass


class NotASentence(TheoryError):
    pass


class DuplicateName(TheoryError):
    pass


class ConstantExists(TheoryError):
    pass


class NotClosed(TheoryError):
    pass


# morphism

class MorphismError(SttError):
    pass


class UnmappedBaseType(MorphismError):
    pass


class UnmappedConstant(MorphismError):
    pass


class TheoryMismatch(MorphismError):
    pass


class OpenObligations(MorphismError):
    pass


class NameClash(MorphismError):
    pass


# graph

class GraphError(SttError):
    pass


class DanglingEndpoint(GraphError):
    pass


class UnknownTheory(GraphError):
    pass


class UnknownItem(GraphError):
    pass


# model

class ModelError(SttError):
    pass


class ModelDoesNotMatchSignature(ModelError):
    pass


class InfiniteOnlyTheory(ModelError):
    pass


class SearchSpaceTooLarge(ModelError):
    pass
