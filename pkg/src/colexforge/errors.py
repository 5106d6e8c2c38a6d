"""Exception hierarchy shared by all pipeline stages."""

from __future__ import annotations


class ColexforgeError(Exception):
    """Base class for every error raised by colexforge."""


# ingestion

class MissingFile(ColexforgeError):
    pass


class MalformedMetadata(ColexforgeError):
    pass


class DanglingReference(ColexforgeError):
    def __init__(self, table: str, row: int, column: str, value: str) -> None:
        self.table = table
        self.row = row
        self.column = column
        self.value = value
        super().__init__(
            f"{table} row {row}: column {column!r} references unknown id {value!r}"
        )


class DuplicateId(ColexforgeError):
    def __init__(self, table: str, row: int, value: str) -> None:
        self.table = table
        self.row = row
        self.value = value
        super().__init__(f"{table} row {row}: duplicate id {value!r}")


# replacement tables

class ReplacementTableError(ColexforgeError):
    pass


class ChainedExpansion(ReplacementTableError):
    pass


class SingletonExpansionWithExpansionSyntax(ReplacementTableError):
    pass


class DuplicateSource(ReplacementTableError):
    pass


# downstream stages

class EmptySelection(ColexforgeError):
    pass


class EmptyAfterNormalization(ColexforgeError):
    pass


class UnknownConcept(ColexforgeError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class UncoveredNode(ColexforgeError):
    pass


class InconsistentInputs(ColexforgeError):
    pass


class GMLParseError(ColexforgeError):
    pass


class StageError(ColexforgeError):
    """Wraps a failure with the name of the pipeline stage it came from."""

    def __init__(self, stage: str, cause: BaseException) -> None:
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")
