"""Diagnostics: locations, severities, and the error carrier."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Loc:
    file: str = ""
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    loc: Loc
    message: str
    code: str = ""

    def __str__(self):
        return (
            f"{self.loc.file}:{self.loc.line}:{self.loc.col}: "
            f"{self.severity}: {self.message}"
        )


class DiagnosticError(Exception):
    """Raised when parsing/elaboration cannot proceed; carries the
    collected diagnostics."""

    def __init__(self, diags: list[Diagnostic]):
        super().__init__("\n".join(str(d) for d in diags))
        self.diags = diags


def err(loc: Loc, message: str, code: str = "") -> Diagnostic:
    return Diagnostic("error", loc, message, code)
