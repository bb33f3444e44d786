from __future__ import annotations


class PDDLError(Exception):
    pass


class ParseError(PDDLError):
    """Syntax error with a 1-based source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class SemanticError(PDDLError):
    pass


class GoalParseError(PDDLError):
    pass


class GroundingError(PDDLError):
    pass
