"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class FlatOctError(Exception):
    """Base class for every error raised by the package."""


class InputError(FlatOctError):
    """Malformed user input (maps to CLI exit code 3)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class ConstraintSyntaxError(InputError):
    """A constraint list could not be tokenized or parsed."""


class NonOctagonal(InputError):
    """A linear atom is not of the form ±u ±w <= c."""


class GrammarError(InputError):
    """Ill-formed grammar (duplicate ids, overlapping alphabets, shape)."""


class ShapeError(GrammarError):
    """A production body does not fit the expected normal form."""


class VarMismatch(FlatOctError):
    """Two relations over different variable sets were combined."""


class EmptyLanguage(FlatOctError):
    """The language under analysis is empty."""


class NonApplicable(FlatOctError):
    """A control word step cannot be applied; ``step`` is 1-based."""

    def __init__(self, step: int, message: str = ""):
        self.step = step
        super().__init__(f"step {step} not applicable" + (f": {message}" if message else ""))


class NotDepthFirst(FlatOctError):
    """A step sequence violates the depth-first discipline."""


class NotDerivation(FlatOctError):
    """A control word does not derive a terminal word from the start symbol."""


class BudgetExceeded(FlatOctError):
    """A search exceeded its configured node/vertex budget."""

    def __init__(self, what: str, budget: int, stage: str | None = None):
        self.what = what
        self.budget = budget
        self.stage = stage
        super().__init__(f"{what} exceeded budget {budget}" + (f" in stage {stage}" if stage else ""))


class NotStrict(FlatOctError):
    """A letter-bounded expression repeats a letter."""


class NotContained(FlatOctError):
    """A language is not included in the given bounded expression."""


class NotLetterBounded(NotContained):
    """Algorithm-1 precondition: a path emits a letter outside the expression."""


class NotMinimal(FlatOctError):
    """A letter-bounded expression is not minimal for the language."""


class InvalidGuide(FlatOctError):
    """A pivot guide names a production that is not an admissible pivot."""

    def __init__(self, step: int, message: str = ""):
        self.step = step
        super().__init__(f"invalid guide at step {step}" + (f": {message}" if message else ""))


class Unbalanced(InputError):
    """Call/return symbols in a word do not nest; ``position`` is 1-based."""

    def __init__(self, position: int, message: str = ""):
        self.position = position
        super().__init__(f"unbalanced call/return at position {position}" + (f": {message}" if message else ""))


class UnlabeledSymbol(InputError):
    """A terminal has no relation attached."""
