"""Exception hierarchy.

Input problems derive from :class:`InputError`; findings that contradict a
structure theorem derive from :class:`CounterexampleFound`.  The CLI maps the
first family to exit code 1 and the second to exit code 2.
"""

from __future__ import annotations


class PmdError(Exception):
    """Base class for all package errors."""


class InputError(PmdError, ValueError):
    """Malformed or unsupported input."""


class MalformedShape(InputError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class CarrierNotSubset(InputError):
    pass


class AmbientMismatch(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class PosetMismatch(InputError):
    pass


class NotAnInterval(InputError):
    pass


class NotAGrid(InputError):
    pass


class NotAChain(InputError):
    pass


class NotGridLike(InputError):
    pass


class NotMono(InputError):
    pass


class NotEndomorphism(InputError):
    pass


class InvalidCarrier(InputError):
    pass


class OverlapConditionViolated(InputError):
    pass


class PathDoesNotCrossWindow(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.key = key


class ValidationError(InputError):
    """A module whose structure maps do not commute."""

    def __init__(self, message: str, square=None):
        super().__init__(message)
        self.square = square


class NotMiddleExact(InputError):
    def __init__(self, square, message: str | None = None):
        super().__init__(message or f"not middle exact at square {square}")
        self.square = square


class CounterexampleFound(PmdError):
    """The computation contradicts one of the structure theorems."""


class NonBlockSummand(CounterexampleFound):
    def __init__(self, carrier, message: str | None = None):
        super().__init__(message or f"summand with carrier {sorted(carrier)} is not a block module")
        self.carrier = carrier


class RouteDisagreement(CounterexampleFound):
    def __init__(self, route_a, route_b):
        super().__init__(f"zigzag routes disagree: generic={route_a} extension={route_b}")
        self.route_a = route_a
        self.route_b = route_b


class RetractionMissing(CounterexampleFound):
    pass
