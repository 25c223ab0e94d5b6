"""Exception hierarchy for reactorkit.

Everything raised by the library derives from ReactorKitError, so callers
can catch one type at the CLI/protocol boundary.  Usage-shaped problems
(bad names, bad scripts, bad parameters) additionally derive from
UsageError so the CLI can map them to exit code 2.
"""


class ReactorKitError(Exception):
    """Base class for all reactorkit errors."""


class UsageError(ReactorKitError):
    """Caller-supplied input was malformed (maps to CLI exit code 2)."""


class ReactorStopped(ReactorKitError):
    """react() was applied to a reactor whose stop condition already fired."""


class UnhandledEventKind(ReactorKitError):
    """react() received an event kind the reactor has no handler for."""


class NoDrawHandler(ReactorKitError):
    """draw() was called on a reactor without a to_draw handler."""


class NoTickHandler(ReactorKitError):
    """A tick-driven run was requested but the reactor has no on_tick handler."""


class InvalidKeyName(UsageError):
    """Key name is neither a single printable character nor a named key."""


class NotTracing(ReactorKitError):
    """A trace was requested from a reactor that was never put in tracing mode."""


class DuplicateColumn(ReactorKitError):
    """build_column() would shadow an existing column."""


class UnknownColumn(ReactorKitError, KeyError):
    """A row accessor looked up a column that does not exist."""


class NegativeDimension(ReactorKitError):
    """A scene constructor received a negative width/height/radius."""


class NonPositiveSize(ReactorKitError):
    """text() requires a strictly positive size."""


class MalformedScene(ReactorKitError):
    """A structured value does not describe any known scene variant."""


class MalformedMessage(ReactorKitError):
    """Wire text does not decode to any known protocol message."""


class DuplicateHandler(UsageError):
    """big_bang() received two bindings for the same handler slot."""


class EngineReentrancy(ReactorKitError):
    """An engine entry point was used outside the sanctioned nested-call path."""


class ScriptExhaustedInNestedSession(ReactorKitError):
    """A scripted run ended while an inner session was still waiting for events."""


class UnknownScenario(UsageError):
    """No scenario is registered under the requested name."""


class UnknownParameter(UsageError):
    """A scenario was given a parameter name it does not understand."""


class ScriptSyntaxError(UsageError):
    """An event-script line is neither 'tick', 'key <name>', blank, nor a comment."""
