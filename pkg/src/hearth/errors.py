"""Exception hierarchy for the hearth runtime."""

from __future__ import annotations


class HearthError(Exception):
    """Base class for all errors raised by this package."""


# --- registry / bus / services -----------------------------------------


class MalformedId(HearthError):
    """Entity id does not match ``<domain>.<object_id>``."""


class DuplicateId(HearthError):
    """Id already present in the registry or document section."""


class UnknownEntity(HearthError):
    """Entity id not registered."""


class TypeMismatch(HearthError):
    """State value incompatible with the entity's device kind."""


class DuplicateService(HearthError):
    """(domain, name) pair already registered."""


class UnknownService(HearthError):
    """No service registered under (domain, name)."""


class HandlerFailure(HearthError):
    """A service handler raised; carries the handler's message."""


# --- automation ---------------------------------------------------------


class UnknownAutomation(HearthError):
    """Automation id not loaded."""


class AutomationDisabled(HearthError):
    """Automation exists but is disabled."""


class UnknownScene(HearthError):
    """Scene id not loaded."""


# --- telemetry stores ---------------------------------------------------


class BudgetTooSmall(HearthError):
    """Budget cannot hold even one record of the strategy's type."""


class BudgetExceeded(HearthError):
    """A store was observed above its budget (harness surfacing check)."""


class NonMonotoneTimestamp(HearthError):
    """Record timestamp went backwards; indicates a driver bug."""


class TooFewSamples(HearthError):
    """Window fold requires more samples than were given."""


class InvalidTier(HearthError):
    """Measurement interval outside the supported tier set."""


# --- configuration ------------------------------------------------------


class ConfigError(HearthError):
    """Base class for configuration diagnostics; carries a document path."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ConfigSyntaxError(ConfigError):
    """Document is not parseable; carries line/column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f"line {line}" if line is not None else "unknown location"
        super().__init__(f"{message} ({where})")


class UnknownKey(ConfigError):
    """A mapping contains a key the schema does not define."""


class WrongType(ConfigError):
    """A value has the wrong shape or an out-of-vocabulary literal."""


class DanglingReference(ConfigError):
    """A section refers to an entity or scene id that is not defined."""

    def __init__(self, missing: str, referrer: str):
        self.missing = missing
        self.referrer = referrer
        super().__init__(f"{referrer} refers to undefined id {missing!r}")
