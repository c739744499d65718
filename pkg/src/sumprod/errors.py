"""Error taxonomy shared by all modules.

Three failure classes are distinguished so the CLI can map them to
distinct exit codes: bad mathematical inputs (DomainError), data that
does not cover the requested index range (RangeError), and requests
exceeding the configured desk budget (CapacityError).
"""


class DomainError(ValueError):
    """A precondition on the mathematical inputs is violated."""


class RangeError(ValueError):
    """A sampled function or table does not cover the requested range."""


class CapacityError(RuntimeError):
    """The request exceeds the configured memory/size budget."""
