"""Shared exception types."""


class PDDError(Exception):
    """Base class for all package errors."""


class DomainError(PDDError):
    """Malformed input: unknown taxa, bad weights, cyclic web, etc."""


class PreconditionError(PDDError):
    """An operation was called on an instance outside its contract."""


class BudgetExceededError(PDDError):
    """A solver refused to run because its cost estimate exceeds the budget."""


class OverflowGuardError(PDDError):
    """Weight arithmetic left the checked 64-bit range."""


# weights and PD values must stay below this bound
MAX_WEIGHT = (1 << 63) - 1


def checked_weight(value: int) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise DomainError(f"weight must be an int, got {value!r}")
    if value > MAX_WEIGHT:
        raise OverflowGuardError(f"weight {value} exceeds 64-bit range")
    return value
