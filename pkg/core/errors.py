"""
Exception hierarchy for gkmquiver
"""


class GkmQuiverError(Exception):
    """Base class for all gkmquiver errors"""


class InstanceError(GkmQuiverError, ValueError):
    """Malformed instance, box, fixed point or mutation"""


class NotDivisibleError(GkmQuiverError, ArithmeticError):
    """Exact division left a remainder"""


class ZeroDenominatorError(GkmQuiverError, ZeroDivisionError):
    """Rational function built over the zero polynomial"""


class BudgetExceededError(GkmQuiverError):
    """Brute-force oracle refused to run past its budget"""

    def __init__(self, what: str, required: int, budget: int):
        super().__init__(f"{what} needs {required} candidates, budget is {budget}")
        self.required = required
        self.budget = budget


class ComputationError(GkmQuiverError, RuntimeError):
    """Internal inconsistency, indicates a bug rather than bad input"""
