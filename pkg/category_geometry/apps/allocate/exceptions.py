"""
Exceptions raised by functions exposed by the Allocate app.
"""
from category_geometry.apps.core.exceptions import ConfigurationError, NumericalError


class InvalidProblem(ConfigurationError):
    pass


class InvalidConstraint(ConfigurationError):
    pass


class NoRoot(NumericalError):

    def __init__(self, target, low, high):
        super().__init__()
        self.target = target
        self.low = low
        self.high = high

    def __str__(self):
        return 'u^2 Psi\'(u) = {:.6g} has no stable root; the tabulated curve spans [{:.6g}, {:.6g}]'.format(
            self.target, self.low, self.high,
        )


class BudgetInfeasible(NumericalError):

    def __init__(self, budget):
        super().__init__()
        self.budget = budget

    def __str__(self):
        return 'No multiplier meets the resource budget {:.6g}'.format(self.budget)
