"""
Exceptions raised by functions exposed by the Infomeasure app.
"""
from category_geometry.apps.core.exceptions import ConfigurationError, NumericalError


class InvalidResponseModel(ConfigurationError):
    pass


class GridTooCoarse(NumericalError):

    def __init__(self, detail):
        super().__init__()
        self.detail = detail

    def __str__(self):
        return 'Quadrature grid is too coarse or too narrow: {}'.format(self.detail)


class AllSingular(NumericalError):

    def __init__(self, n_nodes):
        super().__init__()
        self.n_nodes = n_nodes

    def __str__(self):
        return 'F_code is singular at all {} grid nodes; the asymptotic gap is undefined'.format(self.n_nodes)


class InequalityViolated(NumericalError):

    def __init__(self, i_yr, i_yx, std_err):
        super().__init__()
        self.i_yr = i_yr
        self.i_yx = i_yx
        self.std_err = std_err

    def __str__(self):
        return 'I[Y,R] = {:.6g} exceeds I[Y,X] = {:.6g} by more than 3 standard errors ({:.3g})'.format(
            self.i_yr, self.i_yx, self.std_err,
        )


class IllConditionedTransform(ConfigurationError):

    def __init__(self, condition_number, limit):
        super().__init__(
            'Coordinate change has condition number {:.3g}; invariance checks need less than {}'.format(
                condition_number, limit,
            )
        )
        self.condition_number = condition_number
        self.limit = limit

    def __str__(self):
        return 'Coordinate change has condition number {:.3g}; invariance checks need less than {}'.format(
            self.condition_number, self.limit,
        )
