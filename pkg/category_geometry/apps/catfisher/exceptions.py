"""
Exceptions raised by functions exposed by the Catfisher app.
"""
from category_geometry.apps.core.exceptions import ConfigurationError, NumericalError


class InvalidGeometry(ConfigurationError):
    pass


class ZeroGradient(NumericalError):

    def __init__(self, point, norm):
        super().__init__()
        self.point = point
        self.norm = norm

    def __str__(self):
        return 'Log-odds gradient vanishes at x = {} (norm {:.3e}); no discriminant direction'.format(
            self.point, self.norm,
        )


class StepTooLarge(NumericalError):

    def __init__(self, point, change):
        super().__init__()
        self.point = point
        self.change = change

    def __str__(self):
        return 'A single PDC step changed L by {:.3e} at x = {}; reduce the step'.format(self.change, self.point)


class NoSignChange(NumericalError):

    def __str__(self):
        return 'Log odds keep the same sign along the curve; it does not reach the boundary'


class NoInteriorMax(NumericalError):

    def __init__(self, index, length):
        super().__init__()
        self.index = index
        self.length = length

    def __str__(self):
        return 'f_cat is largest at vertex {} of {}; it is monotone along the curve'.format(self.index, self.length)
