"""
Exceptions raised by functions exposed by the Categories app.
"""
from category_geometry.apps.core.exceptions import ConfigurationError, NumericalError


class InvalidModel(ConfigurationError):
    pass


class DimMismatch(ConfigurationError):

    def __init__(self, expected, received):
        """
        Arguments:
            expected (int): the dimension the model or map works in
            received: the shape that was given
        """
        super().__init__('Expected dimension {}, received {}'.format(expected, received))
        self.expected = expected
        self.received = received


class NotBinary(NumericalError):

    def __init__(self, n_classes):
        super().__init__()
        self.n_classes = n_classes

    def __str__(self):
        return 'Log odds need exactly 2 categories, the model has {}'.format(self.n_classes)


class AllDensitiesZero(NumericalError):

    def __init__(self, point):
        super().__init__()
        self.point = point

    def __str__(self):
        return 'Every class density vanishes at x = {}; the point lies outside all supports'.format(self.point)
