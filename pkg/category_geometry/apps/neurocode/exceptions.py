"""
Exceptions raised by functions exposed by the Neurocode app.
"""
from category_geometry.apps.core.exceptions import ConfigurationError, NumericalError


class InvalidNoise(ConfigurationError):
    pass


class InvalidCode(ConfigurationError):
    pass


class NegativeRate(NumericalError):

    def __init__(self, units):
        super().__init__()
        self.units = units

    def __str__(self):
        return 'Multiplicative noise needs nonnegative rates; units {} are negative'.format(self.units)


class NonSmoothDensity(NumericalError):

    def __init__(self, density):
        super().__init__()
        self.density = density

    def __str__(self):
        return 'Noise density {} has no finite Fisher information'.format(self.density)
