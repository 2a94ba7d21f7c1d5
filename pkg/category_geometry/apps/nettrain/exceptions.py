"""
Exceptions raised by functions exposed by the Nettrain app.
"""
from category_geometry.apps.core.exceptions import ConfigurationError, NumericalError


class InvalidNetwork(ConfigurationError):
    pass


class InvalidTrainConfig(ConfigurationError):
    pass


class InvalidProbe(ConfigurationError):
    pass


class Diverged(NumericalError):

    def __init__(self, epoch, loss):
        super().__init__()
        self.epoch = epoch
        self.loss = loss

    def __str__(self):
        return 'Training diverged in epoch {}: loss is {}'.format(self.epoch, self.loss)


class ZeroActivity(NumericalError):

    def __init__(self, index):
        super().__init__()
        self.index = index

    def __str__(self):
        return 'Coding-layer activity vanishes at probe point {}; cosine distance is undefined'.format(self.index)


class InconsistentDecomposition(NumericalError):

    def __init__(self, name, value, std_err):
        super().__init__()
        self.name = name
        self.value = value
        self.std_err = std_err

    def __str__(self):
        return 'Decomposition check {} failed: {:.6g} with standard error {:.3g}'.format(
            self.name, self.value, self.std_err,
        )


class NoBoundaryPoints(NumericalError):

    def __init__(self, requested, found):
        super().__init__()
        self.requested = requested
        self.found = found

    def __str__(self):
        return 'Found {} of {} requested decision-boundary points'.format(self.found, self.requested)


class NoInteriorPoints(NumericalError):

    def __init__(self, requested, found, confidence):
        super().__init__()
        self.requested = requested
        self.found = found
        self.confidence = confidence

    def __str__(self):
        return 'Found {} of {} requested points categorized with confidence >= {}'.format(
            self.found, self.requested, self.confidence,
        )
