"""
Exceptions raised by functions exposed by the Scenarios app.
"""
from category_geometry.apps.core.exceptions import ConfigurationError


class InvalidScenarioConfig(ConfigurationError):

    def __init__(self, key, reason):
        super().__init__('Scenario config {}: {}'.format(key, reason))
        self.key = key
        self.reason = reason
