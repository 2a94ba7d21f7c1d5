"""
Root exceptions shared by every app of the project.
"""
from category_geometry.apps.core.constants import (
    EXIT_CONFIG_ERROR,
    EXIT_NUMERICAL_FAILURE,
)


class CategoryGeometryError(Exception):
    exit_code = EXIT_NUMERICAL_FAILURE


class ConfigurationError(CategoryGeometryError):
    """
    Raised when inputs (models, codes, scenario configs) are malformed.
    """
    exit_code = EXIT_CONFIG_ERROR

    def __init__(self, message):
        super().__init__(message)
        self.message = message

    def __str__(self):
        return self.message


class NumericalError(CategoryGeometryError):
    """
    Raised when a computation cannot produce a trustworthy number.
    """
    exit_code = EXIT_NUMERICAL_FAILURE
