"""
Response models: anything that maps stimuli to mean responses and scores responses against them.
"""
from category_geometry.apps.infomeasure.exceptions import InvalidResponseModel
from category_geometry.apps.neurocode import api as neurocode_api
from category_geometry.apps.neurocode.codes import PopulationCode


class ResponseModel:
    """
    P(r|x) through mean responses and a noise specification.

    Subclasses implement ``mean``; ``noise`` is a ``NoiseSpec``.
    """
    noise = None

    def mean(self, points):
        raise NotImplementedError

    def sample(self, points, rng, antithetic=False):
        means = self.mean(points)
        if antithetic:
            return neurocode_api.draw_antithetic(self.noise, means, rng)
        return neurocode_api.draw_responses(self.noise, means, rng)

    def log_likelihood(self, responses, means):
        return neurocode_api.log_likelihood_from_rates(self.noise, responses, means)


class CodeResponses(ResponseModel):

    def __init__(self, code):
        self.code = code
        self.noise = code.noise

    def mean(self, points):
        return self.code.rates(points)


def as_response_model(source):
    if isinstance(source, ResponseModel):
        return source
    if isinstance(source, PopulationCode):
        return CodeResponses(source)
    raise InvalidResponseModel('Cannot build responses from {!r}'.format(source))
