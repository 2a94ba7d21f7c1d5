from django.apps import AppConfig


class NeurocodeConfig(AppConfig):
    name = 'category_geometry.apps.neurocode'
