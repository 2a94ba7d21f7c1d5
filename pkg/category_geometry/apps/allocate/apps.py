from django.apps import AppConfig


class AllocateConfig(AppConfig):
    name = 'category_geometry.apps.allocate'
