from django.apps import AppConfig


class CoreConfig(AppConfig):
    name = 'category_geometry.apps.core'
