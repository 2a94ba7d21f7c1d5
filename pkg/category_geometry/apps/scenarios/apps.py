from django.apps import AppConfig


class ScenariosConfig(AppConfig):
    name = 'category_geometry.apps.scenarios'
