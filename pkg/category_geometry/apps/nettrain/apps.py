from django.apps import AppConfig


class NettrainConfig(AppConfig):
    name = 'category_geometry.apps.nettrain'
