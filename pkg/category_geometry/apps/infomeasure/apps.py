from django.apps import AppConfig


class InfomeasureConfig(AppConfig):
    name = 'category_geometry.apps.infomeasure'
