from django.apps import AppConfig


class CatfisherConfig(AppConfig):
    name = 'category_geometry.apps.catfisher'
