from django.apps import AppConfig


class CategoriesConfig(AppConfig):
    name = 'category_geometry.apps.categories'
