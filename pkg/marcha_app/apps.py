from django.apps import AppConfig


class MarchaAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'marcha_app'
