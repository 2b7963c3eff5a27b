from django.apps import AppConfig


class MixnormConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'mixnorm'
