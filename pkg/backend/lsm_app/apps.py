from django.apps import AppConfig


class LsmAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'lsm_app'
    verbose_name = 'Evolved liquid state machine'
