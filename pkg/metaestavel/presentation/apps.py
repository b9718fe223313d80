from django.apps import AppConfig


class PresentationConfig(AppConfig):
    name = 'metaestavel.presentation'
    label = 'presentation' # Define um label para evitar conflitos de nomes
    verbose_name = 'Apresentação (CLI por management commands)'
