from django.apps import AppConfig


class InfrastructureConfig(AppConfig):
    name = 'metaestavel.infrastructure'
    label = 'infrastructure' # Define um label para evitar conflitos de nomes
    verbose_name = 'Infraestrutura (arquivos de configuração e relatórios)'
