# metaestavel/core/apps.py

from django.apps import AppConfig

class CoreConfig(AppConfig):
    # O nome completo do path da aplicação
    name = 'metaestavel.core'
    # Define o label curto para referência (ex: no shell)
    label = 'core'
    # Nome amigável
    verbose_name = 'Núcleo numérico (Entidades, Paisagem, Operador e Assintótica)'
