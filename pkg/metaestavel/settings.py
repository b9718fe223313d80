"""
Configurações para o projeto metaestavel (análise metaestável de Fokker–Planck).
"""

import os
from decouple import config, Csv
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# ====================================================================
# CONFIGURAÇÕES BÁSICAS
# ====================================================================

# A SECRET_KEY deve ser lida de uma variável de ambiente.
SECRET_KEY = config('SECRET_KEY', default='django-insecure-metaestavel-cli')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = config('ALLOWED_HOSTS', default='localhost', cast=Csv())


# ====================================================================
# APLICAÇÕES INSTALADAS
# ====================================================================

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',

    # Aplicações de Terceiros
    'rest_framework',

    # Nossas Aplicações
    'metaestavel.core.apps.CoreConfig', # Entidades e núcleo numérico
    'metaestavel.infrastructure.apps.InfrastructureConfig', # Arquivos e galeria
    'metaestavel.presentation.apps.PresentationConfig', # CLI (management commands)
]


# ====================================================================
# BANCO DE DADOS (não usado pelos subcomandos; exigido pelo Django)
# ====================================================================

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'metaestavel.sqlite3',
    }
}

LANGUAGE_CODE = 'pt-br'

TIME_ZONE = 'America/Sao_Paulo'

USE_I18N = True

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# ====================================================================
# CONFIGURAÇÕES DA ANÁLISE METAESTÁVEL
# ====================================================================

# Diretório de saída quando nem a RunConfig nem --out o definem
METAESTAVEL_SAIDA_PADRAO = config('METAESTAVEL_SAIDA_PADRAO', default='resultados')

# Threads para varreduras em h e análises por ponto crítico
METAESTAVEL_WORKERS = config('METAESTAVEL_WORKERS', default=1, cast=int)

METAESTAVEL_NEWTON_TOL = config('METAESTAVEL_NEWTON_TOL', default=1e-10, cast=float)
METAESTAVEL_DEGENERESCENCIA_TOL = config('METAESTAVEL_DEGENERESCENCIA_TOL', default=1e-8, cast=float)
METAESTAVEL_REALIDADE_TOL = config('METAESTAVEL_REALIDADE_TOL', default=1e-9, cast=float)


# ====================================================================
# LOGGING
# ====================================================================

LOG_LEVEL = config('LOG_LEVEL', default='INFO')
LOG_FILE = config('LOG_FILE', default=str(BASE_DIR / 'logs' / 'metaestavel.log'))
os.makedirs(os.path.dirname(LOG_FILE) or '.', exist_ok=True)

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'handlers': {
        'file': {
            'level': LOG_LEVEL,
            'class': 'logging.handlers.RotatingFileHandler',
            'filename': LOG_FILE,
            'maxBytes': 1024 * 1024 * 5,  # 5 MB
            'backupCount': 5,
            'formatter': 'verbose',
        },
        'console': {
            'level': 'WARNING',
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['file'],
            'level': 'WARNING',
            'propagate': True,
        },
        'metaestavel': {
            'handlers': ['file', 'console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}
