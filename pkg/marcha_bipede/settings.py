"""
Django settings for marcha_bipede project.

Generated by 'django-admin startproject' using Django 5.2.7.

For more information on this file, see
https://docs.djangoproject.com/en/5.2/topics/settings/

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""
import math
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = 'django-insecure-marcha-bipede-apenas-comandos-de-gerenciamento'

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'marcha_app',           # Aplicativo principal (dinâmica, VHC, ICPM, simulação)
]

# Sem superfície HTTP: o projeto é usado apenas via comandos de gerenciamento
MIDDLEWARE = []


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = 'pt-br'

TIME_ZONE = 'America/Sao_Paulo'

USE_I18N = True

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# =================================================================
# LOGGING
# =================================================================

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simples': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simples',
        },
    },
    'loggers': {
        'marcha_app': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': False,
        },
    },
}

# =================================================================
# PARÂMETROS PADRÃO DA MARCHA (bípede de cinco elos)
# Cada seção pode ser sobrescrita por um arquivo INI (--config)
# =================================================================

MARCHA_SETTINGS = {
    'BIPED': {
        'N': 5,
        'ELL': (0.5, 0.55, 0.6, 0.55, 0.5),       # comprimentos (m)
        'D': (0.25, 0.275, 0.3, 0.275, 0.25),     # centro de massa a partir da junta proximal (m)
        'M': (0.4, 0.45, 0.55, 0.45, 0.4),        # massas (kg)
        'J': (0.0083, 0.0113, 0.0165, 0.0113, 0.0083),  # inércias centroidais (kg m²)
        'G': 9.81,                                # gravidade (m/s²)
    },
    'VHC': {
        'A': (0.55, 0.0, -0.55, -1.6833),
        'K': (0, 0, 1, 1),
        'G': (0.2717, -0.4, 0.1342, -0.3795),     # amplitudes (rad)
        'H': (8.0, 8.0, 8.0, 10.0),               # multiplicadores de frequência
        'THETA1_I': math.pi / 8,
        'REFINE': True,                           # refina a tabela (4 casas decimais) antes de construir a órbita
        'FREE': ('G2', 'G4', 'G5', 'a5'),
        'FILE': '',                               # arquivo de marcha gerado por "gait solve" (opcional)
    },
    'ORBIT': {
        'Q2': math.pi / 8,
        'DQ2': -5 * math.pi / 3,
        'MARGIN': 0.1,                            # margem do intervalo de operação (rad)
    },
    'CONTROLLER': {
        'KP': 750.0,
        'KD': 25.0,
        'MODE': 'ideal',                          # ideal | highgain
        'LAMBDA': 1.0,
        'MU': 0.0005,
        'STOP_TOL': 0.0001,
    },
    'ICPM': {
        'Q2_SECTION': math.pi / 16,
        'Q_ANGLES': 1.0,                          # Q = blockdiag(q_a I, q_v I)
        'Q_VELOCITIES': 1.5,
        'R': 1.0,
        'DELTA_Z': 1e-6,
        'DELTA_I': 1e-6,
        'WORKERS': 1,
    },
    'SIM': {
        'RTOL': 1e-10,
        'ATOL': 1e-12,
        'MAX_STEP': 0.01,
        'CONTACT_TOL': 1e-6,
        'MAX_SWING_TIME': 3.0,
        'STEPS': 40,
        'SAMPLE_DT': 0.005,
        'SEED': 2024,
        'PERTURB': 0.0,
        'ICPM': True,
    },
    'OUTPUT': {
        'DIR': 'saida',
    },
}
