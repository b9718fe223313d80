# metaestavel/core/dependency_injection.py
"""
Módulo de Injeção de Dependência (DI).
Responsável por instanciar os Use Cases com os Repositórios concretos da
camada de Infraestrutura.
"""
from metaestavel.infrastructure.repositories import (
    ConfigRepositoryYaml,
    GaleriaRepositoryMemoria,
    RelatorioRepositoryArquivos,
)
from .use_cases import (
    GalleryUseCase,
    GradedUseCase,
    LandscapeUseCase,
    PredictUseCase,
    SimulateUseCase,
    ValidateUseCase,
    VerifyUseCase,
)

# Repositórios Concretos
config_repo = ConfigRepositoryYaml()
relatorio_repo = RelatorioRepositoryArquivos()
galeria_repo = GaleriaRepositoryMemoria()

# ====================================================================
# Repositórios
# ====================================================================

def get_config_repository() -> ConfigRepositoryYaml:
    return config_repo

def get_relatorio_repository() -> RelatorioRepositoryArquivos:
    return relatorio_repo


# ====================================================================
# Use Cases por subcomando
# ====================================================================

def get_landscape_use_case() -> LandscapeUseCase:
    return LandscapeUseCase(relatorio_repo)

def get_verify_use_case() -> VerifyUseCase:
    return VerifyUseCase(relatorio_repo)

def get_predict_use_case() -> PredictUseCase:
    return PredictUseCase(relatorio_repo)

def get_graded_use_case() -> GradedUseCase:
    return GradedUseCase(relatorio_repo)

def get_validate_use_case() -> ValidateUseCase:
    return ValidateUseCase(relatorio_repo)

def get_simulate_use_case() -> SimulateUseCase:
    return SimulateUseCase(relatorio_repo)

def get_gallery_use_case() -> GalleryUseCase:
    return GalleryUseCase(galeria_repo=galeria_repo, relatorio_repo=relatorio_repo)
