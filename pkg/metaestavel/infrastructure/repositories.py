"""
Camada de Infraestrutura: Implementação dos Repositórios.

Esta camada traduz as operações abstratas definidas nas Portas do Core
em chamadas concretas (arquivos YAML e CSV no disco, galeria em memória).
"""
import copy
import csv
import logging
import os
from typing import Dict, List, Sequence

import yaml

from metaestavel.core.exceptions import ConfiguracaoInvalidaError, ParametrosInvalidosError
from metaestavel.core.ports import IConfigRepository, IGaleriaRepository, IRelatorioRepository

from .instances import EXEMPLOS
from .mappers import formatar_celula, para_primitivo

logger = logging.getLogger(__name__)


# ====================================================================
# 1. CONFIGURAÇÃO (Leitura YAML/JSON)
# ====================================================================

class ConfigRepositoryYaml(IConfigRepository):
    """Lê uma RunConfig em YAML (JSON é aceito por ser subconjunto de YAML)."""

    def carregar(self, caminho: str) -> Dict:
        try:
            with open(caminho, encoding='utf-8') as arquivo:
                dados = yaml.safe_load(arquivo)
        except FileNotFoundError as exc:
            raise ConfiguracaoInvalidaError(f"Arquivo de configuração '{caminho}' não encontrado.") from exc
        except yaml.YAMLError as exc:
            raise ConfiguracaoInvalidaError(f"YAML inválido em '{caminho}': {exc}") from exc
        if not isinstance(dados, dict):
            raise ConfiguracaoInvalidaError(f"'{caminho}' não contém um mapeamento de configuração.")
        logger.debug("configuração carregada de %s", caminho)
        return dados


# ====================================================================
# 2. RELATÓRIOS (Escrita CSV/YAML)
# ====================================================================

class RelatorioRepositoryArquivos(IRelatorioRepository):
    """Escreve tabelas CSV e resumos YAML em um diretório (criado se preciso)."""

    @staticmethod
    def _caminho(diretorio: str, nome: str) -> str:
        os.makedirs(diretorio, exist_ok=True)
        return os.path.join(diretorio, nome)

    def escrever_csv(self, diretorio: str, nome: str, cabecalho: Sequence[str],
                     linhas: Sequence[Sequence]) -> str:
        caminho = self._caminho(diretorio, nome)
        with open(caminho, 'w', newline='', encoding='utf-8') as arquivo:
            escritor = csv.writer(arquivo)
            escritor.writerow(cabecalho)
            for linha in linhas:
                escritor.writerow([formatar_celula(v) for v in linha])
        logger.info("%s escrito (%d linhas)", caminho, len(linhas))
        return caminho

    def escrever_yaml(self, diretorio: str, nome: str, dados: Dict) -> str:
        caminho = self._caminho(diretorio, nome)
        with open(caminho, 'w', encoding='utf-8') as arquivo:
            yaml.safe_dump(para_primitivo(dados), arquivo, allow_unicode=True, sort_keys=False)
        logger.info("%s escrito", caminho)
        return caminho


# ====================================================================
# 3. GALERIA (Exemplos em memória)
# ====================================================================

class GaleriaRepositoryMemoria(IGaleriaRepository):
    """Configurações prontas definidas em infrastructure/instances.py."""

    def __init__(self, exemplos: Dict[str, Dict] = None):
        self.exemplos = EXEMPLOS if exemplos is None else exemplos

    def buscar_config(self, nome: str) -> Dict:
        if nome not in self.exemplos:
            raise ParametrosInvalidosError(f"Exemplo desconhecido '{nome}'.")
        return copy.deepcopy(self.exemplos[nome])

    def listar(self) -> List[str]:
        return sorted(self.exemplos)
