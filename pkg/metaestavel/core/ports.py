# metaestavel/core/ports.py
"""
Definição das Portas (Interfaces/Protocolos) da Arquitetura Limpa.

Os casos de uso só conhecem estes contratos; a camada de Infraestrutura
fornece as implementações concretas (arquivos YAML/CSV, galeria em memória).
"""

from typing import Dict, List, Protocol, Sequence
from abc import abstractmethod


# ====================================================================
# 1. REPOSITÓRIOS (Portas de Persistência)
# ====================================================================

class IConfigRepository(Protocol):
    """Protocolo para a leitura de arquivos de configuração de execução."""

    @abstractmethod
    def carregar(self, caminho: str) -> Dict: ...


class IRelatorioRepository(Protocol):
    """Protocolo para a escrita dos relatórios (tabelas e resumos)."""

    @abstractmethod
    def escrever_csv(self, diretorio: str, nome: str, cabecalho: Sequence[str],
                     linhas: Sequence[Sequence]) -> str: ...

    @abstractmethod
    def escrever_yaml(self, diretorio: str, nome: str, dados: Dict) -> str: ...


class IGaleriaRepository(Protocol):
    """Protocolo para as configurações prontas dos exemplos da galeria."""

    @abstractmethod
    def buscar_config(self, nome: str) -> Dict: ...

    @abstractmethod
    def listar(self) -> List[str]: ...
