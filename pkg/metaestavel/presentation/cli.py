"""
Camada de Apresentação: despacho dos subcomandos.

Lê e valida a configuração, aplica as sobrescritas da linha de comando,
executa o caso de uso e escreve sempre o resumo_<subcomando>.yaml.
"""
import logging
from typing import Dict, Optional, Sequence

from metaestavel.core import dependency_injection as di
from metaestavel.core.entities import ResultadoExecucao, RunConfig
from metaestavel.core.exceptions import BaseErroCore, ConfiguracaoInvalidaError
from metaestavel.infrastructure.mappers import RunConfigMapper

from .serializers import RunConfigSerializer

logger = logging.getLogger(__name__)

SUBCOMANDOS = ('landscape', 'verify', 'predict', 'graded', 'validate', 'simulate', 'gallery')

_FABRICAS = {
    'landscape': di.get_landscape_use_case,
    'verify': di.get_verify_use_case,
    'predict': di.get_predict_use_case,
    'graded': di.get_graded_use_case,
    'validate': di.get_validate_use_case,
    'simulate': di.get_simulate_use_case,
}


def ler_lista(texto: Optional[str], tipo=float) -> Optional[list]:
    """'0.05,0.07' -> [0.05, 0.07]."""
    if texto is None:
        return None
    try:
        return [tipo(parte) for parte in str(texto).split(',') if parte.strip()]
    except ValueError as exc:
        raise ConfiguracaoInvalidaError(f"Lista inválida '{texto}': {exc}") from exc


def aplicar_sobrescritas(dados: Dict, sobrescritas: Dict, subcomando: str) -> Dict:
    """--h, --grid, --tol-scale e --out substituem as chaves correspondentes."""
    dados = dict(dados)
    if sobrescritas.get('h'):
        dados['h'] = list(sobrescritas['h'])
    if sobrescritas.get('grid'):
        grade = list(sobrescritas['grid'])
        d = len(dados.get('dominio') or grade)
        if len(grade) == 1:
            grade = grade * d
        malha = dict(dados.get('malha') or {})
        malha['validacao'] = grade
        if subcomando == 'landscape':
            malha['paisagem'] = grade
        dados['malha'] = malha
    if sobrescritas.get('tol_scale') is not None:
        dados['escala_tolerancia'] = sobrescritas['tol_scale']
    if sobrescritas.get('out'):
        dados['saida'] = sobrescritas['out']
    return dados


def validar_config(dados: Dict) -> RunConfig:
    serializer = RunConfigSerializer(data=dados)
    if not serializer.is_valid():
        raise ConfiguracaoInvalidaError(f"Configuração inválida: {dict(serializer.errors)}")
    return RunConfigMapper.to_entity(serializer.validated_data)


def carregar_config(caminho: str, sobrescritas: Optional[Dict] = None, subcomando: str = '') -> RunConfig:
    dados = di.get_config_repository().carregar(caminho)
    return validar_config(aplicar_sobrescritas(dados, sobrescritas or {}, subcomando))


def _escrever_resumo(subcomando: str, saida: str, resultado: ResultadoExecucao):
    try:
        caminho = di.get_relatorio_repository().escrever_yaml(saida, f"resumo_{subcomando}.yaml", {
            'subcomando': subcomando,
            'codigo_saida': resultado.codigo_saida,
            'mensagem': resultado.mensagem,
            'arquivos': list(resultado.arquivos),
            'resumo': resultado.resumo,
        })
    except OSError as exc:
        logger.error("não foi possível escrever o resumo em %s: %s", saida, exc)
        return
    resultado.arquivos.append(caminho)


def run(subcomando: str, config: RunConfig) -> ResultadoExecucao:
    """Executa o subcomando; erros do Core viram o código de saída da família."""
    if subcomando not in _FABRICAS:
        raise ConfiguracaoInvalidaError(
            f"Subcomando desconhecido '{subcomando}'; opções: {', '.join(SUBCOMANDOS)}."
        )
    logger.info("executando %s (saída em %s)", subcomando, config.saida)
    try:
        resultado = _FABRICAS[subcomando]().executar(config)
    except BaseErroCore as exc:
        logger.error("%s falhou (código %d): %s", subcomando, exc.codigo_saida, exc.message)
        resultado = ResultadoExecucao(subcomando=subcomando, codigo_saida=exc.codigo_saida,
                                      mensagem=exc.message, resumo={'erro': type(exc).__name__})
    _escrever_resumo(subcomando, config.saida, resultado)
    return resultado


def run_gallery(nome: str, saida: str) -> ResultadoExecucao:
    resultado = di.get_gallery_use_case().executar(nome, saida)
    _escrever_resumo('gallery', saida, resultado)
    return resultado


def exemplos_disponiveis() -> Sequence[str]:
    return di.galeria_repo.listar()
