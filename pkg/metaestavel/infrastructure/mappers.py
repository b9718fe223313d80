"""
Mapeadores (Mappers) para converter entre:
1. Dicionários validados da configuração (YAML/JSON) e a entidade RunConfig
2. Valores numéricos do Core (LogScaled, complexos, arrays) e células/YAML
"""
import math
from typing import Any, Dict, Optional

import numpy as np
from django.conf import settings

from metaestavel.core.entities import Caixa, LogScaled, RunConfig, Tolerancias

RESOLUCAO_PADRAO = 201


# ====================================================================
# 1. CONFIGURAÇÃO DE EXECUÇÃO
# ====================================================================

class RunConfigMapper:
    """Converte o dicionário validado pelo RunConfigSerializer em RunConfig."""

    @staticmethod
    def tolerancias_padrao() -> Tolerancias:
        return Tolerancias(
            newton=getattr(settings, 'METAESTAVEL_NEWTON_TOL', 1e-10),
            degenerescencia=getattr(settings, 'METAESTAVEL_DEGENERESCENCIA_TOL', 1e-8),
            realidade=getattr(settings, 'METAESTAVEL_REALIDADE_TOL', 1e-9),
        )

    @staticmethod
    def to_entity(dados: Dict) -> RunConfig:
        dominio = dados.get('dominio')
        caixa = None
        if dominio:
            caixa = Caixa(inferior=tuple(float(lo) for lo, _ in dominio),
                          superior=tuple(float(hi) for _, hi in dominio))
        d = caixa.dimensao if caixa is not None else 1
        malha = dados.get('malha') or {}
        paisagem = tuple(int(n) for n in malha.get('paisagem') or (RESOLUCAO_PADRAO,) * d)
        validacao = tuple(int(n) for n in malha.get('validacao') or (RESOLUCAO_PADRAO,) * d)

        padrao = RunConfigMapper.tolerancias_padrao()
        informadas = dados.get('tolerancias') or {}
        escala = float(dados.get('escala_tolerancia', 1.0))
        tolerancias = Tolerancias(
            newton=float(informadas.get('newton', padrao.newton)),
            degenerescencia=float(informadas.get('degenerescencia', padrao.degenerescencia)),
            realidade=float(informadas.get('realidade', padrao.realidade)),
            valor=float(informadas.get('valor', padrao.valor)),
        ).escalada(escala)

        return RunConfig(
            operador=dados.get('operador'),
            caixa=caixa,
            malha_paisagem=paisagem,
            malha_validacao=validacao,
            h=tuple(float(h) for h in dados.get('h') or ()),
            saida=dados.get('saida') or getattr(settings, 'METAESTAVEL_SAIDA_PADRAO', 'resultados'),
            sementes_por_eixo=int(dados.get('sementes_por_eixo', 10)),
            tolerancias=tolerancias,
            relatorios=tuple(dados.get('relatorios') or ()),
            caminho_geral=bool(dados.get('caminho_geral', False)),
            ordem_harmonica=int(dados.get('ordem_harmonica', 2)),
            faixa_razao=tuple(float(x) for x in dados.get('faixa_razao') or (0.85, 1.15)),
            escala_tolerancia=escala,
            regra_potencial=dados.get('regra_potencial') or 'simbolico',
            hipo=dict(dados.get('hipo') or {}),
            semigrupo=dict(dados.get('semigrupo') or {}),
            graded=dados.get('graded'),
            workers=int(dados.get('workers') or getattr(settings, 'METAESTAVEL_WORKERS', 1)),
        )

    @staticmethod
    def to_dict(config: RunConfig) -> Dict:
        """Forma serializável de uma RunConfig (mesmas chaves do arquivo)."""
        dados: Dict[str, Any] = {
            'operador': config.operador,
            'malha': {'paisagem': list(config.malha_paisagem), 'validacao': list(config.malha_validacao)},
            'h': list(config.h),
            'saida': config.saida,
            'sementes_por_eixo': config.sementes_por_eixo,
            'tolerancias': {
                'newton': config.tolerancias.newton,
                'degenerescencia': config.tolerancias.degenerescencia,
                'realidade': config.tolerancias.realidade,
            },
            'relatorios': list(config.relatorios),
            'caminho_geral': config.caminho_geral,
            'ordem_harmonica': config.ordem_harmonica,
            'faixa_razao': list(config.faixa_razao),
            'regra_potencial': config.regra_potencial,
        }
        if config.caixa is not None:
            dados['dominio'] = [[lo, hi] for lo, hi in zip(config.caixa.inferior, config.caixa.superior)]
        for chave in ('hipo', 'semigrupo', 'graded'):
            valor = getattr(config, chave)
            if valor:
                dados[chave] = valor
        return para_primitivo(dados)


# ====================================================================
# 2. FORMATAÇÃO NUMÉRICA
# ====================================================================

def formatar_real(valor: float) -> str:
    if math.isnan(valor):
        return 'nan'
    if math.isinf(valor):
        return 'inf' if valor > 0 else '-inf'
    return f"{valor:.17g}"


def formatar_celula(valor: Any) -> str:
    """Célula de CSV: reais com 17 dígitos, LogScaled pela mantissa/expoente."""
    if valor is None:
        return ''
    if isinstance(valor, LogScaled):
        return valor.formatar(digitos=10)
    if isinstance(valor, (bool, np.bool_)):
        return 'true' if valor else 'false'
    if isinstance(valor, (int, np.integer)):
        return str(int(valor))
    if isinstance(valor, (float, np.floating)):
        return formatar_real(float(valor))
    if isinstance(valor, (complex, np.complexfloating)):
        valor = complex(valor)
        if valor.imag == 0:
            return formatar_real(valor.real)
        return f"{formatar_real(valor.real)}{'+' if valor.imag >= 0 else '-'}{formatar_real(abs(valor.imag))}j"
    return str(valor)


def para_primitivo(valor: Any) -> Optional[Any]:
    """Converte recursivamente para tipos que o yaml.safe_dump aceita."""
    if isinstance(valor, dict):
        return {para_primitivo(k): para_primitivo(v) for k, v in valor.items()}
    if isinstance(valor, (list, tuple)):
        return [para_primitivo(v) for v in valor]
    if isinstance(valor, np.ndarray):
        return [para_primitivo(v) for v in valor.tolist()]
    if isinstance(valor, LogScaled):
        return valor.formatar(digitos=10)
    if isinstance(valor, (bool, np.bool_)):
        return bool(valor)
    if isinstance(valor, (int, np.integer)):
        return int(valor)
    if isinstance(valor, (float, np.floating)):
        valor = float(valor)
        return valor if math.isfinite(valor) else formatar_real(valor)
    if isinstance(valor, (complex, np.complexfloating)):
        return formatar_celula(valor)
    return valor
