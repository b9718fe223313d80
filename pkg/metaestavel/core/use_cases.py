# metaestavel/core/use_cases.py
"""
Implementação dos Casos de Uso da aplicação: um por subcomando da CLI.
Esta camada depende apenas das Entidades, dos módulos numéricos e das Portas
(Interfaces) do Core; a escrita de arquivos é delegada ao IRelatorioRepository.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

# Entidades e Exceções
from metaestavel.core.entities import (
    AsymptoticEigenvalue,
    CriticalAnalysis,
    CriticalPoint,
    GradedMatrix,
    Labeling,
    LogScaled,
    Malha,
    OperatorSpec,
    ResultadoExecucao,
    RunConfig,
)
from metaestavel.core.exceptions import (
    ConfiguracaoInvalidaError,
    CriterioAceitacaoError,
    GenerVioladaError,
    ParametrosInvalidosError,
    SubfluxoError,
)
from metaestavel.core.eyring_kramers import (
    classical_rate_1d,
    general_spectrum,
    interaction_model,
    predict,
    return_to_equilibrium_rate,
    transition_times,
)
from metaestavel.core.fields import evaluate_many, mapa_escalar, mapa_identidade, mapa_matricial, mapa_nulo, mapa_vetorial
from metaestavel.core.graded import graded_spectrum, high_precision_eigenvalues, predicted_values, resolvent_gap_check
from metaestavel.core.landscape import check_gener, find_critical_points, label, merge_tree
from metaestavel.core.operator import (
    analyze_all,
    build_operator_spec,
    check_hypo,
    gallery,
    harmonic_gap,
    verify_critical_structure,
    verify_eikonal,
)
from metaestavel.core.validate import compare, discretize, gap_fit, semigroup_check, small_eigs, susy_residual

# Portas (Interfaces) - Importadas do metaestavel/core/ports.py
from metaestavel.core.ports import IGaleriaRepository, IRelatorioRepository

logger = logging.getLogger(__name__)

FAIXA_SUSY = (3.5, 4.5)
FOLGA_TENDENCIA = 1e-3


# ====================================================================
# 0. MONTAGEM DO OPERADOR E DA PAISAGEM
# ====================================================================

def especificacao_de_config(config: RunConfig) -> OperatorSpec:
    """OperatorSpec a partir do bloco `operador` (galeria ou campos brutos)."""
    operador = config.operador
    if not operador:
        raise ConfiguracaoInvalidaError("A configuração não define o bloco 'operador'.")
    if 'galeria' in operador:
        spec = gallery(operador['galeria'], operador.get('parametros') or {})
        if config.caixa is not None and config.caixa.dimensao != spec.dimensao:
            raise ParametrosInvalidosError(
                f"O domínio tem dimensão {config.caixa.dimensao}, o operador '{spec.nome}' tem {spec.dimensao}."
            )
        return spec

    caixa = _exigir_caixa(config)
    d = caixa.dimensao
    if 'f' not in operador:
        raise ConfiguracaoInvalidaError("O operador bruto exige a expressão 'f'.")
    f = mapa_escalar(operador['f'], d)
    A0 = mapa_matricial(operador['A0'], d) if operador.get('A0') is not None else mapa_identidade(d)
    b0 = mapa_vetorial(operador['b0'], d) if operador.get('b0') is not None else mapa_nulo(d)
    c0 = mapa_escalar(operador['c0'], d) if operador.get('c0') is not None else None
    return build_operator_spec(f, A0, b0, c0, caixa=caixa)


def _exigir_caixa(config: RunConfig):
    if config.caixa is None:
        raise ConfiguracaoInvalidaError("A configuração não define o 'dominio'.")
    return config.caixa


def _exigir_h(config: RunConfig) -> Tuple[float, ...]:
    if not config.h:
        raise ConfiguracaoInvalidaError("A configuração não define valores de 'h'.")
    return config.h


def _paisagem(spec: OperatorSpec, config: RunConfig) -> Tuple[List[CriticalPoint], Labeling]:
    caixa = _exigir_caixa(config)
    tol = config.tolerancias
    criticos = find_critical_points(spec.f, caixa, config.sementes_por_eixo, tol.newton, tol.degenerescencia)
    arvore = merge_tree(spec.f, caixa, config.malha_paisagem, criticos, tol.newton, tol.degenerescencia)
    rotulagem = label(arvore, criticos, tol.valor)
    logger.info("paisagem: %d pontos críticos, %d mínimos rotulados, mínimo global %s",
                len(criticos), rotulagem.n0, rotulagem.minimo_global)
    return criticos, rotulagem


def _analises(spec: OperatorSpec, rotulagem: Labeling, config: RunConfig) -> Dict[str, CriticalAnalysis]:
    return analyze_all(spec, list(rotulagem.pontos.values()), config.ordem_harmonica,
                       config.tolerancias.realidade, config.workers)


def _f_corte(rotulagem: Labeling, h: float) -> float:
    """Maior valor de sela (ou de mínimo, sem selas) + 5h|log h|."""
    valores = [s.valor for s in rotulagem.selas] or [rotulagem.ponto(m).valor for m in rotulagem.minimos]
    return max(valores) + 5.0 * h * abs(math.log(h))


def _ponto_csv(x) -> str:
    return ' '.join(f"{float(c):.17g}" for c in np.atleast_1d(x))


# ====================================================================
# 1. PAISAGEM
# ====================================================================

class LandscapeUseCase:
    """Pontos críticos, árvore de fusão e rotulagem dos mínimos."""
    def __init__(self, relatorio_repo: IRelatorioRepository):
        self.relatorio_repo = relatorio_repo

    def executar(self, config: RunConfig) -> ResultadoExecucao:
        spec = especificacao_de_config(config)
        criticos, rotulagem = _paisagem(spec, config)
        gener = check_gener(rotulagem, criticos, config.tolerancias.valor)
        resultado = ResultadoExecucao(subcomando='landscape')

        resultado.arquivos.append(self.relatorio_repo.escrever_csv(
            config.saida, 'criticos.csv', ['id', 'indice', 'valor', 'coordenadas'],
            [[c.id, c.indice, c.valor, _ponto_csv(c.localizacao)] for c in criticos],
        ))
        linhas = []
        for m in rotulagem.minimos:
            r = rotulagem.registro(m)
            linhas.append([m, r.sigma, r.S, ' '.join(r.selas), _componente(r.componente_anterior),
                           r.m_chapeu or '', r.tipo or '', r.classe])
        resultado.arquivos.append(self.relatorio_repo.escrever_csv(
            config.saida, 'rotulagem.csv', ['m_id', 'sigma', 'S', 'j', 'E_minus', 'm_hat', 'tipo', 'classe'], linhas,
        ))
        resultado.resumo = {
            'pontos_criticos': len(criticos),
            'minimos': list(rotulagem.minimos),
            'minimo_global': rotulagem.minimo_global,
            'niveis_sigma': list(rotulagem.niveis_sigma),
            'classes': [list(c) for c in rotulagem.classes],
            'degenerado': rotulagem.degenerado,
            'gener': {
                'aprovado': gener.aprovado,
                'unicidade': gener.unicidade,
                'disjuncao': gener.disjuncao,
                'minimos_nao_unicos': list(gener.minimos_nao_unicos),
                'pares_violadores': [list(p) for p in gener.pares_violadores],
                'tipo_ii': list(gener.tipo_ii),
            },
        }
        resultado.arquivos.append(self.relatorio_repo.escrever_yaml(config.saida, 'resumo_paisagem.yaml',
                                                                    resultado.resumo))
        return resultado


def _componente(componente) -> str:
    return '' if componente is None else f"{componente[0]}:{componente[1]}"


# ====================================================================
# 2. VERIFICAÇÃO DAS HIPÓTESES
# ====================================================================

class VerifyUseCase:
    """Equações eiconais, estrutura nos pontos críticos, análise local e (Hypo)."""
    def __init__(self, relatorio_repo: IRelatorioRepository):
        self.relatorio_repo = relatorio_repo

    def executar(self, config: RunConfig) -> ResultadoExecucao:
        spec = especificacao_de_config(config)
        caixa = _exigir_caixa(config)
        tol = config.tolerancias
        resultado = ResultadoExecucao(subcomando='verify')

        eikonal = verify_eikonal(spec, caixa, tol=tol.realidade)
        resultado.arquivos.append(self.relatorio_repo.escrever_yaml(config.saida, 'eikonal.yaml', {
            'aprovado': eikonal.aprovado,
            'residuo_c0': eikonal.residuo_c0,
            'residuo_transporte': eikonal.residuo_transporte,
            'escala': eikonal.escala,
            'tolerancia': eikonal.tolerancia,
            'amostras': eikonal.amostras,
            'c0_fornecido': eikonal.c0_fornecido,
        }))

        criticos = find_critical_points(spec.f, caixa, config.sementes_por_eixo, tol.newton, tol.degenerescencia)
        estruturas = [verify_critical_structure(spec, u, tol.degenerescencia) for u in criticos]
        resultado.arquivos.append(self.relatorio_repo.escrever_csv(
            config.saida, 'estrutura_critica.csv',
            ['id', 'indice', 'anulamento', 'antissimetria', 'kalman', 'hessiana_invertivel', 'posto_kalman'],
            [[e.ponto_id, u.indice, e.verificacoes['anulamento'], e.verificacoes['antissimetria'],
              e.verificacoes['kalman'], e.verificacoes['hessiana_invertivel'], e.posto_kalman]
             for u, e in zip(criticos, estruturas)],
        ))
        falhas = [e.ponto_id for e in estruturas if not e.aprovado]
        resultado.resumo = {'eikonal': eikonal.aprovado, 'pontos_criticos': len(criticos),
                            'falhas_estruturais': falhas}
        if falhas or not eikonal.aprovado:
            resultado.codigo_saida = 2
            resultado.mensagem = ("Hipóteses estruturais falsificadas"
                                  + (f" em {', '.join(falhas)}" if falhas else " (equações eiconais)") + ".")
            logger.warning(resultado.mensagem)
            return resultado

        analises = analyze_all(spec, criticos, config.ordem_harmonica, tol.realidade, config.workers)
        linhas = []
        for u in criticos:
            a = analises[u.id]
            harmonicos = '; '.join(
                f"{v.nu}:{v.valor.real:.10g}{v.valor.imag:+.10g}j" + (f"x{v.multiplicidade}" if v.coincidente else '')
                for v in a.valores_harmonicos
            )
            linhas.append([u.id, u.indice, '' if a.mu is None else a.mu,
                           '' if a.eta is None else _ponto_csv(a.eta), harmonicos])
        resultado.arquivos.append(self.relatorio_repo.escrever_csv(
            config.saida, 'analises.csv', ['id', 'indice', 'mu', 'eta', 'valores_harmonicos'], linhas,
        ))

        parametros_hipo = dict(config.hipo)
        hipo = check_hypo(spec, caixa, criticos, T=float(parametros_hipo.get('T', 1.0)),
                          C=float(parametros_hipo.get('C', 100.0)),
                          amostras=int(parametros_hipo.get('amostras', 64)), raio=parametros_hipo.get('raio'))
        resultado.arquivos.append(self.relatorio_repo.escrever_yaml(config.saida, 'hipo.yaml', {
            'aprovado': hipo.aprovado,
            'medida_minima': hipo.medida_minima,
            'limiar': hipo.limiar,
            'amostras': hipo.amostras,
            'ignorados': hipo.ignorados,
            'sinalizados': [list(x) for x in hipo.sinalizados],
            'heuristico': hipo.heuristico,
            'aviso': hipo.aviso,
        }))
        if not hipo.aprovado:
            logger.warning("hipo: %d amostras com medida abaixo de %g", len(hipo.sinalizados), hipo.limiar)
        resultado.resumo.update({
            'hipo': hipo.aprovado,
            'lacuna_harmonica_por_h': {h: harmonic_gap(analises, h) for h in config.h},
            'selas': {u.id: analises[u.id].mu for u in criticos if u.indice == 1},
        })
        return resultado


# ====================================================================
# 3. PREVISÕES DE EYRING–KRAMERS
# ====================================================================

class PredictUseCase:
    """λ(m, h) = z(m)·h·e^{−2S(m)/h} e, com caminho_geral, o espectro por blocos graduados."""
    def __init__(self, relatorio_repo: IRelatorioRepository):
        self.relatorio_repo = relatorio_repo

    def executar(self, config: RunConfig) -> ResultadoExecucao:
        _exigir_h(config)
        spec = especificacao_de_config(config)
        criticos, rotulagem = _paisagem(spec, config)
        gener = check_gener(rotulagem, criticos, config.tolerancias.valor)
        if not gener.aprovado and not config.caminho_geral:
            raise GenerVioladaError(
                f"Genericidade violada (mínimos não únicos: {list(gener.minimos_nao_unicos)}, "
                f"pares com selas em comum: {[list(p) for p in gener.pares_violadores]}); "
                "ative 'caminho_geral'."
            )
        analises = _analises(spec, rotulagem, config)
        resultado = ResultadoExecucao(subcomando='predict')

        if gener.aprovado:
            previsoes = predict(rotulagem, analises, config.h)
            resultado.arquivos.append(self.relatorio_repo.escrever_csv(
                config.saida, 'predicoes.csv', ['m_id', 'S', 'z', 'h', 'lambda_log10'],
                [[p.minimo, p.S, '' if p.z is None else p.z, p.h, p.valor.log10()] for p in previsoes],
            ))
            resultado.resumo['previsoes'] = [
                {'m_id': p.minimo, 'h': p.h, 'lambda': p.valor.formatar()} for p in previsoes
            ]
            if spec.dimensao == 1:
                resultado.resumo['taxa_classica_1d'] = self._taxas_classicas(rotulagem, previsoes)

        if config.caminho_geral:
            modelo = interaction_model(rotulagem, analises, config.tolerancias.valor)
            linhas = []
            for h in config.h:
                for v in general_spectrum(modelo, h, config.workers):
                    linhas.append([h, v.classe, v.nivel, ' '.join(v.minimos), v.valor.log10()])
            resultado.arquivos.append(self.relatorio_repo.escrever_csv(
                config.saida, 'espectro_geral.csv', ['h', 'classe', 'nivel', 'minimos', 'valor_log10'], linhas,
            ))
            resultado.resumo['modelo_interacao'] = {
                'ordem': list(modelo.ordem),
                'definida_positiva': modelo.definida_positiva,
                'menor_autovalor': modelo.menor_autovalor,
            }
        resultado.resumo['gener'] = gener.aprovado
        logger.info("previsões escritas para %d valores de h", len(config.h))
        return resultado

    @staticmethod
    def _taxas_classicas(rotulagem: Labeling, previsoes: Sequence[AsymptoticEigenvalue]) -> List[Dict]:
        taxas = []
        for p in previsoes:
            if p.valor.e_zero:
                continue
            registro = rotulagem.registro(p.minimo)
            if len(registro.selas) != 1:
                continue
            f2m = float(rotulagem.ponto(p.minimo).hessiana[0, 0])
            f2s = float(rotulagem.ponto(registro.selas[0]).hessiana[0, 0])
            taxas.append({'m_id': p.minimo, 'h': p.h,
                          'lambda': classical_rate_1d(f2m, f2s, p.S, p.h).formatar()})
        return taxas


# ====================================================================
# 4. MATRIZES GRADUADAS
# ====================================================================

class GradedUseCase:
    """Espectro de Ω(τ)MΩ(τ) por complementos de Schur, sem formar o produto."""
    def __init__(self, relatorio_repo: IRelatorioRepository):
        self.relatorio_repo = relatorio_repo

    @staticmethod
    def matriz_graduada(dados: Optional[Dict]) -> GradedMatrix:
        if not dados:
            raise ConfiguracaoInvalidaError("A configuração não define o bloco 'graded'.")
        if dados.get('log_tau') is not None:
            tau = tuple(LogScaled.exp(float(t)) for t in dados['log_tau'])
        else:
            tau = tuple(LogScaled.de_real(float(t)) for t in dados.get('tau', ()))
        return GradedMatrix(dims=tuple(int(d) for d in dados['dims']), tau=tau,
                            M=np.asarray(dados['matriz'], dtype=float), classe=dados.get('classe', 'GS'),
                            limite_assimetria=float(dados.get('limite_assimetria', 0.0)))

    def executar(self, config: RunConfig) -> ResultadoExecucao:
        G = self.matriz_graduada(config.graded)
        niveis = graded_spectrum(G)
        resultado = ResultadoExecucao(subcomando='graded')
        linhas = [[nivel.nivel, float(autovalor), nivel.peso.log10(), valor.log10()]
                  for nivel in niveis for autovalor, valor in zip(nivel.autovalores, nivel.valores())]
        resultado.arquivos.append(self.relatorio_repo.escrever_csv(
            config.saida, 'graded.csv', ['level', 'eigenvalue', 'weight_log10', 'value_log10'], linhas,
        ))
        resultado.resumo = {
            'niveis': len(niveis),
            'dims': list(G.dims),
            'condicao_maxima': max(n.condicao for n in niveis),
            'incerteza_assimetria': niveis[0].incerteza,
        }

        if 'alta_precisao' in config.relatorios:
            previstos = predicted_values(G)
            referencia = high_precision_eigenvalues(G)
            erros = [abs(math.expm1(p.log_magnitude - r.log_magnitude))
                     for p, r in zip(previstos, referencia) if not (p.e_zero or r.e_zero)]
            resultado.resumo['erro_relativo_alta_precisao'] = max(erros) if erros else 0.0

        if 'resolvente' in config.relatorios:
            try:
                relatorio = resolvent_gap_check(G, self._amostras_resolvente(G))
            except SubfluxoError as exc:
                logger.warning("resolvente ignorado: %s", exc.message)
            else:
                resultado.arquivos.append(self.relatorio_repo.escrever_yaml(config.saida, 'resolvente.yaml', {
                    'constante': relatorio.constante,
                    'amostras_usadas': relatorio.amostras_usadas,
                    'amostras_excluidas': relatorio.amostras_excluidas,
                    'separacoes_log10': list(relatorio.separacoes),
                }))
        return resultado

    @staticmethod
    def _amostras_resolvente(G: GradedMatrix, angulos: int = 8, raio_relativo: float = 0.75) -> List[complex]:
        """Círculos de raio 0.75|λ| em volta de cada valor previsto."""
        amostras = []
        for valor in predicted_values(G):
            if valor.e_zero:
                continue
            centro = float(valor)
            for theta in np.linspace(0.0, 2.0 * np.pi, angulos, endpoint=False):
                amostras.append(centro + raio_relativo * abs(centro) * complex(math.cos(theta), math.sin(theta)))
        return amostras


# ====================================================================
# 5. VALIDAÇÃO NUMÉRICA
# ====================================================================

class ValidateUseCase:
    """Varredura em h: autovalores pequenos de P̂ comparados às previsões."""
    def __init__(self, relatorio_repo: IRelatorioRepository):
        self.relatorio_repo = relatorio_repo

    def executar(self, config: RunConfig) -> ResultadoExecucao:
        spec = especificacao_de_config(config)
        if spec.perturbacao is not None:
            return self._residuo_susy(spec, config)

        _exigir_h(config)
        criticos, rotulagem = _paisagem(spec, config)
        gener = check_gener(rotulagem, criticos, config.tolerancias.valor)
        if not gener.aprovado:
            raise GenerVioladaError("A validação exige a hipótese de genericidade.")
        analises = _analises(spec, rotulagem, config)
        previsoes = predict(rotulagem, analises, config.h)
        malha = Malha(_exigir_caixa(config), config.malha_validacao)
        minimos = [rotulagem.ponto(m) for m in rotulagem.minimos]

        def autovalores_em(h: float):
            D = discretize(spec, malha, h, _f_corte(rotulagem, h), config.regra_potencial, minimos)
            return h, small_eigs(D, rotulagem.n0)

        with ThreadPoolExecutor(max_workers=max(1, config.workers)) as executor:
            por_h = dict(executor.map(autovalores_em, config.h))

        linhas = compare(previsoes, {h: e.pequenos for h, e in por_h.items()}, config.h)
        resultado = ResultadoExecucao(subcomando='validate')
        resultado.arquivos.append(self.relatorio_repo.escrever_csv(
            config.saida, 'validacao.csv', ['h', 'm_id', 'lambda_pred', 'lambda_num', 'ratio', 'log_ratio'],
            [[l.h, l.minimo, l.previsto, l.numerico.real, '' if l.razao is None else l.razao,
              '' if l.log_razao is None else l.log_razao] for l in linhas],
        ))
        lacunas = [por_h[h].lacuna.real for h in config.h]
        resultado.arquivos.append(self.relatorio_repo.escrever_csv(
            config.saida, 'lacuna.csv', ['h', 'gap'], [[h, g] for h, g in zip(config.h, lacunas)],
        ))

        baixo, alto = self.faixa(config)
        fora = [(l.minimo, l.h, l.razao) for l in linhas
                if not l.previsto.e_zero and (l.razao is None or not baixo <= l.razao <= alto)]
        nao_monotonos = self._tendencia_monotona(linhas, FOLGA_TENDENCIA * config.escala_tolerancia)
        resultado.resumo = {
            'faixa': [baixo, alto],
            'epsilon_ajustado': gap_fit(config.h, lacunas),
            'epsilon_harmonico': harmonic_gap(analises, 1.0),
            'tendencia_monotona': not nao_monotonos,
            'tendencia_violada': nao_monotonos,
            'metodos': {h: e.metodo for h, e in por_h.items()},
            'fora_da_faixa': [list(f) for f in fora],
        }
        falhas = []
        if fora:
            falhas.append(f"{len(fora)} razões fora da faixa [{baixo:.3g}, {alto:.3g}]")
        if nao_monotonos:
            falhas.append(f"|log razão| não decresce com h em {', '.join(nao_monotonos)}")
        if falhas:
            resultado.codigo_saida = CriterioAceitacaoError.codigo_saida
            resultado.mensagem = '; '.join(falhas) + '.'
            logger.warning(resultado.mensagem)
        return resultado

    @staticmethod
    def faixa(config: RunConfig) -> Tuple[float, float]:
        """Faixa de aceitação em torno de 1, alargada por escala_tolerancia."""
        baixo, alto = config.faixa_razao
        escala = config.escala_tolerancia
        return 1.0 - (1.0 - baixo) * escala, 1.0 + (alto - 1.0) * escala

    @staticmethod
    def _tendencia_monotona(linhas, folga: float = 0.0) -> List[str]:
        """Mínimos cujo |log razão| não decresce quando h diminui (a menos de `folga`)."""
        por_minimo: Dict[str, List[Tuple[float, float]]] = {}
        for l in linhas:
            if l.log_razao is not None:
                por_minimo.setdefault(l.minimo, []).append((l.h, abs(l.log_razao)))
        violados = []
        for minimo, pares in por_minimo.items():
            erros = [e for _, e in sorted(pares)]
            if any(b < a - folga for a, b in zip(erros, erros[1:])):
                violados.append(minimo)
        return sorted(violados)

    def _residuo_susy(self, spec: OperatorSpec, config: RunConfig) -> ResultadoExecucao:
        """Resíduo de P_per e^{−f/h} em N e 2N − 1 pontos por eixo: razão ≈ 4."""
        caixa = _exigir_caixa(config)
        h = _exigir_h(config)[0]
        grossa = Malha(caixa, config.malha_validacao)
        fina = Malha(caixa, tuple(2 * n - 1 for n in config.malha_validacao))
        r_grossa = susy_residual(spec, grossa, h)
        r_fina = susy_residual(spec, fina, h)
        razao = r_grossa / r_fina if r_fina > 0 else math.inf
        centro = 0.5 * sum(FAIXA_SUSY)
        meia = 0.5 * (FAIXA_SUSY[1] - FAIXA_SUSY[0]) * config.escala_tolerancia
        resultado = ResultadoExecucao(subcomando='validate')
        resultado.resumo = {'h': h, 'residuo_grossa': r_grossa, 'residuo_fina': r_fina, 'razao': razao,
                            'faixa': [centro - meia, centro + meia]}
        resultado.arquivos.append(self.relatorio_repo.escrever_yaml(config.saida, 'susy.yaml', resultado.resumo))
        if not centro - meia <= razao <= centro + meia:
            resultado.codigo_saida = CriterioAceitacaoError.codigo_saida
            resultado.mensagem = f"Razão dos resíduos {razao:.4g} fora de [{centro - meia:.3g}, {centro + meia:.3g}]."
        return resultado


# ====================================================================
# 6. SEMIGRUPO
# ====================================================================

class SimulateUseCase:
    """Evolução e^{−tP/h}u₀: platôs nas janelas de metastabilidade e taxa de retorno."""
    def __init__(self, relatorio_repo: IRelatorioRepository):
        self.relatorio_repo = relatorio_repo

    def executar(self, config: RunConfig) -> ResultadoExecucao:
        spec = especificacao_de_config(config)
        criticos, rotulagem = _paisagem(spec, config)
        analises = _analises(spec, rotulagem, config)
        h = _exigir_h(config)[0]
        parametros = dict(config.semigrupo)
        previsoes = sorted(predict(rotulagem, analises, [h]), key=lambda p: p.valor)

        malha = Malha(_exigir_caixa(config), config.malha_validacao)
        minimos = [rotulagem.ponto(m) for m in rotulagem.minimos]
        D = discretize(spec, malha, h, _f_corte(rotulagem, h), config.regra_potencial, minimos)
        janelas = transition_times(rotulagem, h, float(parametros.get('delta', 0.8)), parametros.get('g_mais'))
        u0 = self._dado_inicial(spec, rotulagem, previsoes, malha, D.ativos, h, parametros.get('u0'))

        relatorio = semigroup_check(
            D, u0, janelas, [p.S for p in previsoes], return_to_equilibrium_rate(previsoes, h),
            tol_plateau=float(parametros.get('tol_plateau', 1e-3)) * config.escala_tolerancia,
            tol_taxa=float(parametros.get('tol_taxa', 0.2)) * config.escala_tolerancia,
        )
        resultado = ResultadoExecucao(subcomando='simulate')
        resultado.arquivos.append(self.relatorio_repo.escrever_csv(
            config.saida, 'semigrupo.csv', ['t', 'janela', 'erro'],
            [[t, p.janela.k, e] for p in relatorio.plateaus for t, e in zip(p.tempos, p.erros)],
        ))
        resultado.arquivos.append(self.relatorio_repo.escrever_csv(
            config.saida, 'equilibrio.csv', ['t', 'distancia'],
            [[t, d] for t, d in zip(relatorio.tempos, relatorio.distancias)],
        ))
        resultado.resumo = {
            'h': h,
            'janelas': [{'k': p.janela.k, 'inicio': p.janela.inicio, 'fim': p.janela.fim, 'S_k': p.janela.S_k,
                         'vazia': p.vazia, 'erro_maximo': p.erro_maximo} for p in relatorio.plateaus],
            'taxa_ajustada': relatorio.taxa_ajustada,
            'taxa_prevista': relatorio.taxa_prevista,
            'erro_taxa': relatorio.erro_taxa,
            'condicao_autovetores': relatorio.condicao,
            'aprovado_plateaus': relatorio.aprovado_plateaus,
            'aprovado_taxa': relatorio.aprovado_taxa,
        }
        resultado.arquivos.append(self.relatorio_repo.escrever_yaml(config.saida, 'resumo_semigrupo.yaml',
                                                                    resultado.resumo))
        if not (relatorio.aprovado_plateaus and relatorio.aprovado_taxa):
            resultado.codigo_saida = CriterioAceitacaoError.codigo_saida
            resultado.mensagem = "Critérios do semigrupo não atendidos (platôs ou taxa de retorno)."
            logger.warning(resultado.mensagem)
        return resultado

    @staticmethod
    def _dado_inicial(spec: OperatorSpec, rotulagem: Labeling, previsoes: Sequence[AsymptoticEigenvalue],
                      malha: Malha, ativos: np.ndarray, h: float, expressao=None) -> np.ndarray:
        """u₀ da configuração ou e^{−|x − m|²/h} no mínimo de menor S."""
        pontos = malha.pontos()[ativos]
        if expressao is not None:
            return np.asarray(evaluate_many(mapa_escalar(expressao, spec.dimensao), pontos), dtype=float)
        raso = next((p.minimo for p in previsoes if not p.valor.e_zero), rotulagem.minimo_global)
        centro = rotulagem.ponto(raso).localizacao
        return np.exp(-np.sum((pontos - centro) ** 2, axis=1) / h)


# ====================================================================
# 7. GALERIA
# ====================================================================

class GalleryUseCase:
    """Escreve uma RunConfig pronta para um exemplo nomeado."""
    def __init__(self, galeria_repo: IGaleriaRepository, relatorio_repo: IRelatorioRepository):
        self.galeria_repo = galeria_repo
        self.relatorio_repo = relatorio_repo

    def executar(self, nome: str, saida: str) -> ResultadoExecucao:
        if nome not in self.galeria_repo.listar():
            raise ParametrosInvalidosError(
                f"Exemplo desconhecido '{nome}'; opções: {', '.join(self.galeria_repo.listar())}."
            )
        dados = self.galeria_repo.buscar_config(nome)
        operador = dados.get('operador', {})
        if 'galeria' in operador:
            # falha cedo se os parâmetros guardados não constroem o operador
            gallery(operador['galeria'], operador.get('parametros') or {})
        caminho = self.relatorio_repo.escrever_yaml(saida, f"{nome}.yaml", dados)
        logger.info("configuração de exemplo '%s' escrita em %s", nome, caminho)
        return ResultadoExecucao(subcomando='gallery', arquivos=[caminho], resumo={'exemplo': nome})
