# metaestavel/core/validate.py
"""
Validação numérica: discretização de P por diferenças finitas, autovalores
pequenos, comparação com as previsões, semigrupo e^{−tP/h} por decomposição
espectral e o resíduo da perturbação sem estrutura supersimétrica.
"""
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from metaestavel.core.entities import (
    AsymptoticEigenvalue,
    ComparisonRow,
    CriticalPoint,
    DiscreteOperator,
    Malha,
    OperatorSpec,
    PlateauReport,
    PlateauWindow,
    SemigroupReport,
    SmallEigs,
)
from metaestavel.core.exceptions import (
    AutovaloresFalhouError,
    ContagemIncompativelError,
    DecomposicaoMalCondicionadaError,
    DimensaoIncompativelError,
    ParametrosInvalidosError,
    ResolucaoInsuficienteError,
)
from metaestavel.core.fields import derivative_many, evaluate, evaluate_many
from metaestavel.core.operator import c0_em, c1_em, verificar_desigualdade_susy

logger = logging.getLogger(__name__)

REGRAS_POTENCIAL = ('simbolico', 'gibbs')
LIMITE_DENSO = 4000
PONTOS_POR_POCO = 20
LIMITE_CONDICAO_AUTOVETORES = 1e10

Deslocamento = Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class PartesDiscretas:
    """P̂₂, P̂₁ (esparsas) e a diagonal de P̂₀ restritas aos nós ativos."""
    ativos: np.ndarray
    P2: sps.csr_matrix
    P1: sps.csr_matrix
    P0: np.ndarray
    valores_f: np.ndarray


# ====================================================================
# ESTÊNCEIS
# ====================================================================

def _vizinho(resolucao: Tuple[int, ...], deslocamento: Deslocamento) -> np.ndarray:
    """Índice achatado do nó k + deslocamento (−1 fora da malha)."""
    indices = np.indices(resolucao).reshape(len(resolucao), -1).T
    alvo = indices + np.asarray(deslocamento)
    dentro = np.all((alvo >= 0) & (alvo < np.asarray(resolucao)), axis=1)
    vizinhos = np.full(indices.shape[0], -1, dtype=np.int64)
    vizinhos[dentro] = np.ravel_multi_index(tuple(alvo[dentro].T), resolucao)
    return vizinhos


def _unitario(d: int, i: int, s: int = 1) -> Deslocamento:
    e = [0] * d
    e[i] = s
    return tuple(e)


def _somar(estencil: Dict[Deslocamento, np.ndarray], deslocamento: Deslocamento, coeficiente: np.ndarray):
    if deslocamento in estencil:
        estencil[deslocamento] = estencil[deslocamento] + coeficiente
    else:
        estencil[deslocamento] = coeficiente


def _estencil_difusao(spec: OperatorSpec, malha: Malha, pontos: np.ndarray, h: float) -> Dict[Deslocamento, np.ndarray]:
    """−h² div(A⁰∇u): fluxos com A⁰ nos pontos médios e termos cruzados centrados."""
    d = malha.dimensao
    passo = np.asarray(malha.espacamento)
    estencil: Dict[Deslocamento, np.ndarray] = {}
    for i in range(d):
        meio = 0.5 * passo[i] * np.eye(d)[i]
        mais = evaluate_many(spec.A0, pontos + meio)[:, i, i]
        menos = evaluate_many(spec.A0, pontos - meio)[:, i, i]
        escala = h * h / passo[i] ** 2
        _somar(estencil, _unitario(d, i, 1), -escala * mais)
        _somar(estencil, _unitario(d, i, -1), -escala * menos)
        _somar(estencil, (0,) * d, escala * (mais + menos))

    A_nos = evaluate_many(spec.A0, pontos)
    for i in range(d):
        for j in range(d):
            if i == j or not np.any(A_nos[:, i, j]):
                continue
            for si in (1, -1):
                A_desl = evaluate_many(spec.A0, pontos + si * passo[i] * np.eye(d)[i])[:, i, j]
                for sj in (1, -1):
                    deslocamento = tuple(np.asarray(_unitario(d, i, si)) + np.asarray(_unitario(d, j, sj)))
                    _somar(estencil, deslocamento, -h * h * si * sj * A_desl / (4.0 * passo[i] * passo[j]))
    return estencil


def _estencil_transporte(campo: np.ndarray, campo_deslocado, malha: Malha, h: float,
                         fator: float) -> Dict[Deslocamento, np.ndarray]:
    """Forma antissimétrica de fator·(b·h∇ + h div∘b): (k, k±e_i) ↦ ±fator·h(b_k + b_{k±e})/(2Δx_i)."""
    d = malha.dimensao
    passo = malha.espacamento
    estencil: Dict[Deslocamento, np.ndarray] = {}
    for i in range(d):
        for s in (1, -1):
            vizinho = campo_deslocado(i, s)
            _somar(estencil, _unitario(d, i, s), s * fator * h * (campo[:, i] + vizinho) / (2.0 * passo[i]))
    return estencil


def _montar(estencil: Dict[Deslocamento, np.ndarray], malha: Malha, ativos: np.ndarray) -> sps.csr_matrix:
    """Restringe o estêncil aos nós ativos (Dirichlet homogêneo nos demais)."""
    mascara = np.zeros(malha.total, dtype=bool)
    mascara[ativos] = True
    posicao = np.full(malha.total, -1, dtype=np.int64)
    posicao[ativos] = np.arange(ativos.size)
    linhas, colunas, dados = [], [], []
    for deslocamento, coeficiente in estencil.items():
        vizinhos = _vizinho(malha.resolucao, deslocamento)
        validos = mascara & (vizinhos >= 0)
        validos[validos] = mascara[vizinhos[validos]]
        k = np.flatnonzero(validos & (coeficiente != 0))
        linhas.append(posicao[k])
        colunas.append(posicao[vizinhos[k]])
        dados.append(coeficiente[k])
    m = ativos.size
    if not linhas:
        return sps.csr_matrix((m, m))
    matriz = sps.coo_matrix((np.concatenate(dados), (np.concatenate(linhas), np.concatenate(colunas))),
                            shape=(m, m)).tocsr()
    matriz.eliminate_zeros()
    return matriz


def _potencial_gibbs(estencil: Dict[Deslocamento, np.ndarray], spec: OperatorSpec, malha: Malha,
                     pontos: np.ndarray, f: np.ndarray, h: float) -> np.ndarray:
    """c_k = −Σ_l M_kl e^{−(f_l − f_k)/h}, com f avaliada também fora da região ativa."""
    passo = np.asarray(malha.espacamento)
    c = np.zeros(f.size)
    with np.errstate(over='ignore', under='ignore'):
        for deslocamento, coeficiente in estencil.items():
            if any(deslocamento):
                f_vizinho = evaluate_many(spec.f, pontos + np.asarray(deslocamento) * passo)
                c -= coeficiente * np.exp(-(f_vizinho - f) / h)
            else:
                c -= coeficiente
    return c


def _verificar_resolucao(malha: Malha, h: float, minimos: Sequence[CriticalPoint]):
    """Largura do poço 6√(h/|H_ii|) deve conter ao menos 20 pontos por eixo."""
    passo = np.asarray(malha.espacamento)
    for m in minimos:
        if not malha.caixa.contem(m.localizacao):
            continue
        for i in range(malha.dimensao):
            curvatura = abs(float(m.hessiana[i, i]))
            if curvatura == 0.0:
                continue
            pontos = 6.0 * math.sqrt(h / curvatura) / passo[i]
            if pontos < PONTOS_POR_POCO:
                raise ResolucaoInsuficienteError(m.id, pontos, PONTOS_POR_POCO)


def discretize_parts(spec: OperatorSpec, malha: Malha, h: float, f_corte: Optional[float] = None,
                     regra_potencial: str = 'simbolico') -> PartesDiscretas:
    if h <= 0:
        raise ParametrosInvalidosError("h deve ser positivo.")
    if regra_potencial not in REGRAS_POTENCIAL:
        raise ParametrosInvalidosError(f"Regra de potencial desconhecida '{regra_potencial}'.")
    if malha.dimensao != spec.dimensao:
        raise DimensaoIncompativelError(spec.dimensao, malha.dimensao)
    pontos = malha.pontos()
    f = evaluate_many(spec.f, pontos)
    ativos = np.flatnonzero(f < f_corte) if f_corte is not None else np.arange(malha.total)
    if ativos.size == 0:
        raise ParametrosInvalidosError(f"Nenhum nó com f < {f_corte}.")

    difusao = _estencil_difusao(spec, malha, pontos, h)
    transporte: Dict[Deslocamento, np.ndarray] = {}
    if not spec.b0.e_nulo:
        passo = np.asarray(malha.espacamento)
        b = evaluate_many(spec.b0, pontos)
        transporte = _estencil_transporte(
            b, lambda i, s: evaluate_many(spec.b0, pontos + s * passo[i] * np.eye(malha.dimensao)[i])[:, i],
            malha, h, fator=0.5,
        )

    if regra_potencial == 'simbolico':
        c = c0_em(spec, pontos) + h * c1_em(spec, pontos)
    else:
        combinado = dict(difusao)
        for deslocamento, coeficiente in transporte.items():
            _somar(combinado, deslocamento, coeficiente)
        c = _potencial_gibbs(combinado, spec, malha, pontos, f, h)

    return PartesDiscretas(ativos=ativos, P2=_montar(difusao, malha, ativos), P1=_montar(transporte, malha, ativos),
                           P0=c[ativos], valores_f=f[ativos])


def discretize(spec: OperatorSpec, malha: Malha, h: float, f_corte: Optional[float] = None,
               regra_potencial: str = 'simbolico', minimos: Sequence[CriticalPoint] = (),
               verificar_resolucao: bool = True) -> DiscreteOperator:
    """P̂ = P̂₂ + P̂₁ + P̂₀ nos nós com f < f_corte, Dirichlet fora."""
    if verificar_resolucao:
        _verificar_resolucao(malha, h, minimos)
    partes = discretize_parts(spec, malha, h, f_corte, regra_potencial)
    matriz = (partes.P2 + partes.P1 + sps.diags(partes.P0)).tocsr()
    simetrico = partes.P1.nnz == 0
    if simetrico:
        matriz = ((matriz + matriz.T) * 0.5).tocsr()
    logger.info("P discretizado: %d nós ativos de %d, h = %g, regra %s", partes.ativos.size, malha.total,
                h, regra_potencial)
    return DiscreteOperator(malha=malha, h=h, matriz=matriz, ativos=partes.ativos, valores_f=partes.valores_f,
                            f_corte=f_corte, regra_potencial=regra_potencial, simetrico=simetrico)


def gibbs_residual(D: DiscreteOperator) -> float:
    """‖P̂e^{−f/h}‖/‖e^{−f/h}‖ na malha."""
    g = D.gibbs()
    return float(np.linalg.norm(D.matriz @ g) / np.linalg.norm(g))


# ====================================================================
# AUTOVALORES PEQUENOS E COMPARAÇÃO
# ====================================================================

def small_eigs(D: DiscreteOperator, quantidade: int) -> SmallEigs:
    """Os `quantidade` autovalores de menor |λ| mais o primeiro do aglomerado seguinte."""
    k = quantidade + 1
    n = D.dimensao
    if k > n:
        raise AutovaloresFalhouError(f"Pedidos {k} autovalores de uma matriz de ordem {n}.")
    try:
        if n <= LIMITE_DENSO:
            densa = D.matriz.toarray()
            if D.simetrico:
                autovalores = sla.eigh(densa, eigvals_only=True, subset_by_index=[0, k - 1])
            else:
                autovalores = sla.eigvals(densa)
            metodo = 'denso'
        else:
            sigma = -1e-3 * D.h
            if D.simetrico:
                autovalores = spla.eigsh(D.matriz.tocsc(), k=k, sigma=sigma, which='LM', return_eigenvectors=False)
            else:
                autovalores = spla.eigs(D.matriz.tocsc(), k=k, sigma=sigma, which='LM', return_eigenvectors=False)
            metodo = 'shift-invert'
    except (sla.LinAlgError, spla.ArpackError, spla.ArpackNoConvergence) as exc:
        raise AutovaloresFalhouError(f"O autossolver falhou: {exc}") from exc

    autovalores = np.asarray(autovalores, dtype=complex)
    autovalores = autovalores[np.argsort(np.abs(autovalores), kind='stable')][:k]
    return SmallEigs(pequenos=autovalores[:quantidade], lacuna=complex(autovalores[quantidade]), metodo=metodo)


def compare(previsoes: Sequence[AsymptoticEigenvalue], numericos: Dict[float, Sequence[complex]],
            h_lista: Sequence[float]) -> List[ComparisonRow]:
    """Pareia previsões e autovalores numéricos por ordem crescente de magnitude."""
    linhas: List[ComparisonRow] = []
    for h in h_lista:
        previstos = sorted((p for p in previsoes if p.h == h), key=lambda p: p.valor)
        obtidos = sorted(numericos[h], key=abs)
        if len(previstos) != len(obtidos):
            raise ContagemIncompativelError(len(previstos), len(obtidos))
        for previsto, numerico in zip(previstos, obtidos):
            numerico = complex(numerico)
            if previsto.valor.e_zero:
                linhas.append(ComparisonRow(h, previsto.minimo, previsto.valor, numerico, None, None))
                continue
            real = numerico.real
            if real > 0:
                log_razao = math.log(real) - previsto.valor.log_magnitude
                razao = math.exp(log_razao)
            else:
                log_razao = None
                razao = real / float(previsto.valor) if previsto.valor.representavel() else None
            linhas.append(ComparisonRow(h, previsto.minimo, previsto.valor, numerico, razao, log_razao))
    return linhas


def gap_fit(h_lista: Sequence[float], lacunas: Sequence[float]) -> float:
    """ε por mínimos quadrados em lacuna ≈ ε·h."""
    h = np.asarray(h_lista, dtype=float)
    lacunas = np.asarray(lacunas, dtype=float)
    return float(np.sum(h * lacunas) / np.sum(h * h))


# ====================================================================
# SEMIGRUPO
# ====================================================================

class _Decomposicao:
    """u(t) = V e^{−tΛ/h} V⁻¹u₀ a partir da decomposição espectral densa."""

    def __init__(self, D: DiscreteOperator):
        densa = D.matriz.toarray()
        self.h = D.h
        if D.simetrico:
            w, V = sla.eigh(densa)
            self.inversa = V.T
            self.condicao = 1.0
        else:
            w, V = sla.eig(densa)
            self.condicao = float(np.linalg.cond(V))
            if not np.isfinite(self.condicao) or self.condicao > LIMITE_CONDICAO_AUTOVETORES:
                raise DecomposicaoMalCondicionadaError(self.condicao)
            self.inversa = None
        ordem = np.argsort(np.abs(w), kind='stable')
        self.autovalores = w[ordem]
        self.V = V[:, ordem]
        if self.inversa is not None:
            self.inversa = self.inversa[ordem]

    def coeficientes(self, u0: np.ndarray) -> np.ndarray:
        if self.inversa is not None:
            return self.inversa @ u0
        return sla.lu_solve(sla.lu_factor(self.V), u0.astype(complex))

    def evoluir(self, coeficientes: np.ndarray, t: float) -> np.ndarray:
        expoentes = -t * np.maximum(self.autovalores.real, 0.0) / self.h - 1j * t * self.autovalores.imag / self.h
        return np.real(self.V @ (np.exp(expoentes) * coeficientes))

    def projetar(self, coeficientes: np.ndarray, indices: Sequence[int]) -> np.ndarray:
        indices = list(indices)
        return np.real(self.V[:, indices] @ coeficientes[indices])


def semigroup_check(D: DiscreteOperator, u0: np.ndarray, janelas: Sequence[PlateauWindow],
                    S_modos: Sequence[float], taxa_prevista: float, tol_plateau: float = 1e-3,
                    tol_taxa: float = 0.2, amostras_janela: int = 25) -> SemigroupReport:
    """Platôs ‖u(t) − Π≤_k u₀‖/‖u₀‖ nas janelas e a taxa ajustada de retorno ao equilíbrio.

    S_modos dá, para cada autovalor pequeno em ordem crescente de |λ|, o S do
    mínimo pareado (+∞ para o núcleo).
    """
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (D.dimensao,):
        raise DimensaoIncompativelError(D.dimensao, u0.shape)
    decomposicao = _Decomposicao(D)
    coeficientes = decomposicao.coeficientes(u0)
    norma = float(np.linalg.norm(u0))

    plateaus: List[PlateauReport] = []
    for janela in janelas:
        if janela.vazia:
            plateaus.append(PlateauReport(janela=janela, erro_maximo=float('nan'), tempos=()))
            continue
        indices = [i for i, S in enumerate(S_modos) if S >= janela.S_k]
        alvo = decomposicao.projetar(coeficientes, indices)
        tempos = np.geomspace(janela.inicio, janela.fim, amostras_janela)
        erros = [np.linalg.norm(decomposicao.evoluir(coeficientes, t) - alvo) / norma for t in tempos]
        plateaus.append(PlateauReport(janela=janela, erro_maximo=float(max(erros)),
                                      tempos=tuple(float(t) for t in tempos),
                                      erros=tuple(float(e) for e in erros)))

    equilibrio = decomposicao.projetar(coeficientes, [0])
    tempos = np.linspace(1.0, 4.0, 16) / taxa_prevista
    distancias = np.array([np.linalg.norm(decomposicao.evoluir(coeficientes, t) - equilibrio) / norma
                           for t in tempos])
    positivas = distancias > 0
    if np.count_nonzero(positivas) >= 2:
        taxa = -float(np.polyfit(tempos[positivas], np.log(distancias[positivas]), 1)[0])
    else:
        # u₀ já está no equilíbrio
        taxa = float('nan')
    relatorio = SemigroupReport(plateaus=tuple(plateaus), taxa_ajustada=taxa,
                                taxa_prevista=taxa_prevista, condicao=decomposicao.condicao, tempos=tempos,
                                distancias=distancias, tol_plateau=tol_plateau, tol_taxa=tol_taxa)
    logger.info("semigrupo: taxa ajustada %.6g, prevista %.6g (erro %.3f)", relatorio.taxa_ajustada,
                taxa_prevista, relatorio.erro_taxa)
    return relatorio


# ====================================================================
# PERTURBAÇÃO SEM ESTRUTURA SUPERSIMÉTRICA
# ====================================================================

def perturbation_field(spec: OperatorSpec, pontos: np.ndarray, h: float) -> np.ndarray:
    """b^per = e^{2(f − C₀)/h}(∂₂χ, −∂₁χ)."""
    perturbacao = spec.perturbacao
    f = evaluate_many(spec.f, pontos)
    grad_chi = derivative_many(perturbacao.chi, pontos, 1)
    fator = np.exp(2.0 * (f - perturbacao.C0) / h)
    return fator[:, None] * np.stack([grad_chi[:, 1], -grad_chi[:, 0]], axis=1)


def susy_residual(spec: OperatorSpec, malha: Malha, h: float, f_corte: Optional[float] = None) -> float:
    """Norma discreta L² de P̂_per e^{−f/h} nas linhas interiores da região {f < f_corte}."""
    perturbacao = spec.perturbacao
    if perturbacao is None or spec.dimensao != 2:
        raise ParametrosInvalidosError("O resíduo de perturbação exige a família susy_breaking.")
    verificar_desigualdade_susy(spec.f, perturbacao)
    if f_corte is None:
        f_corte = perturbacao.f_corte
    if f_corte is None:
        f_corte = 2.0 * min(evaluate(spec.f, perturbacao.rho1), evaluate(spec.f, perturbacao.rho2))

    pontos = malha.pontos()
    f = evaluate_many(spec.f, pontos)
    ativos = np.flatnonzero(f < f_corte)
    passo = np.asarray(malha.espacamento)
    b = perturbation_field(spec, pontos, h)
    estencil = _estencil_transporte(
        b, lambda i, s: perturbation_field(spec, pontos + s * passo[i] * np.eye(2)[i], h)[:, i],
        malha, h, fator=1.0,
    )
    matriz = _montar(estencil, malha, ativos)
    g = np.exp(-(f[ativos] - f[ativos].min()) / h)
    residuo = matriz @ g

    mascara = np.zeros(malha.total, dtype=bool)
    mascara[ativos] = True
    interiores = np.ones(ativos.size, dtype=bool)
    for i in range(2):
        for s in (1, -1):
            vizinhos = _vizinho(malha.resolucao, _unitario(2, i, s))[ativos]
            interiores &= (vizinhos >= 0) & mascara[np.maximum(vizinhos, 0)]
    return float(math.sqrt(float(np.prod(passo))) * np.linalg.norm(residuo[interiores]))
