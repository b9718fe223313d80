# metaestavel/core/eyring_kramers.py
"""
Assintótica de Eyring–Kramers em ordem dominante: prefatores z(m), previsões
λ(m, h) = z(m)·h·e^{−2S(m)/h}, o modelo de interação M₀ = LᵗL e o espectro do
caso geral por blocos graduados.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence

import numpy as np

from metaestavel.core.entities import (
    AsymptoticEigenvalue,
    CriticalAnalysis,
    GeneralEigenvalue,
    GradedMatrix,
    InteractionModel,
    Labeling,
    LogScaled,
    PlateauWindow,
)
from metaestavel.core.exceptions import (
    EstruturaCriticaError,
    FatoracaoInconsistenteError,
    MinimoTipoIIError,
    ParametrosInvalidosError,
    PontoCriticoDegeneradoError,
)
from metaestavel.core.graded import graded_spectrum

logger = logging.getLogger(__name__)


def _D(rotulagem: Labeling, ponto_id: str) -> float:
    ponto = rotulagem.ponto(ponto_id)
    D = math.sqrt(abs(float(np.linalg.det(ponto.hessiana))))
    if D == 0.0:
        raise PontoCriticoDegeneradoError(ponto.localizacao, 0.0)
    return D


def _mu(analises: Dict[str, CriticalAnalysis], sela_id: str) -> float:
    analise = analises.get(sela_id)
    if analise is None or analise.mu is None:
        raise EstruturaCriticaError(f"μ({sela_id}) indisponível: a sela não foi analisada.")
    return abs(analise.mu)


def prefactor(rotulagem: Labeling, analises: Dict[str, CriticalAnalysis], m: str) -> float:
    """z(m) = D_m/(2π)·Σ_{s ∈ j(m)} |μ(s)|/D_s, com D_u = |det H(u)|^{1/2}."""
    if m == rotulagem.minimo_global:
        raise ParametrosInvalidosError(f"{m} é o mínimo global: não há prefator.")
    registro = rotulagem.registro(m)
    soma = sum(_mu(analises, s) / _D(rotulagem, s) for s in registro.selas)
    return _D(rotulagem, m) * soma / (2.0 * math.pi)


def eigenvalue_at(z: float, S: float, h: float) -> LogScaled:
    """z·h·e^{−2S/h} em escala logarítmica."""
    return LogScaled(1, math.log(z) + math.log(h) - 2.0 * S / h)


def predict(rotulagem: Labeling, analises: Dict[str, CriticalAnalysis],
            h_lista: Sequence[float]) -> List[AsymptoticEigenvalue]:
    """Uma entrada por mínimo e por h; a(h) truncado em 1 e λ(m̲, h) = 0."""
    if any(h <= 0 for h in h_lista):
        raise ParametrosInvalidosError("Os valores de h devem ser positivos.")
    prefatores = {m: prefactor(rotulagem, analises, m)
                  for m in rotulagem.minimos if m != rotulagem.minimo_global}
    previsoes = []
    for h in h_lista:
        for m in rotulagem.minimos:
            if m == rotulagem.minimo_global:
                previsoes.append(AsymptoticEigenvalue(minimo=m, h=h, S=math.inf, z=None, valor=LogScaled.zero()))
                continue
            S = rotulagem.registro(m).S
            previsoes.append(AsymptoticEigenvalue(minimo=m, h=h, S=S, z=prefatores[m],
                                                  valor=eigenvalue_at(prefatores[m], S, h)))
    return previsoes


def classical_rate_1d(f2_minimo: float, f2_sela: float, S: float, h: float) -> LogScaled:
    """Taxa reversível clássica (h/π)·√(f″(m)|f″(s)|)·e^{−2S/h}."""
    return eigenvalue_at(math.sqrt(f2_minimo * abs(f2_sela)) / math.pi, S, h)


# ====================================================================
# MODELO DE INTERAÇÃO
# ====================================================================

def conferir_fatoracao(M0: np.ndarray, L: np.ndarray, tol: float = 1e-12):
    """‖M₀ − LᵗL‖ ≤ tol·max(1, ‖M₀‖)."""
    if M0.size == 0:
        return
    residuo = float(np.linalg.norm(M0 - L.T @ L))
    if residuo > tol * max(1.0, float(np.linalg.norm(M0))):
        raise FatoracaoInconsistenteError(residuo)


def interaction_model(rotulagem: Labeling, analises: Dict[str, CriticalAnalysis],
                      tol_valor: float = 1e-9) -> InteractionModel:
    """M₀ com diagonal Σ|μ|D_m/(2πD_s) e fora dela −Σ|μ|√(D_mD_m′)/(2πD_s); L com linhas nas selas."""
    tipo_ii = [m for m in rotulagem.minimos if rotulagem.registro(m).tipo == 'II']
    if tipo_ii:
        raise MinimoTipoIIError(tipo_ii)

    ordem = tuple(m for m in rotulagem.minimos if m != rotulagem.minimo_global)
    posicao = {m: k for k, m in enumerate(ordem)}
    D = {m: _D(rotulagem, m) for m in ordem}
    ids_selas = {s for m in ordem for s in rotulagem.registro(m).selas}
    selas = tuple(sorted(ids_selas, key=lambda s: rotulagem.ponto(s).chave_ordenacao))

    n = len(ordem)
    M0 = np.zeros((n, n))
    L = np.zeros((len(selas), n))
    for linha, s in enumerate(selas):
        peso = _mu(analises, s) / (2.0 * math.pi * _D(rotulagem, s))
        vizinhos = sorted((m for m in ordem if s in rotulagem.registro(m).selas), key=posicao.get)
        if len(vizinhos) > 2:
            raise EstruturaCriticaError(f"A sela {s} está na fronteira de {len(vizinhos)} componentes rotuladas.")
        for sinal, m in zip((1.0, -1.0), vizinhos):
            L[linha, posicao[m]] = sinal * math.sqrt(peso * D[m])
            M0[posicao[m], posicao[m]] += peso * D[m]
        if len(vizinhos) == 2:
            a, b = (posicao[m] for m in vizinhos)
            cruzado = -peso * math.sqrt(D[vizinhos[0]] * D[vizinhos[1]])
            M0[a, b] += cruzado
            M0[b, a] += cruzado

    conferir_fatoracao(M0, L)
    menor = float(np.linalg.eigvalsh(M0).min()) if n else math.inf

    classes = tuple(c for c in rotulagem.classes if rotulagem.minimo_global not in c)
    modelo = InteractionModel(
        ordem=ordem, M0=M0, L=L, selas_linhas=selas, classes=classes,
        niveis_S={m: rotulagem.registro(m).S for m in ordem}, menor_autovalor=menor,
        tolerancia_S=tol_valor * rotulagem.escala, minimo_global=rotulagem.minimo_global,
    )
    if n and not modelo.definida_positiva:
        logger.warning("M₀ não é definida positiva (menor autovalor %.3e): L não é injetiva", menor)
    return modelo


def _espectro_classe(modelo: InteractionModel, classe: int, h: float) -> List[GeneralEigenvalue]:
    dims, niveis = modelo.particao(classe)
    membros = modelo.classes[classe]
    G = GradedMatrix(dims=dims, tau=modelo.tau(classe, h), M=modelo.bloco(classe))
    base = LogScaled(1, math.log(h) - 2.0 * niveis[0] / h)
    valores = []
    inicio = 0
    for nivel, d in zip(graded_spectrum(G), dims):
        minimos = tuple(membros[inicio:inicio + d])
        inicio += d
        for v in nivel.valores():
            valores.append(GeneralEigenvalue(classe=classe, nivel=nivel.nivel, valor=base * v, minimos=minimos))
    return valores


def general_spectrum(modelo: InteractionModel, h: float, workers: int = 1) -> List[GeneralEigenvalue]:
    """União sobre as classes de h·e^{−2S₁/h}·ε_j²·σ(J∘R_j(M₀,α)), mais o zero exato de m̲."""
    if h <= 0:
        raise ParametrosInvalidosError("h deve ser positivo.")
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        por_classe = list(executor.map(lambda c: _espectro_classe(modelo, c, h), range(len(modelo.classes))))
    valores = [GeneralEigenvalue(classe=-1, nivel=1, valor=LogScaled.zero(), minimos=(modelo.minimo_global,))]
    valores.extend(v for lista in por_classe for v in lista)
    valores.sort(key=lambda v: v.valor)
    return valores


# ====================================================================
# ESCALAS DE TEMPO
# ====================================================================

def transition_times(rotulagem: Labeling, h: float, delta: float,
                     g_mais: Optional[float] = None) -> List[PlateauWindow]:
    """Janelas de platô [t⁺_{k−1}, t⁻_k], t_k^± = g_±e^{2S_k/h}, g₋ = e^{−δ/h}, t₀⁺ = g₊.

    S₁ < S₂ < … são os valores distintos de S; a última janela é [t⁺_K, 100·t⁺_K].
    """
    if h <= 0 or delta <= 0:
        raise ParametrosInvalidosError("h e δ devem ser positivos.")
    g_mais = math.log(h) ** 2 if g_mais is None else g_mais
    g_menos = math.exp(-delta / h)
    tol = 1e-9 * rotulagem.escala
    niveis: List[float] = []
    for S in sorted(rotulagem.registro(m).S for m in rotulagem.minimos if m != rotulagem.minimo_global):
        if not niveis or S - niveis[-1] > tol:
            niveis.append(S)

    janelas = []
    inicio = g_mais
    for k, S in enumerate(niveis, start=1):
        janelas.append(PlateauWindow(k=k, inicio=inicio, fim=g_menos * math.exp(2.0 * S / h), S_k=S))
        inicio = g_mais * math.exp(2.0 * S / h)
    janelas.append(PlateauWindow(k=len(niveis) + 1, inicio=inicio, fim=100.0 * inicio, S_k=math.inf))
    vazias = [j.k for j in janelas if j.vazia]
    if vazias:
        logger.warning("janelas de platô vazias em h = %g: %s", h, vazias)
    return janelas


def return_to_equilibrium_rate(previsoes: Sequence[AsymptoticEigenvalue], h: float) -> float:
    """min_{m ≠ m̲} λ(m, h)/h: taxa prevista de retorno ao equilíbrio."""
    candidatos = [p.valor for p in previsoes if p.h == h and not p.valor.e_zero]
    if not candidatos:
        return math.inf
    return float(min(candidatos) / h)
