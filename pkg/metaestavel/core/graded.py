# metaestavel/core/graded.py
"""
Matrizes graduadas Ω(τ)MΩ(τ): espectro por complementos de Schur iterados,
sem nunca formar o produto (as escalas ε_j viajam como LogScaled).
"""
import logging
from typing import List, Optional, Sequence

import mpmath
import numpy as np

from metaestavel.core.entities import GradedLevel, GradedMatrix, LogScaled, ResolventReport
from metaestavel.core.exceptions import BlocoSingularError, DimensaoIncompativelError, ParametrosInvalidosError
from metaestavel.core.linalg import condition, schur_complement

logger = logging.getLogger(__name__)

CLASSES = ('GS', 'GAS')


def _validar(G: GradedMatrix) -> np.ndarray:
    M = np.asarray(G.M, dtype=float)
    n = int(sum(G.dims))
    if M.shape != (n, n):
        raise DimensaoIncompativelError((n, n), M.shape)
    if any(d <= 0 for d in G.dims):
        raise ParametrosInvalidosError("Dimensões de bloco devem ser positivas.")
    if len(G.tau) != G.p - 1:
        raise DimensaoIncompativelError(f"{G.p - 1} valores de τ", len(G.tau))
    if any(t.sinal <= 0 for t in G.tau):
        raise ParametrosInvalidosError("Os τ_k devem ser positivos.")
    if G.classe not in CLASSES:
        raise ParametrosInvalidosError(f"Classe desconhecida '{G.classe}'.")
    return M


def _assimetria(G: GradedMatrix, M: np.ndarray) -> float:
    assimetria = float(np.linalg.norm(M - M.T, 2))
    norma = float(np.linalg.norm(M, 2))
    if G.classe == 'GS' and assimetria > 1e-12 * (1.0 + norma):
        raise ParametrosInvalidosError(f"Matriz declarada GS não é simétrica (‖M − Mᵗ‖ = {assimetria:.3e}).")
    if G.classe == 'GAS' and assimetria > G.limite_assimetria * (1.0 + 1e-12):
        raise ParametrosInvalidosError(
            f"‖M − Mᵗ‖ = {assimetria:.3e} excede o limite declarado {G.limite_assimetria:.3e}."
        )
    return assimetria


def sequential_schur(M, dims: Sequence[int], j: int) -> np.ndarray:
    """Elimina os blocos 1..j−1 um de cada vez."""
    R = np.asarray(M, dtype=float)
    for etapa, d in enumerate(dims[:j - 1], start=1):
        try:
            R = schur_complement(R, d)
        except BlocoSingularError as exc:
            raise BlocoSingularError(exc.condicao, etapa) from exc
    return R


def graded_spectrum(G: GradedMatrix) -> List[GradedLevel]:
    """Níveis j = 1..p: autovalores de J∘R_j(M^s) com peso ε_j².

    GAS é simetrizada antes das etapas; a assimetria entra na incerteza.
    """
    M = _validar(G)
    assimetria = _assimetria(G, M)
    Ms = 0.5 * (M + M.T)
    epsilons = G.epsilons
    niveis: List[GradedLevel] = []
    deslocamento = 0
    for j, d in enumerate(G.dims):
        try:
            R = schur_complement(Ms, deslocamento)
        except BlocoSingularError as exc:
            raise BlocoSingularError(exc.condicao, j + 1) from exc
        bloco = R[:d, :d]
        niveis.append(GradedLevel(
            nivel=j + 1,
            autovalores=np.linalg.eigvalsh(bloco),
            peso=epsilons[j] ** 2,
            condicao=condition(Ms[:deslocamento, :deslocamento]) if deslocamento else 1.0,
            incerteza=assimetria,
        ))
        deslocamento += d
    logger.debug("espectro graduado: %d níveis, dims %s", len(niveis), G.dims)
    return niveis


def predicted_values(G: GradedMatrix) -> List[LogScaled]:
    """União ⋃_j ε_j²·σ(J∘R_j(M^s)) em ordem crescente."""
    return sorted(v for nivel in graded_spectrum(G) for v in nivel.valores())


def schur_iteration_identity(M, d1: int, d2: int, d3: int) -> float:
    """‖R₂(R₁(M)) − R_{1,2}(M)‖ para a partição (d₁, d₂, d₃)."""
    M = np.asarray(M, dtype=float)
    if M.shape != (d1 + d2 + d3,) * 2:
        raise DimensaoIncompativelError((d1 + d2 + d3,) * 2, M.shape)
    iterado = schur_complement(schur_complement(M, d1), d2)
    conjunto = schur_complement(M, d1 + d2)
    if iterado.size == 0:
        return 0.0
    return float(np.linalg.norm(iterado - conjunto, 2))


def assemble(G: GradedMatrix) -> np.ndarray:
    """Ω(τ)MΩ(τ) denso; SubfluxoError se algum ε_j² não for representável."""
    M = _validar(G)
    escalas = np.concatenate([np.full(d, float(e)) for d, e in zip(G.dims, G.epsilons)])
    for e in G.epsilons:
        float(e ** 2)
    return escalas[:, None] * M * escalas[None, :]


def high_precision_eigenvalues(G: GradedMatrix, digitos: int = 60) -> List[LogScaled]:
    """Autovalores de Ω(τ)MΩ(τ) montada em mpmath; referência para escalas fora do alcance de float."""
    M = _validar(G)
    with mpmath.workdps(digitos):
        escalas = [mpmath.e ** mpmath.mpf(e.log_magnitude) for d, e in zip(G.dims, G.epsilons) for _ in range(d)]
        n = M.shape[0]
        A = mpmath.matrix(n, n)
        for i in range(n):
            for j in range(n):
                A[i, j] = escalas[i] * mpmath.mpf(float(M[i, j])) * escalas[j]
        if G.classe == 'GS':
            autovalores = list(mpmath.eigsy(A, eigvals_only=True))
        else:
            autovalores = [mpmath.re(v) for v in mpmath.eig(A, left=False, right=False)]
        return sorted(
            LogScaled.zero() if v == 0 else LogScaled(1 if v > 0 else -1, float(mpmath.log(abs(v))))
            for v in autovalores
        )


def resolvent_gap_check(G: GradedMatrix, amostras_z: Sequence[complex],
                        raio_relativo: float = 0.5) -> ResolventReport:
    """‖(M − z)⁻¹‖·dist(z, σ(M)) em amostras fora dos discos D(λ, raio_relativo·|λ|) previstos.

    Só para escalas de teste: a matriz montada precisa ser representável.
    """
    M = assemble(G)
    previstos = np.array([float(v) for v in predicted_values(G)])
    espectro = np.linalg.eigvals(M)
    identidade = np.eye(M.shape[0])
    produtos: List[float] = []
    excluidas = 0
    for z in amostras_z:
        z = complex(z)
        distancia = float(np.min(np.abs(espectro - z)))
        if distancia == 0.0 or np.any(np.abs(previstos - z) <= raio_relativo * np.abs(previstos)):
            excluidas += 1
            continue
        menor_singular = np.linalg.svd(M - z * identidade, compute_uv=False)[-1]
        produtos.append(distancia / float(menor_singular))

    separacoes = []
    niveis = graded_spectrum(G)
    for anterior, seguinte in zip(niveis, niveis[1:]):
        menor_anterior = min(anterior.valores())
        maior_seguinte = max(seguinte.valores())
        separacoes.append(float((menor_anterior / maior_seguinte).log10()))
    return ResolventReport(constante=max(produtos) if produtos else float('nan'), produtos=tuple(produtos),
                           amostras_usadas=len(produtos), amostras_excluidas=excluidas,
                           separacoes=tuple(separacoes))
