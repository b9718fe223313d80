# metaestavel/core/linalg.py
"""
Álgebra linear densa: autovalores não simétricos, determinantes, sistemas,
complementos de Schur, posto de Kalman e o operador de transporte
p ↦ Ax·∇p sobre polinômios homogêneos.
"""
import logging
from itertools import combinations_with_replacement
from math import comb
from typing import Dict, List, Tuple

import numpy as np
import scipy.linalg as sla

from metaestavel.core.entities import EigenResult
from metaestavel.core.exceptions import (
    BlocoSingularError,
    DimensaoExcedidaError,
    DimensaoIncompativelError,
    QRNaoConvergiuError,
    ValorNaoFinitoError,
)

logger = logging.getLogger(__name__)

LIMITE_CONDICAO = 1e12
LIMITE_BASE = 500
TOL_REALIDADE = 1e-9
TOL_KALMAN = 1e-10


def _matriz_quadrada(M) -> np.ndarray:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensaoIncompativelError("matriz quadrada", M.shape)
    if not np.all(np.isfinite(M)):
        raise ValorNaoFinitoError("entrada de matriz")
    return M


# ====================================================================
# AUTOVALORES
# ====================================================================

def eigen(M, want_vectors: bool = False) -> EigenResult:
    """Autovalores (e autovetores à direita) de uma matriz densa quadrada.

    Usa o xGEEV do LAPACK: balanceamento, redução de Hessenberg e QR de
    Francis com deslocamento duplo. Autovalores saem ordenados por
    (parte real, parte imaginária).
    """
    M = _matriz_quadrada(M)
    n = M.shape[0]
    if n == 0:
        return EigenResult(np.zeros(0, dtype=complex), None, 0.0)
    try:
        if want_vectors:
            autovalores, autovetores = sla.eig(M, right=True)
        else:
            autovalores, autovetores = sla.eigvals(M), None
    except sla.LinAlgError as exc:
        raise QRNaoConvergiuError(f"QR não convergiu: {exc}") from exc

    autovalores = np.asarray(autovalores, dtype=complex)
    ordem = np.lexsort((autovalores.imag, autovalores.real))
    autovalores = autovalores[ordem]
    norma = float(np.linalg.norm(M, 'fro'))

    if autovetores is not None:
        autovetores = autovetores[:, ordem]
        autovetores = autovetores / np.linalg.norm(autovetores, axis=0, keepdims=True)
        residuos = np.linalg.norm(M @ autovetores - autovetores * autovalores, axis=0)
        erro = float(residuos.max() / max(norma, np.finfo(float).tiny))
    else:
        erro = float(n * np.finfo(float).eps)
    return EigenResult(autovalores, autovetores, erro)


def is_real_eigenvalue(autovalor: complex, M, tol: float = TOL_REALIDADE) -> bool:
    """|Im λ| ≤ tol·(1 + ‖M‖_F)."""
    return abs(complex(autovalor).imag) <= tol * (1.0 + float(np.linalg.norm(M, 'fro')))


def halfplane_counts(M, tol: float) -> Tuple[int, int, int]:
    """(n_−, n_eixo, n_+) segundo Re λ < −tol, |Re λ| ≤ tol, Re λ > tol."""
    reais = eigen(M).autovalores.real
    return (int(np.sum(reais < -tol)), int(np.sum(np.abs(reais) <= tol)), int(np.sum(reais > tol)))


# ====================================================================
# DETERMINANTES, SISTEMAS E SCHUR
# ====================================================================

def determinant(M) -> float:
    M = _matriz_quadrada(M)
    if M.shape[0] == 0:
        return 1.0
    return sla.det(M)


def solve(M, rhs) -> np.ndarray:
    """Resolve M x = rhs por LU com pivoteamento."""
    M = _matriz_quadrada(M)
    condicao = condition(M)
    if not np.isfinite(condicao) or condicao > LIMITE_CONDICAO:
        raise BlocoSingularError(condicao)
    return sla.lu_solve(sla.lu_factor(M), rhs)


def condition(M) -> float:
    M = np.asarray(M)
    if M.size == 0:
        return 1.0
    with np.errstate(all='ignore'):
        return float(np.linalg.cond(M))


def schur_complement(M, k: int) -> np.ndarray:
    """D − C·A⁻¹·B para M = [[A, B], [C, D]] com A de ordem k."""
    M = _matriz_quadrada(M)
    n = M.shape[0]
    if k < 0 or k > n:
        raise DimensaoIncompativelError(f"0 ≤ k ≤ {n}", k)
    if k == 0:
        return M.copy()
    A, B = M[:k, :k], M[:k, k:]
    C, D = M[k:, :k], M[k:, k:]
    condicao = condition(A)
    if not np.isfinite(condicao) or condicao > LIMITE_CONDICAO:
        raise BlocoSingularError(condicao)
    if n == k:
        return np.zeros((0, 0), dtype=M.dtype)
    return D - C @ sla.lu_solve(sla.lu_factor(A), B)


def kalman_rank(A0, B, tol: float = TOL_KALMAN) -> int:
    """Posto de [A⁰, BA⁰, …, B^{d−1}A⁰] por QR com pivoteamento de colunas."""
    A0 = np.asarray(A0, dtype=float)
    B = np.asarray(B, dtype=float)
    d = A0.shape[0]
    blocos = [A0]
    for _ in range(d - 1):
        blocos.append(B @ blocos[-1])
    K = np.hstack(blocos)
    if not np.any(K):
        return 0
    R = sla.qr(K, mode='r', pivoting=True)[0]
    pivos = np.abs(np.diag(R))
    return int(np.sum(pivos > tol * pivos[0]))


# ====================================================================
# OPERADOR DE TRANSPORTE EM POLINÔMIOS HOMOGÊNEOS
# ====================================================================

def monomial_basis(d: int, m: int) -> List[Tuple[int, ...]]:
    """Expoentes γ com |γ| = m em ordem lexicográfica graduada (x1^m primeiro)."""
    expoentes = set()
    for escolha in combinations_with_replacement(range(d), m):
        gamma = [0] * d
        for i in escolha:
            gamma[i] += 1
        expoentes.add(tuple(gamma))
    return sorted(expoentes, reverse=True)


def transport_operator(A, m: int) -> np.ndarray:
    """Matriz de p ↦ Ax·∇p na base monomial de grau m.

    x^γ ↦ Σ_{i,j} A_ij γ_i x^{γ − e_i + e_j}.
    """
    A = _matriz_quadrada(A)
    d = A.shape[0]
    if m < 1 or d < 1:
        raise DimensaoIncompativelError("m ≥ 1 e d ≥ 1", (m, d))
    dimensao = comb(m + d - 1, d - 1)
    if dimensao > LIMITE_BASE:
        raise DimensaoExcedidaError(dimensao, LIMITE_BASE)
    base = monomial_basis(d, m)
    posicao: Dict[Tuple[int, ...], int] = {g: k for k, g in enumerate(base)}
    T = np.zeros((dimensao, dimensao), dtype=np.result_type(A.dtype, float))
    for coluna, gamma in enumerate(base):
        for i in range(d):
            if gamma[i] == 0:
                continue
            for j in range(d):
                if A[i, j] == 0:
                    continue
                alvo = list(gamma)
                alvo[i] -= 1
                alvo[j] += 1
                T[posicao[tuple(alvo)], coluna] += A[i, j] * gamma[i]
    return T
