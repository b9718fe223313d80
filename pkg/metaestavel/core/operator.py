# metaestavel/core/operator.py
"""
Especificação do operador P = −h div A h∇ + ½(b·h∇ + h div b) + c a partir de
(f, A⁰, b⁰): símbolos derivados c⁰ e c¹, verificações estruturais nos pontos
críticos, análise espectral local (Λ, μ, η, matriz fundamental, valores
harmônicos), galeria de exemplos e a verificação heurística de (Hypo).
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp
from scipy.integrate import solve_ivp
from scipy.stats import qmc

from metaestavel.core.entities import (
    Caixa,
    CriticalAnalysis,
    CriticalPoint,
    CriticalStructureReport,
    EikonalReport,
    HarmonicValue,
    HypoReport,
    OperatorSpec,
    SusyPerturbation,
)
from metaestavel.core.exceptions import (
    ContagemAutovaloresError,
    DesigualdadeSusyError,
    DimensaoIncompativelError,
    ExpressaoInvalidaError,
    MuNaoRealError,
    NormalizacaoImpossivelError,
    ParametrosInvalidosError,
)
from metaestavel.core.fields import (
    SmoothMap,
    derivative,
    derivative_many,
    evaluate,
    evaluate_many,
    mapa_escalar,
    mapa_identidade,
    mapa_matricial,
    mapa_nulo,
    parse_expression,
    simbolos,
)
from metaestavel.core.linalg import TOL_REALIDADE, eigen, halfplane_counts, is_real_eigenvalue, kalman_rank, monomial_basis

logger = logging.getLogger(__name__)

GALERIA = ('witten', 'nonreversible', 'kfp', 'susy_breaking')
TOL_ANULAMENTO = 1e-8
TOL_ANTISSIMETRIA = 1e-10


def amostras_halton(caixa: Caixa, quantidade: int) -> np.ndarray:
    """Pontos de Halton (não embaralhados, determinísticos) no interior da caixa."""
    gerador = qmc.Halton(d=caixa.dimensao, scramble=False)
    gerador.fast_forward(1)
    return qmc.scale(gerador.random(quantidade), caixa.inferior, caixa.superior)


# ====================================================================
# CONSTRUÇÃO E SÍMBOLOS DERIVADOS
# ====================================================================

def build_operator_spec(f: SmoothMap, A0: SmoothMap, b0: SmoothMap, c0: Optional[SmoothMap] = None,
                        caixa: Optional[Caixa] = None, amostras: int = 64, nome: str = 'bruto',
                        parametros: Optional[Dict] = None,
                        perturbacao: Optional[SusyPerturbation] = None) -> OperatorSpec:
    """Valida formas e dimensões; com caixa, amostra A⁰ (simetria e semidefinição)."""
    d = f.dimensao
    if f.forma != 'escalar':
        raise DimensaoIncompativelError("f escalar", f.forma)
    if A0.forma != 'matriz' or A0.dimensao != d:
        raise DimensaoIncompativelError(f"A⁰ matriz {d}×{d}", (A0.forma, A0.dimensao))
    if b0.forma != 'vetor' or b0.dimensao != d:
        raise DimensaoIncompativelError(f"b⁰ vetor de dimensão {d}", (b0.forma, b0.dimensao))
    if c0 is not None and (c0.forma != 'escalar' or c0.dimensao != d):
        raise DimensaoIncompativelError("c⁰ escalar", (c0.forma, c0.dimensao))

    if caixa is not None:
        A = evaluate_many(A0, amostras_halton(caixa, amostras))
        normas = np.linalg.norm(A, axis=(1, 2))
        assimetria = np.linalg.norm(A - np.swapaxes(A, 1, 2), axis=(1, 2))
        if np.any(assimetria > 1e-10 * (1.0 + normas)):
            raise ParametrosInvalidosError("A⁰ não é simétrica nos pontos amostrados.")
        menores = np.linalg.eigvalsh(A).min(axis=1)
        if np.any(menores < -1e-10 * (1.0 + normas)):
            raise ParametrosInvalidosError(
                f"A⁰ não é semidefinida positiva (menor autovalor amostrado {menores.min():.3e})."
            )
    return OperatorSpec(dimensao=d, f=f, A0=A0, b0=b0, c0=c0, nome=nome,
                        parametros=dict(parametros or {}), perturbacao=perturbacao)


def c0_derivado(spec: OperatorSpec, pontos) -> np.ndarray:
    """c⁰ = ⟨A⁰∇f, ∇f⟩ em um array (n, d) de pontos."""
    g = derivative_many(spec.f, pontos, 1)
    A = evaluate_many(spec.A0, pontos)
    return np.einsum('ni,nij,nj->n', g, A, g)


def c0_em(spec: OperatorSpec, pontos) -> np.ndarray:
    if spec.c0 is not None:
        return evaluate_many(spec.c0, pontos)
    return c0_derivado(spec, pontos)


def c1_em(spec: OperatorSpec, pontos) -> np.ndarray:
    """c¹ = −div(A⁰∇f) = −Σ_ij (∂_i A⁰_ij ∂_j f + A⁰_ij ∂_ij f)."""
    g = derivative_many(spec.f, pontos, 1)
    H = derivative_many(spec.f, pontos, 2)
    A = evaluate_many(spec.A0, pontos)
    dA = derivative_many(spec.A0, pontos, 1)
    return -(np.einsum('niji,nj->n', dA, g) + np.einsum('nij,nij->n', A, H))


# ====================================================================
# VERIFICAÇÕES
# ====================================================================

def verify_eikonal(spec: OperatorSpec, caixa: Caixa, amostras: int = 256, tol: float = 1e-9) -> EikonalReport:
    """Resíduos das equações eiconais ⟨A⁰∇f,∇f⟩ = c⁰ e b⁰·∇f = 0 em pontos quase aleatórios."""
    pontos = amostras_halton(caixa, amostras)
    g = derivative_many(spec.f, pontos, 1)
    derivado = c0_derivado(spec, pontos)
    b = evaluate_many(spec.b0, pontos)
    residuo_c0 = float(np.max(np.abs(derivado - evaluate_many(spec.c0, pontos)))) if spec.c0 is not None else 0.0
    residuo_transporte = float(np.max(np.abs(np.einsum('ni,ni->n', b, g))))
    escala = 1.0 + float(np.max(derivado)) + float(np.max(np.linalg.norm(b, axis=1) * np.linalg.norm(g, axis=1)))
    relatorio = EikonalReport(residuo_c0=residuo_c0, residuo_transporte=residuo_transporte, escala=escala,
                              tolerancia=tol, amostras=int(pontos.shape[0]), c0_fornecido=spec.c0 is not None)
    if not relatorio.aprovado:
        logger.warning("equações eiconais violadas: |c⁰| %.3e, |b⁰·∇f| %.3e (escala %.3e)",
                       residuo_c0, residuo_transporte, escala)
    return relatorio


def verify_critical_structure(spec: OperatorSpec, u: CriticalPoint,
                              degenerescencia_tol: float = 1e-8) -> CriticalStructureReport:
    x = u.localizacao
    H = u.hessiana
    A0 = evaluate(spec.A0, x)
    B = derivative(spec.b0, x, 1)
    b = evaluate(spec.b0, x)
    c0 = float(c0_em(spec, x[None, :])[0])
    norma_H = float(np.linalg.norm(H, 2))
    norma_B = float(np.linalg.norm(B, 2))

    residuos = {
        'b0': float(np.linalg.norm(b)),
        'c0': abs(c0),
        'antissimetria': float(np.linalg.norm(B.T @ H + H @ B, 2)),
        'menor_autovalor_hessiana': float(np.min(np.abs(np.linalg.eigvalsh(H)))),
    }
    posto = kalman_rank(A0, B)
    escala = 1.0 + norma_B + float(np.linalg.norm(A0, 2)) * norma_H
    verificacoes = {
        'anulamento': residuos['b0'] <= TOL_ANULAMENTO * escala and residuos['c0'] <= TOL_ANULAMENTO * escala,
        'antissimetria': residuos['antissimetria'] <= TOL_ANTISSIMETRIA * norma_H * norma_B,
        'kalman': posto == spec.dimensao,
        'hessiana_invertivel': residuos['menor_autovalor_hessiana'] > degenerescencia_tol,
    }
    relatorio = CriticalStructureReport(ponto_id=u.id, verificacoes=verificacoes, residuos=residuos,
                                        posto_kalman=posto)
    if not relatorio.aprovado:
        falhas = [nome for nome, ok in verificacoes.items() if not ok]
        logger.warning("estrutura crítica em %s falhou: %s", u.id, ', '.join(falhas))
    return relatorio


# ====================================================================
# ANÁLISE ESPECTRAL NOS PONTOS CRÍTICOS
# ====================================================================

def matriz_lambda(H: np.ndarray, A0: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Λ = 2HA⁰ + Bᵗ."""
    return 2.0 * H @ A0 + B.T


def matriz_fundamental(H: np.ndarray, A0: np.ndarray, B: np.ndarray) -> np.ndarray:
    """F = [[iB, 2A⁰], [−2HA⁰H, −iBᵗ]], linearização do campo hamiltoniano do símbolo principal."""
    return np.block([[1j * B, 2.0 * A0], [-2.0 * H @ A0 @ H, -1j * B.T]])


def _vetor_eta(Lambda: np.ndarray, A0: np.ndarray, mu: float, ponto_id: str) -> np.ndarray:
    """Autovetor real de Λ para μ, normalizado por A⁰η·η = −μ; sinal fixado pela maior componente."""
    _, _, Vh = np.linalg.svd(Lambda - mu * np.eye(Lambda.shape[0]))
    eta = Vh[-1].real
    quadratica = float(eta @ A0 @ eta)
    if quadratica <= 1e-14 * max(1.0, float(np.linalg.norm(A0))):
        raise NormalizacaoImpossivelError(ponto_id, quadratica)
    eta = eta * math.sqrt(-mu / quadratica)
    if eta[np.argmax(np.abs(eta))] < 0:
        eta = -eta
    return eta


def _valores_harmonicos(lambdas: np.ndarray, traco_til: complex, ordem: int) -> Tuple[HarmonicValue, ...]:
    d = lambdas.size
    brutos: List[Tuple[Tuple[int, ...], complex]] = []
    for m in range(ordem + 1):
        for nu in sorted(monomial_basis(d, m)):
            brutos.append((nu, -1j * complex(np.dot(nu, lambdas)) + 0.5 * traco_til))

    agrupados: List[List] = []
    for nu, valor in brutos:
        for grupo in agrupados:
            if abs(grupo[1] - valor) <= 1e-9 * (1.0 + abs(valor)):
                grupo[2] += 1
                break
        else:
            agrupados.append([nu, valor, 1])
    valores = [HarmonicValue(nu=nu, valor=complex(valor), multiplicidade=mult, coincidente=mult > 1)
               for nu, valor, mult in agrupados]
    return tuple(sorted(valores, key=lambda v: (round(v.valor.real, 12), round(v.valor.imag, 12), v.nu)))


def analyze_critical(spec: OperatorSpec, u: CriticalPoint, ordem_harmonica: int = 2,
                     tol_realidade: float = TOL_REALIDADE) -> CriticalAnalysis:
    x = u.localizacao
    d = spec.dimensao
    H = u.hessiana
    A0 = evaluate(spec.A0, x)
    B = derivative(spec.b0, x, 1)

    Lambda = matriz_lambda(H, A0, B)
    tol = 1e-9 * (1.0 + float(np.linalg.norm(Lambda, 'fro')))
    espectro = eigen(Lambda).autovalores
    contagens = halfplane_counts(Lambda, tol)
    esperado = (u.indice, 0, d - u.indice)
    if contagens != esperado:
        raise ContagemAutovaloresError(u.id, esperado, contagens)

    mu = eta = None
    if u.indice == 1:
        candidato = espectro[int(np.argmin(espectro.real))]
        if not is_real_eigenvalue(candidato, Lambda, tol_realidade):
            raise MuNaoRealError(u.id, candidato)
        mu = float(candidato.real)
        eta = _vetor_eta(Lambda, A0, mu, u.id)

    F = matriz_fundamental(H, A0, B)
    autovalores_F = eigen(F).autovalores
    tol_F = 1e-9 * (1.0 + float(np.linalg.norm(F, 'fro')))
    superiores = autovalores_F[autovalores_F.imag > tol_F]
    if superiores.size != d:
        raise ContagemAutovaloresError(u.id, f"{d} autovalores de F com Im > 0", superiores.size)

    c1 = float(-np.trace(A0 @ H) - 0.5 * np.trace(B))
    traco_til = complex(-1j * np.sum(superiores) + 2.0 * c1)
    harmonicos = _valores_harmonicos(superiores, traco_til, ordem_harmonica)
    if any(v.coincidente for v in harmonicos):
        logger.warning("valores harmônicos coincidentes em %s (multiplicidades somadas)", u.id)
    logger.debug("análise de %s: contagens %s, μ = %s", u.id, contagens, mu)
    return CriticalAnalysis(ponto=u, A0=A0, B=B, Lambda=Lambda, espectro_lambda=espectro,
                            contagens=contagens, autovalores_fundamentais=superiores,
                            traco_til=traco_til, c1=c1, valores_harmonicos=harmonicos,
                            mu=mu, eta=eta)


def analyze_all(spec: OperatorSpec, criticos: Sequence[CriticalPoint], ordem_harmonica: int = 2,
                tol_realidade: float = TOL_REALIDADE, workers: int = 1) -> Dict[str, CriticalAnalysis]:
    """Analisa pontos críticos distintos em paralelo; a ordem do resultado segue a entrada."""
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        analises = list(executor.map(
            lambda u: analyze_critical(spec, u, ordem_harmonica, tol_realidade), criticos
        ))
    return {a.ponto.id: a for a in analises}


def harmonic_spectrum(analises: Dict[str, CriticalAnalysis], h: float,
                      quantidade: Optional[int] = None) -> List[Tuple[float, str, Tuple[int, ...]]]:
    """União ordenada de h·μ⁰_{ρ,k} sobre os pontos críticos: (Re valor, ponto, ν)."""
    valores = []
    for ponto_id, analise in analises.items():
        for harmonico in analise.valores_harmonicos:
            valores.extend([(h * harmonico.valor.real, ponto_id, harmonico.nu)] * harmonico.multiplicidade)
    valores.sort(key=lambda v: (v[0], v[1], v[2]))
    return valores[:quantidade] if quantidade is not None else valores


def harmonic_gap(analises: Dict[str, CriticalAnalysis], h: float) -> float:
    """Menor h·Re μ⁰ fora dos estados fundamentais dos mínimos: estimativa da lacuna ε·h."""
    candidatos = [
        v for v, ponto_id, nu in harmonic_spectrum(analises, h)
        if not (analises[ponto_id].ponto.indice == 0 and not any(nu))
    ]
    return min(candidatos) if candidatos else math.inf


# ====================================================================
# GALERIA
# ====================================================================

def _expressao(parametros: Dict, chave: str, dimensao: int, padrao=None) -> sp.Expr:
    texto = parametros.get(chave, padrao)
    if texto is None:
        raise ParametrosInvalidosError(f"Parâmetro obrigatório ausente: '{chave}'.")
    return parse_expression(texto, dimensao)


def _gradiente_simbolico(f: sp.Expr, dimensao: int) -> List[sp.Expr]:
    return [sp.diff(f, x) for x in simbolos(dimensao)]


def _positivo(parametros: Dict, chave: str, padrao=None) -> float:
    try:
        valor = float(parametros.get(chave, padrao))
    except (TypeError, ValueError) as exc:
        raise ParametrosInvalidosError(f"Parâmetro '{chave}' deve ser numérico.") from exc
    if not valor > 0:
        raise ParametrosInvalidosError(f"Parâmetro '{chave}' deve ser positivo (recebido {valor}).")
    return valor


def _galeria_witten(parametros: Dict) -> OperatorSpec:
    d = int(parametros.get('dimensao', 1))
    f = mapa_escalar(_expressao(parametros, 'f', d), d)
    return build_operator_spec(f, mapa_identidade(d), mapa_nulo(d), nome='witten', parametros=parametros)


def _galeria_nao_reversivel(parametros: Dict) -> OperatorSpec:
    d = int(parametros.get('dimensao', 2))
    if d < 2:
        raise ParametrosInvalidosError("A família nonreversible exige dimensão ≥ 2.")
    J = np.asarray(parametros.get('J', [[0, 1], [-1, 0]] if d == 2 else None), dtype=float)
    if J.shape != (d, d):
        raise ParametrosInvalidosError(f"J deve ser {d}×{d}.")
    if not np.allclose(J, -J.T, atol=0.0):
        raise ParametrosInvalidosError("J deve ser antissimétrica.")
    kappa = float(parametros.get('kappa', 1.0))
    f_expr = _expressao(parametros, 'f', d)
    gradiente = _gradiente_simbolico(f_expr, d)
    b = [sp.nsimplify(kappa) * sum(sp.nsimplify(J[i, j]) * gradiente[j] for j in range(d)) for i in range(d)]
    return build_operator_spec(
        mapa_escalar(f_expr, d), mapa_identidade(d),
        SmoothMap(d, 'vetor', expressoes=tuple(sp.expand(e) for e in b)),
        nome='nonreversible', parametros=parametros,
    )


def _galeria_kfp(parametros: Dict) -> OperatorSpec:
    n = int(parametros.get('n', 1))
    d = 2 * n
    gamma = _positivo(parametros, 'gamma')
    variaveis = simbolos(d)
    posicoes, velocidades = variaveis[:n], variaveis[n:]
    V = _expressao(parametros, 'V', d)
    W = _expressao(parametros, 'W', d, padrao=' + '.join(f'x{n + i + 1}^2/2' for i in range(n)))
    if not V.free_symbols <= set(posicoes):
        raise ParametrosInvalidosError(f"V deve depender apenas de x1..x{n}.")
    if not W.free_symbols <= set(velocidades):
        raise ParametrosInvalidosError(f"W deve depender apenas de x{n + 1}..x{d}.")
    f = mapa_escalar((V + W) / 2, d)
    A0 = mapa_matricial([[gamma if (i == j and i >= n) else 0 for j in range(d)] for i in range(d)], d)
    b0 = SmoothMap(d, 'vetor', expressoes=tuple(
        [sp.diff(W, v) for v in velocidades] + [-sp.diff(V, x) for x in posicoes]
    ))
    return build_operator_spec(f, A0, b0, nome='kfp', parametros=parametros)


def chi_padrao(rho1: Sequence[float], raio: float, largura: float) -> sp.Expr:
    """χ = ½(1 − tanh((|x − ρ₁|² − R²)/w)): ≈ 1 dentro do laço, ≈ 0 fora."""
    x1, x2 = simbolos(2)
    r2 = (x1 - sp.nsimplify(rho1[0])) ** 2 + (x2 - sp.nsimplify(rho1[1])) ** 2
    return (1 - sp.tanh((r2 - sp.nsimplify(raio) ** 2) / sp.nsimplify(largura))) / 2


def verificar_desigualdade_susy(f: SmoothMap, perturbacao: SusyPerturbation, pontos_laco: int = 720) -> Tuple[float, float]:
    """Confere max f no laço < C₀ < min(f(ρ₁), f(ρ₂)); devolve (max no laço, min nos ρ)."""
    angulos = np.linspace(0.0, 2.0 * np.pi, pontos_laco, endpoint=False)
    laco = np.asarray(perturbacao.rho1) + perturbacao.raio * np.stack([np.cos(angulos), np.sin(angulos)], axis=1)
    maximo_laco = float(np.max(evaluate_many(f, laco)))
    minimo_rho = min(evaluate(f, perturbacao.rho1), evaluate(f, perturbacao.rho2))
    if not maximo_laco < perturbacao.C0 < minimo_rho:
        raise DesigualdadeSusyError(maximo_laco, perturbacao.C0, minimo_rho)
    return maximo_laco, minimo_rho


def _galeria_susy(parametros: Dict) -> OperatorSpec:
    d = 2
    f = mapa_escalar(_expressao(parametros, 'f', d, padrao='(x1^2 + x2^2 - 1)^2'), d)
    rho1 = tuple(float(c) for c in parametros.get('rho1', (0.0, 0.0)))
    rho2 = tuple(float(c) for c in parametros.get('rho2', (2.0, 0.0)))
    if len(rho1) != 2 or len(rho2) != 2:
        raise ParametrosInvalidosError("ρ₁ e ρ₂ devem ser pontos do plano.")
    raio = _positivo(parametros, 'raio', 1.0)
    largura = _positivo(parametros, 'largura', 0.3)
    C0 = float(parametros.get('C0', 0.5))
    chi = parametros.get('chi')
    chi_expr = _expressao(parametros, 'chi', d) if chi is not None else chi_padrao(rho1, raio, largura)
    f_corte = parametros.get('f_corte')
    perturbacao = SusyPerturbation(chi=mapa_escalar(chi_expr, d), C0=C0, rho1=rho1, rho2=rho2, raio=raio,
                                   f_corte=float(f_corte) if f_corte is not None else None)
    verificar_desigualdade_susy(f, perturbacao)
    return build_operator_spec(f, mapa_identidade(d), mapa_nulo(d), nome='susy_breaking',
                               parametros=parametros, perturbacao=perturbacao)


_FAMILIAS = {
    'witten': _galeria_witten,
    'nonreversible': _galeria_nao_reversivel,
    'kfp': _galeria_kfp,
    'susy_breaking': _galeria_susy,
}


def gallery(nome: str, parametros: Optional[Dict] = None) -> OperatorSpec:
    """Operadores de exemplo: witten, nonreversible, kfp, susy_breaking."""
    if nome not in _FAMILIAS:
        raise ParametrosInvalidosError(f"Família desconhecida '{nome}'; opções: {', '.join(GALERIA)}.")
    try:
        return _FAMILIAS[nome](dict(parametros or {}))
    except ExpressaoInvalidaError as exc:
        raise ParametrosInvalidosError(exc.message) from exc


# ====================================================================
# HIPOELIPTICIDADE (HEURÍSTICA)
# ====================================================================

def _medida_fluxo(spec: OperatorSpec, caixa: Caixa, x0: np.ndarray, T: float, limiar: float,
                  sentido: float) -> Optional[float]:
    lo, hi = np.asarray(caixa.inferior), np.asarray(caixa.superior)

    def campo(_t, y):
        return sentido * evaluate(spec.b0, y)

    def sai_da_caixa(_t, y):
        return float(min(np.min(y - lo), np.min(hi - y)))
    sai_da_caixa.terminal = True
    sai_da_caixa.direction = -1

    tempos = np.linspace(0.0, T, 101)
    solucao = solve_ivp(campo, (0.0, T), x0, method='RK45', t_eval=tempos, events=sai_da_caixa,
                        rtol=1e-8, atol=1e-10)
    if solucao.status != 0:
        return None
    c0 = c0_em(spec, solucao.y.T)
    return float((T / 100.0) * np.count_nonzero(c0 >= limiar))


def check_hypo(spec: OperatorSpec, caixa: Caixa, criticos: Sequence[CriticalPoint], T: float = 1.0,
               C: float = 100.0, amostras: int = 64, raio: Optional[float] = None) -> HypoReport:
    """Estima meas{t ∈ [−T, T] : c⁰(e^{tb⁰}x) ≥ 1/C} em amostras longe de π_x𝒞.

    Heurística: pode refutar a hipótese, nunca certificá-la.
    """
    if T <= 0 or C <= 0:
        raise ParametrosInvalidosError("T e C devem ser positivos.")
    raio = 0.05 * caixa.diametro if raio is None else raio
    limiar = 1.0 / C
    centros = np.array([u.localizacao for u in criticos]).reshape(-1, caixa.dimensao)
    medidas: List[float] = []
    sinalizados: List[Tuple[float, ...]] = []
    ignorados = 0
    for x in amostras_halton(caixa, amostras):
        if centros.size and np.min(np.linalg.norm(centros - x, axis=1)) < raio:
            continue
        adiante = _medida_fluxo(spec, caixa, x, T, limiar, 1.0)
        atras = _medida_fluxo(spec, caixa, x, T, limiar, -1.0)
        if adiante is None or atras is None:
            ignorados += 1
            continue
        medida = adiante + atras
        medidas.append(medida)
        if medida < limiar:
            sinalizados.append(tuple(float(c) for c in x))
    if ignorados:
        logger.warning("hipo: %d amostras ignoradas (fluxo deixa a caixa)", ignorados)
    return HypoReport(medida_minima=min(medidas) if medidas else math.inf, limiar=limiar,
                      amostras=len(medidas), sinalizados=tuple(sinalizados), ignorados=ignorados)
