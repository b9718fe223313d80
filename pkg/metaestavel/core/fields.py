# metaestavel/core/fields.py
"""
Campos suaves escalares, vetoriais e matriciais em ℝ^d.

Corpos simbólicos (expressões sympy) têm derivadas exatas; corpos dados por
callback recorrem a diferenças centrais com um nível de extrapolação de
Richardson.
"""
import logging
import threading
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from metaestavel.core.exceptions import (
    DimensaoIncompativelError,
    ExpressaoInvalidaError,
    ValorNaoFinitoError,
)

logger = logging.getLogger(__name__)

Expression = sp.Expr

FUNCOES_PERMITIDAS = {
    'exp': sp.exp,
    'log': sp.log,
    'sin': sp.sin,
    'cos': sp.cos,
    'sqrt': sp.sqrt,
    'tanh': sp.tanh,
}
_CLASSES_PERMITIDAS = (sp.exp, sp.log, sp.sin, sp.cos, sp.tanh)
_TRANSFORMACOES = standard_transformations + (convert_xor,)

FORMAS = ('escalar', 'vetor', 'matriz')

_EPS = np.finfo(float).eps
_PASSO_1 = _EPS ** (1.0 / 3.0)
_PASSO_2 = _EPS ** (1.0 / 6.0)


def simbolos(dimensao: int) -> Tuple[sp.Symbol, ...]:
    """Variáveis x1..xd (reais)."""
    return tuple(sp.Symbol(f'x{i + 1}', real=True) for i in range(dimensao))


def parse_expression(texto: Union[str, float, int, sp.Expr], dimensao: int) -> Expression:
    """Converte texto infixo (x1..xd, ^, exp log sin cos sqrt tanh) em Expression."""
    variaveis = simbolos(dimensao)
    if isinstance(texto, sp.Expr):
        expressao = texto
    elif isinstance(texto, (int, float)) and not isinstance(texto, bool):
        expressao = sp.Float(texto) if isinstance(texto, float) else sp.Integer(texto)
    elif isinstance(texto, str):
        if not texto.strip():
            raise ExpressaoInvalidaError(texto, "expressão vazia")
        locais: Dict[str, object] = {str(v): v for v in variaveis}
        locais.update(FUNCOES_PERMITIDAS)
        locais['pi'] = sp.pi
        try:
            expressao = parse_expr(texto, local_dict=locais, transformations=_TRANSFORMACOES)
        except Exception as exc:
            raise ExpressaoInvalidaError(texto, f"sintaxe inválida ({exc.__class__.__name__})") from exc
    else:
        raise ExpressaoInvalidaError(str(texto), "tipo não suportado")

    if not isinstance(expressao, sp.Expr):
        raise ExpressaoInvalidaError(str(texto), "não é uma expressão escalar")
    permitidos = set(variaveis)
    estranhos = [s for s in expressao.free_symbols if s not in permitidos]
    if estranhos:
        nomes = ', '.join(sorted(str(s) for s in estranhos))
        raise ExpressaoInvalidaError(str(texto), f"variáveis fora de x1..x{dimensao}: {nomes}")
    for funcao in expressao.atoms(sp.Function):
        if not isinstance(funcao, _CLASSES_PERMITIDAS):
            raise ExpressaoInvalidaError(str(texto), f"função não permitida: {funcao.func}")
    if expressao.has(sp.I, sp.zoo, sp.nan, sp.oo):
        raise ExpressaoInvalidaError(str(texto), "constante não real")
    return expressao


def _forma_valor(forma: str, dimensao: int) -> Tuple[int, ...]:
    return {'escalar': (), 'vetor': (dimensao,), 'matriz': (dimensao, dimensao)}[forma]


def _compilar(expressoes: Sequence[sp.Expr], variaveis) -> Tuple[Callable, ...]:
    return tuple(sp.lambdify(variaveis, e, modules='numpy') for e in expressoes)


@dataclass(frozen=True, eq=False)
class SmoothMap:
    """Campo suave em ℝ^d.

    O corpo é um vetor de Expressions (achatado em ordem de linhas) ou um
    callback opaco; callbacks podem fornecer derivadas exatas.
    """
    dimensao: int
    forma: str
    expressoes: Optional[Tuple[sp.Expr, ...]] = None
    funcao: Optional[Callable] = None
    derivada1: Optional[Callable] = None
    derivada2: Optional[Callable] = None
    _compilados: Dict = field(default_factory=dict, init=False, repr=False)
    _trava: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    def __post_init__(self):
        if self.forma not in FORMAS:
            raise ExpressaoInvalidaError(self.forma, "forma desconhecida")
        if (self.expressoes is None) == (self.funcao is None):
            raise ExpressaoInvalidaError(self.forma, "informe expressões ou callback, não ambos")
        if self.expressoes is not None:
            esperado = int(np.prod(self.forma_valor)) if self.forma_valor else 1
            if len(self.expressoes) != esperado:
                raise DimensaoIncompativelError(esperado, len(self.expressoes))

    @property
    def forma_valor(self) -> Tuple[int, ...]:
        return _forma_valor(self.forma, self.dimensao)

    @property
    def simbolico(self) -> bool:
        return self.expressoes is not None

    @property
    def e_nulo(self) -> bool:
        return self.simbolico and all(e == 0 for e in self.expressoes)

    def matriz_simbolica(self) -> sp.Matrix:
        """Corpo como sympy.Matrix com a forma do valor (escalar vira 1×1)."""
        forma = self.forma_valor or (1,)
        return sp.Matrix(self.expressoes).reshape(*forma) if len(forma) == 2 \
            else sp.Matrix(self.expressoes)

    def _funcoes(self, ordem: int) -> Tuple[Callable, ...]:
        with self._trava:
            if ordem not in self._compilados:
                variaveis = simbolos(self.dimensao)
                if ordem == 0:
                    alvo = list(self.expressoes)
                elif ordem == 1:
                    alvo = [sp.diff(e, v) for e in self.expressoes for v in variaveis]
                else:
                    alvo = [sp.diff(e, v, w) for e in self.expressoes
                            for v in variaveis for w in variaveis]
                self._compilados[ordem] = _compilar(alvo, variaveis)
            return self._compilados[ordem]


# ====================================================================
# CONSTRUTORES
# ====================================================================

def mapa_escalar(expressao, dimensao: int) -> SmoothMap:
    return SmoothMap(dimensao, 'escalar', expressoes=(parse_expression(expressao, dimensao),))


def mapa_vetorial(expressoes: Sequence, dimensao: int) -> SmoothMap:
    if len(expressoes) != dimensao:
        raise DimensaoIncompativelError(dimensao, len(expressoes))
    return SmoothMap(dimensao, 'vetor',
                     expressoes=tuple(parse_expression(e, dimensao) for e in expressoes))


def mapa_matricial(linhas: Sequence[Sequence], dimensao: int) -> SmoothMap:
    if len(linhas) != dimensao or any(len(linha) != dimensao for linha in linhas):
        raise DimensaoIncompativelError((dimensao, dimensao), (len(linhas), len(linhas[0]) if linhas else 0))
    return SmoothMap(dimensao, 'matriz',
                     expressoes=tuple(parse_expression(e, dimensao) for linha in linhas for e in linha))


def mapa_identidade(dimensao: int) -> SmoothMap:
    return mapa_matricial([[1 if i == j else 0 for j in range(dimensao)] for i in range(dimensao)], dimensao)


def mapa_nulo(dimensao: int, forma: str = 'vetor') -> SmoothMap:
    n = int(np.prod(_forma_valor(forma, dimensao))) if forma != 'escalar' else 1
    return SmoothMap(dimensao, forma, expressoes=tuple(sp.Integer(0) for _ in range(n)))


def mapa_callback(funcao: Callable, dimensao: int, forma: str = 'escalar',
                  derivada1: Optional[Callable] = None,
                  derivada2: Optional[Callable] = None) -> SmoothMap:
    return SmoothMap(dimensao, forma, funcao=funcao, derivada1=derivada1, derivada2=derivada2)


def diferenciar(mapa: SmoothMap, variavel: int) -> SmoothMap:
    """Derivada simbólica ∂/∂x_{variavel+1}; o resultado é de novo uma Expression."""
    if not mapa.simbolico:
        raise ExpressaoInvalidaError(mapa.forma, "derivada simbólica exige corpo simbólico")
    x = simbolos(mapa.dimensao)[variavel]
    return SmoothMap(mapa.dimensao, mapa.forma, expressoes=tuple(sp.diff(e, x) for e in mapa.expressoes))


# ====================================================================
# AVALIAÇÃO
# ====================================================================

def _ponto(mapa: SmoothMap, x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1 or x.size != mapa.dimensao:
        raise DimensaoIncompativelError(mapa.dimensao, x.size)
    return x


def _pontos(mapa: SmoothMap, pontos) -> np.ndarray:
    pontos = np.asarray(pontos, dtype=float)
    if pontos.ndim == 1 and mapa.dimensao == 1:
        pontos = pontos[:, None]
    if pontos.ndim != 2 or pontos.shape[1] != mapa.dimensao:
        raise DimensaoIncompativelError(mapa.dimensao, pontos.shape[-1] if pontos.ndim else 0)
    return pontos


def _verificar_finito(valor: np.ndarray, contexto: str) -> np.ndarray:
    if not np.all(np.isfinite(valor)):
        raise ValorNaoFinitoError(contexto)
    return valor


def _aplicar_compilados(funcoes, pontos: np.ndarray) -> np.ndarray:
    n = pontos.shape[0]
    colunas = [pontos[:, i] for i in range(pontos.shape[1])]
    saida = np.empty((n, len(funcoes)))
    with np.errstate(all='ignore'):
        for j, fn in enumerate(funcoes):
            saida[:, j] = np.broadcast_to(np.asarray(fn(*colunas), dtype=float), (n,))
    return saida


def evaluate(mapa: SmoothMap, x) -> np.ndarray:
    """Valor do campo em x (float para escalares, array para vetores/matrizes)."""
    x = _ponto(mapa, x)
    valor = evaluate_many(mapa, x[None, :])[0]
    return float(valor) if mapa.forma == 'escalar' else valor


def evaluate_many(mapa: SmoothMap, pontos) -> np.ndarray:
    """Avaliação vetorizada em um array (n, d) de pontos; saída (n,) + forma."""
    pontos = _pontos(mapa, pontos)
    n = pontos.shape[0]
    if mapa.simbolico:
        bruto = _aplicar_compilados(mapa._funcoes(0), pontos)
        valor = bruto.reshape((n,) + mapa.forma_valor)
    else:
        with np.errstate(all='ignore'):
            valor = np.array([np.asarray(mapa.funcao(p), dtype=float) for p in pontos])
        valor = valor.reshape((n,) + mapa.forma_valor)
    return _verificar_finito(valor, "avaliação do campo")


# ====================================================================
# DERIVADAS
# ====================================================================

def _valor_callback(mapa: SmoothMap, x: np.ndarray) -> np.ndarray:
    with np.errstate(all='ignore'):
        return np.asarray(mapa.funcao(x), dtype=float).reshape(mapa.forma_valor)


def _diferenca_central(fn: Callable, x: np.ndarray, j: int, passo: float) -> np.ndarray:
    e = np.zeros_like(x)
    e[j] = passo
    return (fn(x + e) - fn(x - e)) / (2.0 * passo)


def _primeira_fd(fn: Callable, x: np.ndarray) -> np.ndarray:
    """Diferenças centrais com um nível de Richardson; eixo da derivada por último."""
    colunas = []
    for j in range(x.size):
        passo = _PASSO_1 * (1.0 + abs(x[j]))
        grosso = _diferenca_central(fn, x, j, passo)
        fino = _diferenca_central(fn, x, j, passo / 2.0)
        colunas.append((4.0 * fino - grosso) / 3.0)
    return np.stack(colunas, axis=-1)


def _segunda_fd(fn: Callable, x: np.ndarray) -> np.ndarray:
    """Segundas diferenças centrais com um nível de Richardson."""
    passos = _PASSO_2 * (1.0 + np.abs(x))
    grosso = _segunda_diferenca(fn, x, passos)
    fino = _segunda_diferenca(fn, x, passos / 2.0)
    return (4.0 * fino - grosso) / 3.0


def _segunda_diferenca(fn: Callable, x: np.ndarray, passos: np.ndarray) -> np.ndarray:
    d = x.size
    centro = fn(x)
    linhas = [[None] * d for _ in range(d)]
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = passos[i]
        linhas[i][i] = (fn(x + ei) - 2.0 * centro + fn(x - ei)) / passos[i] ** 2
        for j in range(i + 1, d):
            ej = np.zeros(d)
            ej[j] = passos[j]
            cruzada = (fn(x + ei + ej) - fn(x + ei - ej) - fn(x - ei + ej) + fn(x - ei - ej)) \
                / (4.0 * passos[i] * passos[j])
            linhas[i][j] = cruzada
            linhas[j][i] = cruzada
    return np.stack([np.stack(linha, axis=-1) for linha in linhas], axis=-2)


def _simetrizar(valor: np.ndarray) -> np.ndarray:
    return 0.5 * (valor + np.swapaxes(valor, -1, -2))


def derivative(mapa: SmoothMap, x, ordem: int) -> np.ndarray:
    """Gradiente/Jacobiana (ordem 1) ou Hessiana (ordem 2) em x.

    A forma da saída é forma_valor + (d,) ou forma_valor + (d, d); para campos
    vetoriais J[i, j] = ∂_j b_i. Hessianas voltam simetrizadas.
    """
    if ordem not in (1, 2):
        raise ExpressaoInvalidaError(str(ordem), "ordem de derivada deve ser 1 ou 2")
    x = _ponto(mapa, x)
    return derivative_many(mapa, x[None, :], ordem)[0]


def derivative_many(mapa: SmoothMap, pontos, ordem: int) -> np.ndarray:
    if ordem not in (1, 2):
        raise ExpressaoInvalidaError(str(ordem), "ordem de derivada deve ser 1 ou 2")
    pontos = _pontos(mapa, pontos)
    n, d = pontos.shape
    forma = mapa.forma_valor + (d,) * ordem
    if mapa.simbolico:
        valor = _aplicar_compilados(mapa._funcoes(ordem), pontos).reshape((n,) + forma)
    else:
        valor = np.array([_derivada_callback(mapa, p, ordem) for p in pontos]).reshape((n,) + forma)
    if ordem == 2:
        valor = _simetrizar(valor)
    return _verificar_finito(valor, f"derivada de ordem {ordem}")


def _derivada_callback(mapa: SmoothMap, x: np.ndarray, ordem: int) -> np.ndarray:
    if ordem == 1:
        if mapa.derivada1 is not None:
            return np.asarray(mapa.derivada1(x), dtype=float)
        return _primeira_fd(lambda y: _valor_callback(mapa, y), x)
    if mapa.derivada2 is not None:
        return np.asarray(mapa.derivada2(x), dtype=float)
    if mapa.derivada1 is not None:
        return _primeira_fd(lambda y: np.asarray(mapa.derivada1(y), dtype=float), x)
    return _segunda_fd(lambda y: _valor_callback(mapa, y), x)
