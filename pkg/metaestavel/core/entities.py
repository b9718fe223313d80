import math
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from metaestavel.core.exceptions import SubfluxoError, ValorNaoFinitoError
from metaestavel.core.fields import SmoothMap

# Identificador de componente conexa: (índice do nível σ_i, rótulo da componente).
ComponenteId = Tuple[int, int]
COMPONENTE_TOTAL: ComponenteId = (1, 0)
SELA_FICTICIA = 's_inf'

_LOG_MIN_NORMAL = math.log(sys.float_info.min)
_LOG_MAX = math.log(sys.float_info.max)


# ====================================================================
# ARITMÉTICA EM ESCALA LOGARÍTMICA
# ====================================================================

@dataclass(frozen=True)
class LogScaled:
    """Número real representado por sinal e log natural da magnitude.

    Representa grandezas como h·e^{−2S/h} sem subfluxo.
    """
    sinal: int
    log_magnitude: float

    @classmethod
    def zero(cls) -> 'LogScaled':
        return cls(0, -math.inf)

    @classmethod
    def de_real(cls, valor: float) -> 'LogScaled':
        if valor == 0:
            return cls.zero()
        if not math.isfinite(valor):
            raise ValorNaoFinitoError("conversão para LogScaled")
        return cls(1 if valor > 0 else -1, math.log(abs(valor)))

    @classmethod
    def exp(cls, expoente: float) -> 'LogScaled':
        """Retorna e^{expoente} (positivo)."""
        return cls(1, float(expoente))

    @staticmethod
    def _coagir(outro) -> 'LogScaled':
        return outro if isinstance(outro, LogScaled) else LogScaled.de_real(float(outro))

    @property
    def e_zero(self) -> bool:
        return self.sinal == 0

    def __mul__(self, outro):
        outro = self._coagir(outro)
        if self.sinal == 0 or outro.sinal == 0:
            return LogScaled.zero()
        return LogScaled(self.sinal * outro.sinal, self.log_magnitude + outro.log_magnitude)

    __rmul__ = __mul__

    def __truediv__(self, outro):
        outro = self._coagir(outro)
        if outro.sinal == 0:
            raise ZeroDivisionError("divisão de LogScaled por zero")
        if self.sinal == 0:
            return LogScaled.zero()
        return LogScaled(self.sinal * outro.sinal, self.log_magnitude - outro.log_magnitude)

    def __neg__(self):
        return LogScaled(-self.sinal, self.log_magnitude)

    def __add__(self, outro):
        outro = self._coagir(outro)
        if self.sinal == 0:
            return outro
        if outro.sinal == 0:
            return self
        if self.sinal == outro.sinal:
            return LogScaled(self.sinal, float(np.logaddexp(self.log_magnitude, outro.log_magnitude)))
        maior, menor = (self, outro) if self.log_magnitude >= outro.log_magnitude else (outro, self)
        diferenca = menor.log_magnitude - maior.log_magnitude
        if diferenca == 0:
            return LogScaled.zero()
        return LogScaled(maior.sinal, maior.log_magnitude + math.log1p(-math.exp(diferenca)))

    __radd__ = __add__

    def __sub__(self, outro):
        return self + (-self._coagir(outro))

    def __rsub__(self, outro):
        return self._coagir(outro) - self

    def __pow__(self, expoente: float):
        if self.sinal < 0:
            raise ValueError("potência real de LogScaled negativo")
        if self.sinal == 0:
            return LogScaled.zero() if expoente > 0 else LogScaled(1, 0.0)
        return LogScaled(1, self.log_magnitude * expoente)

    def sqrt(self) -> 'LogScaled':
        return self ** 0.5

    def _chave(self):
        if self.sinal > 0:
            return (1, self.log_magnitude)
        if self.sinal < 0:
            return (-1, -self.log_magnitude)
        return (0, 0.0)

    def __lt__(self, outro):
        return self._chave() < self._coagir(outro)._chave()

    def __le__(self, outro):
        return self._chave() <= self._coagir(outro)._chave()

    def __gt__(self, outro):
        return self._chave() > self._coagir(outro)._chave()

    def __ge__(self, outro):
        return self._chave() >= self._coagir(outro)._chave()

    def __float__(self) -> float:
        if self.sinal == 0:
            return 0.0
        if self.log_magnitude < _LOG_MIN_NORMAL:
            raise SubfluxoError(self.log_magnitude)
        if self.log_magnitude > _LOG_MAX:
            raise ValorNaoFinitoError("conversão de LogScaled para real")
        return self.sinal * math.exp(self.log_magnitude)

    def representavel(self) -> bool:
        """Indica se a conversão para float é possível sem subfluxo."""
        return self.sinal == 0 or _LOG_MIN_NORMAL <= self.log_magnitude <= _LOG_MAX

    def log10(self) -> float:
        return self.log_magnitude / math.log(10.0)

    def mantissa_expoente(self) -> Tuple[int, float, int]:
        """Retorna (sinal, mantissa ∈ [1, 10), expoente decimal)."""
        if self.sinal == 0:
            return (0, 0.0, 0)
        l10 = self.log10()
        expoente = math.floor(l10)
        mantissa = 10.0 ** (l10 - expoente)
        if mantissa >= 10.0:
            mantissa /= 10.0
            expoente += 1
        return (self.sinal, mantissa, expoente)

    def formatar(self, digitos: int = 5) -> str:
        """Formata como 'm.mmmme±XX' a partir do log, nunca passando por float."""
        if self.sinal == 0:
            return '0'
        sinal, mantissa, expoente = self.mantissa_expoente()
        texto_mantissa = f"{mantissa:.{digitos - 1}f}"
        if float(texto_mantissa) >= 10.0:
            texto_mantissa = f"{mantissa / 10.0:.{digitos - 1}f}"
            expoente += 1
        prefixo = '-' if sinal < 0 else ''
        return f"{prefixo}{texto_mantissa}e{expoente:+03d}"

    def __str__(self):
        return self.formatar()


# ====================================================================
# DOMÍNIO E MALHAS
# ====================================================================

@dataclass(frozen=True)
class Caixa:
    """Caixa retangular [inferior_i, superior_i] em ℝ^d."""
    inferior: Tuple[float, ...]
    superior: Tuple[float, ...]

    @property
    def dimensao(self) -> int:
        return len(self.inferior)

    @property
    def diametro(self) -> float:
        return float(np.linalg.norm(np.subtract(self.superior, self.inferior)))

    def contem(self, x, folga: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= np.asarray(self.inferior) - folga)
                    and np.all(x <= np.asarray(self.superior) + folga))

    def eixos(self, resolucao: Tuple[int, ...]) -> List[np.ndarray]:
        return [np.linspace(lo, hi, n) for lo, hi, n in zip(self.inferior, self.superior, resolucao)]


@dataclass(frozen=True)
class Malha:
    """Malha regular (indexação 'ij', ordem C) sobre uma caixa."""
    caixa: Caixa
    resolucao: Tuple[int, ...]

    @property
    def dimensao(self) -> int:
        return len(self.resolucao)

    @property
    def eixos(self) -> List[np.ndarray]:
        return self.caixa.eixos(self.resolucao)

    @property
    def espacamento(self) -> Tuple[float, ...]:
        return tuple((hi - lo) / (n - 1) for lo, hi, n
                     in zip(self.caixa.inferior, self.caixa.superior, self.resolucao))

    @property
    def total(self) -> int:
        return int(np.prod(self.resolucao))

    def pontos(self) -> np.ndarray:
        grade = np.meshgrid(*self.eixos, indexing='ij')
        return np.stack([g.ravel() for g in grade], axis=1)


# ====================================================================
# ÁLGEBRA LINEAR
# ====================================================================

@dataclass(frozen=True, eq=False)
class EigenResult:
    autovalores: np.ndarray
    autovetores: Optional[np.ndarray]
    erro_retroativo: float


# ====================================================================
# PAISAGEM
# ====================================================================

@dataclass(frozen=True, eq=False)
class CriticalPoint:
    """Ponto crítico de f: localização, valor, índice de Morse e Hessiana."""
    id: str
    localizacao: np.ndarray
    valor: float
    indice: int
    hessiana: np.ndarray

    @property
    def chave_ordenacao(self) -> Tuple:
        return (self.valor,) + tuple(float(c) for c in self.localizacao)


@dataclass(frozen=True, eq=False)
class MergeEvent:
    """Fusão de duas componentes da subnível discreta, com a sela refinada."""
    nivel_grade: float
    vertice: int
    testemunhas: Tuple[int, int]
    sela: CriticalPoint


@dataclass(frozen=True, eq=False)
class MergeTree:
    malha: Malha
    valores: np.ndarray
    eventos: Tuple[MergeEvent, ...]
    vizinhos: np.ndarray
    nascimentos: Tuple[int, ...] = ()


@dataclass(frozen=True)
class MinimumRecord:
    """Registro da rotulagem de um mínimo m."""
    minimo_id: str
    nivel: int
    componente: ComponenteId
    selas: Tuple[str, ...]
    sigma: float
    S: float
    valor: float
    componente_anterior: Optional[ComponenteId] = None
    componente_chapeu: Optional[ComponenteId] = None
    m_chapeu: Optional[str] = None
    tipo: Optional[str] = None
    classe: int = 0


@dataclass(frozen=True, eq=False)
class Labeling:
    """Registro completo da paisagem rotulada."""
    minimos: Tuple[str, ...]
    registros: Dict[str, MinimumRecord]
    selas: Tuple[CriticalPoint, ...]
    niveis_sigma: Tuple[float, ...]
    membros: Dict[ComponenteId, Tuple[str, ...]]
    classes: Tuple[Tuple[str, ...], ...]
    minimo_global: str
    pontos: Dict[str, CriticalPoint]
    escala: float
    degenerado: bool = False
    caixa: Optional[Caixa] = None

    @property
    def n0(self) -> int:
        return len(self.minimos)

    def registro(self, minimo_id: str) -> MinimumRecord:
        return self.registros[minimo_id]

    def ponto(self, ponto_id: str) -> CriticalPoint:
        return self.pontos[ponto_id]

    def classe_de(self, minimo_id: str) -> Tuple[str, ...]:
        return self.classes[self.registros[minimo_id].classe]


@dataclass(frozen=True)
class GenerReport:
    unicidade: bool
    disjuncao: bool
    minimos_nao_unicos: Tuple[str, ...] = ()
    pares_violadores: Tuple[Tuple[str, str], ...] = ()
    tipo_ii: Tuple[str, ...] = ()

    @property
    def tipo_ii_vazio(self) -> bool:
        return not self.tipo_ii

    @property
    def aprovado(self) -> bool:
        return self.unicidade and self.disjuncao


# ====================================================================
# OPERADOR
# ====================================================================

@dataclass(frozen=True, eq=False)
class SusyPerturbation:
    """Dados do campo b^per = e^{2(f−C₀)/h} d*χ, com laço γ = {|x−ρ₁| = raio}."""
    chi: SmoothMap
    C0: float
    rho1: Tuple[float, ...]
    rho2: Tuple[float, ...]
    raio: float
    f_corte: Optional[float] = None


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """Dados (f, A⁰, b⁰) que definem P e seus símbolos derivados."""
    dimensao: int
    f: SmoothMap
    A0: SmoothMap
    b0: SmoothMap
    c0: Optional[SmoothMap] = None
    nome: str = 'bruto'
    parametros: Dict = field(default_factory=dict)
    perturbacao: Optional[SusyPerturbation] = None

    @property
    def reversivel(self) -> bool:
        return self.b0.e_nulo


@dataclass(frozen=True)
class EikonalReport:
    residuo_c0: float
    residuo_transporte: float
    escala: float
    tolerancia: float
    amostras: int
    c0_fornecido: bool

    @property
    def aprovado(self) -> bool:
        limite = self.tolerancia * self.escala
        return self.residuo_c0 <= limite and self.residuo_transporte <= limite


@dataclass(frozen=True)
class CriticalStructureReport:
    ponto_id: str
    verificacoes: Dict[str, bool]
    residuos: Dict[str, float]
    posto_kalman: int

    @property
    def aprovado(self) -> bool:
        return all(self.verificacoes.values())


@dataclass(frozen=True)
class HarmonicValue:
    nu: Tuple[int, ...]
    valor: complex
    multiplicidade: int = 1
    coincidente: bool = False


@dataclass(frozen=True, eq=False)
class CriticalAnalysis:
    """Dados espectrais em um ponto crítico u."""
    ponto: CriticalPoint
    A0: np.ndarray
    B: np.ndarray
    Lambda: np.ndarray
    espectro_lambda: np.ndarray
    contagens: Tuple[int, int, int]
    autovalores_fundamentais: np.ndarray
    traco_til: complex
    c1: float
    valores_harmonicos: Tuple[HarmonicValue, ...]
    mu: Optional[float] = None
    eta: Optional[np.ndarray] = None

    @property
    def D(self) -> float:
        return math.sqrt(abs(float(np.linalg.det(self.ponto.hessiana))))


@dataclass(frozen=True)
class HypoReport:
    medida_minima: float
    limiar: float
    amostras: int
    sinalizados: Tuple[Tuple[float, ...], ...]
    ignorados: int
    heuristico: bool = True
    aviso: str = ("Verificação amostral e heurística: pode refutar a hipótese de "
                  "hipoelipticidade, nunca certificá-la.")

    @property
    def aprovado(self) -> bool:
        return not self.sinalizados


# ====================================================================
# ASSINTÓTICA DE EYRING–KRAMERS
# ====================================================================

@dataclass(frozen=True)
class AsymptoticEigenvalue:
    minimo: str
    h: float
    S: float
    z: Optional[float]
    valor: LogScaled


@dataclass(frozen=True, eq=False)
class InteractionModel:
    ordem: Tuple[str, ...]
    M0: np.ndarray
    L: np.ndarray
    selas_linhas: Tuple[str, ...]
    classes: Tuple[Tuple[str, ...], ...]
    niveis_S: Dict[str, float]
    menor_autovalor: float
    tolerancia_S: float
    minimo_global: str = ''

    @property
    def definida_positiva(self) -> bool:
        return self.menor_autovalor > 1e-12 * max(1.0, float(np.abs(self.M0).max(initial=0.0)))

    def indices(self, classe: int) -> List[int]:
        return [self.ordem.index(m) for m in self.classes[classe]]

    def bloco(self, classe: int) -> np.ndarray:
        idx = self.indices(classe)
        return self.M0[np.ix_(idx, idx)]

    def particao(self, classe: int) -> Tuple[Tuple[int, ...], Tuple[float, ...]]:
        """Dimensões dos blocos por nível de S dentro da classe e os níveis S_k."""
        dims: List[int] = []
        niveis: List[float] = []
        for m in self.classes[classe]:
            S = self.niveis_S[m]
            if niveis and abs(S - niveis[-1]) <= self.tolerancia_S:
                dims[-1] += 1
            else:
                dims.append(1)
                niveis.append(S)
        return tuple(dims), tuple(niveis)

    def tau(self, classe: int, h: float) -> Tuple[LogScaled, ...]:
        _, niveis = self.particao(classe)
        return tuple(LogScaled.exp(-(niveis[k] - niveis[k - 1]) / h) for k in range(1, len(niveis)))


@dataclass(frozen=True)
class GeneralEigenvalue:
    classe: int
    nivel: int
    valor: LogScaled
    minimos: Tuple[str, ...] = ()


@dataclass(frozen=True)
class PlateauWindow:
    k: int
    inicio: float
    fim: float
    S_k: float

    @property
    def vazia(self) -> bool:
        return not self.inicio < self.fim


# ====================================================================
# MATRIZES GRADUADAS
# ====================================================================

@dataclass(frozen=True, eq=False)
class GradedMatrix:
    """Matriz Ω(τ)MΩ(τ) com Ω(τ) = diag(ε_j Id), ε₁ = 1, ε_j = Π_{k≤j} τ_k."""
    dims: Tuple[int, ...]
    tau: Tuple[LogScaled, ...]
    M: np.ndarray
    classe: str = 'GS'
    limite_assimetria: float = 0.0

    @property
    def p(self) -> int:
        return len(self.dims)

    @property
    def epsilons(self) -> Tuple[LogScaled, ...]:
        eps = [LogScaled(1, 0.0)]
        for t in self.tau:
            eps.append(eps[-1] * t)
        return tuple(eps)


@dataclass(frozen=True, eq=False)
class GradedLevel:
    nivel: int
    autovalores: np.ndarray
    peso: LogScaled
    condicao: float
    incerteza: float = 0.0

    def valores(self) -> List[LogScaled]:
        return [self.peso * LogScaled.de_real(float(v)) for v in self.autovalores]


@dataclass(frozen=True)
class ResolventReport:
    constante: float
    produtos: Tuple[float, ...]
    amostras_usadas: int
    amostras_excluidas: int
    separacoes: Tuple[float, ...]


# ====================================================================
# VALIDAÇÃO NUMÉRICA
# ====================================================================

@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    malha: Malha
    h: float
    matriz: object
    ativos: np.ndarray
    valores_f: np.ndarray
    f_corte: Optional[float]
    regra_potencial: str
    simetrico: bool
    regra_fronteira: str = 'dirichlet fora de {f < f_corte}'

    @property
    def dimensao(self) -> int:
        return int(self.ativos.size)

    def gibbs(self) -> np.ndarray:
        """Vetor e^{−(f − min f)/h} nos nós ativos."""
        return np.exp(-(self.valores_f - self.valores_f.min()) / self.h)


@dataclass(frozen=True, eq=False)
class SmallEigs:
    pequenos: np.ndarray
    lacuna: complex
    metodo: str


@dataclass(frozen=True)
class ComparisonRow:
    h: float
    minimo: str
    previsto: LogScaled
    numerico: complex
    razao: Optional[float]
    log_razao: Optional[float]


@dataclass(frozen=True)
class PlateauReport:
    janela: PlateauWindow
    erro_maximo: float
    tempos: Tuple[float, ...]
    erros: Tuple[float, ...] = ()

    @property
    def vazia(self) -> bool:
        return self.janela.vazia


@dataclass(frozen=True, eq=False)
class SemigroupReport:
    plateaus: Tuple[PlateauReport, ...]
    taxa_ajustada: float
    taxa_prevista: float
    condicao: float
    tempos: np.ndarray
    distancias: np.ndarray
    tol_plateau: float
    tol_taxa: float

    @property
    def erro_taxa(self) -> float:
        return abs(self.taxa_ajustada / self.taxa_prevista - 1.0)

    @property
    def aprovado_plateaus(self) -> bool:
        return all(p.erro_maximo <= self.tol_plateau for p in self.plateaus if not p.vazia)

    @property
    def aprovado_taxa(self) -> bool:
        return self.erro_taxa <= self.tol_taxa


# ====================================================================
# CONFIGURAÇÃO E RESULTADOS DE EXECUÇÃO
# ====================================================================

@dataclass(frozen=True)
class Tolerancias:
    newton: float = 1e-10
    degenerescencia: float = 1e-8
    realidade: float = 1e-9
    valor: float = 1e-9

    def escalada(self, fator: float) -> 'Tolerancias':
        return Tolerancias(self.newton * fator, self.degenerescencia * fator,
                           self.realidade * fator, self.valor * fator)


@dataclass(frozen=True)
class RunConfig:
    operador: Optional[Dict]
    caixa: Optional[Caixa]
    malha_paisagem: Tuple[int, ...]
    malha_validacao: Tuple[int, ...]
    h: Tuple[float, ...]
    saida: str
    sementes_por_eixo: int = 10
    tolerancias: Tolerancias = field(default_factory=Tolerancias)
    relatorios: Tuple[str, ...] = ()
    caminho_geral: bool = False
    ordem_harmonica: int = 2
    faixa_razao: Tuple[float, float] = (0.85, 1.15)
    regra_potencial: str = 'simbolico'
    escala_tolerancia: float = 1.0
    hipo: Dict = field(default_factory=dict)
    semigrupo: Dict = field(default_factory=dict)
    graded: Optional[Dict] = None
    workers: int = 1


@dataclass
class ResultadoExecucao:
    """Resultado de um subcomando: arquivos escritos, resumo e código de saída."""
    subcomando: str
    arquivos: List[str] = field(default_factory=list)
    resumo: Dict = field(default_factory=dict)
    codigo_saida: int = 0
    mensagem: str = ''
