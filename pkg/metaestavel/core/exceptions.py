class BaseErroCore(Exception):
    """Classe base para todas as exceções da Camada Core."""
    codigo_saida = 3

    def __init__(self, message="Falha na análise metaestável."):
        self.message = message
        super().__init__(self.message)

# ===============================================
# ERROS DE CONFIGURAÇÃO (código de saída 1)
# ===============================================

class ConfiguracaoInvalidaError(BaseErroCore):
    """Erro levantado quando a configuração ou os dados de entrada são inválidos."""
    codigo_saida = 1

    def __init__(self, message="A configuração fornecida é inválida."):
        super().__init__(message)

class ExpressaoInvalidaError(ConfiguracaoInvalidaError):
    """Expressão fora da gramática (símbolo ou função desconhecidos, sintaxe)."""
    def __init__(self, expressao: str, motivo: str = "sintaxe inválida"):
        self.expressao = expressao
        super().__init__(f"Expressão inválida '{expressao}': {motivo}.")

class DimensaoIncompativelError(ConfiguracaoInvalidaError):
    """Erro levantado quando a dimensão de um ponto ou campo não confere."""
    def __init__(self, esperada, recebida):
        self.esperada = esperada
        self.recebida = recebida
        super().__init__(f"Dimensão incompatível: esperada {esperada}, recebida {recebida}.")

class ParametrosInvalidosError(ConfiguracaoInvalidaError):
    """Parâmetros de galeria ou de operador fora do domínio permitido."""
    def __init__(self, message="Parâmetros inválidos para o operador."):
        super().__init__(message)

# ===============================================
# HIPÓTESES FALSIFICADAS (código de saída 2)
# ===============================================

class HipoteseFalsificadaError(BaseErroCore):
    """Uma hipótese estrutural da teoria falha para o operador dado."""
    codigo_saida = 2

    def __init__(self, message="Uma hipótese estrutural foi falsificada."):
        super().__init__(message)

class PontoCriticoDegeneradoError(HipoteseFalsificadaError):
    """Hessiana singular em um ponto crítico (f não é de Morse)."""
    def __init__(self, localizacao, menor_autovalor: float):
        self.localizacao = localizacao
        self.menor_autovalor = menor_autovalor
        super().__init__(
            f"Ponto crítico degenerado em {list(localizacao)}: "
            f"menor |autovalor| da Hessiana = {menor_autovalor:.3e}."
        )

class ContagemAutovaloresError(HipoteseFalsificadaError):
    """Λ(u) não tem exatamente k autovalores com parte real negativa."""
    def __init__(self, ponto_id: str, esperado, obtido):
        self.ponto_id = ponto_id
        super().__init__(
            f"Contagem de autovalores de Λ em {ponto_id}: esperado {esperado}, obtido {obtido}."
        )

class MuNaoRealError(HipoteseFalsificadaError):
    def __init__(self, ponto_id: str, mu: complex):
        self.mu = mu
        super().__init__(f"μ({ponto_id}) = {mu} não é real dentro da tolerância.")

class NormalizacaoImpossivelError(HipoteseFalsificadaError):
    def __init__(self, ponto_id: str, valor: float):
        super().__init__(
            f"A⁰η·η = {valor:.3e} ≤ 0 em {ponto_id}: normalização de η impossível."
        )

class PaisagemNaoConfinanteError(HipoteseFalsificadaError):
    """f não domina todos os valores de sela na fronteira da caixa."""
    def __init__(self, minimo_fronteira: float, maior_sela: float):
        self.minimo_fronteira = minimo_fronteira
        self.maior_sela = maior_sela
        super().__init__(
            f"Paisagem não confinante na caixa: min f na fronteira = {minimo_fronteira:.6g} "
            f"≤ maior valor de sela = {maior_sela:.6g}."
        )

class GenerVioladaError(HipoteseFalsificadaError):
    def __init__(self, message="A hipótese de genericidade falhou e o caminho geral não foi solicitado."):
        super().__init__(message)

class MinimoTipoIIError(HipoteseFalsificadaError):
    """Mínimos de tipo II não são suportados pelo caminho geral."""
    def __init__(self, minimos):
        self.minimos = tuple(minimos)
        super().__init__(f"Mínimos de tipo II presentes (não suportado): {', '.join(self.minimos)}.")

class EstruturaCriticaError(HipoteseFalsificadaError):
    def __init__(self, message="Verificações estruturais nos pontos críticos falharam."):
        super().__init__(message)

class DesigualdadeSusyError(HipoteseFalsificadaError):
    """A constante C₀ não separa o laço dos pontos ρ₁, ρ₂."""
    def __init__(self, maximo_laco: float, c0: float, minimo_rho: float):
        super().__init__(
            f"Exige-se max f no laço < C₀ < min(f(ρ₁), f(ρ₂)); obtido "
            f"{maximo_laco:.6g} < {c0:.6g} < {minimo_rho:.6g}."
        )

# ===============================================
# FALHAS NUMÉRICAS (código de saída 3)
# ===============================================

class FalhaNumericaError(BaseErroCore):
    """Falha numérica (convergência, condicionamento, resolução)."""
    codigo_saida = 3

    def __init__(self, message="Falha numérica."):
        super().__init__(message)

class ValorNaoFinitoError(FalhaNumericaError):
    def __init__(self, contexto: str = "avaliação"):
        super().__init__(f"Valor não finito durante {contexto}.")

class QRNaoConvergiuError(FalhaNumericaError):
    def __init__(self, message="O algoritmo QR não convergiu."):
        super().__init__(message)

class BlocoSingularError(FalhaNumericaError):
    """Bloco líder singular (ou mal condicionado) em um complemento de Schur."""
    def __init__(self, condicao: float, etapa=None):
        self.condicao = condicao
        self.etapa = etapa
        sufixo = f" na etapa {etapa}" if etapa is not None else ""
        super().__init__(f"Bloco líder singular{sufixo}: condição estimada {condicao:.3e}.")

class DimensaoExcedidaError(FalhaNumericaError):
    def __init__(self, dimensao: int, limite: int):
        super().__init__(f"Dimensão da base {dimensao} excede o limite {limite}.")

class SemPontosCriticosError(FalhaNumericaError):
    def __init__(self, message="Nenhum ponto crítico encontrado na caixa."):
        super().__init__(message)

class MalhaGrosseiraError(FalhaNumericaError):
    """A malha não separa os pontos críticos ou o refinamento de um evento falhou."""
    def __init__(self, message="Malha grosseira demais para a paisagem."):
        super().__init__(message)

class ResolucaoInsuficienteError(FalhaNumericaError):
    def __init__(self, minimo_id: str, pontos: float, exigido: int = 20):
        self.pontos = pontos
        super().__init__(
            f"Resolução insuficiente no poço {minimo_id}: {pontos:.1f} pontos na largura do poço "
            f"(mínimo {exigido})."
        )

class AutovaloresFalhouError(FalhaNumericaError):
    def __init__(self, message="O autossolver falhou."):
        super().__init__(message)

class DecomposicaoMalCondicionadaError(FalhaNumericaError):
    def __init__(self, condicao: float):
        self.condicao = condicao
        super().__init__(f"Decomposição espectral mal condicionada: cond(V) = {condicao:.3e}.")

class ContagemIncompativelError(FalhaNumericaError):
    def __init__(self, previstos: int, numericos: int):
        super().__init__(
            f"Contagem incompatível: {previstos} autovalores previstos, {numericos} numéricos."
        )

class FatoracaoInconsistenteError(FalhaNumericaError):
    """M₀ do modelo de interação difere de LᵗL."""
    def __init__(self, residuo: float):
        self.residuo = residuo
        super().__init__(f"M₀ difere de LᵗL em {residuo:.3e}.")

class SubfluxoError(FalhaNumericaError):
    """Conversão de LogScaled para real sofreria subfluxo."""
    def __init__(self, log_magnitude: float):
        super().__init__(f"Conversão para real sofreria subfluxo (log = {log_magnitude:.6g}).")

class CriterioAceitacaoError(FalhaNumericaError):
    def __init__(self, message="Critério de aceitação não atendido."):
        super().__init__(message)
