# metaestavel/core/testes_fields.py

import unittest

import numpy as np

from metaestavel.core.fields import (
    derivative,
    diferenciar,
    evaluate,
    evaluate_many,
    mapa_callback,
    mapa_escalar,
    mapa_identidade,
    mapa_matricial,
    mapa_nulo,
    mapa_vetorial,
    parse_expression,
)
from metaestavel.core.exceptions import (
    DimensaoIncompativelError,
    ExpressaoInvalidaError,
    ValorNaoFinitoError,
)


def _expressao_aleatoria(rng, d: int) -> str:
    """Soma de 2 a 5 termos suaves com coeficientes e frequências moderados."""
    termos = []
    for _ in range(int(rng.integers(2, 6))):
        i, j = (int(k) for k in rng.integers(1, d + 1, size=2))
        a = round(float(rng.uniform(-2.0, 2.0)), 3)
        b = round(float(rng.uniform(0.3, 2.0)), 3)
        modelos = (
            f"{a}*x{i}^{int(rng.integers(1, 5))}",
            f"{a}*sin({b}*x{i})",
            f"{a}*cos({b}*x{i}*x{j})",
            f"{a}*exp({b}*x{i})",
            f"{a}*tanh({b}*x{i} - x{j})",
            f"{a}*x{i}*x{j}*exp(-x{i}^2)",
        )
        termos.append(f"({modelos[int(rng.integers(0, len(modelos)))]})")
    return ' + '.join(termos)


class TestParseExpression(unittest.TestCase):

    def test_expressao_valida_avalia_corretamente(self):
        """
        Cenário: Uma expressão com ^, funções permitidas e pi é aceita.
        """
        # ARRANGE
        f = mapa_escalar('x1^4/4 - x1^2/2 + sin(pi*x2) + exp(0)', 2)

        # ACT
        valor = evaluate(f, [2.0, 0.5])

        # ASSERT
        self.assertAlmostEqual(valor, 4.0 - 2.0 + 1.0 + 1.0, places=12)

    def test_variavel_fora_da_dimensao_falha(self):
        """
        Cenário: x3 não existe em dimensão 2.
        """
        with self.assertRaises(ExpressaoInvalidaError):
            parse_expression('x1 + x3', 2)

    def test_funcao_nao_permitida_falha(self):
        """
        Cenário: Funções fora da lista (abs, funções indefinidas) são rejeitadas.
        """
        with self.assertRaises(ExpressaoInvalidaError):
            parse_expression('Abs(x1)', 1)
        with self.assertRaises(ExpressaoInvalidaError):
            parse_expression('g(x1)', 1)

    def test_constante_complexa_falha(self):
        """
        Cenário: A unidade imaginária não é um coeficiente real.
        """
        with self.assertRaises(ExpressaoInvalidaError):
            parse_expression('x1 + I', 1)

    def test_expressao_vazia_ou_mal_formada_falha(self):
        with self.assertRaises(ExpressaoInvalidaError):
            parse_expression('   ', 1)
        with self.assertRaises(ExpressaoInvalidaError):
            parse_expression('x1 +* 2', 1)


class TestAvaliacao(unittest.TestCase):

    def test_avaliacao_vetorizada_tem_forma_correta(self):
        """
        Cenário: Campos escalar, vetorial e matricial em vários pontos.
        """
        # ARRANGE
        pontos = np.array([[0.0, 1.0], [1.0, 2.0], [-1.0, 0.5]])
        f = mapa_escalar('x1*x2', 2)
        b = mapa_vetorial(['x2', '-x1'], 2)
        A = mapa_identidade(2)

        # ACT / ASSERT
        self.assertEqual(evaluate_many(f, pontos).shape, (3,))
        self.assertEqual(evaluate_many(b, pontos).shape, (3, 2))
        self.assertEqual(evaluate_many(A, pontos).shape, (3, 2, 2))
        np.testing.assert_allclose(evaluate_many(b, pontos)[1], [2.0, -1.0])
        np.testing.assert_allclose(evaluate_many(A, pontos)[2], np.eye(2))

    def test_campo_nulo_e_constante(self):
        b = mapa_nulo(3)
        self.assertTrue(b.e_nulo)
        np.testing.assert_array_equal(evaluate(b, [1.0, 2.0, 3.0]), np.zeros(3))

    def test_ponto_de_dimensao_errada_falha(self):
        f = mapa_escalar('x1 + x2', 2)
        with self.assertRaises(DimensaoIncompativelError):
            evaluate(f, [1.0, 2.0, 3.0])

    def test_valor_nao_finito_falha(self):
        """
        Cenário: log(x1) em x1 = -1 produz nan.
        """
        f = mapa_escalar('log(x1)', 1)
        with self.assertRaises(ValorNaoFinitoError):
            evaluate_many(f, np.array([[1.0], [-1.0]]))

    def test_matriz_de_tamanho_errado_falha(self):
        with self.assertRaises(DimensaoIncompativelError):
            mapa_matricial([['1', '0']], 2)


class TestDerivadas(unittest.TestCase):

    def test_derivadas_simbolicas_exatas(self):
        """
        Cenário: Gradiente e Hessiana de f = x1^2 x2 + x2^3.
        """
        # ARRANGE
        f = mapa_escalar('x1^2*x2 + x2^3', 2)
        x = np.array([1.5, -2.0])

        # ACT
        g = derivative(f, x, 1)
        H = derivative(f, x, 2)

        # ASSERT
        np.testing.assert_allclose(g, [2 * 1.5 * -2.0, 1.5 ** 2 + 3 * 4.0], rtol=1e-14)
        np.testing.assert_allclose(H, [[-4.0, 3.0], [3.0, -12.0]], rtol=1e-14)

    def test_jacobiana_convencao_linhas_componentes(self):
        """
        Cenário: J[i, j] = ∂_j b_i para b = (x2, -x1^3).
        """
        b = mapa_vetorial(['x2', '-x1^3'], 2)
        J = derivative(b, [2.0, 0.0], 1)
        np.testing.assert_allclose(J, [[0.0, 1.0], [-12.0, 0.0]])

    def test_diferenciar_devolve_expressao(self):
        f = mapa_escalar('x1^3*x2', 2)
        df = diferenciar(f, 0)
        self.assertTrue(df.simbolico)
        self.assertAlmostEqual(evaluate(df, [2.0, 5.0]), 3 * 4.0 * 5.0)

    def test_callback_por_diferencas_finitas(self):
        """
        Cenário: exp(x) via callback; a derivada numérica segue a exata.
        """
        # ARRANGE
        f = mapa_callback(lambda x: np.exp(x[0]), 1)

        # ACT / ASSERT
        for x in (-1.0, 0.0, 0.7, 1.3):
            self.assertLess(abs(derivative(f, [x], 1)[0] - np.exp(x)), 1e-9 * max(1.0, np.exp(x)))
            self.assertLess(abs(derivative(f, [x], 2)[0, 0] - np.exp(x)), 1e-6 * max(1.0, np.exp(x)))

    def test_simbolico_e_diferencas_finitas_concordam(self):
        """
        Cenário: 100 expressões aleatórias (polinômios, sin, cos, exp, tanh) em pontos de [−1, 1]^d.
        """
        rng = np.random.default_rng(41)
        for _ in range(100):
            # ARRANGE
            d = int(rng.integers(1, 4))
            texto = _expressao_aleatoria(rng, d)
            simbolico = mapa_escalar(texto, d)
            numerico = mapa_callback(lambda y, f=simbolico: evaluate(f, y), d)
            x = rng.uniform(-1.0, 1.0, size=d)

            # ACT / ASSERT
            for ordem in (1, 2):
                exato = derivative(simbolico, x, ordem)
                aproximado = derivative(numerico, x, ordem)
                escala = max(1.0, float(np.max(np.abs(exato))))
                self.assertLessEqual(float(np.max(np.abs(aproximado - exato))), 1e-7 * escala,
                                     msg=f"{texto} em {x}, ordem {ordem}")

    def test_callback_com_derivada_fornecida(self):
        f = mapa_callback(lambda x: x[0] ** 2, 1, derivada1=lambda x: np.array([2.0 * x[0]]))
        np.testing.assert_allclose(derivative(f, [3.0], 1), [6.0])

    def test_diferenciar_callback_falha(self):
        f = mapa_callback(lambda x: x[0], 1)
        with self.assertRaises(ExpressaoInvalidaError):
            diferenciar(f, 0)
