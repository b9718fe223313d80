# metaestavel/core/testes_validate.py

import math
import unittest

import numpy as np

from metaestavel.core.entities import AsymptoticEigenvalue, Caixa, LogScaled, Malha
from metaestavel.core.exceptions import (
    ContagemIncompativelError,
    ParametrosInvalidosError,
    ResolucaoInsuficienteError,
)
from metaestavel.core.eyring_kramers import predict, return_to_equilibrium_rate, transition_times
from metaestavel.core.landscape import find_critical_points, label, merge_tree
from metaestavel.core.operator import analyze_all, gallery
from metaestavel.core.validate import (
    compare,
    discretize,
    discretize_parts,
    gap_fit,
    gibbs_residual,
    semigroup_check,
    small_eigs,
    susy_residual,
)


def _f_corte(rotulagem, h):
    return max(s.valor for s in rotulagem.selas) + 5.0 * h * abs(math.log(h))


class TestDiscretizacao(unittest.TestCase):

    def setUp(self):
        self.spec = gallery('witten', {'f': 'x1^2/2'})

    def test_residuo_de_gibbs_converge_em_segunda_ordem(self):
        """
        Cenário: Duplo poço em N = 2001 sobre [−2.5, 2.5], h = 0.1: resíduo ≤ 1e−4 e ÷4 ao dividir Δx por 2.
        """
        # ARRANGE
        spec = gallery('witten', {'f': 'x1^4/4 - x1^2/2 + x1/10'})
        caixa = Caixa((-2.5,), (2.5,))

        # ACT
        grosso = discretize(spec, Malha(caixa, (2001,)), 0.1)
        fino = discretize(spec, Malha(caixa, (4001,)), 0.1)

        # ASSERT
        self.assertEqual(grosso.regra_potencial, 'simbolico')
        self.assertLessEqual(gibbs_residual(grosso), 1e-4)
        razao = gibbs_residual(grosso) / gibbs_residual(fino)
        self.assertGreaterEqual(razao, 3.5)
        self.assertLessEqual(razao, 4.5)

    def test_menor_autovalor_tende_a_zero_em_segunda_ordem(self):
        """
        Cenário: Para f = x²/2 o núcleo discreto desvia ≈ −Δx²/16 de 0.
        """
        # ARRANGE
        caixa = Caixa((-3.0,), (3.0,))

        # ACT
        grosso = small_eigs(discretize(self.spec, Malha(caixa, (801,)), 0.1), 1).pequenos[0]
        fino = small_eigs(discretize(self.spec, Malha(caixa, (1601,)), 0.1), 1).pequenos[0]

        # ASSERT
        self.assertAlmostEqual(abs(grosso), 0.0075 ** 2 / 16, delta=0.2 * 0.0075 ** 2 / 16)
        self.assertGreaterEqual(abs(grosso) / abs(fino), 3.5)
        self.assertLessEqual(abs(grosso) / abs(fino), 4.5)

    def test_regra_de_gibbs_anula_o_estado_de_gibbs(self):
        D = discretize(self.spec, Malha(Caixa((-6.0,), (6.0,)), (601,)), 0.5, regra_potencial='gibbs')
        self.assertLess(gibbs_residual(D), 1e-10)
        self.assertTrue(D.simetrico)

    def test_corte_restringe_nos_ativos(self):
        """
        Cenário: f < 0.45 deixa ativos só os nós com |x| ≤ 0.9.
        """
        partes = discretize_parts(self.spec, Malha(Caixa((-2.0,), (2.0,)), (41,)), 0.5, f_corte=0.45)
        self.assertEqual(partes.ativos.size, 19)
        self.assertTrue(np.all(partes.valores_f < 0.45))

    def test_regra_desconhecida_e_h_invalido_falham(self):
        malha = Malha(Caixa((-1.0,), (1.0,)), (11,))
        with self.assertRaises(ParametrosInvalidosError):
            discretize_parts(self.spec, malha, 0.5, regra_potencial='outra')
        with self.assertRaises(ParametrosInvalidosError):
            discretize_parts(self.spec, malha, 0.0)

    def test_resolucao_insuficiente_falha(self):
        """
        Cenário: 6√(h/f″) = 0.6 cobre só 3 células de 0.2.
        """
        minimo = find_critical_points(self.spec.f, Caixa((-2.0,), (2.0,)))
        with self.assertRaises(ResolucaoInsuficienteError):
            discretize(self.spec, Malha(Caixa((-2.0,), (2.0,)), (21,)), 0.01, minimos=minimo)


class TestAutovaloresPequenos(unittest.TestCase):

    def test_oscilador_harmonico(self):
        """
        Cenário: Para f = x²/2 o espectro de P é {2hn}; núcleo e lacuna 2h.
        """
        # ARRANGE
        spec = gallery('witten', {'f': 'x1^2/2'})
        D = discretize(spec, Malha(Caixa((-3.0,), (3.0,)), (801,)), 0.1)

        # ACT
        eigs = small_eigs(D, 1)

        # ASSERT
        self.assertEqual(eigs.metodo, 'denso')
        self.assertLess(abs(eigs.pequenos[0]), 1e-5)
        self.assertAlmostEqual(eigs.lacuna.real, 0.2, delta=1e-3)

    def test_ajuste_da_lacuna(self):
        self.assertAlmostEqual(gap_fit([0.05, 0.1, 0.2], [0.1, 0.2, 0.4]), 2.0)

    def test_comparacao_com_contagem_incompativel_falha(self):
        previsoes = [AsymptoticEigenvalue('m1', 0.1, math.inf, None, LogScaled.zero()),
                     AsymptoticEigenvalue('m2', 0.1, 0.2, 0.4, LogScaled.de_real(1e-3))]
        with self.assertRaises(ContagemIncompativelError):
            compare(previsoes, {0.1: [0.0]}, [0.1])

    def test_comparacao_pareia_por_magnitude(self):
        previsoes = [AsymptoticEigenvalue('m1', 0.1, math.inf, None, LogScaled.zero()),
                     AsymptoticEigenvalue('m2', 0.1, 0.2, 0.4, LogScaled.de_real(1e-3))]
        linhas = compare(previsoes, {0.1: [1.1e-3, 1e-15]}, [0.1])
        self.assertIsNone(linhas[0].razao)
        self.assertEqual(linhas[1].minimo, 'm2')
        self.assertAlmostEqual(linhas[1].razao, 1.1)


class TestDuploPocoContraPrevisao(unittest.TestCase):
    """Varredura em h do duplo poço inclinado com c = c⁰ + h c¹."""

    @classmethod
    def setUpClass(cls):
        cls.spec = gallery('witten', {'f': 'x1^4/4 - x1^2/2 + x1/10'})
        cls.caixa = Caixa((-2.5,), (2.5,))
        criticos = find_critical_points(cls.spec.f, cls.caixa)
        cls.rotulagem = label(merge_tree(cls.spec.f, cls.caixa, [501], criticos), criticos)
        cls.analises = analyze_all(cls.spec, list(cls.rotulagem.pontos.values()))

    def test_razoes_na_faixa_e_convergentes(self):
        """
        Cenário: λ_num/λ_pred ∈ [0.85, 1.15] e |log razão| decresce com h.
        """
        # ARRANGE
        h_lista = [0.05, 0.07, 0.1]
        previsoes = predict(self.rotulagem, self.analises, h_lista)
        # o desvio O(Δx²) de c⁰ + h c¹ não diminui com h; a malha fina o mantém abaixo de 0.2% em h = 0.05
        malha = Malha(self.caixa, (8001,))
        minimos = [self.rotulagem.ponto(m) for m in self.rotulagem.minimos]

        # ACT
        numericos = {}
        for h in h_lista:
            D = discretize(self.spec, malha, h, _f_corte(self.rotulagem, h), minimos=minimos)
            numericos[h] = small_eigs(D, self.rotulagem.n0).pequenos
        linhas = [l for l in compare(previsoes, numericos, h_lista) if l.razao is not None]

        # ASSERT
        self.assertEqual(D.regra_potencial, 'simbolico')
        self.assertEqual(len(linhas), 3)
        for linha in linhas:
            self.assertGreaterEqual(linha.razao, 0.85)
            self.assertLessEqual(linha.razao, 1.15)
        erros = [abs(l.log_razao) for l in sorted(linhas, key=lambda l: l.h)]
        self.assertEqual(erros, sorted(erros))


class TestSemigrupo(unittest.TestCase):
    """Duplo poço x⁴/4 − x²/2 + x/10 com dado inicial no poço raso."""

    @classmethod
    def setUpClass(cls):
        cls.spec = gallery('witten', {'f': 'x1^4/4 - x1^2/2 + x1/10'})
        cls.caixa = Caixa((-2.5,), (2.5,))
        criticos = find_critical_points(cls.spec.f, cls.caixa)
        cls.rotulagem = label(merge_tree(cls.spec.f, cls.caixa, [501], criticos), criticos)
        cls.analises = analyze_all(cls.spec, list(cls.rotulagem.pontos.values()))
        cls.raso = next(m for m in cls.rotulagem.minimos if m != cls.rotulagem.minimo_global)

    def _executar(self, h, delta, regra_potencial):
        previsoes = predict(self.rotulagem, self.analises, [h])
        minimos = [self.rotulagem.ponto(m) for m in self.rotulagem.minimos]
        D = discretize(self.spec, Malha(self.caixa, (2001,)), h, _f_corte(self.rotulagem, h),
                       regra_potencial, minimos)
        x = D.malha.pontos()[D.ativos, 0]
        m = float(self.rotulagem.ponto(self.raso).localizacao[0])
        u0 = np.exp(-(x - m) ** 2 / h)
        # g₊ = 20 > 7/z deixa e^{−z g₊} < 1e−3 no início da última janela (z ≈ 0.41)
        janelas = transition_times(self.rotulagem, h, delta, g_mais=20.0)
        relatorio = semigroup_check(D, u0, janelas, [math.inf, self.rotulagem.registro(self.raso).S],
                                    return_to_equilibrium_rate(previsoes, h))
        return janelas, relatorio

    def test_janela_vazia_em_h_0_1(self):
        """
        Cenário: Em h = 0.1, 2S/h ≈ 3.15 não separa g₊ de e^{(2S − δ)/h}; platô só na última janela.
        """
        # ACT
        janelas, relatorio = self._executar(0.1, 0.2, 'simbolico')

        # ASSERT
        self.assertTrue(janelas[0].vazia)
        self.assertTrue(relatorio.aprovado_plateaus)
        self.assertTrue(relatorio.aprovado_taxa)
        self.assertEqual(relatorio.condicao, 1.0)

    def test_platos_e_taxa_de_retorno(self):
        """
        Cenário: h = 0.03, δ = 0.2: janela [g₊, e^{(2S − δ)/h}] ≈ [20, 47] com erro ≤ 1e−3.
        """
        # ACT
        # λ ≈ 3e−7 em h = 0.03 fica abaixo do desvio O(Δx²) de c⁰ + h c¹; a regra de Gibbs preserva o núcleo
        janelas, relatorio = self._executar(0.03, 0.2, 'gibbs')

        # ASSERT
        self.assertFalse(janelas[0].vazia)
        self.assertTrue(relatorio.aprovado_plateaus)
        self.assertLessEqual(relatorio.plateaus[0].erro_maximo, 1e-3)
        self.assertTrue(relatorio.aprovado_taxa)


class TestPerturbacaoSusy(unittest.TestCase):

    def test_residuo_converge_em_segunda_ordem(self):
        """
        Cenário: Dobrar a resolução divide o resíduo por ≈ 4.
        """
        spec = gallery('susy_breaking')
        caixa = Caixa((-1.6, -1.6), (1.6, 1.6))
        grosso = susy_residual(spec, Malha(caixa, (161, 161)), 1.0)
        fino = susy_residual(spec, Malha(caixa, (321, 321)), 1.0)
        self.assertGreaterEqual(grosso / fino, 3.5)
        self.assertLessEqual(grosso / fino, 4.5)

    def test_residuo_exige_perturbacao(self):
        spec = gallery('witten', {'f': 'x1^2/2 + x2^2/2', 'dimensao': 2})
        with self.assertRaises(ParametrosInvalidosError):
            susy_residual(spec, Malha(Caixa((-1.0, -1.0), (1.0, 1.0)), (11, 11)), 1.0)
