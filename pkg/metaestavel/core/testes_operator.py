# metaestavel/core/testes_operator.py

import math
import unittest

import numpy as np

from metaestavel.core.entities import Caixa, CriticalPoint
from metaestavel.core.exceptions import (
    ContagemAutovaloresError,
    DesigualdadeSusyError,
    DimensaoIncompativelError,
    ParametrosInvalidosError,
)
from metaestavel.core.fields import mapa_escalar, mapa_matricial, mapa_nulo, mapa_vetorial
from metaestavel.core.landscape import find_critical_points
from metaestavel.core.operator import (
    analyze_all,
    analyze_critical,
    build_operator_spec,
    c0_em,
    c1_em,
    check_hypo,
    gallery,
    harmonic_gap,
    harmonic_spectrum,
    verify_critical_structure,
    verify_eikonal,
)


def _ponto(id, x, valor, indice, H):
    return CriticalPoint(id=id, localizacao=np.asarray(x, dtype=float), valor=valor,
                         indice=indice, hessiana=np.asarray(H, dtype=float))


class TestConstrucaoEGaleria(unittest.TestCase):

    def test_witten_e_reversivel(self):
        spec = gallery('witten', {'f': 'x1^4/4 - x1^2/2'})
        self.assertTrue(spec.reversivel)
        self.assertEqual(spec.dimensao, 1)

    def test_simbolos_derivados_de_witten(self):
        """
        Cenário: c⁰ = f′² e c¹ = −f″ para A⁰ = 1.
        """
        spec = gallery('witten', {'f': 'x1^4/4 - x1^2/2'})
        pontos = np.array([[0.5], [1.5]])
        x = pontos[:, 0]
        np.testing.assert_allclose(c0_em(spec, pontos), (x ** 3 - x) ** 2, rtol=1e-12)
        np.testing.assert_allclose(c1_em(spec, pontos), -(3 * x ** 2 - 1), rtol=1e-12)

    def test_familia_desconhecida_falha(self):
        with self.assertRaises(ParametrosInvalidosError):
            gallery('inexistente')

    def test_parametros_invalidos_falham(self):
        with self.assertRaises(ParametrosInvalidosError):
            gallery('kfp', {'V': 'x1^2/2', 'gamma': -1})
        with self.assertRaises(ParametrosInvalidosError):
            gallery('kfp', {'V': 'x2^2', 'gamma': 1})
        with self.assertRaises(ParametrosInvalidosError):
            gallery('witten', {'f': 'y^2'})
        with self.assertRaises(ParametrosInvalidosError):
            gallery('nonreversible', {'f': 'x1^2 + x2^2', 'J': [[0, 1], [1, 0]]})

    def test_desigualdade_susy_violada_falha(self):
        """
        Cenário: C₀ = 2 acima de min(f(ρ₁), f(ρ₂)) = 1.
        """
        with self.assertRaises(DesigualdadeSusyError):
            gallery('susy_breaking', {'C0': 2.0})

    def test_difusao_nao_semidefinida_falha(self):
        f = mapa_escalar('x1^2/2 + x2^2/2', 2)
        A0 = mapa_matricial([['1', '0'], ['0', '-1']], 2)
        with self.assertRaises(ParametrosInvalidosError):
            build_operator_spec(f, A0, mapa_nulo(2), caixa=Caixa((-1.0, -1.0), (1.0, 1.0)))

    def test_formas_incompativeis_falham(self):
        f = mapa_escalar('x1^2', 1)
        with self.assertRaises(DimensaoIncompativelError):
            build_operator_spec(f, mapa_nulo(1), mapa_nulo(1))


class TestVerificacoes(unittest.TestCase):

    def test_eiconal_do_nao_reversivel(self):
        """
        Cenário: b⁰ = κJ∇f é ortogonal a ∇f em toda parte.
        """
        spec = gallery('nonreversible', {'f': 'x1^4/4 - x1^2/2 + x2^2/2'})
        relatorio = verify_eikonal(spec, Caixa((-2.0, -2.0), (2.0, 2.0)))
        self.assertTrue(relatorio.aprovado)
        self.assertLess(relatorio.residuo_transporte, 1e-12)

    def test_eiconal_violada(self):
        f = mapa_escalar('x1^2/2 + x2^2/2', 2)
        spec = build_operator_spec(f, mapa_matricial([['1', '0'], ['0', '1']], 2), mapa_vetorial(['x1', '0'], 2))
        self.assertFalse(verify_eikonal(spec, Caixa((-1.0, -1.0), (1.0, 1.0))).aprovado)

    def test_estrutura_critica_sem_kalman(self):
        """
        Cenário: Difusão só em x2 e b⁰ = 0 não satisfazem a condição de Kalman.
        """
        # ARRANGE
        f = mapa_escalar('x1^2/2 + x2^2/2', 2)
        spec = build_operator_spec(f, mapa_matricial([['0', '0'], ['0', '1']], 2), mapa_nulo(2))
        u = _ponto('m1', [0.0, 0.0], 0.0, 0, np.eye(2))

        # ACT
        relatorio = verify_critical_structure(spec, u)

        # ASSERT
        self.assertFalse(relatorio.aprovado)
        self.assertFalse(relatorio.verificacoes['kalman'])
        self.assertTrue(relatorio.verificacoes['anulamento'])
        self.assertEqual(relatorio.posto_kalman, 1)

    def test_estrutura_critica_kfp(self):
        spec = gallery('kfp', {'V': 'x1^2/2', 'gamma': 1.0})
        u = _ponto('m1', [0.0, 0.0], 0.0, 0, np.diag([0.5, 0.5]))
        relatorio = verify_critical_structure(spec, u)
        self.assertTrue(relatorio.aprovado)
        self.assertEqual(relatorio.posto_kalman, 2)

    def test_hipo_sinaliza_difusao_degenerada_sem_transporte(self):
        """
        Cenário: c⁰ = x2² é constante ao longo do fluxo nulo; amostras com |x2| < 0.1 são sinalizadas.
        """
        # ARRANGE
        f = mapa_escalar('x1^2/2 + x2^2/2', 2)
        spec = build_operator_spec(f, mapa_matricial([['0', '0'], ['0', '1']], 2), mapa_nulo(2))
        caixa = Caixa((-1.0, -1.0), (1.0, 1.0))
        u = _ponto('m1', [0.0, 0.0], 0.0, 0, np.eye(2))

        # ACT
        relatorio = check_hypo(spec, caixa, [u], T=1.0, C=100.0)

        # ASSERT
        self.assertFalse(relatorio.aprovado)
        self.assertTrue(all(abs(x[1]) < 0.1 for x in relatorio.sinalizados))
        self.assertTrue(relatorio.heuristico)


class TestAnaliseEspectral(unittest.TestCase):

    def setUp(self):
        self.spec = gallery('witten', {'f': 'x1^4/4 - x1^2/2'})
        self.criticos = find_critical_points(self.spec.f, Caixa((-2.0,), (2.0,)))
        self.analises = analyze_all(self.spec, self.criticos, workers=2)

    def test_sela_de_witten(self):
        """
        Cenário: f″(0) = −1 dá μ = −2 e η = √2 (A⁰η·η = −μ).
        """
        sela = next(a for a in self.analises.values() if a.ponto.indice == 1)
        self.assertAlmostEqual(sela.mu, -2.0, places=10)
        self.assertAlmostEqual(abs(float(sela.eta[0])), math.sqrt(2.0), places=10)
        self.assertEqual(sela.contagens, (1, 0, 0))

    def test_estado_fundamental_nos_minimos(self):
        for analise in self.analises.values():
            if analise.ponto.indice != 0:
                continue
            fundamental = analise.valores_harmonicos[0]
            self.assertEqual(fundamental.nu, (0,))
            self.assertAlmostEqual(fundamental.valor.real, 0.0, places=10)
            self.assertAlmostEqual(analise.valores_harmonicos[1].valor.real, 4.0, places=10)

    def test_lacuna_harmonica(self):
        """
        Cenário: O menor valor excitado vem da sela: h·μ⁰ = 2h.
        """
        self.assertAlmostEqual(harmonic_gap(self.analises, 0.1), 0.2, places=10)
        espectro = harmonic_spectrum(self.analises, 0.1, quantidade=2)
        self.assertEqual([round(v[0], 10) for v in espectro], [0.0, 0.0])

    def test_mu_de_kfp_em_pares_aleatorios(self):
        """
        Cenário: Para V″(s) = λ₁ < 0, μ = (γ − √(γ² − 4λ₁))/2.
        """
        rng = np.random.default_rng(2024)
        for _ in range(100):
            # ARRANGE
            lam = float(rng.uniform(-5.0, -0.1))
            gamma = float(rng.uniform(0.5, 5.0))
            spec = gallery('kfp', {'V': f'{lam / 2!r}*x1^2', 'gamma': gamma})
            u = _ponto('s1', [0.0, 0.0], 0.0, 1, np.diag([lam / 2, 0.5]))

            # ACT
            analise = analyze_critical(spec, u)

            # ASSERT
            esperado = (gamma - math.sqrt(gamma ** 2 - 4 * lam)) / 2
            self.assertLess(abs(analise.mu - esperado), 1e-10)
            self.assertAlmostEqual(float(analise.eta @ analise.A0 @ analise.eta), -analise.mu, places=10)

    def test_indice_de_morse_incompativel_falha(self):
        """
        Cenário: Um ponto declarado mínimo com Hessiana indefinida.
        """
        u = _ponto('m9', [0.0], 0.0, 0, [[-1.0]])
        with self.assertRaises(ContagemAutovaloresError):
            analyze_critical(self.spec, u)


class TestInvariantesDaGaleria(unittest.TestCase):
    """Instâncias aleatórias de witten, nonreversible e kfp."""

    def _conferir(self, spec, caixa):
        criticos = find_critical_points(spec.f, caixa)
        self.assertEqual(len(criticos), 3)
        for u in criticos:
            # contagens ≠ índice de Morse levantariam ContagemAutovaloresError
            a = analyze_critical(spec, u)
            H, B = u.hessiana, a.B
            escala = np.linalg.norm(H, 2) * max(np.linalg.norm(B, 2), 1e-300)
            self.assertLessEqual(np.linalg.norm(B.T @ H + H @ B, 2), 1e-10 * escala + 1e-14)
            fundamental = next(v for v in a.valores_harmonicos if not any(v.nu))
            if u.indice == 0:
                self.assertLessEqual(abs(fundamental.valor), 1e-9)
            else:
                identidade = np.linalg.det(np.eye(spec.dimensao) + np.linalg.solve(H, np.outer(a.eta, a.eta)))
                self.assertLessEqual(abs(identidade + 1.0), 1e-8)
                self.assertGreater(fundamental.valor.real, 1e-8)

    def test_witten(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            t = float(rng.uniform(-0.2, 0.2))
            spec = gallery('witten', {'f': f'x1^4/4 - x1^2/2 + {t!r}*x1'})
            self._conferir(spec, Caixa((-2.0,), (2.0,)))

    def test_nao_reversivel(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            t = float(rng.uniform(-0.2, 0.2))
            q = float(rng.uniform(0.5, 2.0))
            kappa = float(rng.uniform(0.2, 2.0))
            spec = gallery('nonreversible', {'f': f'x1^4/4 - x1^2/2 + {t!r}*x1 + {q!r}*x2^2/2', 'kappa': kappa})
            self._conferir(spec, Caixa((-2.0, -2.0), (2.0, 2.0)))

    def test_kfp(self):
        """
        Cenário: V = a x⁴/4 − b x²/2 com a, b ∈ [0.5, 2] e γ ∈ [0.5, 5].
        """
        rng = np.random.default_rng(13)
        for _ in range(20):
            a = float(rng.uniform(0.5, 2.0))
            b = float(rng.uniform(0.5, 2.0))
            gamma = float(rng.uniform(0.5, 5.0))
            spec = gallery('kfp', {'V': f'{a!r}*x1^4/4 - {b!r}*x1^2/2', 'gamma': gamma})
            self._conferir(spec, Caixa((-3.0, -3.0), (3.0, 3.0)))
