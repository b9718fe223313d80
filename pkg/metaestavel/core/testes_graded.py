# metaestavel/core/testes_graded.py

import math
import unittest

import numpy as np

from metaestavel.core.entities import GradedMatrix, LogScaled
from metaestavel.core.exceptions import DimensaoIncompativelError, ParametrosInvalidosError, SubfluxoError
from metaestavel.core.graded import (
    assemble,
    graded_spectrum,
    high_precision_eigenvalues,
    predicted_values,
    resolvent_gap_check,
    schur_iteration_identity,
    sequential_schur,
)
from metaestavel.core.linalg import schur_complement


def _simetrica_bem_condicionada(n, semente):
    rng = np.random.default_rng(semente)
    R = rng.uniform(-1.0, 1.0, size=(n, n))
    return 2.0 * np.eye(n) + 0.1 * (R + R.T)


def _erro_relativo(a: LogScaled, b: LogScaled) -> float:
    if a.sinal != b.sinal:
        return math.inf
    return abs(math.expm1(a.log_magnitude - b.log_magnitude))


class TestEspectroGraduado(unittest.TestCase):

    def test_exemplo_dois_por_dois(self):
        """
        Cenário: [[2, 1], [1, 1]] com τ = 1e−3 tem valores previstos {2, 0.5e−6}.
        """
        # ARRANGE
        G = GradedMatrix(dims=(1, 1), tau=(LogScaled.de_real(1e-3),), M=np.array([[2.0, 1.0], [1.0, 1.0]]))

        # ACT
        valores = [float(v) for v in predicted_values(G)]

        # ASSERT
        self.assertAlmostEqual(valores[0], 0.5e-6, delta=1e-18)
        self.assertAlmostEqual(valores[1], 2.0, places=14)

    def test_niveis_e_pesos(self):
        G = GradedMatrix(dims=(2, 1), tau=(LogScaled.exp(-10.0),), M=_simetrica_bem_condicionada(3, 1))
        niveis = graded_spectrum(G)
        self.assertEqual([n.nivel for n in niveis], [1, 2])
        self.assertAlmostEqual(niveis[1].peso.log_magnitude, -20.0)
        self.assertEqual(niveis[0].autovalores.size, 2)

    def test_oraculo_de_alta_precisao(self):
        """
        Cenário: Erro relativo contra mpmath ≤ 100·max τ².
        """
        # ARRANGE
        tau = (LogScaled.de_real(1e-4), LogScaled.de_real(1e-5))
        G = GradedMatrix(dims=(2, 2, 2), tau=tau, M=_simetrica_bem_condicionada(6, 11))

        # ACT
        previstos = predicted_values(G)
        referencia = high_precision_eigenvalues(G, digitos=60)

        # ASSERT
        self.assertEqual(len(previstos), len(referencia))
        for p, r in zip(previstos, referencia):
            self.assertLessEqual(_erro_relativo(p, r), 100 * 1e-8)

    def test_oraculo_em_escalas_sem_representacao(self):
        """
        Cenário: ε_j² ≈ e^{−220} está fora do alcance relativo de float, mas não do LogScaled.
        """
        # ARRANGE
        tau = (LogScaled.exp(-50.0), LogScaled.exp(-60.0))
        G = GradedMatrix(dims=(1, 2, 1), tau=tau, M=_simetrica_bem_condicionada(4, 5))

        # ACT
        previstos = predicted_values(G)
        referencia = high_precision_eigenvalues(G, digitos=250)

        # ASSERT
        for p, r in zip(previstos, referencia):
            self.assertLessEqual(_erro_relativo(p, r), 100 * math.exp(-100.0))
        self.assertLess(previstos[0].log_magnitude, -200.0)

    def test_oraculo_em_nucleos_aleatorios(self):
        """
        Cenário: 200 núcleos SPD, p ≤ 4 e τ log-uniforme em [1e−6, 1e−3].
        """
        rng = np.random.default_rng(31)
        for semente in range(200):
            # ARRANGE
            p = int(rng.integers(2, 5))
            dims = tuple(int(d) for d in rng.integers(1, 3, size=p))
            tau_real = 10.0 ** rng.uniform(-6.0, -3.0, size=p - 1)
            G = GradedMatrix(dims=dims, tau=tuple(LogScaled.de_real(float(t)) for t in tau_real),
                             M=_simetrica_bem_condicionada(sum(dims), semente))

            # ACT
            previstos = predicted_values(G)
            referencia = high_precision_eigenvalues(G, digitos=40)

            # ASSERT
            self.assertEqual(len(previstos), sum(dims))
            self.assertEqual(len(referencia), sum(dims))
            limite = 100 * float(np.max(tau_real)) ** 2
            for p_valor, r_valor in zip(previstos, referencia):
                self.assertLessEqual(_erro_relativo(p_valor, r_valor), limite)

    def test_gs_nao_simetrica_falha(self):
        G = GradedMatrix(dims=(1, 1), tau=(LogScaled.de_real(0.1),), M=np.array([[2.0, 1.0], [0.0, 1.0]]))
        with self.assertRaises(ParametrosInvalidosError):
            graded_spectrum(G)

    def test_gas_dentro_do_limite(self):
        M = np.array([[2.0, 1.0 + 1e-3], [1.0, 1.0]])
        G = GradedMatrix(dims=(1, 1), tau=(LogScaled.de_real(0.1),), M=M, classe='GAS', limite_assimetria=1e-2)
        niveis = graded_spectrum(G)
        self.assertGreater(niveis[0].incerteza, 0.0)

    def test_quantidade_de_tau_incompativel_falha(self):
        G = GradedMatrix(dims=(1, 1), tau=(), M=np.eye(2))
        with self.assertRaises(DimensaoIncompativelError):
            graded_spectrum(G)


class TestComplementosDeSchur(unittest.TestCase):

    def test_identidade_da_iteracao(self):
        """
        Cenário: R₂(R₁(M)) = R_{1,2}(M) até 1e−12‖M‖.
        """
        rng = np.random.default_rng(23)
        for semente in range(100):
            d1, d2, d3 = (int(d) for d in rng.integers(1, 4, size=3))
            M = _simetrica_bem_condicionada(d1 + d2 + d3, semente)
            erro = schur_iteration_identity(M, d1, d2, d3)
            self.assertLessEqual(erro, 1e-12 * np.linalg.norm(M, 2))

    def test_sequencial_igual_ao_conjunto(self):
        M = _simetrica_bem_condicionada(6, 3)
        np.testing.assert_allclose(sequential_schur(M, (1, 2, 3), 3), schur_complement(M, 3), atol=1e-12)
        np.testing.assert_array_equal(sequential_schur(M, (1, 2, 3), 1), M)


class TestMontagemEResolvente(unittest.TestCase):

    def test_montagem_com_subfluxo_falha(self):
        G = GradedMatrix(dims=(1, 1), tau=(LogScaled.exp(-400.0),), M=np.eye(2))
        with self.assertRaises(SubfluxoError):
            assemble(G)

    def test_montagem_densa(self):
        G = GradedMatrix(dims=(1, 1), tau=(LogScaled.de_real(1e-3),), M=np.array([[2.0, 1.0], [1.0, 1.0]]))
        np.testing.assert_allclose(assemble(G), [[2.0, 1e-3], [1e-3, 1e-6]])

    def test_resolvente_de_matriz_simetrica(self):
        """
        Cenário: Para M normal, ‖(M − z)⁻¹‖·dist(z, σ(M)) = 1.
        """
        # ARRANGE
        G = GradedMatrix(dims=(1, 1), tau=(LogScaled.de_real(1e-3),), M=np.array([[2.0, 1.0], [1.0, 1.0]]))
        amostras = [10.0, -1.0, 1.0 + 1.0j, 2.0 + 2.0j]

        # ACT
        relatorio = resolvent_gap_check(G, amostras)

        # ASSERT
        self.assertEqual(relatorio.amostras_usadas, 4)
        self.assertAlmostEqual(relatorio.constante, 1.0, places=10)
        self.assertEqual(len(relatorio.separacoes), 1)
        self.assertGreater(relatorio.separacoes[0], 5.0)

    def test_amostras_dentro_dos_discos_sao_excluidas(self):
        G = GradedMatrix(dims=(1, 1), tau=(LogScaled.de_real(1e-3),), M=np.array([[2.0, 1.0], [1.0, 1.0]]))
        relatorio = resolvent_gap_check(G, [2.1, 10.0])
        self.assertEqual(relatorio.amostras_excluidas, 1)
        self.assertEqual(relatorio.amostras_usadas, 1)
