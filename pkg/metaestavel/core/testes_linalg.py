# metaestavel/core/testes_linalg.py

import unittest

import numpy as np
import sympy as sp
from scipy.optimize import linear_sum_assignment

from metaestavel.core.linalg import (
    condition,
    determinant,
    eigen,
    halfplane_counts,
    is_real_eigenvalue,
    kalman_rank,
    monomial_basis,
    schur_complement,
    solve,
    transport_operator,
)
from metaestavel.core.exceptions import BlocoSingularError, DimensaoExcedidaError


class TestAutovalores(unittest.TestCase):

    def test_autovalores_conhecidos(self):
        """
        Cenário: [[0, 2], [1, 3]] tem autovalores (3 ± √17)/2.
        """
        # ACT
        resultado = eigen([[0.0, 2.0], [1.0, 3.0]], want_vectors=True)

        # ASSERT
        esperado = sorted([(3 - np.sqrt(17)) / 2, (3 + np.sqrt(17)) / 2])
        np.testing.assert_allclose(resultado.autovalores.real, esperado, rtol=1e-13)
        self.assertLess(resultado.erro_retroativo, 1e-13)

    def test_rotacao_tem_par_conjugado(self):
        resultado = eigen([[0.0, -1.0], [1.0, 0.0]])
        np.testing.assert_allclose(resultado.autovalores, [-1j, 1j], atol=1e-14)
        self.assertFalse(is_real_eigenvalue(resultado.autovalores[1], [[0.0, -1.0], [1.0, 0.0]]))

    def test_contagem_por_semiplano(self):
        M = np.diag([-2.0, 0.0, 1.0, 3.0])
        self.assertEqual(halfplane_counts(M, 1e-10), (1, 1, 2))

    def test_matriz_vazia(self):
        self.assertEqual(eigen(np.zeros((0, 0))).autovalores.size, 0)

    def test_oraculo_do_polinomio_caracteristico(self):
        """
        Cenário: 6×6 aleatórias; raízes de det(λI − M) em 30 dígitos (sympy, entradas racionais exatas).
        """
        rng = np.random.default_rng(3)
        for _ in range(20):
            # ARRANGE
            M = rng.normal(size=(6, 6))
            lam = sp.Symbol('lam')
            exata = sp.Matrix(6, 6, lambda i, j: sp.Rational(float(M[i, j])))
            polinomio = exata.charpoly(lam).as_expr()
            raizes = np.array([complex(r) for r in sp.Poly(polinomio, lam).nroots(n=30, maxsteps=200)])

            # ACT
            autovalores = eigen(M).autovalores

            # ASSERT
            distancias = np.abs(autovalores[:, None] - raizes[None, :])
            linhas, colunas = linear_sum_assignment(distancias)
            self.assertLessEqual(float(distancias[linhas, colunas].max()), 1e-8)


class TestSistemasESchur(unittest.TestCase):

    def setUp(self):
        rng = np.random.default_rng(7)
        R = rng.normal(size=(5, 5))
        self.M = R @ R.T + 5 * np.eye(5)

    def test_determinante_e_solucao(self):
        rhs = np.arange(5.0)
        x = solve(self.M, rhs)
        np.testing.assert_allclose(self.M @ x, rhs, atol=1e-12)
        self.assertAlmostEqual(determinant(self.M), np.prod(np.linalg.eigvalsh(self.M)), delta=1e-8 * determinant(self.M))

    def test_sistema_singular_falha(self):
        with self.assertRaises(BlocoSingularError):
            solve([[1.0, 1.0], [1.0, 1.0]], [1.0, 2.0])

    def test_complemento_de_schur(self):
        """
        Cenário: S = D − C A⁻¹ B confere com a fórmula explícita.
        """
        # ACT
        S = schur_complement(self.M, 2)

        # ASSERT
        A, B, C, D = self.M[:2, :2], self.M[:2, 2:], self.M[2:, :2], self.M[2:, 2:]
        np.testing.assert_allclose(S, D - C @ np.linalg.inv(A) @ B, atol=1e-12)
        self.assertEqual(schur_complement(self.M, 5).shape, (0, 0))

    def test_determinante_igual_ao_produto_dos_autovalores(self):
        rng = np.random.default_rng(19)
        for _ in range(100):
            M = rng.normal(size=(8, 8))
            produto = np.prod(eigen(M).autovalores)
            det = determinant(M)
            self.assertLessEqual(abs(produto.imag), 1e-8 * abs(det))
            self.assertLessEqual(abs(produto.real - det), 1e-8 * abs(det))

    def test_determinante_fatorado_pelo_complemento(self):
        """
        Cenário: det(M) = det(A)·det(S) com A o bloco líder 2×2.
        """
        rng = np.random.default_rng(29)
        for _ in range(100):
            M = rng.normal(size=(5, 5)) + 3.0 * np.eye(5)
            S = schur_complement(M, 2)
            esperado = determinant(M)
            self.assertLessEqual(abs(determinant(M[:2, :2]) * determinant(S) - esperado), 1e-10 * abs(esperado))

    def test_invertibilidade_preservada_pelo_complemento(self):
        """
        Cenário: 5×5 com k = 2; metade com a última linha combinação das demais. M invertível ⟺ S invertível.
        """
        rng = np.random.default_rng(37)
        for n in range(50):
            # ARRANGE
            M = rng.normal(size=(5, 5))
            singular = n % 2 == 1
            if singular:
                M[4] = rng.normal(size=4) @ M[:4]

            # ACT
            S = schur_complement(M, 2)

            # ASSERT
            self.assertEqual(condition(M) > 1e10, singular)
            self.assertEqual(condition(S) > 1e10, singular)

    def test_complemento_com_bloco_singular_falha(self):
        M = np.array([[0.0, 1.0], [1.0, 1.0]])
        with self.assertRaises(BlocoSingularError):
            schur_complement(M, 1)

    def test_condicao_da_identidade(self):
        self.assertAlmostEqual(condition(np.eye(3)), 1.0)


class TestKalmanETransporte(unittest.TestCase):

    def test_posto_de_kalman(self):
        """
        Cenário: Difusão só em x2 acoplada por uma rotação satisfaz Kalman.
        """
        A0 = np.diag([0.0, 1.0])
        self.assertEqual(kalman_rank(A0, [[0.0, 1.0], [-1.0, 0.0]]), 2)
        self.assertEqual(kalman_rank(A0, np.zeros((2, 2))), 1)

    def test_base_monomial(self):
        self.assertEqual(monomial_basis(2, 2), [(2, 0), (1, 1), (0, 2)])
        self.assertEqual(len(monomial_basis(3, 2)), 6)

    def test_operador_de_transporte_diagonal(self):
        """
        Cenário: A = diag(1, 2), m = 2 tem espectro {2, 3, 4}.
        """
        T = transport_operator(np.diag([1.0, 2.0]), 2)
        np.testing.assert_allclose(np.sort(eigen(T).autovalores.real), [2.0, 3.0, 4.0])

    def test_diagonal_aleatoria_igual_a_enumeracao(self):
        """
        Cenário: Para A diagonal, σ(L_A) = {Σ γ_i a_i : |γ| = m} como multiconjunto.
        """
        rng = np.random.default_rng(5)
        for d in (1, 2, 3):
            for m in (1, 2, 3, 4):
                a = rng.uniform(-2.0, 2.0, size=d)
                esperado = np.sort([float(np.dot(g, a)) for g in monomial_basis(d, m)])
                obtido = np.sort(eigen(transport_operator(np.diag(a), m)).autovalores.real)
                np.testing.assert_allclose(obtido, esperado, atol=1e-8)

    def test_espectro_no_semiplano_direito(self):
        """
        Cenário: σ(A) ⊂ {Re > 0} implica σ(L_A) ⊂ {Re > 0}.
        """
        rng = np.random.default_rng(17)
        for _ in range(100):
            # ARRANGE
            d = int(rng.integers(1, 4))
            m = int(rng.integers(1, 5))
            R = rng.normal(size=(d, d))
            A = R + (np.max(np.abs(np.linalg.eigvals(R))) + 0.5) * np.eye(d)

            # ACT
            autovalores = eigen(transport_operator(A, m)).autovalores

            # ASSERT
            self.assertGreater(float(np.min(autovalores.real)), 0.0)

    def test_base_grande_demais_falha(self):
        with self.assertRaises(DimensaoExcedidaError):
            transport_operator(np.eye(10), 5)
