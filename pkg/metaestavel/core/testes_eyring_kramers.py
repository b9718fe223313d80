# metaestavel/core/testes_eyring_kramers.py

import math
import unittest
from dataclasses import replace

import numpy as np

from metaestavel.core.entities import Caixa, LogScaled
from metaestavel.core.exceptions import FatoracaoInconsistenteError, MinimoTipoIIError, ParametrosInvalidosError
from metaestavel.core.eyring_kramers import (
    classical_rate_1d,
    conferir_fatoracao,
    eigenvalue_at,
    general_spectrum,
    interaction_model,
    predict,
    prefactor,
    return_to_equilibrium_rate,
    transition_times,
)
from metaestavel.core.landscape import find_critical_points, label, merge_tree
from metaestavel.core.operator import analyze_all, gallery


def _pipeline(f_texto, caixa, resolucao):
    spec = gallery('witten', {'f': f_texto})
    criticos = find_critical_points(spec.f, caixa)
    rotulagem = label(merge_tree(spec.f, caixa, resolucao, criticos), criticos)
    analises = analyze_all(spec, list(rotulagem.pontos.values()))
    return criticos, rotulagem, analises


class TestLogScaled(unittest.TestCase):

    def test_aritmetica_sem_subfluxo(self):
        a = LogScaled.exp(-2000.0)
        b = LogScaled.exp(-2001.0)
        self.assertAlmostEqual((a * b).log_magnitude, -4001.0)
        self.assertAlmostEqual((a + b).log_magnitude, -2000.0 + math.log1p(math.exp(-1.0)))
        self.assertTrue(b < a)
        self.assertFalse(a.representavel())
        self.assertEqual(LogScaled.exp(-2000.0).formatar(3)[-5:], 'e-869')

    def test_conversao_de_volta(self):
        self.assertAlmostEqual(float(LogScaled.de_real(-3.5) * 2), -7.0)
        self.assertEqual(float(LogScaled.zero()), 0.0)


class TestPrefatorSimetrico(unittest.TestCase):

    def test_prefator_do_poco_simetrico(self):
        """
        Cenário: f = x⁴/4 − x²/2 tem z = √2/π e λ(0.1) ≈ 3.0333e−4.
        """
        # ARRANGE
        _, rotulagem, analises = _pipeline('x1^4/4 - x1^2/2', Caixa((-2.0,), (2.0,)), [401])
        local = next(m for m in rotulagem.minimos if m != rotulagem.minimo_global)

        # ACT
        z = prefactor(rotulagem, analises, local)
        valor = eigenvalue_at(z, rotulagem.registro(local).S, 0.1)

        # ASSERT
        self.assertAlmostEqual(z, math.sqrt(2.0) / math.pi, places=10)
        self.assertAlmostEqual(z, 0.450158, places=6)
        self.assertLess(abs(float(valor) / 3.0333e-4 - 1.0), 1e-3)

    def test_minimo_global_nao_tem_prefator(self):
        _, rotulagem, analises = _pipeline('x1^4/4 - x1^2/2', Caixa((-2.0,), (2.0,)), [401])
        with self.assertRaises(ParametrosInvalidosError):
            prefactor(rotulagem, analises, rotulagem.minimo_global)


class TestPrevisoes(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.criticos, cls.rotulagem, cls.analises = _pipeline(
            'x1^4/4 - x1^2/2 + x1/10', Caixa((-2.5,), (2.5,)), [501]
        )

    def test_previsao_por_minimo_e_por_h(self):
        # ACT
        previsoes = predict(self.rotulagem, self.analises, [0.05, 0.1])

        # ASSERT
        self.assertEqual(len(previsoes), 4)
        globais = [p for p in previsoes if p.minimo == 'm1']
        self.assertTrue(all(p.valor.e_zero and p.z is None for p in globais))
        local = next(p for p in previsoes if p.minimo == 'm2' and p.h == 0.1)
        S = self.rotulagem.registro('m2').S
        self.assertAlmostEqual(local.valor.log_magnitude, math.log(local.z * 0.1) - 2 * S / 0.1, places=10)

    def test_taxa_classica_coincide_em_1d(self):
        """
        Cenário: Em 1D reversível a previsão é a taxa clássica de Kramers.
        """
        m = self.rotulagem.ponto('m2')
        s = self.rotulagem.ponto('s1')
        S = self.rotulagem.registro('m2').S
        previsao = next(p for p in predict(self.rotulagem, self.analises, [0.1]) if p.minimo == 'm2')
        classica = classical_rate_1d(float(m.hessiana[0, 0]), float(s.hessiana[0, 0]), S, 0.1)
        self.assertAlmostEqual(previsao.valor.log_magnitude, classica.log_magnitude, places=10)

    def test_h_nao_positivo_falha(self):
        with self.assertRaises(ParametrosInvalidosError):
            predict(self.rotulagem, self.analises, [0.1, 0.0])

    def test_espectro_geral_reproduz_caso_generico(self):
        """
        Cenário: Sem degenerescências o caminho geral devolve {0, λ(m2)}.
        """
        # ARRANGE
        modelo = interaction_model(self.rotulagem, self.analises)
        previsao = next(p for p in predict(self.rotulagem, self.analises, [0.1]) if p.minimo == 'm2')

        # ACT
        espectro = general_spectrum(modelo, 0.1, workers=2)

        # ASSERT
        np.testing.assert_allclose(modelo.M0, modelo.L.T @ modelo.L, atol=1e-14)
        self.assertTrue(modelo.definida_positiva)
        self.assertEqual(len(espectro), 2)
        self.assertTrue(espectro[0].valor.e_zero)
        self.assertAlmostEqual(espectro[1].valor.log_magnitude, previsao.valor.log_magnitude, places=9)

    def test_caminho_geral_recusa_tipo_ii(self):
        registros = dict(self.rotulagem.registros)
        registros['m2'] = replace(registros['m2'], tipo='II')
        rotulagem = replace(self.rotulagem, registros=registros)
        with self.assertRaises(MinimoTipoIIError):
            interaction_model(rotulagem, self.analises)

    def test_fatoracao_inconsistente_falha(self):
        """
        Cenário: Uma perturbação de 1e−6 em M₀ quebra M₀ = LᵗL.
        """
        # ARRANGE
        modelo = interaction_model(self.rotulagem, self.analises)
        M0 = modelo.M0 + 1e-6 * np.eye(modelo.M0.shape[0])

        # ACT / ASSERT
        conferir_fatoracao(modelo.M0, modelo.L)
        with self.assertRaises(FatoracaoInconsistenteError) as ctx:
            conferir_fatoracao(M0, modelo.L)
        self.assertEqual(ctx.exception.codigo_saida, 3)

    def test_janelas_de_plato(self):
        """
        Cenário: Um nível S dá duas janelas; a primeira começa em g₊ = (log h)².
        """
        # ACT
        janelas = transition_times(self.rotulagem, 0.1, 0.8)

        # ASSERT
        S = self.rotulagem.registro('m2').S
        self.assertEqual([j.k for j in janelas], [1, 2])
        self.assertAlmostEqual(janelas[0].inicio, math.log(0.1) ** 2)
        self.assertAlmostEqual(janelas[0].fim, math.exp(-8.0) * math.exp(2 * S / 0.1))
        self.assertAlmostEqual(janelas[1].fim / janelas[1].inicio, 100.0)
        self.assertEqual(janelas[1].S_k, math.inf)

    def test_taxa_de_retorno_ao_equilibrio(self):
        previsoes = predict(self.rotulagem, self.analises, [0.1])
        local = next(p for p in previsoes if p.minimo == 'm2')
        self.assertAlmostEqual(return_to_equilibrium_rate(previsoes, 0.1), float(local.valor) / 0.1)
        self.assertEqual(return_to_equilibrium_rate(previsoes, 0.2), math.inf)
