# metaestavel/core/testes_use_cases.py

import math
import unittest
from unittest.mock import Mock, patch

import numpy as np

from metaestavel.core.entities import Caixa, ComparisonRow, LogScaled, RunConfig, SmallEigs
from metaestavel.core.exceptions import (
    ConfiguracaoInvalidaError,
    GenerVioladaError,
    ParametrosInvalidosError,
)
from metaestavel.core.use_cases import (
    GalleryUseCase,
    GradedUseCase,
    LandscapeUseCase,
    PredictUseCase,
    ValidateUseCase,
    VerifyUseCase,
    especificacao_de_config,
)

DUPLO_POCO = 'x1^4/4 - x1^2/2 + x1/10'


def _config(**campos) -> RunConfig:
    padrao = dict(
        operador={'galeria': 'witten', 'parametros': {'f': DUPLO_POCO}},
        caixa=Caixa((-2.5,), (2.5,)),
        malha_paisagem=(501,),
        malha_validacao=(2001,),
        h=(0.05, 0.1),
        saida='saida-teste',
    )
    padrao.update(campos)
    return RunConfig(**padrao)


def _repo_mock():
    repo = Mock()
    repo.escrever_csv.side_effect = lambda saida, nome, cabecalho, linhas: f"{saida}/{nome}"
    repo.escrever_yaml.side_effect = lambda saida, nome, dados: f"{saida}/{nome}"
    return repo


class TestEspecificacaoDeConfig(unittest.TestCase):

    def test_operador_bruto_com_padroes(self):
        """
        Cenário: Sem A0 e b0, o operador bruto é de Witten.
        """
        config = _config(operador={'f': 'x1^2/2 + x2^2/2'}, caixa=Caixa((-1.0, -1.0), (1.0, 1.0)))
        spec = especificacao_de_config(config)
        self.assertEqual(spec.dimensao, 2)
        self.assertTrue(spec.reversivel)

    def test_sem_operador_falha(self):
        with self.assertRaises(ConfiguracaoInvalidaError):
            especificacao_de_config(_config(operador=None))

    def test_dimensao_do_dominio_incompativel_falha(self):
        with self.assertRaises(ParametrosInvalidosError):
            especificacao_de_config(_config(caixa=Caixa((-1.0, -1.0), (1.0, 1.0))))


class TestLandscapeUseCase(unittest.TestCase):

    def setUp(self):
        self.relatorio_repo_mock = _repo_mock()
        self.use_case = LandscapeUseCase(relatorio_repo=self.relatorio_repo_mock)

    def test_paisagem_do_duplo_poco(self):
        """
        Cenário: Dois mínimos, uma sela e genericidade aprovada.
        """
        # ACT
        resultado = self.use_case.executar(_config())

        # ASSERT
        self.assertEqual(resultado.codigo_saida, 0)
        self.assertEqual(resultado.resumo['minimos'], ['m2', 'm1'])
        self.assertEqual(resultado.resumo['minimo_global'], 'm1')
        self.assertTrue(resultado.resumo['gener']['aprovado'])
        self.assertIn('saida-teste/rotulagem.csv', resultado.arquivos)
        nome, cabecalho = self.relatorio_repo_mock.escrever_csv.call_args_list[0].args[1:3]
        self.assertEqual(nome, 'criticos.csv')
        self.assertEqual(cabecalho, ['id', 'indice', 'valor', 'coordenadas'])

    def test_sem_dominio_falha(self):
        with self.assertRaises(ConfiguracaoInvalidaError):
            self.use_case.executar(_config(caixa=None))
        self.relatorio_repo_mock.escrever_csv.assert_not_called()


class TestVerifyUseCase(unittest.TestCase):

    def setUp(self):
        self.relatorio_repo_mock = _repo_mock()
        self.use_case = VerifyUseCase(relatorio_repo=self.relatorio_repo_mock)

    def test_kalman_violado_devolve_codigo_2(self):
        """
        Cenário: A⁰ = diag(0, 1) e b⁰ = 0 falsificam a estrutura crítica.
        """
        # ARRANGE
        config = _config(
            operador={'f': 'x1^2/2 + x2^2/2', 'A0': [['0', '0'], ['0', '1']], 'b0': ['0', '0']},
            caixa=Caixa((-1.0, -1.0), (1.0, 1.0)), malha_paisagem=(41, 41), malha_validacao=(41, 41),
            h=(0.1,),
        )

        # ACT
        resultado = self.use_case.executar(config)

        # ASSERT
        self.assertEqual(resultado.codigo_saida, 2)
        self.assertEqual(resultado.resumo['falhas_estruturais'], ['m1'])
        nomes = [c.args[1] for c in self.relatorio_repo_mock.escrever_csv.call_args_list]
        self.assertNotIn('analises.csv', nomes)

    def test_witten_aprovado_escreve_analises(self):
        resultado = self.use_case.executar(_config(h=(0.1,)))
        self.assertEqual(resultado.codigo_saida, 0)
        self.assertIn('saida-teste/analises.csv', resultado.arquivos)
        self.assertIn('saida-teste/hipo.yaml', resultado.arquivos)
        self.assertEqual(set(resultado.resumo['selas']), {'s1'})


class TestPredictUseCase(unittest.TestCase):

    def setUp(self):
        self.relatorio_repo_mock = _repo_mock()
        self.use_case = PredictUseCase(relatorio_repo=self.relatorio_repo_mock)

    def test_previsoes_e_taxa_classica(self):
        # ACT
        resultado = self.use_case.executar(_config())

        # ASSERT
        self.assertEqual(len(resultado.resumo['previsoes']), 4)
        self.assertEqual(len(resultado.resumo['taxa_classica_1d']), 2)
        _, nome, cabecalho, linhas = self.relatorio_repo_mock.escrever_csv.call_args.args
        self.assertEqual(nome, 'predicoes.csv')
        self.assertEqual(cabecalho, ['m_id', 'S', 'z', 'h', 'lambda_log10'])
        self.assertTrue(all(isinstance(l[4], float) for l in linhas if l[0] == 'm2'))

    def test_genericidade_violada_sem_caminho_geral_falha(self):
        """
        Cenário: Poços simétricos violam a unicidade do mínimo global.
        """
        config = _config(operador={'galeria': 'witten', 'parametros': {'f': 'x1^4/4 - x1^2/2'}},
                         caixa=Caixa((-2.0,), (2.0,)), malha_paisagem=(401,))
        with self.assertRaises(GenerVioladaError):
            self.use_case.executar(config)

    def test_caminho_geral_escreve_espectro(self):
        resultado = self.use_case.executar(_config(caminho_geral=True))
        self.assertIn('saida-teste/espectro_geral.csv', resultado.arquivos)
        self.assertTrue(resultado.resumo['modelo_interacao']['definida_positiva'])


class TestGradedUseCase(unittest.TestCase):

    def setUp(self):
        self.relatorio_repo_mock = _repo_mock()
        self.use_case = GradedUseCase(relatorio_repo=self.relatorio_repo_mock)

    def test_graded_com_relatorios_opcionais(self):
        # ARRANGE
        config = _config(operador=None, graded={'matriz': [[2, 1], [1, 1]], 'dims': [1, 1], 'tau': [1e-3]},
                         relatorios=('alta_precisao', 'resolvente'))

        # ACT
        resultado = self.use_case.executar(config)

        # ASSERT
        self.assertEqual(resultado.resumo['niveis'], 2)
        self.assertLess(resultado.resumo['erro_relativo_alta_precisao'], 1e-4)
        self.assertIn('saida-teste/resolvente.yaml', resultado.arquivos)
        linhas = self.relatorio_repo_mock.escrever_csv.call_args.args[3]
        self.assertAlmostEqual(linhas[1][3], -6.0 + math.log10(0.5))

    def test_log_tau_em_escala_sem_representacao(self):
        """
        Cenário: log τ = −500 não cabe em float; o resolvente é ignorado com aviso.
        """
        config = _config(operador=None, graded={'matriz': [[2, 1], [1, 1]], 'dims': [1, 1], 'log_tau': [-500]},
                         relatorios=('resolvente',))
        resultado = self.use_case.executar(config)
        self.assertNotIn('saida-teste/resolvente.yaml', resultado.arquivos)

    def test_sem_bloco_graded_falha(self):
        with self.assertRaises(ConfiguracaoInvalidaError):
            self.use_case.executar(_config())


class TestValidateUseCase(unittest.TestCase):

    def test_faixa_alargada_pela_escala(self):
        """
        Cenário: escala 2 leva [0.85, 1.15] para [0.7, 1.3].
        """
        faixa = ValidateUseCase.faixa(_config(escala_tolerancia=2.0))
        self.assertAlmostEqual(faixa[0], 0.7)
        self.assertAlmostEqual(faixa[1], 1.3)

    def test_residuo_susy_na_faixa(self):
        # ARRANGE
        repo = _repo_mock()
        config = _config(operador={'galeria': 'susy_breaking', 'parametros': {}},
                         caixa=Caixa((-1.6, -1.6), (1.6, 1.6)), malha_paisagem=(81, 81),
                         malha_validacao=(161, 161), h=(1.0,))

        # ACT
        resultado = ValidateUseCase(relatorio_repo=repo).executar(config)

        # ASSERT
        self.assertEqual(resultado.codigo_saida, 0)
        self.assertIn('saida-teste/susy.yaml', resultado.arquivos)

    def _executar_com_comparacao(self, linhas, **campos):
        """Roda a validação com discretização e autossolver substituídos por dublês."""
        repo = _repo_mock()
        eigs = SmallEigs(pequenos=np.array([0.0, 1e-3]), lacuna=0.2 + 0j, metodo='denso')
        with patch('metaestavel.core.use_cases.discretize') as discretize_mock, \
                patch('metaestavel.core.use_cases.small_eigs', return_value=eigs), \
                patch('metaestavel.core.use_cases.compare', return_value=linhas):
            resultado = ValidateUseCase(relatorio_repo=repo).executar(_config(**campos))
        return resultado, discretize_mock

    @staticmethod
    def _linha(h, log_razao):
        return ComparisonRow(h, 'm2', LogScaled.de_real(1e-4), complex(1e-4 * math.exp(log_razao)),
                             math.exp(log_razao), log_razao)

    def test_tendencia_nao_monotona_devolve_codigo_3(self):
        """
        Cenário: Razões na faixa, mas |log razão| cresce de 0.01 (h = 0.1) para 0.05 (h = 0.05).
        """
        # ARRANGE
        linhas = [self._linha(0.05, 0.05), self._linha(0.1, 0.01)]

        # ACT
        resultado, discretize_mock = self._executar_com_comparacao(linhas)

        # ASSERT
        self.assertEqual(resultado.codigo_saida, 3)
        self.assertFalse(resultado.resumo['tendencia_monotona'])
        self.assertEqual(resultado.resumo['tendencia_violada'], ['m2'])
        self.assertEqual(resultado.resumo['fora_da_faixa'], [])
        self.assertIn('não decresce', resultado.mensagem)
        self.assertEqual(discretize_mock.call_args.args[4], 'simbolico')

    def test_tendencia_monotona_aprovada(self):
        linhas = [self._linha(0.05, 0.01), self._linha(0.1, 0.05)]
        resultado, _ = self._executar_com_comparacao(linhas)
        self.assertEqual(resultado.codigo_saida, 0)
        self.assertTrue(resultado.resumo['tendencia_monotona'])

    def test_escala_de_tolerancia_alarga_a_folga_da_tendencia(self):
        """
        Cenário: Com escala 100 a folga vira 0.1 e a queda de 0.04 é tolerada.
        """
        linhas = [self._linha(0.05, 0.05), self._linha(0.1, 0.01)]
        resultado, _ = self._executar_com_comparacao(linhas, escala_tolerancia=100.0)
        self.assertEqual(resultado.codigo_saida, 0)

    def test_regra_de_gibbs_quando_configurada(self):
        linhas = [self._linha(0.05, 0.01), self._linha(0.1, 0.05)]
        _, discretize_mock = self._executar_com_comparacao(linhas, regra_potencial='gibbs')
        self.assertEqual({c.args[4] for c in discretize_mock.call_args_list}, {'gibbs'})


class TestGalleryUseCase(unittest.TestCase):

    def setUp(self):
        self.galeria_repo_mock = Mock()
        self.relatorio_repo_mock = _repo_mock()
        self.use_case = GalleryUseCase(galeria_repo=self.galeria_repo_mock,
                                       relatorio_repo=self.relatorio_repo_mock)

    def test_escreve_config_do_exemplo(self):
        # ARRANGE
        dados = {'operador': {'galeria': 'witten', 'parametros': {'f': DUPLO_POCO}}, 'h': [0.1]}
        self.galeria_repo_mock.listar.return_value = ['witten']
        self.galeria_repo_mock.buscar_config.return_value = dados

        # ACT
        resultado = self.use_case.executar('witten', 'destino')

        # ASSERT
        self.assertEqual(resultado.arquivos, ['destino/witten.yaml'])
        self.relatorio_repo_mock.escrever_yaml.assert_called_once_with('destino', 'witten.yaml', dados)

    def test_exemplo_desconhecido_falha(self):
        self.galeria_repo_mock.listar.return_value = ['witten']
        with self.assertRaises(ParametrosInvalidosError):
            self.use_case.executar('outro', 'destino')
        self.relatorio_repo_mock.escrever_yaml.assert_not_called()
