import os
import tempfile
from io import StringIO

import yaml
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from metaestavel.core.exceptions import ConfiguracaoInvalidaError
from metaestavel.presentation.cli import aplicar_sobrescritas, ler_lista, run, validar_config
from metaestavel.presentation.serializers import RunConfigSerializer


class RunConfigSerializerTestCase(SimpleTestCase):

    def test_operador_da_galeria_sem_dominio(self):
        serializer = RunConfigSerializer(data={'operador': {'galeria': 'witten', 'parametros': {'f': 'x1^2'}}})
        self.assertTrue(serializer.is_valid(), serializer.errors)

    def test_operador_bruto_valido(self):
        """
        Cenário: f, A⁰ e b⁰ em d = 2 com malha de duas entradas.
        """
        dados = {
            'operador': {'f': 'x1^2/2 + x2^2/2', 'A0': [['1', '0'], ['0', '1']], 'b0': ['x2', '-x1']},
            'dominio': [[-1, 1], [-1, 1]],
            'malha': {'paisagem': [41, 41]},
            'h': [0.1],
        }
        serializer = RunConfigSerializer(data=dados)
        self.assertTrue(serializer.is_valid(), serializer.errors)

    def test_galeria_e_expressoes_juntas_falham(self):
        serializer = RunConfigSerializer(data={'operador': {'galeria': 'witten', 'f': 'x1^2'}})
        self.assertFalse(serializer.is_valid())

    def test_expressao_com_variavel_fora_da_dimensao_falha(self):
        serializer = RunConfigSerializer(data={'operador': {'f': 'x1^2 + x3'}, 'dominio': [[-1, 1], [-1, 1]]})
        self.assertFalse(serializer.is_valid())
        self.assertIn('f', str(serializer.errors))

    def test_malha_com_entradas_erradas_falha(self):
        dados = {'operador': {'f': 'x1^2'}, 'dominio': [[-1, 1]], 'malha': {'validacao': [11, 11]}}
        self.assertFalse(RunConfigSerializer(data=dados).is_valid())

    def test_h_e_faixa_invalidos_falham(self):
        base = {'operador': {'galeria': 'witten'}}
        self.assertFalse(RunConfigSerializer(data={**base, 'h': [0.1, -0.1]}).is_valid())
        self.assertFalse(RunConfigSerializer(data={**base, 'faixa_razao': [1.1, 1.2]}).is_valid())
        self.assertFalse(RunConfigSerializer(data={**base, 'dominio': [[1, -1]]}).is_valid())
        self.assertFalse(RunConfigSerializer(data={**base, 'regra_potencial': 'outra'}).is_valid())

    def test_graded_confere_tamanhos(self):
        valido = {'graded': {'matriz': [[2, 1], [1, 1]], 'dims': [1, 1], 'tau': [1e-3]}}
        self.assertTrue(RunConfigSerializer(data=valido).is_valid())
        sem_tau = {'graded': {'matriz': [[2, 1], [1, 1]], 'dims': [1, 1]}}
        self.assertFalse(RunConfigSerializer(data=sem_tau).is_valid())
        nao_quadrada = {'graded': {'matriz': [[2, 1]], 'dims': [1, 1], 'tau': [1e-3]}}
        self.assertFalse(RunConfigSerializer(data=nao_quadrada).is_valid())


class SobrescritasTestCase(SimpleTestCase):

    def test_ler_lista(self):
        self.assertEqual(ler_lista('0.05,0.07'), [0.05, 0.07])
        self.assertEqual(ler_lista('401', int), [401])
        self.assertIsNone(ler_lista(None))
        with self.assertRaises(ConfiguracaoInvalidaError):
            ler_lista('a,b')

    def test_grid_unico_replicado_na_dimensao(self):
        """
        Cenário: --grid 81 num domínio 2D vira [81, 81] só na malha de validação.
        """
        # ARRANGE
        dados = {'dominio': [[-1, 1], [-1, 1]], 'malha': {'paisagem': [41, 41]}, 'h': [0.1]}

        # ACT
        novos = aplicar_sobrescritas(dados, {'grid': [81], 'h': [0.2], 'tol_scale': 2.0, 'out': 'x'}, 'validate')

        # ASSERT
        self.assertEqual(novos['malha'], {'paisagem': [41, 41], 'validacao': [81, 81]})
        self.assertEqual(novos['h'], [0.2])
        self.assertEqual(novos['escala_tolerancia'], 2.0)
        self.assertEqual(novos['saida'], 'x')
        self.assertEqual(dados['h'], [0.1])

    def test_grid_no_landscape_substitui_paisagem(self):
        novos = aplicar_sobrescritas({'dominio': [[-1, 1]]}, {'grid': [301]}, 'landscape')
        self.assertEqual(novos['malha']['paisagem'], [301])

    def test_config_invalida_vira_erro_de_configuracao(self):
        with self.assertRaises(ConfiguracaoInvalidaError):
            validar_config({'h': [0.1]})


class ComandosTestCase(SimpleTestCase):

    def setUp(self):
        self.diretorio = tempfile.TemporaryDirectory()
        self.addCleanup(self.diretorio.cleanup)

    def _gallery(self, nome):
        call_command('gallery', nome, out=self.diretorio.name, stdout=StringIO())
        return os.path.join(self.diretorio.name, f"{nome}.yaml")

    def test_gallery_escreve_config_e_resumo(self):
        caminho = self._gallery('witten')
        with open(caminho, encoding='utf-8') as arquivo:
            dados = yaml.safe_load(arquivo)
        self.assertEqual(dados['h'], [0.05, 0.07, 0.1])
        self.assertTrue(os.path.exists(os.path.join(self.diretorio.name, 'resumo_gallery.yaml')))

    def test_gallery_desconhecido_sai_com_codigo_1(self):
        with self.assertRaises(CommandError) as contexto:
            call_command('gallery', 'inexistente', out=self.diretorio.name, stdout=StringIO())
        self.assertEqual(contexto.exception.returncode, 1)

    def test_verify_com_kalman_violado_sai_com_codigo_2(self):
        """
        Cenário: O controle negativo da galeria falsifica a estrutura crítica.
        """
        # ARRANGE
        caminho = self._gallery('kalman_falha')
        saida = os.path.join(self.diretorio.name, 'verify')

        # ACT
        with self.assertRaises(CommandError) as contexto:
            call_command('verify', config=caminho, out=saida, stdout=StringIO())

        # ASSERT
        self.assertEqual(contexto.exception.returncode, 2)
        with open(os.path.join(saida, 'resumo_verify.yaml'), encoding='utf-8') as arquivo:
            resumo = yaml.safe_load(arquivo)
        self.assertEqual(resumo['codigo_saida'], 2)

    def test_config_ausente_sai_com_codigo_1(self):
        with self.assertRaises(CommandError) as contexto:
            call_command('landscape', config=os.path.join(self.diretorio.name, 'nada.yaml'), stdout=StringIO())
        self.assertEqual(contexto.exception.returncode, 1)

    def test_landscape_pela_cli(self):
        # ARRANGE
        caminho = self._gallery('witten')
        saida = os.path.join(self.diretorio.name, 'paisagem')
        stdout = StringIO()

        # ACT
        call_command('landscape', config=caminho, out=saida, stdout=stdout)

        # ASSERT
        self.assertIn('landscape: concluído', stdout.getvalue())
        for nome in ('criticos.csv', 'rotulagem.csv', 'resumo_landscape.yaml'):
            self.assertTrue(os.path.exists(os.path.join(saida, nome)), nome)

    def test_run_converte_erro_do_core_em_codigo(self):
        """
        Cenário: graded sem bloco 'graded' devolve o código da família de configuração.
        """
        config = validar_config({'operador': {'galeria': 'witten'}, 'saida': self.diretorio.name})
        resultado = run('graded', config)
        self.assertEqual(resultado.codigo_saida, 1)
        self.assertEqual(resultado.resumo['erro'], 'ConfiguracaoInvalidaError')
