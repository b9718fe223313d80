import csv
import math
import os
import tempfile

import numpy as np
import yaml
from django.test import SimpleTestCase, override_settings

# Importamos as classes que queremos testar
from metaestavel.core.entities import LogScaled
from metaestavel.core.exceptions import ConfiguracaoInvalidaError, ParametrosInvalidosError
from metaestavel.infrastructure.instances import EXEMPLOS
from metaestavel.infrastructure.mappers import RunConfigMapper, formatar_celula, para_primitivo
from metaestavel.infrastructure.repositories import (
    ConfigRepositoryYaml,
    GaleriaRepositoryMemoria,
    RelatorioRepositoryArquivos,
)


class RunConfigMapperTestCase(SimpleTestCase):

    def test_dicionario_completo_para_entidade(self):
        """
        Cenário: Domínio, malhas e h informados viram Caixa e tuplas.
        """
        # ARRANGE
        dados = {
            'operador': {'galeria': 'witten', 'parametros': {'f': 'x1^2'}},
            'dominio': [[-2, 2], [-1, 3]],
            'malha': {'paisagem': [51, 41], 'validacao': [101, 81]},
            'h': [0.1, 0.2],
            'saida': 'out',
        }

        # ACT
        config = RunConfigMapper.to_entity(dados)

        # ASSERT
        self.assertEqual(config.caixa.inferior, (-2.0, -1.0))
        self.assertEqual(config.caixa.superior, (2.0, 3.0))
        self.assertEqual(config.malha_validacao, (101, 81))
        self.assertEqual(config.h, (0.1, 0.2))
        self.assertEqual(config.faixa_razao, (0.85, 1.15))

    @override_settings(METAESTAVEL_SAIDA_PADRAO='padrao', METAESTAVEL_WORKERS=3)
    def test_padroes_vem_das_settings(self):
        config = RunConfigMapper.to_entity({'dominio': [[0, 1]]})
        self.assertEqual(config.saida, 'padrao')
        self.assertEqual(config.workers, 3)
        self.assertEqual(config.malha_paisagem, (201,))

    def test_escala_de_tolerancia_alarga_tolerancias(self):
        base = RunConfigMapper.to_entity({'tolerancias': {'realidade': 1e-9}})
        escalada = RunConfigMapper.to_entity({'tolerancias': {'realidade': 1e-9}, 'escala_tolerancia': 10})
        self.assertAlmostEqual(escalada.tolerancias.realidade / base.tolerancias.realidade, 10.0)

    def test_regra_de_potencial_simbolica_por_padrao(self):
        """
        Cenário: Sem a chave, c = c⁰ + h c¹; 'gibbs' só quando pedida.
        """
        self.assertEqual(RunConfigMapper.to_entity({}).regra_potencial, 'simbolico')
        gibbs = RunConfigMapper.to_entity({'regra_potencial': 'gibbs'})
        self.assertEqual(gibbs.regra_potencial, 'gibbs')
        self.assertEqual(RunConfigMapper.to_dict(gibbs)['regra_potencial'], 'gibbs')

    def test_ida_e_volta_preserva_as_chaves(self):
        config = RunConfigMapper.to_entity(EXEMPLOS['kfp'])
        dados = RunConfigMapper.to_dict(config)
        self.assertEqual(dados['dominio'], [[-2.2, 2.2], [-3.5, 3.5]])
        self.assertEqual(dados['hipo']['amostras'], 64)
        self.assertEqual(RunConfigMapper.to_entity(dados).caixa, config.caixa)


class FormatacaoTestCase(SimpleTestCase):

    def test_celulas(self):
        self.assertEqual(formatar_celula(None), '')
        self.assertEqual(formatar_celula(True), 'true')
        self.assertEqual(formatar_celula(np.int64(7)), '7')
        self.assertEqual(formatar_celula(0.1), '0.10000000000000001')
        self.assertEqual(formatar_celula(float('inf')), 'inf')
        self.assertEqual(formatar_celula(complex(1.0, -2.0)), '1-2j')
        self.assertTrue(formatar_celula(LogScaled.exp(-2000.0)).endswith('e-869'))

    def test_primitivos_para_yaml(self):
        """
        Cenário: numpy, LogScaled e não finitos viram tipos aceitos pelo safe_dump.
        """
        # ACT
        dados = para_primitivo({'a': np.array([1.0, 2.0]), 'b': (np.float64(0.5), math.nan), 'c': np.bool_(True)})

        # ASSERT
        self.assertEqual(dados, {'a': [1.0, 2.0], 'b': [0.5, 'nan'], 'c': True})
        yaml.safe_dump(dados)


class RepositoriosDeArquivoTestCase(SimpleTestCase):

    def setUp(self):
        self.diretorio = tempfile.TemporaryDirectory()
        self.addCleanup(self.diretorio.cleanup)

    def test_carregar_yaml_valido(self):
        caminho = os.path.join(self.diretorio.name, 'config.yaml')
        with open(caminho, 'w', encoding='utf-8') as arquivo:
            yaml.safe_dump(EXEMPLOS['witten'], arquivo)
        self.assertEqual(ConfigRepositoryYaml().carregar(caminho)['h'], [0.05, 0.07, 0.1])

    def test_carregar_json_como_yaml(self):
        caminho = os.path.join(self.diretorio.name, 'config.json')
        with open(caminho, 'w', encoding='utf-8') as arquivo:
            arquivo.write('{"h": [0.1], "dominio": [[-1, 1]]}')
        self.assertEqual(ConfigRepositoryYaml().carregar(caminho)['dominio'], [[-1, 1]])

    def test_erros_de_carga_sao_de_configuracao(self):
        """
        Cenário: Arquivo ausente, YAML malformado e lista no topo falham com código 1.
        """
        repo = ConfigRepositoryYaml()
        malformado = os.path.join(self.diretorio.name, 'ruim.yaml')
        with open(malformado, 'w', encoding='utf-8') as arquivo:
            arquivo.write('h: [0.1\n')
        lista = os.path.join(self.diretorio.name, 'lista.yaml')
        with open(lista, 'w', encoding='utf-8') as arquivo:
            arquivo.write('- 1\n- 2\n')

        for caminho in (os.path.join(self.diretorio.name, 'ausente.yaml'), malformado, lista):
            with self.assertRaises(ConfiguracaoInvalidaError) as contexto:
                repo.carregar(caminho)
            self.assertEqual(contexto.exception.codigo_saida, 1)

    def test_escrever_csv_e_yaml(self):
        # ARRANGE
        repo = RelatorioRepositoryArquivos()
        destino = os.path.join(self.diretorio.name, 'novo', 'sub')

        # ACT
        caminho_csv = repo.escrever_csv(destino, 'tabela.csv', ['h', 'valor'], [[0.1, LogScaled.exp(-1.0)]])
        caminho_yaml = repo.escrever_yaml(destino, 'resumo.yaml', {'razao': np.float64(1.5)})

        # ASSERT
        with open(caminho_csv, newline='', encoding='utf-8') as arquivo:
            linhas = list(csv.reader(arquivo))
        self.assertEqual(linhas[0], ['h', 'valor'])
        self.assertEqual(linhas[1][0], '0.10000000000000001')
        with open(caminho_yaml, encoding='utf-8') as arquivo:
            self.assertEqual(yaml.safe_load(arquivo), {'razao': 1.5})


class GaleriaRepositoryMemoriaTestCase(SimpleTestCase):

    def test_listar_ordenado(self):
        self.assertEqual(GaleriaRepositoryMemoria().listar(),
                         ['kalman_falha', 'kfp', 'nonreversible', 'susy_breaking', 'witten'])

    def test_buscar_devolve_copia(self):
        repo = GaleriaRepositoryMemoria()
        dados = repo.buscar_config('witten')
        dados['h'].append(1.0)
        self.assertEqual(repo.buscar_config('witten')['h'], [0.05, 0.07, 0.1])

    def test_exemplo_desconhecido_falha(self):
        with self.assertRaises(ParametrosInvalidosError):
            GaleriaRepositoryMemoria({'a': {}}).buscar_config('b')
