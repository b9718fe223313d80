# metaestavel/core/testes_landscape.py

import heapq
import unittest
from collections import deque

import numpy as np

from metaestavel.core.entities import Caixa, SELA_FICTICIA
from metaestavel.core.exceptions import (
    BaseErroCore,
    DimensaoIncompativelError,
    MalhaGrosseiraError,
    PaisagemNaoConfinanteError,
    PontoCriticoDegeneradoError,
    SemPontosCriticosError,
)
from metaestavel.core.fields import mapa_escalar
from metaestavel.core.landscape import (
    UniaoBusca,
    check_gener,
    find_critical_points,
    label,
    merge_tree,
)

DUPLO_POCO = 'x1^4/4 - x1^2/2 + x1/10'
TRIPLO_POCO = 'x1^2*(x1^2 - 1)^2 + x1/20 + x1^2/50 + x2^2/2'


def _triplo_poco_numpy(x, y):
    return x ** 2 * (x ** 2 - 1) ** 2 + x / 20 + x ** 2 / 50 + y ** 2 / 2


def _vizinhos_de_face(v, forma):
    for eixo, n in enumerate(forma):
        for passo in (-1, 1):
            w = v[eixo] + passo
            if 0 <= w < n:
                yield v[:eixo] + (w,) + v[eixo + 1:]


def _inundar(grade, inicio, limiar):
    """Componente de {grade < limiar} (vizinhos de face) que contém o índice inicio."""
    visitado = np.zeros(grade.shape, dtype=bool)
    fila = deque([inicio])
    visitado[inicio] = True
    while fila:
        v = fila.popleft()
        for w in _vizinhos_de_face(v, grade.shape):
            if not visitado[w] and grade[w] < limiar:
                visitado[w] = True
                fila.append(w)
    return visitado


def _gargalo(grade, inicio, alvo):
    """Inundação por prioridade a partir de inicio até a primeira célula com valor < alvo.

    Devolve o maior valor atravessado e a célula onde ele ocorre; (inf, None)
    se nenhuma célula abaixo de alvo é alcançável.
    """
    visitado = np.zeros(grade.shape, dtype=bool)
    visitado[inicio] = True
    fila = [(float(grade[inicio]), inicio)]
    nivel, passagem = -np.inf, inicio
    while fila:
        valor, v = heapq.heappop(fila)
        if valor < alvo:
            return nivel, passagem
        if valor > nivel:
            nivel, passagem = valor, v
        for w in _vizinhos_de_face(v, grade.shape):
            if not visitado[w]:
                visitado[w] = True
                heapq.heappush(fila, (float(grade[w]), w))
    return np.inf, None


def _paisagem_gaussiana(rng, d):
    """0.3|x|² menos uma soma de 2 a 4 gaussianas: texto para o parser e avaliação numpy."""
    k = int(rng.integers(2, 5))
    centros = np.round(rng.uniform(-1.5, 1.5, (k, d)), 4)
    alturas = np.round(rng.uniform(0.3, 1.0, k), 4)
    variancias = np.round(rng.uniform(0.35, 0.7, k) ** 2, 6)
    texto = "0.3*(" + ' + '.join(f"x{i + 1}^2" for i in range(d)) + ")"
    for c, a, w2 in zip(centros, alturas, variancias):
        distancia = ' + '.join(f"(x{i + 1} - ({c[i]:.4f}))^2" for i in range(d))
        texto += f" - {a:.4f}*exp(-({distancia})/{w2:.6f})"

    def funcao(*eixos):
        valor = 0.3 * sum(x ** 2 for x in eixos)
        for c, a, w2 in zip(centros, alturas, variancias):
            valor = valor - a * np.exp(-sum((x - ci) ** 2 for x, ci in zip(eixos, c)) / w2)
        return valor

    return texto, funcao


class TestUniaoBusca(unittest.TestCase):

    def test_unir_e_raiz(self):
        uniao = UniaoBusca(5)
        uniao.unir(0, 1)
        uniao.unir(3, 4)
        self.assertEqual(uniao.raiz(0), uniao.raiz(1))
        self.assertNotEqual(uniao.raiz(1), uniao.raiz(3))
        uniao.unir(1, 4)
        self.assertEqual(uniao.raiz(0), uniao.raiz(3))
        self.assertEqual(uniao.raiz(2), 2)


class TestPontosCriticos(unittest.TestCase):

    def test_duplo_poco_inclinado(self):
        """
        Cenário: f' = x³ − x + 1/10 tem três raízes reais em [−2.5, 2.5].
        """
        # ARRANGE
        f = mapa_escalar(DUPLO_POCO, 1)
        raizes = np.sort(np.roots([1.0, 0.0, -1.0, 0.1]).real)

        # ACT
        criticos = {c.id: c for c in find_critical_points(f, Caixa((-2.5,), (2.5,)))}

        # ASSERT
        self.assertEqual(set(criticos), {'m1', 'm2', 's1'})
        self.assertAlmostEqual(float(criticos['m1'].localizacao[0]), raizes[0], places=9)
        self.assertAlmostEqual(float(criticos['s1'].localizacao[0]), raizes[1], places=9)
        self.assertAlmostEqual(float(criticos['m2'].localizacao[0]), raizes[2], places=9)
        self.assertEqual(criticos['s1'].indice, 1)
        self.assertLess(criticos['m1'].valor, criticos['m2'].valor)

    def test_ponto_degenerado_falha(self):
        """
        Cenário: x⁴ tem Hessiana nula na origem.
        """
        f = mapa_escalar('x1^4', 1)
        with self.assertRaises(PontoCriticoDegeneradoError):
            find_critical_points(f, Caixa((-1.0,), (1.0,)), degenerescencia_tol=1e-3)

    def test_sem_pontos_criticos_falha(self):
        f = mapa_escalar('x1', 1)
        with self.assertRaises(SemPontosCriticosError):
            find_critical_points(f, Caixa((0.0,), (1.0,)))


class TestArvoreDeFusao(unittest.TestCase):

    def setUp(self):
        self.f = mapa_escalar(DUPLO_POCO, 1)
        self.caixa = Caixa((-2.5,), (2.5,))
        self.criticos = find_critical_points(self.f, self.caixa)

    def test_um_evento_por_sela(self):
        arvore = merge_tree(self.f, self.caixa, [501], self.criticos)
        self.assertEqual(len(arvore.eventos), 1)
        self.assertEqual(arvore.eventos[0].sela.id, 's1')
        self.assertEqual(len(arvore.nascimentos), 2)

    def test_malha_grosseira_falha(self):
        """
        Cenário: Com 11 nós, mínimo e sela ficam a menos de 3 células.
        """
        with self.assertRaises(MalhaGrosseiraError):
            merge_tree(self.f, self.caixa, [11], self.criticos)

    def test_dimensao_quatro_nao_suportada(self):
        caixa = Caixa((-1.0,) * 4, (1.0,) * 4)
        f = mapa_escalar('x1^2 + x2^2 + x3^2 + x4^2', 4)
        with self.assertRaises(DimensaoIncompativelError):
            merge_tree(f, caixa, [5] * 4)


class TestRotulagem(unittest.TestCase):

    def test_duplo_poco_profundidade(self):
        """
        Cenário: S(m2) = f(s1) − f(m2) e o mínimo global recebe a sela fictícia.
        """
        # ARRANGE
        f = mapa_escalar(DUPLO_POCO, 1)
        caixa = Caixa((-2.5,), (2.5,))
        criticos = find_critical_points(f, caixa)
        raizes = np.sort(np.roots([1.0, 0.0, -1.0, 0.1]).real)
        valor = lambda x: x ** 4 / 4 - x ** 2 / 2 + x / 10

        # ACT
        rotulagem = label(merge_tree(f, caixa, [501], criticos), criticos)

        # ASSERT
        self.assertEqual(rotulagem.minimos, ('m2', 'm1'))
        self.assertEqual(rotulagem.minimo_global, 'm1')
        self.assertEqual(rotulagem.registro('m1').selas, (SELA_FICTICIA,))
        self.assertEqual(rotulagem.registro('m2').selas, ('s1',))
        self.assertAlmostEqual(rotulagem.registro('m2').S, valor(raizes[1]) - valor(raizes[2]), places=9)
        self.assertEqual(rotulagem.registro('m2').tipo, 'I')
        self.assertTrue(check_gener(rotulagem, criticos).aprovado)

    def test_paisagem_nao_confinante_falha(self):
        """
        Cenário: Na caixa [−1.2, 1.2] a fronteira fica abaixo da sela f(0) = 0.
        """
        f = mapa_escalar('x1^4/4 - x1^2/2', 1)
        caixa = Caixa((-1.2,), (1.2,))
        criticos = find_critical_points(f, caixa)
        arvore = merge_tree(f, caixa, [241], criticos)
        with self.assertRaises(PaisagemNaoConfinanteError):
            label(arvore, criticos)

    def test_pocos_simetricos_violam_unicidade(self):
        """
        Cenário: Dois mínimos de mesmo valor na componente total.
        """
        f = mapa_escalar('x1^4/4 - x1^2/2', 1)
        caixa = Caixa((-2.0,), (2.0,))
        criticos = find_critical_points(f, caixa)
        rotulagem = label(merge_tree(f, caixa, [401], criticos), criticos)

        relatorio = check_gener(rotulagem, criticos)

        self.assertTrue(rotulagem.degenerado)
        self.assertFalse(relatorio.unicidade)
        self.assertFalse(relatorio.aprovado)


class TestRotulagemContraInundacao(unittest.TestCase):
    """Confere σ(m) e S(m) com uma inundação por busca em largura numa malha 4× mais fina."""

    @classmethod
    def setUpClass(cls):
        cls.caixa = Caixa((-1.6, -1.0), (1.6, 1.0))
        cls.f = mapa_escalar(TRIPLO_POCO, 2)
        cls.criticos = find_critical_points(cls.f, cls.caixa)
        cls.rotulagem = label(merge_tree(cls.f, cls.caixa, [161, 101], cls.criticos), cls.criticos)
        cls.xs = np.linspace(-1.6, 1.6, 641)
        cls.ys = np.linspace(-1.0, 1.0, 401)
        X, Y = np.meshgrid(cls.xs, cls.ys, indexing='ij')
        cls.grade = _triplo_poco_numpy(X, Y)

    def _indice(self, x):
        return (int(np.argmin(np.abs(self.xs - x[0]))), int(np.argmin(np.abs(self.ys - x[1]))))

    def _sigma_por_inundacao(self, minimo):
        niveis = sorted(c.valor for c in self.criticos if c.indice == 1)
        inicio = self._indice(minimo.localizacao)
        for t in niveis:
            abaixo = _inundar(self.grade, inicio, t - 1e-3)
            acima = _inundar(self.grade, inicio, t + 1e-3)
            if self.grade[acima].min() < minimo.valor - 1e-4 and self.grade[abaixo].min() > minimo.valor - 1e-4:
                return t
        return float('inf')

    def test_estrutura_dos_pontos_criticos(self):
        indices = sorted(c.indice for c in self.criticos)
        self.assertEqual(indices, [0, 0, 0, 1, 1])
        self.assertEqual(self.rotulagem.n0, 3)
        self.assertEqual(self.rotulagem.minimos[-1], self.rotulagem.minimo_global)
        self.assertEqual(self.rotulagem.minimo_global, 'm1')

    def test_sigma_e_S_conferem_com_inundacao(self):
        """
        Cenário: Para cada mínimo local, σ é o menor nível de sela em que sua
        componente alcança um mínimo mais profundo.
        """
        for m in self.rotulagem.minimos:
            if m == self.rotulagem.minimo_global:
                continue
            # ARRANGE
            registro = self.rotulagem.registro(m)
            ponto = self.rotulagem.ponto(m)

            # ACT
            sigma = self._sigma_por_inundacao(ponto)

            # ASSERT
            self.assertAlmostEqual(registro.sigma, sigma, places=9)
            self.assertAlmostEqual(registro.S, sigma - ponto.valor, places=9)

    def test_ordem_por_profundidade_e_genericidade(self):
        profundidades = [self.rotulagem.registro(m).S for m in self.rotulagem.minimos]
        self.assertEqual(profundidades, sorted(profundidades))
        self.assertTrue(check_gener(self.rotulagem, self.criticos).aprovado)


class TestRotulagemAleatoriaContraInundacao(unittest.TestCase):
    """
    Paisagens de gaussianas sorteadas: σ, S, j(m) e a partição em classes
    conferidos com uma inundação por prioridade numa malha 4× mais fina.
    """
    MARGEM = 1e-2
    SEPARACAO = 3e-2
    MAX_TENTATIVAS_POR_INSTANCIA = 40

    def _instancias(self, semente, d, total, caixa, resolucao, sementes_por_eixo):
        """Sorteios genéricos (check_gener aprovado) com ≥ 2 mínimos e níveis separados."""
        rng = np.random.default_rng(semente)
        aceitas = 0
        for _ in range(self.MAX_TENTATIVAS_POR_INSTANCIA * total):
            if aceitas == total:
                break
            texto, funcao = _paisagem_gaussiana(rng, d)
            f = mapa_escalar(texto, d)
            try:
                criticos = find_critical_points(f, caixa, sementes_por_eixo=sementes_por_eixo)
                rotulagem = label(merge_tree(f, caixa, resolucao, criticos), criticos)
            except BaseErroCore:
                continue
            if rotulagem.n0 < 2 or not check_gener(rotulagem, criticos).aprovado:
                continue
            valores_minimos = np.sort([rotulagem.ponto(m).valor for m in rotulagem.minimos])
            valores_selas = np.sort([s.valor for s in self._selas(criticos, rotulagem).values()])
            if np.min(np.diff(valores_minimos)) <= self.SEPARACAO:
                continue
            if valores_selas.size > 1 and np.min(np.diff(valores_selas)) <= self.SEPARACAO:
                continue
            aceitas += 1
            yield texto, funcao, criticos, rotulagem
        self.assertEqual(aceitas, total)

    @staticmethod
    def _selas(criticos, rotulagem):
        selas = {c.id: c for c in criticos if c.indice == 1}
        selas.update({s.id: s for s in rotulagem.selas})
        return selas

    def _oraculo(self, funcao, caixa, resolucao, criticos, rotulagem):
        """σ, j e classes pela inundação por prioridade (vizinhos de face) na malha refinada."""
        fina = tuple(4 * (n - 1) + 1 for n in resolucao)
        eixos = [np.linspace(lo, hi, n) for lo, hi, n in zip(caixa.inferior, caixa.superior, fina)]
        grade = funcao(*np.meshgrid(*eixos, indexing='ij'))
        passo = max(float(e[1] - e[0]) for e in eixos)
        selas = self._selas(criticos, rotulagem)

        def indice(x):
            return tuple(int(np.argmin(np.abs(e - xi))) for e, xi in zip(eixos, x))

        sigma, j = {}, {}
        for m in rotulagem.minimos:
            ponto = rotulagem.ponto(m)
            nivel, passagem = _gargalo(grade, indice(ponto.localizacao), ponto.valor - self.MARGEM)
            if passagem is None:
                sigma[m], j[m] = float('inf'), (SELA_FICTICIA,)
                continue
            local = np.array([e[i] for e, i in zip(eixos, passagem)])
            perto = [s for s in selas.values()
                     if abs(s.valor - nivel) <= self.MARGEM
                     and np.linalg.norm(s.localizacao - local) <= 10 * passo]
            j[m] = tuple(sorted(s.id for s in perto))
            sigma[m] = max(s.valor for s in perto) if perto else float('nan')

        grupos = {m: frozenset([m]) for m in rotulagem.minimos}
        locais = [m for m in rotulagem.minimos if np.isfinite(sigma[m])]
        for a in locais:
            componente = _inundar(grade, indice(rotulagem.ponto(a).localizacao), sigma[a] + self.MARGEM)
            for b in locais:
                if b != a and abs(sigma[a] - sigma[b]) <= self.MARGEM \
                        and componente[indice(rotulagem.ponto(b).localizacao)]:
                    unido = grupos[a] | grupos[b]
                    for m in unido:
                        grupos[m] = unido
        return sigma, j, frozenset(grupos.values())

    def _conferir(self, semente, d, total, caixa, resolucao, sementes_por_eixo):
        instancias = self._instancias(semente, d, total, caixa, resolucao, sementes_por_eixo)
        for k, (texto, funcao, criticos, rotulagem) in enumerate(instancias):
            with self.subTest(instancia=k, f=texto):
                # ACT
                sigma, j, particao = self._oraculo(funcao, caixa, resolucao, criticos, rotulagem)

                # ASSERT
                self.assertEqual(rotulagem.minimo_global,
                                 min(rotulagem.minimos, key=lambda m: rotulagem.ponto(m).valor))
                for m in rotulagem.minimos:
                    registro = rotulagem.registro(m)
                    self.assertEqual(registro.selas, j[m])
                    if m == rotulagem.minimo_global:
                        self.assertEqual(registro.sigma, float('inf'))
                        continue
                    self.assertAlmostEqual(registro.sigma, sigma[m], places=9)
                    self.assertAlmostEqual(registro.S, sigma[m] - rotulagem.ponto(m).valor, places=9)
                self.assertEqual(frozenset(frozenset(c) for c in rotulagem.classes), particao)

    def test_cinquenta_paisagens_unidimensionais(self):
        """
        Cenário: 50 sorteios em [−3, 3] com malha de 601 nós; o oráculo usa 2401.
        """
        self._conferir(53, 1, 50, Caixa((-3.0,), (3.0,)), (601,), 60)

    def test_vinte_paisagens_bidimensionais(self):
        """
        Cenário: 20 sorteios em [−2.5, 2.5]² com malha 81×81; o oráculo usa 321×321.
        """
        self._conferir(59, 2, 20, Caixa((-2.5, -2.5), (2.5, 2.5)), (81, 81), 20)
