# metaestavel/core/landscape.py
"""
Paisagem de energia: pontos críticos de f, árvore de fusão das subníveis
e o procedimento recursivo de rotulagem (E, j, σ, S, E₋, Ê, m̂, tipos e classes).
"""
import logging
from collections import defaultdict
from dataclasses import replace
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from metaestavel.core.entities import (
    COMPONENTE_TOTAL,
    SELA_FICTICIA,
    Caixa,
    ComponenteId,
    CriticalPoint,
    GenerReport,
    Labeling,
    Malha,
    MergeEvent,
    MergeTree,
    MinimumRecord,
)
from metaestavel.core.exceptions import (
    DimensaoIncompativelError,
    MalhaGrosseiraError,
    PaisagemNaoConfinanteError,
    PontoCriticoDegeneradoError,
    SemPontosCriticosError,
    ValorNaoFinitoError,
)
from metaestavel.core.fields import SmoothMap, derivative, evaluate, evaluate_many

logger = logging.getLogger(__name__)

MAX_ITERACOES_NEWTON = 100
MAX_RECUOS = 40
SEPARACAO_MINIMA_CELULAS = 3


class UniaoBusca:
    """Union-find com compressão de caminho e união por altura."""

    def __init__(self, n: int):
        self.pais = list(range(n))
        self.alturas = [1] * n

    def raiz(self, v: int) -> int:
        pais = self.pais
        r = v
        while pais[r] != r:
            r = pais[r]
        while pais[v] != r:
            pais[v], v = r, pais[v]
        return r

    def unir(self, v1: int, v2: int) -> int:
        r1, r2 = self.raiz(v1), self.raiz(v2)
        if r1 == r2:
            return r1
        h1, h2 = self.alturas[r1], self.alturas[r2]
        if h1 <= h2:
            self.pais[r1] = r2
            self.alturas[r2] = max(h2, h1 + 1)
            return r2
        self.pais[r2] = r1
        self.alturas[r1] = max(h1, h2 + 1)
        return r1


# ====================================================================
# PONTOS CRÍTICOS
# ====================================================================

def _newton_gradiente(f: SmoothMap, x0, tol: float, caixa: Caixa) -> Optional[np.ndarray]:
    """Newton amortecido em ∇f = 0 (busca linear em ‖∇f‖); None se não convergir."""
    x = np.array(x0, dtype=float)
    folga = 0.1 * caixa.diametro
    try:
        g = derivative(f, x, 1)
        for _ in range(MAX_ITERACOES_NEWTON):
            norma = float(np.linalg.norm(g))
            if norma <= tol:
                return x
            H = derivative(f, x, 2)
            try:
                passo = np.linalg.solve(H, -g)
            except np.linalg.LinAlgError:
                passo = np.linalg.lstsq(H, -g, rcond=None)[0]
            t = 1.0
            for _ in range(MAX_RECUOS):
                candidato = x + t * passo
                g_candidato = derivative(f, candidato, 1)
                if np.linalg.norm(g_candidato) < norma:
                    break
                t *= 0.5
            else:
                # estagnação por arredondamento
                return x if norma <= 1e3 * tol else None
            x, g = candidato, g_candidato
            if not caixa.contem(x, folga):
                return None
    except ValorNaoFinitoError:
        return None
    return x if np.linalg.norm(g) <= tol else None


def _classificar(f: SmoothMap, x: np.ndarray, degenerescencia_tol: float) -> CriticalPoint:
    H = derivative(f, x, 2)
    autovalores = np.linalg.eigvalsh(H)
    menor = float(np.min(np.abs(autovalores)))
    if menor <= degenerescencia_tol:
        raise PontoCriticoDegeneradoError(x, menor)
    return CriticalPoint(id='', localizacao=x, valor=float(evaluate(f, x)),
                         indice=int(np.sum(autovalores < 0)), hessiana=H)


def _prefixo(indice: int) -> str:
    return {0: 'm', 1: 's'}.get(indice, f'c{indice}_')


def _nomear(pontos: List[CriticalPoint]) -> List[CriticalPoint]:
    ordenados = sorted(pontos, key=lambda p: (p.indice,) + p.chave_ordenacao)
    contadores: Dict[int, int] = defaultdict(int)
    nomeados = []
    for p in ordenados:
        contadores[p.indice] += 1
        nomeados.append(replace(p, id=f"{_prefixo(p.indice)}{contadores[p.indice]}"))
    return nomeados


def find_critical_points(f: SmoothMap, caixa: Caixa, sementes_por_eixo: int = 10,
                         newton_tol: float = 1e-10,
                         degenerescencia_tol: float = 1e-8) -> List[CriticalPoint]:
    """Newton amortecido a partir de uma grade regular de sementes.

    Pontos convergidos são deduplicados a 1e−6·diam e classificados pela
    assinatura da Hessiana; os que caem fora da caixa são descartados.
    """
    if f.forma != 'escalar' or f.dimensao != caixa.dimensao:
        raise DimensaoIncompativelError(caixa.dimensao, f.dimensao)
    eixos = [lo + (np.arange(sementes_por_eixo) + 0.5) * (hi - lo) / sementes_por_eixo
             for lo, hi in zip(caixa.inferior, caixa.superior)]
    raio = 1e-6 * caixa.diametro
    encontrados: List[np.ndarray] = []
    for semente in product(*eixos):
        x = _newton_gradiente(f, semente, newton_tol, caixa)
        if x is None or not caixa.contem(x):
            continue
        if any(np.linalg.norm(x - y) <= raio for y in encontrados):
            continue
        encontrados.append(x)
    if not encontrados:
        raise SemPontosCriticosError()
    pontos = _nomear([_classificar(f, x, degenerescencia_tol) for x in encontrados])
    logger.info("%d pontos críticos encontrados (%s)", len(pontos),
                ', '.join(f"{p.id}: índice {p.indice}" for p in pontos))
    return pontos


# ====================================================================
# ÁRVORE DE FUSÃO
# ====================================================================

def _vizinhancas(resolucao: Tuple[int, ...]) -> np.ndarray:
    """Índices achatados dos 3^d − 1 vizinhos de cada vértice (−1 fora da malha)."""
    d = len(resolucao)
    n = int(np.prod(resolucao))
    deslocamentos = [o for o in product((-1, 0, 1), repeat=d) if any(o)]
    indices = np.indices(resolucao).reshape(d, -1).T
    limites = np.asarray(resolucao)
    vizinhos = np.full((n, len(deslocamentos)), -1, dtype=np.int64)
    for coluna, deslocamento in enumerate(deslocamentos):
        alvo = indices + np.asarray(deslocamento)
        dentro = np.all((alvo >= 0) & (alvo < limites), axis=1)
        vizinhos[dentro, coluna] = np.ravel_multi_index(tuple(alvo[dentro].T), resolucao)
    return vizinhos


def _verificar_separacao(criticos: Sequence[CriticalPoint], malha: Malha):
    espacamento = np.asarray(malha.espacamento)
    internos = [c for c in criticos if malha.caixa.contem(c.localizacao)]
    for a, b in combinations(internos, 2):
        celulas = float(np.max(np.abs(a.localizacao - b.localizacao) / espacamento))
        if celulas <= SEPARACAO_MINIMA_CELULAS:
            raise MalhaGrosseiraError(
                f"Pontos críticos {a.id} e {b.id} separados por {celulas:.1f} células "
                f"(mínimo {SEPARACAO_MINIMA_CELULAS})."
            )


def merge_tree(f: SmoothMap, caixa: Caixa, resolucao: Sequence[int],
               criticos: Optional[Sequence[CriticalPoint]] = None,
               newton_tol: float = 1e-10, degenerescencia_tol: float = 1e-8) -> MergeTree:
    """Fusões de componentes de {f < t} por union-find sobre a malha.

    Cada evento de fusão é refinado por Newton até uma sela de índice 1.
    """
    d = caixa.dimensao
    if d not in (1, 2, 3):
        raise DimensaoIncompativelError("d ∈ {1, 2, 3}", d)
    resolucao = tuple(int(n) for n in resolucao)
    if len(resolucao) != d:
        raise DimensaoIncompativelError(d, len(resolucao))
    malha = Malha(caixa, resolucao)
    pontos = malha.pontos()
    valores = evaluate_many(f, pontos)
    if criticos:
        _verificar_separacao(criticos, malha)

    vizinhos = _vizinhancas(resolucao)
    lista_vizinhos = vizinhos.tolist()
    uniao = UniaoBusca(valores.size)
    ativo = [False] * valores.size
    nascimentos: List[int] = []
    fusoes: List[Tuple[float, int, Tuple[int, int]]] = []
    for v in np.argsort(valores, kind='stable').tolist():
        raizes: Dict[int, int] = {}
        for w in lista_vizinhos[v]:
            if w >= 0 and ativo[w]:
                r = uniao.raiz(w)
                if r not in raizes:
                    raizes[r] = w
        ativo[v] = True
        if not raizes:
            nascimentos.append(v)
            continue
        if len(raizes) > 2:
            raise MalhaGrosseiraError(
                f"{len(raizes)} componentes se fundem no vértice {pontos[v].tolist()}."
            )
        for r in raizes:
            uniao.unir(r, v)
        if len(raizes) == 2:
            fusoes.append((float(valores[v]), v, tuple(raizes.values())))

    conhecidas = [c for c in (criticos or ()) if c.indice == 1]
    raio = 1e-5 * caixa.diametro
    consumidas: List[np.ndarray] = []
    eventos: List[MergeEvent] = []
    novas = 0
    for nivel, v, testemunhas in fusoes:
        x = _newton_gradiente(f, pontos[v], newton_tol, caixa)
        if x is None:
            raise MalhaGrosseiraError(f"Refinamento do evento em {pontos[v].tolist()} divergiu.")
        refinado = _classificar(f, x, degenerescencia_tol)
        if refinado.indice != 1:
            raise MalhaGrosseiraError(
                f"Evento em {pontos[v].tolist()} refinou para ponto de índice {refinado.indice}."
            )
        if any(np.linalg.norm(x - y) <= raio for y in consumidas):
            raise MalhaGrosseiraError(f"Sela em {x.tolist()} consumida por dois eventos de fusão.")
        consumidas.append(x)
        sela = next((c for c in conhecidas if np.linalg.norm(c.localizacao - x) <= raio), None)
        if sela is None:
            novas += 1
            sela = replace(refinado, id=f"s{len(conhecidas) + novas}")
        logger.debug("fusão no nível de malha %.6g refinada para %s (f = %.10g)", nivel, sela.id, sela.valor)
        eventos.append(MergeEvent(nivel_grade=nivel, vertice=v, testemunhas=testemunhas, sela=sela))

    logger.info("árvore de fusão: %d mínimos de malha, %d selas separadoras", len(nascimentos), len(eventos))
    return MergeTree(malha=malha, valores=valores, eventos=tuple(eventos),
                     vizinhos=vizinhos, nascimentos=tuple(nascimentos))


# ====================================================================
# ROTULAGEM
# ====================================================================

def _vertice_mais_proximo(malha: Malha, x) -> int:
    lo = np.asarray(malha.caixa.inferior)
    passo = np.asarray(malha.espacamento)
    indice = np.clip(np.rint((np.asarray(x) - lo) / passo).astype(int), 0, np.asarray(malha.resolucao) - 1)
    return int(np.ravel_multi_index(tuple(indice), malha.resolucao))


def _descer(v: int, valores: np.ndarray, vizinhos: np.ndarray, rotulos: Optional[np.ndarray] = None) -> int:
    """Descida mais íngreme na malha até um mínimo local (ou até um vértice rotulado)."""
    atual = v
    while rotulos is None or rotulos[atual] == 0:
        viz = vizinhos[atual]
        viz = viz[viz >= 0]
        proximo = int(viz[np.argmin(valores[viz])])
        if valores[proximo] >= valores[atual]:
            break
        atual = proximo
    return atual


def _componente(v: int, rotulos: np.ndarray, valores: np.ndarray, vizinhos: np.ndarray) -> int:
    return int(rotulos[_descer(v, valores, vizinhos, rotulos)])


def _valores_fronteira(grade: np.ndarray) -> np.ndarray:
    faces = []
    for eixo in range(grade.ndim):
        faces.append(np.take(grade, 0, axis=eixo).ravel())
        faces.append(np.take(grade, -1, axis=eixo).ravel())
    return np.concatenate(faces)


class _ClassesNivel:
    """Relação de equivalência entre componentes de Ω_σ (união por selas comuns)."""

    def __init__(self, componentes):
        self.pais = {c: c for c in componentes}

    def raiz(self, c):
        while self.pais[c] != c:
            c = self.pais[c]
        return c

    def unir(self, a, b):
        ra, rb = self.raiz(a), self.raiz(b)
        if ra != rb:
            self.pais[max(ra, rb)] = min(ra, rb)


def label(arvore: MergeTree, criticos: Sequence[CriticalPoint], tol_valor: float = 1e-9) -> Labeling:
    """Procedimento recursivo de rotulagem dos mínimos pelos níveis de sela σ₁ = +∞ > σ₂ > …"""
    malha = arvore.malha
    valores = arvore.valores
    grade = valores.reshape(malha.resolucao)
    escala = max(float(valores.max() - valores.min()), np.finfo(float).tiny)
    tol = tol_valor * escala
    selas = [ev.sela for ev in arvore.eventos]

    fronteira = float(_valores_fronteira(grade).min())
    if selas and fronteira <= max(s.valor for s in selas):
        raise PaisagemNaoConfinanteError(fronteira, max(s.valor for s in selas))

    minimos = [c for c in criticos if c.indice == 0 and malha.caixa.contem(c.localizacao)]
    if not minimos:
        raise SemPontosCriticosError("Nenhum mínimo de f na caixa.")
    if len(minimos) != len(selas) + 1:
        raise MalhaGrosseiraError(
            f"{len(minimos)} mínimos para {len(selas)} selas separadoras; refine a malha ou as sementes."
        )
    pontos = {p.id: p for p in minimos}
    pontos.update({s.id: s for s in selas})
    vertice = {m.id: _descer(_vertice_mais_proximo(malha, m.localizacao), valores, arvore.vizinhos)
               for m in minimos}

    grupos: List[List[MergeEvent]] = []
    for ev in sorted(arvore.eventos, key=lambda e: (-e.sela.valor,) + e.sela.chave_ordenacao[1:]):
        if grupos and abs(grupos[-1][0].sela.valor - ev.sela.valor) <= tol:
            grupos[-1].append(ev)
        else:
            grupos.append([ev])
    niveis_sigma = (float('inf'),) + tuple(max(e.sela.valor for e in g) for g in grupos)

    m_global = min(minimos, key=lambda m: m.chave_ordenacao)
    degenerado = any(m is not m_global and abs(m.valor - m_global.valor) <= tol for m in minimos)
    nivel_de: Dict[str, int] = {m_global.id: 1}
    componente_de: Dict[str, ComponenteId] = {m_global.id: COMPONENTE_TOTAL}
    membros: Dict[ComponenteId, Tuple[str, ...]] = {COMPONENTE_TOTAL: tuple(sorted(pontos[m.id].id for m in minimos))}
    rotulos_nivel: Dict[int, np.ndarray] = {}
    selas_componentes: Dict[str, Tuple[ComponenteId, ComponenteId]] = {}
    estrutura = np.ones((3,) * malha.dimensao, dtype=int)

    for i, grupo in enumerate(grupos, start=2):
        limiar = min(ev.nivel_grade for ev in grupo)
        rotulos, _ = ndimage.label(grade < limiar, structure=estrutura)
        rotulos = rotulos.ravel()
        rotulos_nivel[i] = rotulos
        for ev in grupo:
            a, b = (_componente(t, rotulos, valores, arvore.vizinhos) for t in ev.testemunhas)
            selas_componentes[ev.sela.id] = ((i, a), (i, b))

        por_componente: Dict[int, List[CriticalPoint]] = defaultdict(list)
        for m in minimos:
            c = int(rotulos[vertice[m.id]])
            if c:
                por_componente[c].append(m)
        for c, ms in por_componente.items():
            membros[(i, c)] = tuple(sorted(m.id for m in ms))
            if any(m.id in nivel_de for m in ms):
                continue
            escolhido = min(ms, key=lambda m: m.chave_ordenacao)
            if any(m is not escolhido and abs(m.valor - escolhido.valor) <= tol for m in ms):
                degenerado = True
            nivel_de[escolhido.id] = i
            componente_de[escolhido.id] = (i, c)

    faltantes = [m.id for m in minimos if m.id not in nivel_de]
    if faltantes:
        raise MalhaGrosseiraError(f"Mínimos sem rótulo: {', '.join(faltantes)}.")

    registros: Dict[str, MinimumRecord] = {
        m_global.id: MinimumRecord(
            minimo_id=m_global.id, nivel=1, componente=COMPONENTE_TOTAL, selas=(SELA_FICTICIA,),
            sigma=float('inf'), S=float('inf'), valor=m_global.valor,
        )
    }
    for m in minimos:
        if m is m_global:
            continue
        i = nivel_de[m.id]
        componente = componente_de[m.id]
        selas_j = tuple(sorted(
            ev.sela.id for ev in grupos[i - 2] if componente in selas_componentes[ev.sela.id]
        ))
        if not selas_j:
            raise MalhaGrosseiraError(f"Nenhuma sela separadora na fronteira de E({m.id}).")
        sigma = max(pontos[s].valor for s in selas_j)
        S = sigma - m.valor
        if S <= 0:
            raise MalhaGrosseiraError(f"S({m.id}) = {S:.3e} ≤ 0.")

        if i - 1 == 1:
            anterior = COMPONENTE_TOTAL
            candidatos = [p for p in minimos if nivel_de[p.id] == 1]
        else:
            rotulos_ant = rotulos_nivel[i - 1]
            anterior = (i - 1, int(rotulos_ant[vertice[m.id]]))
            candidatos = [p for p in minimos
                          if nivel_de[p.id] < i and rotulos_ant[vertice[p.id]] == anterior[1]]
        if not candidatos:
            raise MalhaGrosseiraError(f"Nenhum mínimo anterior em E₋({m.id}).")
        if len(candidatos) > 1:
            logger.warning("E₋(%s) contém %d mínimos rotulados antes; usando o mais profundo",
                           m.id, len(candidatos))
        m_chapeu = min(candidatos, key=lambda p: p.chave_ordenacao)
        chapeu = (i, int(rotulos_nivel[i][vertice[m_chapeu.id]]))
        tipo = 'II' if abs(m_chapeu.valor - m.valor) <= tol else 'I'
        registros[m.id] = MinimumRecord(
            minimo_id=m.id, nivel=i, componente=componente, selas=selas_j, sigma=sigma, S=S,
            valor=m.valor, componente_anterior=anterior, componente_chapeu=chapeu,
            m_chapeu=m_chapeu.id, tipo=tipo,
        )

    classes = _classes(registros, grupos, selas_componentes, pontos)
    indice_classe = {m: k for k, classe in enumerate(classes) for m in classe}
    registros = {m: replace(r, classe=indice_classe[m]) for m, r in registros.items()}
    ordem = tuple(sorted(registros, key=lambda m: (registros[m].S,) + pontos[m].chave_ordenacao[1:]))

    if degenerado:
        logger.warning("rotulagem degenerada: mínimos de mesmo valor em uma componente")
    logger.info("rotulagem: %d mínimos, %d níveis de sela, %d classes",
                len(ordem), len(niveis_sigma) - 1, len(classes))
    return Labeling(
        minimos=ordem, registros=registros,
        selas=tuple(sorted(selas, key=lambda s: s.chave_ordenacao)),
        niveis_sigma=niveis_sigma, membros=membros, classes=classes,
        minimo_global=m_global.id, pontos=pontos, escala=escala,
        degenerado=degenerado, caixa=malha.caixa,
    )


def _classes(registros: Dict[str, MinimumRecord], grupos, selas_componentes, pontos) -> Tuple[Tuple[str, ...], ...]:
    """Classes Cl: m ~ m′ se σ(m) = σ(m′) e há cadeia em Ω_σ com fechos que se tocam."""
    def chave(m):
        return (registros[m].S,) + pontos[m].chave_ordenacao[1:]

    classes: List[Tuple[str, ...]] = []
    for i, grupo in enumerate(grupos, start=2):
        do_nivel = [m for m, r in registros.items() if r.nivel == i]
        if not do_nivel:
            continue
        omega = {registros[m].componente for m in do_nivel}
        omega |= {registros[m].componente_chapeu for m in do_nivel if registros[m].tipo == 'II'}
        relacao = _ClassesNivel(omega)
        for ev in grupo:
            a, b = selas_componentes[ev.sela.id]
            if a in omega and b in omega:
                relacao.unir(a, b)
        agrupados: Dict[ComponenteId, List[str]] = defaultdict(list)
        for m in do_nivel:
            agrupados[relacao.raiz(registros[m].componente)].append(m)
        classes.extend(tuple(sorted(ms, key=chave)) for ms in agrupados.values())
    globais = [m for m, r in registros.items() if r.nivel == 1]
    classes.extend((m,) for m in globais)
    return tuple(sorted(classes, key=lambda c: chave(c[0])))


def check_gener(rotulagem: Labeling, criticos: Optional[Sequence[CriticalPoint]] = None,
                tol_valor: float = 1e-9) -> GenerReport:
    """Diagnóstico de genericidade: unicidade do mínimo em E(m) e disjunção dos j(m)."""
    tol = tol_valor * rotulagem.escala
    nao_unicos = []
    for m in rotulagem.minimos:
        registro = rotulagem.registros[m]
        rivais = [o for o in rotulagem.membros.get(registro.componente, ())
                  if o != m and abs(rotulagem.pontos[o].valor - registro.valor) <= tol]
        if rivais:
            nao_unicos.append(m)
    pares = tuple(
        (a, b) for a, b in combinations(rotulagem.minimos, 2)
        if set(rotulagem.registros[a].selas) & set(rotulagem.registros[b].selas)
    )
    if criticos is not None:
        fora = [c.id for c in criticos if c.indice == 0 and c.id not in rotulagem.registros]
        if fora:
            logger.warning("mínimos fora da rotulagem (fora da caixa?): %s", ', '.join(fora))
    tipo_ii = tuple(m for m in rotulagem.minimos if rotulagem.registros[m].tipo == 'II')
    return GenerReport(unicidade=not nao_unicos, disjuncao=not pares,
                       minimos_nao_unicos=tuple(nao_unicos), pares_violadores=pares, tipo_ii=tipo_ii)
