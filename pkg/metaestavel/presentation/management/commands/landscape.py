from metaestavel.presentation.comandos import ComandoMetaestavel


class Command(ComandoMetaestavel):
    help = 'Pontos críticos, árvore de fusão e rotulagem dos mínimos.'
    subcomando = 'landscape'
