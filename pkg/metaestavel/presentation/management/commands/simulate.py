from metaestavel.presentation.comandos import ComandoMetaestavel


class Command(ComandoMetaestavel):
    help = 'Semigrupo e^{-tP/h}: platôs de metastabilidade e taxa de retorno ao equilíbrio.'
    subcomando = 'simulate'
