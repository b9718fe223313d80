from metaestavel.presentation.comandos import ComandoMetaestavel


class Command(ComandoMetaestavel):
    help = 'Espectro de uma matriz graduada por complementos de Schur.'
    subcomando = 'graded'
