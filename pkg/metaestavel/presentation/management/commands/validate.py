from metaestavel.presentation.comandos import ComandoMetaestavel


class Command(ComandoMetaestavel):
    help = 'Compara as previsões com os autovalores pequenos de P discretizado.'
    subcomando = 'validate'
