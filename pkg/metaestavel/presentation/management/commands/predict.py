from metaestavel.presentation.comandos import ComandoMetaestavel


class Command(ComandoMetaestavel):
    help = 'Previsões de Eyring–Kramers λ(m, h) para cada mínimo.'
    subcomando = 'predict'
