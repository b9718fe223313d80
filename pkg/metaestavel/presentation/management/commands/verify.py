from metaestavel.presentation.comandos import ComandoMetaestavel


class Command(ComandoMetaestavel):
    help = 'Verifica as equações eiconais, a estrutura nos pontos críticos e (Hypo).'
    subcomando = 'verify'
