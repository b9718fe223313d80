"""
Base dos management commands da CLI (`python manage.py <subcomando> ...`).
"""
from django.core.management.base import BaseCommand, CommandError

from metaestavel.core.exceptions import BaseErroCore

from .cli import carregar_config, ler_lista, run


class ComandoMetaestavel(BaseCommand):
    """Opções comuns: --config, --out, --h, --grid, --tol-scale."""
    subcomando = None

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='Arquivo RunConfig (YAML ou JSON).')
        parser.add_argument('--out', help='Diretório de saída (substitui "saida").')
        parser.add_argument('--h', help='Valores de h separados por vírgula (substitui "h").')
        parser.add_argument('--grid', help='Resolução N[,M,...] da malha de validação.')
        parser.add_argument('--tol-scale', dest='tol_scale', type=float,
                            help='Multiplica as tolerâncias e alarga a faixa de aceitação.')

    def handle(self, *args, **options):
        try:
            config = carregar_config(options['config'], {
                'h': ler_lista(options.get('h')),
                'grid': ler_lista(options.get('grid'), int),
                'tol_scale': options.get('tol_scale'),
                'out': options.get('out'),
            }, self.subcomando)
        except BaseErroCore as exc:
            raise CommandError(exc.message, returncode=exc.codigo_saida)

        resultado = run(self.subcomando, config)
        for arquivo in resultado.arquivos:
            self.stdout.write(arquivo)
        if resultado.codigo_saida:
            raise CommandError(resultado.mensagem, returncode=resultado.codigo_saida)
        self.stdout.write(self.style.SUCCESS(f"{self.subcomando}: concluído ({len(resultado.arquivos)} arquivos)."))
