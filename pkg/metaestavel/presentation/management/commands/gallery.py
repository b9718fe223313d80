"""
Management command que escreve a RunConfig pronta de um exemplo da galeria.
"""
from django.core.management.base import BaseCommand, CommandError

from metaestavel.core.exceptions import BaseErroCore
from metaestavel.presentation.cli import exemplos_disponiveis, run_gallery


class Command(BaseCommand):
    help = 'Escreve <nome>.yaml com a configuração de um exemplo (witten, nonreversible, kfp, ...).'

    def add_arguments(self, parser):
        parser.add_argument('nome', help=f"Exemplo: {', '.join(exemplos_disponiveis())}.")
        parser.add_argument('--out', default='.', help='Diretório onde o arquivo é escrito.')

    def handle(self, *args, **options):
        try:
            resultado = run_gallery(options['nome'], options['out'])
        except BaseErroCore as exc:
            raise CommandError(exc.message, returncode=exc.codigo_saida)
        self.stdout.write(self.style.SUCCESS(f"Configuração escrita em {resultado.arquivos[0]}"))
