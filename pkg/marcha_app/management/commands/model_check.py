"""
Management command to run the model invariant suite.
"""
from pathlib import Path

from django.core.management.base import CommandError

from marcha_app.core.configuracao import ConfiguracaoExecucao
from marcha_app.core.constantes import CODIGO_SAIDA_VALIDACAO
from marcha_app.management.commands._comum import ComandoMarcha
from marcha_app.services.construtor_relatorio import ConstrutorRelatorio
from marcha_app.services.servico_modelo import ServicoModelo

AMOSTRAS_PADRAO = 1000


class Command(ComandoMarcha):
    """Command to check the rigid-body model."""

    help = "Verifica simetria, paridade, gradientes e conservação de energia do modelo do bípede."

    def add_arguments(self, parser) -> None:
        super().add_arguments(parser)
        parser.add_argument('--amostras', type=int, default=AMOSTRAS_PADRAO, help="Configurações aleatórias")

    def executar(self, configuracao: ConfiguracaoExecucao, diretorio: Path, **options) -> None:
        """Run the suite and fail with a nonzero exit code on any violation."""
        self.stdout.write(self.style.SUCCESS('=== VERIFICAÇÃO DO MODELO ===\n'))
        verificacoes = ServicoModelo.verificar_invariantes(
            configuracao.bipede,
            semente=configuracao.simulacao.semente,
            amostras=options['amostras'],
        )
        self.escrever_linhas(ConstrutorRelatorio.linhas_verificacoes(verificacoes))

        falhas = [verificacao.nome for verificacao in verificacoes if not verificacao.aprovado]
        if falhas:
            raise CommandError(f"Invariantes violados: {', '.join(falhas)}", returncode=CODIGO_SAIDA_VALIDACAO)
        self.stdout.write(self.style.SUCCESS('\nTodos os invariantes aprovados.'))
