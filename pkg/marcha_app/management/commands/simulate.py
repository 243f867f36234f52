"""
Management command to run the closed-loop hybrid simulation.
"""
from pathlib import Path

from django.core.management.base import CommandError

from marcha_app.core.configuracao import ConfiguracaoExecucao
from marcha_app.core.constantes import (
    ARQUIVO_PASSOS,
    ARQUIVO_RESUMO,
    ARQUIVO_TRAJETORIA,
    CODIGO_SAIDA_FALHA_PASSO,
    ModoImpulso,
)
from marcha_app.management.commands._comum import ComandoMarcha
from marcha_app.services.construtor_relatorio import ConstrutorRelatorio
from marcha_app.services.servico_rotina_marcha import RotinaMarcha
from marcha_app.services.servico_simulacao import ServicoSimulacao


class Command(ComandoMarcha):
    """Command to simulate N steps of the gait."""

    help = "Simula N passos da marcha com realimentação ICPM e grava trajetória, passos e resumo."

    def add_arguments(self, parser) -> None:
        super().add_arguments(parser)
        parser.add_argument('--steps', type=int, default=None, help="Número de passos")
        parser.add_argument('--perturb', type=float, default=None, help="Norma da perturbação inicial de z*")
        parser.add_argument(
            '--impulse-mode',
            dest='impulse_mode',
            choices=[modo.value for modo in ModoImpulso],
            default=None,
            help="Realização do impulso",
        )

    def sobrescritas(self, options: dict) -> dict:
        sobrescritas = {}
        if options.get('steps') is not None:
            sobrescritas.setdefault('sim', {})['steps'] = options['steps']
        if options.get('perturb') is not None:
            sobrescritas.setdefault('sim', {})['perturb'] = options['perturb']
        if options.get('impulse_mode'):
            sobrescritas['controller'] = {'mode': options['impulse_mode']}
        return sobrescritas

    def executar(self, configuracao: ConfiguracaoExecucao, diretorio: Path, **options) -> None:
        """Run, write outputs (partial ones on failure) and report the summary."""
        execucao = RotinaMarcha.executar(configuracao)
        resultado = execucao.resultado
        n = configuracao.bipede.n

        ConstrutorRelatorio.gravar_trajetoria(diretorio / ARQUIVO_TRAJETORIA, resultado.trajetoria, n)
        ConstrutorRelatorio.gravar_passos(diretorio / ARQUIVO_PASSOS, resultado.registros, n)
        linhas = ConstrutorRelatorio.linhas_resumo(ServicoSimulacao.resumir(resultado))
        (diretorio / ARQUIVO_RESUMO).write_text("\n".join(linhas) + "\n", encoding='utf-8')

        self.stdout.write(self.style.SUCCESS('=== SIMULAÇÃO ===\n'))
        self.escrever_linhas(linhas)
        if resultado.falha:
            raise CommandError(f"Execução parcial: {resultado.falha}", returncode=CODIGO_SAIDA_FALHA_PASSO)
        self.stdout.write(self.style.SUCCESS(f'\nSaídas gravadas em {diretorio}'))
