"""
Management command to compute the fixed point, the linearized Poincaré map and the ICPM gain.
"""
from pathlib import Path

from marcha_app.core.configuracao import ConfiguracaoExecucao
from marcha_app.management.commands._comum import ComandoMarcha
from marcha_app.services.construtor_relatorio import ConstrutorRelatorio
from marcha_app.services.servico_icpm import ServicoIcpm
from marcha_app.services.servico_rotina_marcha import RotinaMarcha


class Command(ComandoMarcha):
    """Command to synthesize the impulse feedback."""

    help = "Calcula z*, A, B e K do ICPM e relata os autovalores de malha aberta e fechada."

    def executar(self, configuracao: ConfiguracaoExecucao, diretorio: Path, **options) -> None:
        """Export the matrices and print the eigenvalue report."""
        preparo = RotinaMarcha.preparar(configuracao)
        controlador = RotinaMarcha.estabilizar(configuracao, preparo)
        ServicoIcpm.exportar_matrizes(controlador, diretorio)

        posto = ServicoIcpm.posto_controlabilidade(controlador.a, controlador.b)
        self.stdout.write(self.style.SUCCESS('=== ESTABILIZAÇÃO ICPM ===\n'))
        self.stdout.write(f"Seção: q2* = {controlador.secao.q2_estrela:.6f}")
        self.escrever_linhas(ConstrutorRelatorio.linhas_autovalores(controlador, posto))
        self.stdout.write(self.style.SUCCESS(f'\nMatrizes gravadas em {diretorio}'))
