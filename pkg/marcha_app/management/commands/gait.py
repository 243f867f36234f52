"""
Management command to check or solve the VHC gait parameters.
"""
from pathlib import Path

from marcha_app.core.configuracao import ConfiguracaoExecucao, emitir_marcha
from marcha_app.core.constantes import ARQUIVO_MARCHA
from marcha_app.core.utilitarios import registrar_evento
from marcha_app.dominio import ParametrosVhc
from marcha_app.management.commands._comum import ComandoMarcha
from marcha_app.services.construtor_relatorio import ConstrutorRelatorio
from marcha_app.services.servico_vhc import ServicoVhc


class Command(ComandoMarcha):
    """Command to evaluate or solve the energy-conserving gait constraints."""

    help = "Avalia (check) ou resolve (solve) os parâmetros das VHCs da marcha conservativa."

    def add_arguments(self, parser) -> None:
        parser.add_argument('acao', choices=['check', 'solve'], help="check: resíduos; solve: resolve os parâmetros livres")
        super().add_arguments(parser)

    def executar(self, configuracao: ConfiguracaoExecucao, diretorio: Path, **options) -> None:
        """Dispatch to check or solve."""
        if configuracao.vhc.theta1_i == 0.0:
            registrar_evento("warning", "theta1_i = 0: marcha trivial")
            self.stdout.write(self.style.WARNING('Aviso: theta1_i = 0 produz uma marcha trivial.'))

        if options['acao'] == 'check':
            self._verificar(configuracao, configuracao.vhc)
        else:
            self._resolver(configuracao, diretorio)

    def _verificar(self, configuracao: ConfiguracaoExecucao, parametros: ParametrosVhc) -> None:
        """Print Phi, constraint residuals and the regularity minimum."""
        marcha = ServicoVhc.construir_marcha(parametros)
        residuos = ServicoVhc.residuos_restricoes(parametros, configuracao.bipede)
        minimo = ServicoVhc.verificar_regularidade(marcha, configuracao.bipede, configuracao.intervalo)

        self.stdout.write(self.style.SUCCESS('=== MARCHA ===\n'))
        self.escrever_linhas(ConstrutorRelatorio.linhas_phi(marcha.inclinacao, marcha.deslocamento, marcha.termos))
        self.stdout.write('')
        self.escrever_linhas(ConstrutorRelatorio.linhas_residuos(residuos, minimo))
        self.stdout.write(self.style.SUCCESS('\nVHC regular no intervalo de operação.'))

    def _resolver(self, configuracao: ConfiguracaoExecucao, diretorio: Path) -> None:
        """Solve the free parameters and write the gait file."""
        resolucao = ServicoVhc.resolver_parametros(
            configuracao.vhc, configuracao.bipede, configuracao.livres, margem=configuracao.margem
        )
        caminho = diretorio / ARQUIVO_MARCHA
        caminho.write_text(emitir_marcha(resolucao.parametros), encoding='utf-8')

        self.stdout.write(
            self.style.SUCCESS(f'Parâmetros resolvidos em {resolucao.avaliacoes} avaliações ({", ".join(resolucao.livres)})')
        )
        for nome in resolucao.livres:
            self.stdout.write(f"  {nome} = {resolucao.parametros.como_dicionario()[nome]:.10f}")
        self._verificar(configuracao, resolucao.parametros)
        self.stdout.write(self.style.SUCCESS(f'Arquivo de marcha gravado em {caminho}'))
