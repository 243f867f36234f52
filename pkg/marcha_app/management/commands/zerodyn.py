"""
Management command to tabulate the zero dynamics and check orbit feasibility.
"""
from pathlib import Path

from marcha_app.core.configuracao import ConfiguracaoExecucao
from marcha_app.core.constantes import ARQUIVO_DINAMICA_ZERO, ARQUIVO_ORBITA_ALVO, FORMATO_CSV
from marcha_app.core.utilitarios import salvar_csv
from marcha_app.management.commands._comum import ComandoMarcha
from marcha_app.services.construtor_relatorio import ConstrutorRelatorio
from marcha_app.services.servico_dinamica_zero import ServicoDinamicaZero
from marcha_app.services.servico_rotina_marcha import RotinaMarcha

CABECALHO_DINAMICA_ZERO = ['q2', 'alpha1', 'alpha2', 'Psi', 'P']
CABECALHO_ORBITA = ['q2', 'dq2']


class Command(ComandoMarcha):
    """Command to write the zero-dynamics table and the target orbit."""

    help = "Tabela alpha1, alpha2, Psi e P da dinâmica zero e veredito de viabilidade da órbita."

    def executar(self, configuracao: ConfiguracaoExecucao, diretorio: Path, **options) -> None:
        """Write the tables, then report c*, the potential extrema and the energy audit."""
        marcha, _ = RotinaMarcha.preparar_marcha(configuracao)
        dinamica_zero = ServicoDinamicaZero.construir_dinamica_zero(
            marcha, configuracao.bipede, configuracao.intervalo
        )
        salvar_csv(
            diretorio / ARQUIVO_DINAMICA_ZERO,
            CABECALHO_DINAMICA_ZERO,
            ServicoDinamicaZero.amostrar(dinamica_zero),
            FORMATO_CSV,
        )

        orbita = ServicoDinamicaZero.construir_orbita(dinamica_zero, configuracao.ancora)
        salvar_csv(
            diretorio / ARQUIVO_ORBITA_ALVO,
            CABECALHO_ORBITA,
            ServicoDinamicaZero.amostrar_orbita(orbita),
            FORMATO_CSV,
        )

        self.stdout.write(self.style.SUCCESS('=== DINÂMICA ZERO ===\n'))
        self.stdout.write(f"Âncora: q2 = {orbita.ancora[0]:.6f}, dq2 = {orbita.ancora[1]:.6f}")
        self.stdout.write(f"c* = {orbita.c_estrela:.8g}")
        self.stdout.write(f"P_min = {orbita.potencial_min:.8g}, P_max = {orbita.potencial_max:.8g}")
        self.stdout.write('')
        self.escrever_linhas(
            ConstrutorRelatorio.linhas_verificacoes(ServicoDinamicaZero.verificar_conservacao_energia(orbita))
        )
        self.stdout.write(self.style.SUCCESS('\nÓrbita viável: c* > P_max.'))
