"""
Base shared by the gait management commands.
Loads the run configuration, prepares the output directory and maps domain errors to exit codes.
"""
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from marcha_app.core.configuracao import (
    ConfiguracaoExecucao,
    carregar_configuracao,
    emitir_configuracao,
    substituir_valores,
)
from marcha_app.core.constantes import (
    ARQUIVO_CONFIG_EFETIVA,
    CODIGO_SAIDA_FALHA_PASSO,
    CODIGO_SAIDA_NUMERICA,
    CODIGO_SAIDA_VALIDACAO,
)
from marcha_app.core.excecoes import (
    ExcecaoContatoAmbiguo,
    ExcecaoMarcha,
    ExcecaoNumerica,
    FalhaPasso,
)

logger = logging.getLogger(__name__)


def codigo_saida(erro: ExcecaoMarcha) -> int:
    """Exit code for a domain error."""
    if isinstance(erro, (FalhaPasso, ExcecaoContatoAmbiguo)):
        return CODIGO_SAIDA_FALHA_PASSO
    if isinstance(erro, ExcecaoNumerica):
        return CODIGO_SAIDA_NUMERICA
    return CODIGO_SAIDA_VALIDACAO


class ComandoMarcha(BaseCommand):
    """Base command: --config and --out handling plus error mapping."""

    def add_arguments(self, parser) -> None:
        parser.add_argument('--config', dest='config', default=None, help="Arquivo INI de configuração")
        parser.add_argument('--out', dest='out', default=None, help="Diretório de saída")

    def handle(self, *args, **options) -> None:
        """Load the configuration and run the command body."""
        try:
            configuracao = carregar_configuracao(options.get('config'))
            sobrescritas = self.sobrescritas(options)
            if options.get('out'):
                sobrescritas.setdefault('output', {})['dir'] = options['out']
            if sobrescritas:
                configuracao = substituir_valores(configuracao, **sobrescritas)
            diretorio = self._preparar_diretorio(configuracao)
            self.executar(configuracao, diretorio, **options)
        except ExcecaoMarcha as e:
            logger.error(f"{type(e).__name__}: {e}")
            raise CommandError(str(e), returncode=codigo_saida(e)) from e

    def sobrescritas(self, options: dict) -> dict:
        """Per-command overrides of configuration keys, by section."""
        return {}

    def executar(self, configuracao: ConfiguracaoExecucao, diretorio: Path, **options) -> None:
        raise NotImplementedError

    def _preparar_diretorio(self, configuracao: ConfiguracaoExecucao) -> Path:
        """Create the output directory and write the effective configuration into it."""
        diretorio = configuracao.diretorio_saida
        diretorio.mkdir(parents=True, exist_ok=True)
        (diretorio / ARQUIVO_CONFIG_EFETIVA).write_text(emitir_configuracao(configuracao), encoding='utf-8')
        return diretorio

    def escrever_linhas(self, linhas) -> None:
        for linha in linhas:
            self.stdout.write(linha)
