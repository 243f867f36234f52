"""
Shared, cached fixtures for the gait tests.

The pipeline stages are expensive (quadratures, swings, the linearized map), so each
one is computed once per test process.
"""
from functools import lru_cache

from marcha_app.core.configuracao import ConfiguracaoExecucao, carregar_configuracao
from marcha_app.dominio import ContextoMarcha, ControladorIcpm, DefinicaoMarcha
from marcha_app.services.servico_icpm import ServicoIcpm
from marcha_app.services.servico_rotina_marcha import PreparoMarcha, RotinaMarcha
from marcha_app.services.servico_vhc import ServicoVhc


@lru_cache(maxsize=None)
def configuracao_padrao() -> ConfiguracaoExecucao:
    return carregar_configuracao()


@lru_cache(maxsize=None)
def marcha_tabela() -> DefinicaoMarcha:
    """Gait built from the rounded default parameters, without refinement."""
    return ServicoVhc.construir_marcha(configuracao_padrao().vhc)


@lru_cache(maxsize=None)
def marcha_refinada() -> DefinicaoMarcha:
    marcha, _ = RotinaMarcha.preparar_marcha(configuracao_padrao())
    return marcha


@lru_cache(maxsize=None)
def preparo_padrao() -> PreparoMarcha:
    return RotinaMarcha.preparar(configuracao_padrao())


def contexto_padrao() -> ContextoMarcha:
    return preparo_padrao().contexto


@lru_cache(maxsize=None)
def ponto_fixo_padrao():
    preparo = preparo_padrao()
    return ServicoIcpm.encontrar_ponto_fixo(preparo.orbita, preparo.contexto)


@lru_cache(maxsize=None)
def controlador_padrao() -> ControladorIcpm:
    return RotinaMarcha.estabilizar(configuracao_padrao(), preparo_padrao())
