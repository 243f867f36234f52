"""
Serviço de rotina da marcha.
Orquestra o pipeline: parâmetros de VHC -> órbita -> ponto fixo -> controlador -> simulação.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from marcha_app.core.configuracao import ConfiguracaoExecucao
from marcha_app.core.constantes import ModoImpulso
from marcha_app.core.utilitarios import registrar_evento
from marcha_app.dominio import (
    ContextoMarcha,
    ControladorIcpm,
    DefinicaoMarcha,
    Orbita,
    ResultadoMarcha,
    ResultadoResolucaoVhc,
)
from marcha_app.services.servico_dinamica_zero import ServicoDinamicaZero
from marcha_app.services.servico_icpm import ServicoIcpm
from marcha_app.services.servico_simulacao import ServicoSimulacao
from marcha_app.services.servico_vhc import ServicoVhc

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PreparoMarcha:
    """Artefatos do pipeline até a órbita alvo."""
    marcha: DefinicaoMarcha
    resolucao: Optional[ResultadoResolucaoVhc]
    orbita: Orbita
    contexto: ContextoMarcha


@dataclass(frozen=True, eq=False)
class ExecucaoMarcha:
    """Resultado de uma execução completa."""
    preparo: PreparoMarcha
    ponto_fixo: np.ndarray
    controlador: Optional[ControladorIcpm]
    resultado: ResultadoMarcha


class RotinaMarcha:
    """Serviço para montar e executar o pipeline completo a partir da configuração."""

    @staticmethod
    def preparar_marcha(configuracao: ConfiguracaoExecucao):
        """
        Monta a definição da marcha, refinando os parâmetros se configurado.

        Returns:
            Tupla de (DefinicaoMarcha, ResultadoResolucaoVhc ou None)

        Raises:
            ExcecaoMarchaInviavel: Refinamento sem solução
            ExcecaoVhcIrregular: VHC não regular no intervalo de operação
        """
        resolucao = None
        parametros = configuracao.vhc
        if configuracao.refinar:
            resolucao = ServicoVhc.resolver_parametros(
                parametros, configuracao.bipede, configuracao.livres, margem=configuracao.margem
            )
            parametros = resolucao.parametros

        marcha = ServicoVhc.construir_marcha(parametros)
        ServicoVhc.verificar_regularidade(marcha, configuracao.bipede, configuracao.intervalo)
        return marcha, resolucao

    @staticmethod
    def construir_contexto(configuracao: ConfiguracaoExecucao, marcha: DefinicaoMarcha) -> ContextoMarcha:
        """Agrupa o que cada passo precisa."""
        return ContextoMarcha(
            bipede=configuracao.bipede,
            marcha=marcha,
            ganhos=configuracao.ganhos,
            alto_ganho=configuracao.alto_ganho,
            secao=configuracao.secao,
            intervalo=configuracao.intervalo,
            simulacao=configuracao.simulacao,
        )

    @staticmethod
    def preparar(configuracao: ConfiguracaoExecucao) -> PreparoMarcha:
        """
        Executa o pipeline até a órbita alvo.

        Returns:
            PreparoMarcha com marcha, órbita e contexto
        """
        registrar_evento("info", "Preparando marcha")

        # Passo 1: Parâmetros de VHC e regularidade
        marcha, resolucao = RotinaMarcha.preparar_marcha(configuracao)

        # Passo 2: Dinâmica zero e órbita alvo
        dinamica_zero = ServicoDinamicaZero.construir_dinamica_zero(
            marcha, configuracao.bipede, configuracao.intervalo
        )
        orbita = ServicoDinamicaZero.construir_orbita(dinamica_zero, configuracao.ancora)

        return PreparoMarcha(
            marcha=marcha,
            resolucao=resolucao,
            orbita=orbita,
            contexto=RotinaMarcha.construir_contexto(configuracao, marcha),
        )

    @staticmethod
    def estabilizar(configuracao: ConfiguracaoExecucao, preparo: PreparoMarcha) -> ControladorIcpm:
        """Sintetiza o controlador ICPM para a seção configurada."""
        return ServicoIcpm.sintetizar_controlador(
            preparo.orbita,
            preparo.contexto,
            configuracao.peso_q,
            configuracao.peso_r,
            configuracao.delta_z,
            configuracao.delta_i,
            configuracao.processos,
        )

    @staticmethod
    def executar(configuracao: ConfiguracaoExecucao) -> ExecucaoMarcha:
        """
        Executa o pipeline completo e a simulação de N passos.

        Raises:
            FalhaPasso: Se o primeiro passo falhar
        """
        simulacao = configuracao.simulacao

        # Passo 1: Marcha e órbita
        preparo = RotinaMarcha.preparar(configuracao)

        # Passo 2: Ponto fixo e controlador
        controlador = None
        if simulacao.icpm_ativo:
            controlador = RotinaMarcha.estabilizar(configuracao, preparo)
            ponto_fixo = controlador.z_estrela
        else:
            ponto_fixo = ServicoIcpm.encontrar_ponto_fixo(preparo.orbita, preparo.contexto)

        # Passo 3: Estado inicial (z* perturbado pela semente da configuração)
        estado_inicial = ServicoSimulacao.perturbar_ponto_fixo(
            preparo.contexto, ponto_fixo, simulacao.perturbacao, simulacao.semente
        )

        # Passo 4: Simulação
        registrar_evento(
            "info",
            f"Simulando {simulacao.numero_passos} passos",
            modo=simulacao.modo_impulso.value,
            icpm=simulacao.icpm_ativo,
            perturbacao=simulacao.perturbacao
        )
        resultado = ServicoSimulacao.executar_marcha(
            preparo.contexto,
            ponto_fixo,
            estado_inicial,
            simulacao.numero_passos,
            controlador,
            ModoImpulso(simulacao.modo_impulso),
        )
        registrar_evento("info", "Simulação concluída", resumo=ServicoSimulacao.resumir(resultado))
        return ExecucaoMarcha(
            preparo=preparo, ponto_fixo=ponto_fixo, controlador=controlador, resultado=resultado
        )
