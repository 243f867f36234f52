"""
Serviço de controle - Imposição da VHC e realizações da entrada impulsiva.

O controle contínuo lineariza entrada-saída a saída rho = q1 - Phi(q2), de modo que
ddrho = -kd drho - kp rho. O impulso é aplicado como salto ideal ou por alto ganho.
"""
import logging
from typing import Tuple

import numpy as np
from scipy.integrate import solve_ivp

from marcha_app.core.constantes import (
    CONDICAO_MAXIMA,
    FATOR_TEMPO_ALTO_GANHO,
    PASSO_MAXIMO_ALTO_GANHO_FATOR,
)
from marcha_app.core.excecoes import (
    ExcecaoAltoGanhoEstagnado,
    ExcecaoControladorIndefinido,
    ExcecaoNumerica,
)
from marcha_app.core.utilitarios import registrar_evento
from marcha_app.core.validadores import validar_dimensao
from marcha_app.dominio import (
    ConfigAltoGanho,
    DefinicaoMarcha,
    Estado,
    GanhosContinuos,
    ParametrosBipede,
    TrechoBalanco,
)
from marcha_app.services.servico_hibrido import ServicoHibrido
from marcha_app.services.servico_modelo import ServicoModelo
from marcha_app.services.servico_vhc import ServicoVhc

logger = logging.getLogger(__name__)


class ServicoControle:
    """Serviço para o controle contínuo e os impulsos nas juntas."""

    @staticmethod
    def _acoplamento(bipede: ParametrosBipede, q: np.ndarray, dq: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Returns:
            (ddq_livre, matriz_entrada) com ddq = ddq_livre + matriz_entrada u
        """
        n = bipede.n
        matriz = ServicoModelo.matriz_massa(bipede, q)
        lado_direito = np.column_stack([-ServicoModelo.forcas_bias(bipede, q, dq), np.eye(n)[:, :n - 1]])
        try:
            solucao = np.linalg.solve(matriz, lado_direito)
        except np.linalg.LinAlgError as e:
            raise ExcecaoNumerica(f"Matriz de massa singular: {e}") from e
        return solucao[:, 0], solucao[:, 1:]

    @staticmethod
    def _decompor(
        marcha: DefinicaoMarcha,
        bipede: ParametrosBipede,
        ganhos: GanhosContinuos,
        q: np.ndarray,
        dq: np.ndarray
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Calcula u_c junto com a aceleração livre e a matriz de entrada.

        Returns:
            (u, ddq_livre, matriz_entrada) com ddq = ddq_livre + matriz_entrada u
        """
        n = bipede.n
        aceleracao_livre, matriz_entrada = ServicoControle._acoplamento(bipede, q, dq)

        q2, dq2 = q[-1], dq[-1]
        phi_linha = ServicoVhc.phi_linha(marcha, q2)
        estado = Estado.de_coordenadas(q, dq)
        rho, drho = ServicoVhc.residuo_variedade(marcha, estado)

        selecao = np.column_stack([np.eye(n - 1), -phi_linha])
        desacoplamento = selecao @ matriz_entrada
        deriva = selecao @ aceleracao_livre - ServicoVhc.phi_duas_linhas(marcha, q2) * dq2 ** 2

        if not np.all(np.isfinite(desacoplamento)) or np.linalg.cond(desacoplamento) > CONDICAO_MAXIMA:
            registrar_evento("error", "Matriz de desacoplamento singular", logger, q=q)
            raise ExcecaoControladorIndefinido(f"Controlador indefinido em q2 = {q2:.6f}")

        u = np.linalg.solve(desacoplamento, -ganhos.kd @ drho - ganhos.kp @ rho - deriva)
        return u, aceleracao_livre, matriz_entrada

    @staticmethod
    def controle_continuo(
        marcha: DefinicaoMarcha,
        bipede: ParametrosBipede,
        ganhos: GanhosContinuos,
        estado: Estado
    ) -> np.ndarray:
        """
        Torque u_c que impõe a VHC.

        Args:
            marcha: Definição da marcha
            bipede: Parâmetros físicos
            ganhos: Ganhos kp e kd
            estado: Estado atual

        Returns:
            Torques nas n-1 juntas atuadas

        Raises:
            ExcecaoControladorIndefinido: Se a matriz de desacoplamento for singular
        """
        u, _, _ = ServicoControle._decompor(marcha, bipede, ganhos, estado.q, estado.dq)
        return u

    @staticmethod
    def dinamica_malha_fechada(
        marcha: DefinicaoMarcha,
        bipede: ParametrosBipede,
        ganhos: GanhosContinuos,
        x: np.ndarray
    ) -> np.ndarray:
        """Campo vetorial da fase de balanço sob u_c."""
        n = bipede.n
        q, dq = x[:n], x[n:]
        u, aceleracao_livre, matriz_entrada = ServicoControle._decompor(marcha, bipede, ganhos, q, dq)
        return np.concatenate([dq, aceleracao_livre + matriz_entrada @ u])

    @staticmethod
    def aplicar_impulso_ideal(bipede: ParametrosBipede, estado: Estado, impulso: np.ndarray) -> Estado:
        """Salto ideal de velocidades; delega ao mapa híbrido."""
        return ServicoHibrido.aplicar_salto_impulsivo(bipede, estado, impulso)

    @staticmethod
    def aplicar_impulso_alto_ganho(
        bipede: ParametrosBipede,
        config: ConfigAltoGanho,
        estado: Estado,
        alvo_dq1: np.ndarray,
        rtol: float = 1e-10,
        atol: float = 1e-12,
        tempo_inicial: float = 0.0
    ) -> TrechoBalanco:
        """
        Realiza o impulso por realimentação de alto ganho.

        O torque é escolhido pelas linhas atuadas de M^-1 para que
        ddq1 = -(1/mu) Lambda (dq1 - alvo) exatamente. Integra até
        ||dq1 - alvo|| < tolerância de parada.

        Args:
            bipede: Parâmetros físicos
            config: Lambda, mu e tolerância de parada
            estado: Estado antes do impulso
            alvo_dq1: Velocidades atuadas desejadas
            rtol: Tolerância relativa do integrador
            atol: Tolerância absoluta do integrador
            tempo_inicial: Instante de início (s)

        Returns:
            Trecho integrado; estado_final é o estado após o impulso

        Raises:
            ExcecaoAltoGanhoEstagnado: Se não convergir em 100 mu |ln tol|
        """
        n = bipede.n
        alvo_dq1 = validar_dimensao(alvo_dq1, n - 1, "alvo_dq1")
        tolerancia = config.tolerancia_parada

        def erro(t: float, x: np.ndarray) -> float:
            return float(np.linalg.norm(x[n:2 * n - 1] - alvo_dq1)) - tolerancia

        x0 = estado.como_vetor()
        if erro(tempo_inicial, x0) < 0:
            return TrechoBalanco(
                tempos=np.array([tempo_inicial]),
                estados=x0[:, None],
                tempo_final=tempo_inicial,
                estado_final=estado,
                evento='impulso',
            )

        erro.terminal = True
        erro.direction = -1
        ganho = config.lambda_ / config.mu
        limite = FATOR_TEMPO_ALTO_GANHO * config.mu * abs(np.log(tolerancia))

        def campo(t: float, x: np.ndarray) -> np.ndarray:
            q, dq = x[:n], x[n:]
            aceleracao_livre, matriz_entrada = ServicoControle._acoplamento(bipede, q, dq)
            # u tal que ddq1 = -(1/mu) Lambda (dq1 - alvo), sem erro estacionário pela gravidade
            desejada = -ganho @ (dq[:n - 1] - alvo_dq1)
            u = np.linalg.solve(matriz_entrada[:n - 1], desejada - aceleracao_livre[:n - 1])
            return np.concatenate([dq, aceleracao_livre + matriz_entrada @ u])

        solucao = solve_ivp(
            campo,
            (tempo_inicial, tempo_inicial + limite),
            x0,
            method='Radau',
            rtol=rtol,
            atol=atol,
            max_step=PASSO_MAXIMO_ALTO_GANHO_FATOR * config.mu,
            events=erro,
            dense_output=True,
        )
        if solucao.status != 1:
            registrar_evento(
                "error", "Impulso de alto ganho estagnado", logger, status=solucao.status, limite=limite
            )
            raise ExcecaoAltoGanhoEstagnado(
                f"Alto ganho não convergiu em {limite:.4g} s: {solucao.message}"
            )

        return TrechoBalanco(
            tempos=solucao.t,
            estados=solucao.y,
            tempo_final=float(solucao.t[-1]),
            estado_final=Estado.de_vetor(solucao.y[:, -1]),
            evento='impulso',
            interpolador=solucao.sol,
        )
